// Copyright 2026 The QMLC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qmlc/cli/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "qmlc/circuit/circuit_text.hpp"
#include "qmlc/circuit/token_grid.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"
#include "qmlc/device/stabilizer.hpp"
#include "qmlc/label/transforms.hpp"
#include "qmlc/nn/optim.hpp"

namespace qmlc::cli {

std::uint64_t stream_seed(const RunConfig& cfg, SeedStream s) {
  return split_seed(cfg.seed, static_cast<std::uint64_t>(s));
}

device::DatasetConfig dataset_config(const RunConfig& cfg) {
  device::DatasetConfig d;
  d.num_qubits = cfg.num_qubits;
  for (const auto& g : cfg.data.germs) d.germs.push_back(circuit::parse_circuit(g));
  d.powers = cfg.data.powers;
  d.max_depth = cfg.depth;
  d.shots = cfg.data.shots;
  d.noise = device::NoiseModel::preset(cfg.noise, cfg.num_qubits);
  d.seed = stream_seed(cfg, SeedStream::Data);
  return d;
}

curriculum::GroupingConfig grouping_config(const RunConfig& cfg) {
  curriculum::GroupingConfig g;
  g.set_size = cfg.curriculum.set_size;
  g.tau = cfg.curriculum.tau;
  g.max_usage = cfg.curriculum.max_usage;
  g.extra_sets = cfg.curriculum.extra_sets;
  g.diversity_candidates = cfg.curriculum.diversity_candidates;
  g.seed = stream_seed(cfg, SeedStream::Grouping);
  return g;
}

namespace {

encoder::EncoderConfig encoder_config(const RunConfig& cfg) {
  encoder::EncoderConfig e;
  e.num_qubits = cfg.num_qubits;
  e.depth = cfg.depth;
  e.d_gate = cfg.gate_width();
  e.d_model = cfg.encoder.d_model;
  e.layers = cfg.encoder.layers;
  e.heads = cfg.encoder.heads;
  e.inducing = cfg.encoder.inducing;
  e.seeds = cfg.encoder.seeds;
  e.ff_hidden = cfg.encoder.ff_hidden;
  return e;
}

label::TransformConfig transform_config(const RunConfig& cfg) {
  return {label::transform_from_name(cfg.label.transform), cfg.label.eps, cfg.label.bands};
}

}  // namespace

ModelBundle::ModelBundle(const RunConfig& config)
    : cfg(config),
      vocab(circuit::GateVocab::from_names(config.vocab)),
      embedding(circuit::make_orthonormal_embedding(static_cast<int>(config.vocab.size()), config.gate_width(),
                                                    stream_seed(config, SeedStream::Embedding))),
      labels(config.d_circuit(), 1 << config.num_qubits, config.encoder.d_model, config.label.hidden,
             config.label.depth, transform_config(config), stream_seed(config, SeedStream::Labels)),
      encoder(encoder_config(config), embedding.row(vocab.pad_token()).transpose(),
              stream_seed(config, SeedStream::Encoder)),
      gcd({config.encoder.seeds * config.encoder.d_model, config.gcd.hidden, config.gcd.depth, config.gcd.time_bands},
          stream_seed(config, SeedStream::Gcd)),
      ctd({config.num_qubits, config.depth, config.gate_width(), config.encoder.d_model,
           config.encoder.seeds * config.encoder.d_model, config.ctd.layers, config.ctd.heads, config.ctd.hidden,
           config.ctd.time_bands},
          stream_seed(config, SeedStream::Ctd)),
      decoder(embedding) {}

diffusion::NoiseSchedule ModelBundle::schedule() const { return {cfg.schedule.gamma_min, cfg.schedule.gamma_max}; }

device::NoiseModel ModelBundle::noise() const { return device::NoiseModel::preset(cfg.noise, cfg.num_qubits); }

circuit::GridEmbedding ModelBundle::pad_grid() const {
  return circuit::embed_grid(circuit::TokenGrid(cfg.num_qubits, cfg.depth, vocab.pad_token()), embedding);
}

circuit::GridEmbedding ModelBundle::embed(const circuit::Circuit& c) const {
  return circuit::embed_grid(circuit::tokenize_circuit(c, vocab, cfg.depth), embedding);
}

nn::StateDict ModelBundle::state() {
  nn::StateDict s;
  auto add = [&](nn::Module& m, const std::string& prefix) {
    for (auto& [k, v] : nn::state_dict(m, prefix)) s[k] = v;
  };
  add(labels, "label.");
  add(encoder, "encoder.");
  add(gcd, "gcd.");
  add(ctd, "ctd.");
  add(decoder, "decoder.");
  return s;
}

void ModelBundle::load(const nn::StateDict& s) {
  nn::load_state_dict(labels, s, "label.");
  nn::load_state_dict(encoder, s, "encoder.");
  nn::load_state_dict(gcd, s, "gcd.");
  nn::load_state_dict(ctd, s, "ctd.");
  nn::load_state_dict(decoder, s, "decoder.");
}

std::vector<nn::Var> ModelBundle::joint_parameters() {
  std::vector<nn::Var> out = encoder.parameters();
  for (auto& p : gcd.parameters()) out.push_back(p);
  for (auto& p : ctd.parameters()) out.push_back(p);
  return out;
}

synth::SynthesisModels ModelBundle::synthesis_models() const {
  synth::SamplingConfig sc;
  sc.gcd_steps = cfg.sampling.gcd_steps;
  sc.ctd_steps = cfg.sampling.ctd_steps;
  sc.clip = cfg.sampling.clip > 0.0 ? std::optional<double>(cfg.sampling.clip) : std::nullopt;
  sc.mode = cfg.sampling.mode == "sample" ? synth::DecodeMode::Sample : synth::DecodeMode::Argmax;
  sc.label_state_condition = cfg.training.label_state_condition;
  return {vocab, embedding, labels, encoder, gcd, ctd, decoder, schedule(), sc, cfg.num_qubits, cfg.depth};
}

namespace {

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T take(std::istream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError("checkpoint '" + path + "' is truncated");
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint '" + path + "'");
    out.write(kCheckpointMagic, sizeof kCheckpointMagic);
    put(out, kCheckpointVersion);
    nlohmann::json meta;
    meta["config_hash"] = ckpt.meta.config_hash;
    meta["config"] = ckpt.meta.config;
    meta["step"] = ckpt.meta.step;
    meta["labels_trained"] = ckpt.meta.labels_trained;
    meta["decoder_trained"] = ckpt.meta.decoder_trained;
    const std::string text = meta.dump();
    put(out, static_cast<std::uint64_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    put(out, static_cast<std::uint64_t>(ckpt.tensors.size()));
    for (const auto& [name, m] : ckpt.tensors) {
      put(out, static_cast<std::uint32_t>(name.size()));
      out.write(name.data(), static_cast<std::streamsize>(name.size()));
      put(out, static_cast<std::int64_t>(m.rows()));
      put(out, static_cast<std::int64_t>(m.cols()));
      out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    }
    if (!out) throw IoError("failed writing checkpoint '" + path + "'");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  char magic[sizeof kCheckpointMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw IoError("'" + path + "' is not a qmlc checkpoint");
  }
  const auto version = take<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  const auto meta_len = take<std::uint64_t>(in, path);
  std::string text(meta_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(meta_len))) throw IoError("checkpoint metadata truncated");
  Checkpoint ckpt;
  try {
    const auto meta = nlohmann::json::parse(text);
    ckpt.meta.config_hash = meta.at("config_hash").get<std::string>();
    ckpt.meta.config = meta.at("config");
    ckpt.meta.step = meta.at("step").get<long long>();
    ckpt.meta.labels_trained = meta.at("labels_trained").get<bool>();
    ckpt.meta.decoder_trained = meta.at("decoder_trained").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("checkpoint metadata is malformed: ") + e.what());
  }
  const auto count = take<std::uint64_t>(in, path);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = take<std::uint32_t>(in, path);
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw IoError("checkpoint tensor name truncated");
    const auto rows = take<std::int64_t>(in, path);
    const auto cols = take<std::int64_t>(in, path);
    if (rows < 0 || cols < 0) throw IoError("checkpoint tensor '" + name + "' has a negative shape");
    nn::Matrix m(rows, cols);
    if (!in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)))) {
      throw IoError("checkpoint tensor '" + name + "' truncated");
    }
    ckpt.tensors.emplace(std::move(name), std::move(m));
  }
  return ckpt;
}

void check_checkpoint_hash(const Checkpoint& ckpt, const RunConfig& cfg, bool force) {
  if (ckpt.meta.config_hash != cfg.hash() && !force) {
    throw ValidationError("checkpoint config hash " + ckpt.meta.config_hash + " does not match config hash " +
                          cfg.hash() + " (use --force to load anyway)");
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

struct PreparedRecord {
  encoder::EncoderInput input;
  RealVector x0;
  label::LabelCondition cond;
};

void emit(const TrainOptions& opts, TrainSummary& summary, const std::string& line) {
  summary.stage_events.push_back(line);
  if (opts.log) *opts.log << line << '\n';
}

Checkpoint snapshot(ModelBundle& models, long long step) {
  Checkpoint c;
  c.meta.config_hash = models.cfg.hash();
  c.meta.config = models.cfg.to_json();
  c.meta.step = step;
  c.meta.labels_trained = true;
  c.meta.decoder_trained = true;
  c.tensors = models.state();
  return c;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

TrainSummary train_pipeline(ModelBundle& models, const std::vector<device::GstRecord>& records,
                            const curriculum::CurriculumPlan& plan, const TrainOptions& opts) {
  const RunConfig& cfg = models.cfg;
  TrainSummary summary;
  if (records.empty()) throw TrainingError("training needs a non-empty dataset");
  for (const auto& r : records) {
    if (r.num_qubits() != cfg.num_qubits) throw ValidationError("dataset qubit count differs from config");
  }
  long long step = 0;
  bool labels_ready = false;
  bool decoder_ready = false;
  if (opts.resume) {
    models.load(opts.resume->tensors);
    step = opts.resume->meta.step;
    labels_ready = opts.resume->meta.labels_trained;
    decoder_ready = opts.resume->meta.decoder_trained;
    emit(opts, summary, "resumed at step " + std::to_string(step));
  }

  std::vector<circuit::GridEmbedding> grids;
  std::vector<circuit::TokenGrid> tokens;
  std::vector<RealVector> ys;
  for (const auto& r : records) {
    tokens.push_back(circuit::tokenize_circuit(r.circuit, models.vocab, cfg.depth));
    grids.push_back(circuit::embed_grid(tokens.back(), models.embedding));
    ys.push_back(label::normalize_counts(r.counts));
  }

  // Held-out labels for the consistency check.
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng = make_rng(stream_seed(cfg, SeedStream::LabelTraining), 1);
  std::shuffle(order.begin(), order.end(), split_rng);
  const auto n_held = static_cast<std::size_t>(cfg.label.heldout_fraction * static_cast<double>(records.size()));
  std::vector<label::LabelSample> train_samples;
  std::vector<RealVector> held;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t r = order[i];
    if (i < n_held) {
      held.push_back(ys[r]);
    } else {
      train_samples.push_back({grids[r].flattened().row(0).transpose(), ys[r]});
    }
  }
  if (!labels_ready) {
    label::LabelTrainConfig lc;
    lc.sigma = cfg.label.sigma;
    lc.stage1_epochs = cfg.label.stage1_epochs;
    lc.stage2_epochs = cfg.label.stage2_epochs;
    lc.batch = cfg.label.batch;
    lc.lr = cfg.label.lr;
    lc.seed = stream_seed(cfg, SeedStream::LabelTraining);
    summary.label_report = label::train_label_consistency(models.labels, train_samples, lc);
    emit(opts, summary,
         "label nets trained: stage1 loss " +
             fmt(summary.label_report.stage1_loss.empty() ? 0.0 : summary.label_report.stage1_loss.back()) +
             ", stage2 loss " +
             fmt(summary.label_report.stage2_loss.empty() ? 0.0 : summary.label_report.stage2_loss.back()));
  }
  for (const auto& y : held) {
    const RealVector yp = label::project_to_simplex(y);
    summary.heldout_consistency_short.push_back((models.labels.short_chain().reconstruct(yp) - yp).norm());
    summary.heldout_consistency_long.push_back((models.labels.long_chain().reconstruct(yp) - yp).norm());
  }
  if (!held.empty()) {
    emit(opts, summary,
         "held-out label consistency median: short " + fmt(median(summary.heldout_consistency_short)) + ", long " +
             fmt(median(summary.heldout_consistency_long)));
  }

  if (!decoder_ready) {
    synth::DecoderTrainConfig dc;
    dc.epochs = cfg.decoder.epochs;
    dc.noise = cfg.decoder.noise;
    dc.lr = cfg.decoder.lr;
    dc.seed = stream_seed(cfg, SeedStream::Decoder);
    const auto losses = synth::fine_tune_decoder(models.decoder, grids, tokens, dc);
    emit(opts, summary, "decoder fine-tuned: loss " + fmt(losses.empty() ? 0.0 : losses.back()));
  }

  std::vector<PreparedRecord> prepared;
  for (std::size_t i = 0; i < records.size(); ++i) {
    PreparedRecord p;
    p.cond = models.labels.condition(ys[i]);
    p.input = {grids[i], p.cond.h_short};
    p.x0 = grids[i].flattened().row(0).transpose();
    prepared.push_back(std::move(p));
  }

  const std::size_t stages = plan.stages.size();
  const long long per_stage = cfg.training.steps_per_stage;
  const long long total_steps = per_stage * static_cast<long long>(stages);
  const long long stop = opts.max_steps >= 0 ? std::min(total_steps, opts.max_steps) : total_steps;

  std::ofstream csv;
  if (!opts.loss_csv.empty()) {
    const bool fresh = !opts.resume || !std::filesystem::exists(opts.loss_csv);
    csv.open(opts.loss_csv, fresh ? std::ios::trunc : std::ios::app);
    if (!csv) throw IoError("cannot write loss curve '" + opts.loss_csv + "'");
    if (fresh) csv << "step,stage,total,gcd,ctd,grad_norm,lr,skipped,gated_out\n";
  }

  nn::AdamConfig ac;
  ac.lr = cfg.training.lr;
  ac.clip_norm = cfg.training.clip_norm;
  nn::Adam opt(models.joint_parameters(), ac);
  diffusion::JointModels jm{models.encoder, models.gcd, models.ctd, models.labels};
  diffusion::JointConfig jc;
  jc.lambda = cfg.training.lambda;
  jc.use_hvidl = cfg.training.use_hvidl;
  jc.hvidl = {cfg.training.kappa, cfg.training.sigma_delta};
  jc.label_state_condition = cfg.training.label_state_condition;
  const auto sched = models.schedule();
  const auto pad = models.pad_grid();

  int current_stage = -1;
  std::vector<const curriculum::MiniSet*> pool;
  while (step < stop) {
    const int stage = static_cast<int>(step / std::max<long long>(1, per_stage));
    if (stage != current_stage) {
      pool.clear();
      for (int s = 0; s <= stage; ++s) {
        for (const auto& set : plan.stages[static_cast<std::size_t>(s)]) pool.push_back(&set);
      }
      current_stage = stage;
      emit(opts, summary,
           "step " + std::to_string(step) + ": stage " + std::to_string(stage) + " (edge " +
               std::to_string(plan.edges[static_cast<std::size_t>(stage)]) + ", " +
               std::to_string(plan.stages[static_cast<std::size_t>(stage)].size()) + " new sets, " +
               std::to_string(pool.size()) + " in pool)");
    }
    if (pool.empty()) {
      step = std::min(stop, static_cast<long long>(stage + 1) * per_stage);
      continue;
    }
    Rng rng = make_rng(stream_seed(cfg, SeedStream::Training), static_cast<std::uint64_t>(step));
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::vector<diffusion::MinisetExample> batch;
    for (int b = 0; b < cfg.training.batch_sets; ++b) {
      const auto* set = pool[pick(rng)];
      diffusion::MinisetExample ex;
      for (auto id : set->record_ids) {
        ex.inputs.push_back(prepared.at(id).input);
        ex.x0.push_back(prepared.at(id).x0);
        ex.conds.push_back(prepared.at(id).cond);
      }
      batch.push_back(std::move(ex));
    }
    const auto rep = diffusion::joint_train_step(batch, jm, jc, opt, sched, rng, &pad);
    if (rep.skipped) emit(opts, summary, "step " + std::to_string(step) + ": non-finite loss, step skipped, lr halved");
    if (csv.is_open()) {
      csv << step << ',' << stage << ',' << fmt(rep.total) << ',' << fmt(rep.gcd) << ',' << fmt(rep.ctd) << ','
          << fmt(rep.grad_norm) << ',' << fmt(rep.lr) << ',' << (rep.skipped ? 1 : 0) << ',' << rep.gated_out << '\n';
    }
    summary.reports.push_back(rep);
    ++step;
    if (cfg.training.checkpoint_every > 0 && step % cfg.training.checkpoint_every == 0 &&
        !opts.checkpoint_out.empty()) {
      write_checkpoint(opts.checkpoint_out, snapshot(models, step));
    }
  }
  summary.steps = step;
  if (!opts.checkpoint_out.empty()) write_checkpoint(opts.checkpoint_out, snapshot(models, step));
  if (!opts.stage_log.empty()) {
    std::ofstream log(opts.stage_log, opts.resume ? std::ios::app : std::ios::trunc);
    for (const auto& e : summary.stage_events) log << e << '\n';
  }
  return summary;
}

std::vector<RealVector> reachable_distributions(int num_qubits, std::span<const circuit::GateKind> gates,
                                                std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  std::map<std::vector<long long>, RealVector> seen;
  for (int i = 0; i < 4000; ++i) {
    const auto c = circuit::random_circuit(num_qubits, 2 + i % 30, gates, rng);
    const auto p = device::ideal_clifford_distribution(c);
    seen.emplace(curriculum::distinctness_key(p, num_qubits), p);
  }
  std::vector<RealVector> out;
  for (auto& [k, v] : seen) out.push_back(v);
  return out;
}

std::vector<synth::SynthesisPrompt> reachable_prompts(const RunConfig& cfg) {
  const auto vocab = circuit::GateVocab::from_names(cfg.vocab);
  std::vector<std::string> gates;
  std::vector<circuit::GateKind> kinds;
  for (const auto& e : vocab.entries()) {
    if (e.role != circuit::TokenRole::Gate) continue;
    gates.push_back(e.name);
    kinds.push_back(e.kind);
  }
  std::vector<synth::SynthesisPrompt> out;
  for (const auto& p : reachable_distributions(cfg.num_qubits, kinds, stream_seed(cfg, SeedStream::Sampling))) {
    synth::SynthesisPrompt pr;
    pr.target = p;
    pr.gates = gates;
    pr.max_length = cfg.sampling.max_length > 0 ? cfg.sampling.max_length : cfg.depth;
    pr.threshold = cfg.sampling.threshold;
    pr.max_attempts = cfg.sampling.max_attempts;
    pr.test = cfg.sampling.acceptance == "chi2" ? synth::AcceptanceTest::ChiSquare : synth::AcceptanceTest::Tvd;
    out.push_back(std::move(pr));
  }
  return out;
}

}  // namespace qmlc::cli
