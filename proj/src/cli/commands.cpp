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

#include "qmlc/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"
#include "qmlc/circuit/circuit.hpp"
#include "qmlc/cli/pipeline.hpp"
#include "qmlc/cli/run_config.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"
#include "qmlc/curriculum/counting.hpp"
#include "qmlc/curriculum/grouping.hpp"
#include "qmlc/device/dataset.hpp"
#include "qmlc/device/stabilizer.hpp"
#include "qmlc/label/transforms.hpp"
#include "qmlc/oracles/oracles.hpp"
#include "qmlc/synth/synthesis.hpp"

namespace qmlc::cli {

namespace {

void require_option(const std::string& value, const char* flag) {
  if (value.empty()) throw ValidationError(std::string("missing required option ") + flag);
}

RunConfig config_with_seed(const CommandOptions& opts) {
  require_option(opts.config, "--config");
  RunConfig cfg = load_config(opts.config);
  if (opts.seed) cfg.seed = *opts.seed;
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

std::vector<device::GstRecord> load_records(const std::string& path) {
  auto in = open_in(path);
  return device::read_dataset(in);
}

// Config comes from the checkpoint; an explicit --config must match its hash.
RunConfig checkpoint_config(const CommandOptions& opts, const Checkpoint& ckpt) {
  RunConfig cfg;
  try {
    cfg = RunConfig::from_json(ckpt.meta.config);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("checkpoint config: ") + e.what());
  }
  if (!opts.config.empty()) {
    RunConfig given = load_config(opts.config);
    check_checkpoint_hash(ckpt, given, opts.force);
    if (opts.force) {
      // Only sampling settings are taken from the given config.
      cfg.sampling = given.sampling;
    }
  } else if (ckpt.meta.config_hash != cfg.hash() && !opts.force) {
    throw ValidationError("checkpoint config does not match its stored hash");
  }
  return cfg;
}

std::uint64_t sampling_seed(const CommandOptions& opts, const RunConfig& cfg) {
  return opts.seed ? *opts.seed : stream_seed(cfg, SeedStream::Sampling);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

int cmd_gen_data(const CommandOptions& opts, CommandStreams io) {
  const RunConfig cfg = config_with_seed(opts);
  require_option(opts.out, "--out");
  const auto dcfg = dataset_config(cfg);
  const auto data = device::generate_germ_dataset(dcfg);
  if (data.records.empty()) throw ValidationError("every germ repetition exceeds the depth budget");
  {
    auto out = open_out(opts.out);
    device::write_dataset(out, data.records);
  }
  nlohmann::ordered_json meta;
  meta["format"] = "qmlc-gst/1";
  meta["config_hash"] = cfg.hash();
  meta["seed"] = cfg.seed;
  meta["records"] = data.records.size();
  meta["germs"] = cfg.data.germs.size();
  meta["powers"] = cfg.data.powers;
  nlohmann::ordered_json skipped = nlohmann::ordered_json::array();
  for (const auto& w : data.warnings) {
    skipped.push_back({{"germ", w.germ_index}, {"power", w.power}, {"reason", w.message}});
    io.err << "warning: " << w.message << '\n';
  }
  meta["skipped"] = skipped;
  auto side = open_out(opts.out + ".manifest.json");
  side << meta.dump(2) << '\n';
  io.out << "wrote " << data.records.size() << " records to " << opts.out << " (" << data.warnings.size()
         << " skipped)\n";
  return kExitOk;
}

int cmd_group(const CommandOptions& opts, CommandStreams io) {
  const RunConfig cfg = config_with_seed(opts);
  require_option(opts.dataset, "--dataset");
  require_option(opts.out, "--out");
  const auto records = load_records(opts.dataset);
  const auto grouped = curriculum::group_records(records, grouping_config(cfg));
  const auto plan = curriculum::build_curriculum(grouped.sets, cfg.curriculum.edges);
  for (const auto& w : grouped.warnings) io.err << "warning: " << w << '\n';
  for (const auto& w : plan.warnings) io.err << "warning: " << w << '\n';
  auto out = open_out(opts.out);
  curriculum::write_manifest(out, plan);
  io.out << "wrote " << plan.num_sets() << " mini-sets over " << plan.stages.size() << " stages to " << opts.out
         << '\n';
  return kExitOk;
}

int cmd_train(const CommandOptions& opts, CommandStreams io) {
  const RunConfig cfg = config_with_seed(opts);
  require_option(opts.dataset, "--dataset");
  require_option(opts.manifest, "--manifest");
  require_option(opts.out, "--out");
  const auto records = load_records(opts.dataset);
  auto min = open_in(opts.manifest);
  const auto plan = curriculum::read_manifest(min, cfg.curriculum.edges, records.size());

  ModelBundle models(cfg);
  TrainOptions topts;
  topts.checkpoint_out = opts.out;
  topts.loss_csv = opts.out + ".loss.csv";
  topts.stage_log = opts.out + ".stages.log";
  topts.max_steps = opts.max_steps;
  topts.log = &io.out;
  if (!opts.resume.empty()) {
    Checkpoint ckpt = read_checkpoint(opts.resume);
    check_checkpoint_hash(ckpt, cfg, opts.force);
    topts.resume = std::move(ckpt);
  }
  const auto summary = train_pipeline(models, records, plan, topts);
  if (opts.plots) {
    std::vector<std::vector<double>> series(3);
    std::ifstream csv(topts.loss_csv);
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
      std::stringstream ss(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() < 5) continue;
      for (int k = 0; k < 3; ++k) series[static_cast<std::size_t>(k)].push_back(std::stod(cells[2 + k]));
    }
    auto svg = open_out(opts.out + ".loss.svg");
    write_loss_svg(svg, {"total", "gcd", "ctd"}, series);
  }
  io.out << "trained to step " << summary.steps << "; checkpoint " << opts.out << '\n';
  return kExitOk;
}

int cmd_sample(const CommandOptions& opts, CommandStreams io) {
  require_option(opts.checkpoint, "--checkpoint");
  require_option(opts.prompts, "--prompts");
  require_option(opts.out, "--out");
  const Checkpoint ckpt = read_checkpoint(opts.checkpoint);
  const RunConfig cfg = checkpoint_config(opts, ckpt);
  ModelBundle models(cfg);
  models.load(ckpt.tensors);
  auto pin = open_in(opts.prompts);
  auto prompts = synth::parse_prompts(pin, cfg.sampling.max_attempts);
  const auto sm = models.synthesis_models();
  for (const auto& p : prompts) synth::validate_prompt(p, sm);
  const auto report = synth::evaluate_suite(prompts, sm, models.noise(), sampling_seed(opts, cfg));
  auto out = open_out(opts.out);
  synth::write_report_jsonl(out, report, prompts);
  auto summary = open_out(opts.out + ".summary.json");
  synth::write_report_summary(summary, report);
  io.out << synth::summarize(report) << '\n';
  return report.accepted() > 0 ? kExitOk : kExitRuntime;
}

namespace {

struct InvariantCheck {
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<InvariantCheck> invariant_suites(const RunConfig& cfg, ModelBundle& models, std::uint64_t seed) {
  std::vector<InvariantCheck> checks;
  // Counting oracles against brute force.
  {
    bool ok = curriculum::count_clifford_distributions(1) == 3 && curriculum::count_clifford_distributions(2) == 11;
    checks.push_back({"clifford_count_T1_T2", ok,
                      "T(1)=" + curriculum::count_clifford_distributions(1).str() +
                          " T(2)=" + curriculum::count_clifford_distributions(2).str()});
    bool brute_ok = true;
    for (int n = 1; n <= 3; ++n) {
      const auto aff = oracles::enumerate_affine_subspaces(n);
      const auto lin = oracles::enumerate_linear_subspaces(n);
      std::uint64_t total = 0;
      for (int k = 0; k <= n; ++k) {
        brute_ok = brute_ok && curriculum::count_affine_subspaces(n, k) == aff[static_cast<std::size_t>(k)];
        brute_ok = brute_ok && curriculum::gaussian_binomial(n, k) == lin[static_cast<std::size_t>(k)];
        total += aff[static_cast<std::size_t>(k)];
      }
      brute_ok = brute_ok && curriculum::count_clifford_distributions(n) == total;
    }
    checks.push_back({"counting_brute_force_n_le_3", brute_ok, "gaussian binomials and affine counts for n=1..3"});
  }
  // Zero-noise simulator against the tableau.
  for (int q = 1; q <= 2; ++q) {
    const auto r = oracles::stabilizer_agreement(q, 100, 20, split_seed(seed, 10 + q));
    checks.push_back({"stabilizer_agreement_q" + std::to_string(q), r.max_tvd <= 1e-9,
                      "max tvd " + num(r.max_tvd) + " over " + std::to_string(r.circuits) + " circuits"});
  }
  // Saturation at T(n).
  for (int q = 1; q <= 2; ++q) {
    const auto r = oracles::clifford_saturation(q, 3000, 30, split_seed(seed, 20 + q));
    const auto expect = curriculum::count_clifford_distributions(q);
    checks.push_back({"clifford_saturation_q" + std::to_string(q), expect == r.distinct,
                      std::to_string(r.distinct) + " distinct, expected " + expect.str()});
  }
  // WHT parity on ideal records and the encoder's permutation invariance.
  const auto vocab = circuit::GateVocab::from_names(cfg.vocab);
  std::vector<circuit::GateKind> kinds;
  for (const auto& e : vocab.entries()) {
    if (e.role == circuit::TokenRole::Gate) kinds.push_back(e.kind);
  }
  Rng rng = make_rng(seed, 30);
  double wht_err = 0.0;
  std::vector<encoder::EncoderInput> inputs;
  for (int i = 0; i < 64; ++i) {
    const auto c = circuit::random_circuit(cfg.num_qubits, 1 + i % cfg.depth, kinds, rng);
    const RealVector p = device::ideal_clifford_distribution(c);
    const RealVector w = label::transform_wht(p);
    for (double v : w) wht_err = std::max(wht_err, std::min({std::abs(v - 1.0), std::abs(v), std::abs(v + 1.0)}));
    const RealVector back = label::transform_wht(w);
    wht_err = std::max(wht_err, (back - std::pow(2.0, cfg.num_qubits) * p).cwiseAbs().maxCoeff());
    if (inputs.size() < 5) inputs.push_back({models.embed(c), models.labels.condition(p).h_short});
  }
  checks.push_back({"wht_parity", wht_err <= 1e-9, "max deviation " + num(wht_err)});
  const double dev = oracles::permutation_deviation(models.encoder, inputs, oracles::all_orderings(inputs.size()));
  checks.push_back({"permutation_invariance", dev <= 1e-5, "max-abs deviation " + num(dev) + " over " +
                                                               std::to_string(inputs.size()) + "! orderings"});
  return checks;
}

}  // namespace

int cmd_eval(const CommandOptions& opts, CommandStreams io) {
  require_option(opts.checkpoint, "--checkpoint");
  require_option(opts.out, "--out");
  const Checkpoint ckpt = read_checkpoint(opts.checkpoint);
  const RunConfig cfg = checkpoint_config(opts, ckpt);
  ModelBundle models(cfg);
  models.load(ckpt.tensors);
  const std::uint64_t seed = sampling_seed(opts, cfg);

  const auto checks = invariant_suites(cfg, models, seed);
  bool all_pass = true;
  nlohmann::ordered_json inv = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass;
    inv.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    io.out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }

  std::vector<synth::SynthesisPrompt> prompts;
  if (!opts.prompts.empty()) {
    auto pin = open_in(opts.prompts);
    prompts = synth::parse_prompts(pin, cfg.sampling.max_attempts);
  } else {
    prompts = reachable_prompts(cfg);
  }
  const auto sm = models.synthesis_models();
  for (const auto& p : prompts) synth::validate_prompt(p, sm);
  const auto suite = synth::evaluate_suite(prompts, sm, models.noise(), seed);

  nlohmann::ordered_json report;
  report["config_hash"] = cfg.hash();
  report["step"] = ckpt.meta.step;
  report["seed"] = seed;
  report["invariants"] = inv;
  nlohmann::ordered_json syn;
  syn["prompts"] = prompts.size();
  syn["accepted"] = suite.accepted();
  syn["acceptance_rate"] = suite.acceptance_rate;
  syn["mean_tvd"] = suite.mean_tvd;
  syn["mean_length"] = suite.mean_length;
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (const auto& [k, v] : suite.attempt_histogram) hist[std::to_string(k)] = v;
  syn["attempt_histogram"] = hist;
  std::ostringstream rows;
  synth::write_report_jsonl(rows, suite, prompts);
  nlohmann::ordered_json per_prompt = nlohmann::ordered_json::array();
  std::istringstream rin(rows.str());
  std::string line;
  while (std::getline(rin, line)) {
    if (!line.empty()) per_prompt.push_back(nlohmann::ordered_json::parse(line));
  }
  syn["results"] = per_prompt;
  report["synthesis"] = syn;
  {
    auto out = open_out(opts.out);
    out << report.dump(2) << '\n';
  }
  if (opts.plots) {
    std::vector<double> tvds;
    for (const auto& o : suite.outcomes) tvds.push_back(o.result.tvd);
    auto svg = open_out(opts.out + ".tvd.svg");
    synth::write_tvd_histogram_svg(svg, tvds);
  }
  io.out << synth::summarize(suite) << '\n';
  return all_pass ? kExitOk : kExitRuntime;
}

int run_command(const std::string& name, const CommandOptions& opts, CommandStreams io) {
  static const std::map<std::string, std::function<int(const CommandOptions&, CommandStreams)>> table = {
      {"gen-data", cmd_gen_data}, {"group", cmd_group}, {"train", cmd_train},
      {"sample", cmd_sample},     {"eval", cmd_eval}};
  const auto it = table.find(name);
  if (it == table.end()) {
    io.err << "error: unknown command '" << name << "'\n";
    return kExitValidation;
  }
  try {
    return it->second(opts, io);
  } catch (const ValidationError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

void write_loss_svg(std::ostream& out, const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& series) {
  const double w = 640, h = 360, pad = 40;
  std::size_t n = 0;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& s : series) {
    n = std::max(n, s.size());
    for (double v : s) {
      if (!std::isfinite(v) || v <= 0.0) continue;
      const double l = std::log10(v);
      lo = first ? l : std::min(lo, l);
      hi = first ? l : std::max(hi, l);
      first = false;
    }
  }
  if (hi - lo < 1e-9) hi = lo + 1.0;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\"" << h - pad
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 8 << "\" text-anchor=\"middle\" font-size=\"12\">step</text>\n";
  out << "<text x=\"12\" y=\"" << h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 12 " << h / 2
      << ")\" text-anchor=\"middle\">log10 loss</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[k % 4] << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < series[k].size(); ++i) {
      const double v = series[k][i];
      if (!std::isfinite(v) || v <= 0.0) continue;
      const double x = pad + (w - 2 * pad) * (n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0);
      const double y = h - pad - (h - 2 * pad) * (std::log10(v) - lo) / (hi - lo);
      out << num(x) << ',' << num(y) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << w - pad - 60 << "\" y=\"" << pad + 14 * static_cast<double>(k) << "\" fill=\""
        << colors[k % 4] << "\" font-size=\"12\">" << (k < names.size() ? names[k] : "") << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace qmlc::cli
