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

#include "qmlc/synth/synthesis.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qmlc/circuit/circuit_text.hpp"
#include "qmlc/circuit/token_grid.hpp"
#include "qmlc/common/rng.hpp"
#include "qmlc/device/density_matrix.hpp"
#include "qmlc/diffusion/sampler.hpp"

namespace qmlc::synth {

double tvd(const RealVector& p, const RealVector& q) {
  if (p.size() != q.size()) throw DimensionError("tvd: length mismatch");
  return 0.5 * (p - q).cwiseAbs().sum();
}

bool chi_square_consistent(const RealVector& p, const RealVector& target, std::int64_t shots, double alpha) {
  if (p.size() != target.size()) throw DimensionError("chi-square: length mismatch");
  if (shots <= 0) throw ValidationError("chi-square needs positive shots");
  double stat = 0.0;
  int support = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) {
      if (target(i) > 0.0) return false;
      continue;
    }
    ++support;
    const double diff = target(i) - p(i);
    stat += static_cast<double>(shots) * diff * diff / p(i);
  }
  if (support < 2) return stat == 0.0;
  boost::math::chi_squared dist(support - 1);
  return boost::math::cdf(boost::math::complement(dist, stat)) >= alpha;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::vector<SynthesisPrompt> parse_prompts(std::istream& in, int max_attempts) {
  std::vector<SynthesisPrompt> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string target, gates, lmax, theta, extra;
    if (!(fields >> target)) continue;
    auto fail = [&](const std::string& why) {
      throw ParseError("prompt line " + std::to_string(line_no) + ": " + why);
    };
    if (!(fields >> gates >> lmax >> theta)) fail("expected 4 fields: target gates L_max threshold");
    if (fields >> extra) fail("trailing field '" + extra + "'");
    SynthesisPrompt p;
    const auto parts = split(target, ',');
    p.target.resize(static_cast<Eigen::Index>(parts.size()));
    try {
      for (std::size_t i = 0; i < parts.size(); ++i) p.target(static_cast<Eigen::Index>(i)) = std::stod(parts[i]);
      std::size_t used = 0;
      p.max_length = std::stoi(lmax, &used);
      if (used != lmax.size()) fail("bad L_max '" + lmax + "'");
      p.threshold = std::stod(theta, &used);
      if (used != theta.size()) fail("bad threshold '" + theta + "'");
    } catch (const std::logic_error&) {
      fail("malformed number");
    }
    p.gates = split(gates, ',');
    p.max_attempts = max_attempts;
    out.push_back(std::move(p));
  }
  return out;
}

void validate_prompt(const SynthesisPrompt& prompt, const SynthesisModels& models) {
  const Eigen::Index dim = Eigen::Index{1} << models.num_qubits;
  if (prompt.target.size() != dim) throw ValidationError("prompt target length != 2^Q");
  if ((prompt.target.array() < 0.0).any() || std::abs(prompt.target.sum() - 1.0) > 1e-6) {
    throw ValidationError("prompt target is not a probability vector");
  }
  if (prompt.gates.empty()) throw ValidationError("prompt gate subset is empty");
  for (const auto& g : prompt.gates) {
    const auto kind = circuit::gate_from_name(g);
    if (!kind || !models.vocab.contains(*kind) || circuit::gate_info(*kind).role != circuit::TokenRole::Gate) {
      throw ValidationError("prompt gate '" + g + "' is not a vocabulary gate");
    }
  }
  if (prompt.max_length < 0 || prompt.max_length > models.depth) throw ValidationError("prompt L_max must be in [0, T]");
  if (!(prompt.threshold >= 0.0)) throw ValidationError("prompt threshold must be >= 0");
  if (prompt.max_attempts < 1) throw ValidationError("prompt needs at least one attempt");
}

SynthesisResult synthesize(const SynthesisPrompt& prompt, const SynthesisModels& models,
                           const device::NoiseModel& noise, std::uint64_t seed) {
  validate_prompt(prompt, models);
  std::set<circuit::GateKind> allowed;
  for (const auto& g : prompt.gates) allowed.insert(*circuit::gate_from_name(g));

  const label::LabelCondition cond = models.labels.condition(prompt.target);
  RealVector label_input = cond.h_short;
  if (models.sampling.label_state_condition) {
    nn::NoGradGuard guard;
    const circuit::TokenGrid pad(models.num_qubits, models.depth, models.vocab.pad_token());
    const auto pad_grid = circuit::embed_grid(pad, models.embedding);
    label_input = models.encoder.encode_pair(pad_grid, nn::constant(cond.h_short.transpose()))
                      .lbl.value().row(0).transpose();
  }

  SynthesisResult best;
  for (int a = 0; a < prompt.max_attempts; ++a) {
    const std::uint64_t attempt_seed = split_seed(seed, static_cast<std::uint64_t>(a));
    diffusion::SamplerOptions gopt{models.sampling.gcd_steps, split_seed(attempt_seed, 0), std::nullopt};
    diffusion::SamplerOptions copt{models.sampling.ctd_steps, split_seed(attempt_seed, 1), models.sampling.clip};
    const RealVector z = diffusion::sample_context(models.gcd, models.schedule, gopt);
    const RealVector x0 = diffusion::sample_tokens(models.ctd, label_input, z, cond.cov, models.schedule, copt);
    const auto grid = decode_tokens(x0, models.decoder, models.num_qubits, models.depth, models.sampling.mode,
                                    split_seed(attempt_seed, 2));
    auto reject = [&](const std::string& why) { ++best.rejections[why]; };
    std::optional<circuit::Circuit> c;
    try {
      c = circuit::detokenize(grid, models.vocab);
    } catch (const StructureError&) {
      reject("structure");
      continue;
    }
    bool ok = true;
    for (auto k : c->gate_kinds()) {
      if (!allowed.count(k)) ok = false;
    }
    if (!ok) {
      reject("gate_subset");
      continue;
    }
    if (c->length() > prompt.max_length) {
      reject("length");
      continue;
    }
    const RealVector p = device::apply_circuit(*c, noise);
    const double d = tvd(p, prompt.target);
    const bool accept = prompt.test == AcceptanceTest::Tvd
                            ? d <= prompt.threshold
                            : chi_square_consistent(p, prompt.target, prompt.chi_square_shots,
                                                    prompt.chi_square_alpha);
    if (!best.valid || d < best.tvd || accept) {
      best.circuit = *c;
      best.p = p;
      best.tvd = d;
      best.valid = true;
    }
    if (accept) {
      best.accepted = true;
      best.accepted_attempt = a;
      best.attempts = a + 1;
      return best;
    }
  }
  best.attempts = prompt.max_attempts;
  if (!best.valid) {
    throw SynthesisExhausted("no structurally valid circuit in " + std::to_string(prompt.max_attempts) +
                                 " attempts",
                             best);
  }
  return best;
}

std::size_t SuiteReport::accepted() const {
  std::size_t n = 0;
  for (const auto& o : outcomes) n += o.result.accepted ? 1 : 0;
  return n;
}

SuiteReport evaluate_suite(const std::vector<SynthesisPrompt>& prompts, const SynthesisModels& models,
                           const device::NoiseModel& noise, std::uint64_t seed) {
  SuiteReport report;
  double tvd_sum = 0.0;
  double len_sum = 0.0;
  int valid = 0;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    PromptOutcome o{i, {}, false};
    try {
      o.result = synthesize(prompts[i], models, noise, split_seed(seed, i));
    } catch (const SynthesisExhausted& e) {
      o.result = e.best();
      o.exhausted = true;
    }
    tvd_sum += o.result.tvd;
    if (o.result.valid) {
      len_sum += o.result.circuit.length();
      ++valid;
    }
    ++report.attempt_histogram[o.result.attempts];
    report.outcomes.push_back(std::move(o));
  }
  if (!prompts.empty()) {
    report.acceptance_rate = static_cast<double>(report.accepted()) / static_cast<double>(prompts.size());
    report.mean_tvd = tvd_sum / static_cast<double>(prompts.size());
  }
  if (valid > 0) report.mean_length = len_sum / valid;
  return report;
}

namespace {

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join_vector(const RealVector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt12(v(i));
  }
  return s;
}

}  // namespace

void write_report_jsonl(std::ostream& out, const SuiteReport& report, const std::vector<SynthesisPrompt>& prompts) {
  for (const auto& o : report.outcomes) {
    nlohmann::ordered_json j;
    j["prompt"] = o.index;
    j["target"] = join_vector(prompts.at(o.index).target);
    j["accepted"] = o.result.accepted;
    j["valid"] = o.result.valid;
    j["exhausted"] = o.exhausted;
    j["attempts"] = o.result.attempts;
    j["tvd"] = fmt12(o.result.tvd);
    j["circuit"] = o.result.valid ? circuit::format_circuit(o.result.circuit) : "";
    j["length"] = o.result.valid ? o.result.circuit.length() : 0;
    j["p"] = o.result.valid ? join_vector(o.result.p) : "";
    j["rejections"] = o.result.rejections;
    out << j.dump() << '\n';
  }
}

void write_report_summary(std::ostream& out, const SuiteReport& report) {
  nlohmann::ordered_json s;
  s["prompts"] = report.outcomes.size();
  s["accepted"] = report.accepted();
  s["acceptance_rate"] = fmt12(report.acceptance_rate);
  s["mean_tvd"] = fmt12(report.mean_tvd);
  s["mean_length"] = fmt12(report.mean_length);
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.attempt_histogram) hist[std::to_string(k)] = v;
  s["attempt_histogram"] = hist;
  out << s.dump() << '\n';
}

std::string summarize(const SuiteReport& report) {
  std::ostringstream os;
  os << "prompts: " << report.outcomes.size() << ", accepted: " << report.accepted()
     << ", acceptance rate: " << fmt12(report.acceptance_rate) << '\n';
  os << "mean tvd: " << fmt12(report.mean_tvd) << ", mean circuit length: " << fmt12(report.mean_length) << '\n';
  for (const auto& o : report.outcomes) {
    os << "  prompt " << o.index << ": " << (o.result.accepted ? "accepted" : "rejected")
       << " tvd=" << fmt12(o.result.tvd) << " attempts=" << o.result.attempts;
    if (o.result.valid) os << " circuit=" << circuit::format_circuit(o.result.circuit);
    os << '\n';
  }
  return os.str();
}

void write_tvd_histogram_svg(std::ostream& out, const std::vector<double>& tvds, int bins) {
  bins = std::max(1, bins);
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  for (double v : tvds) {
    int b = static_cast<int>(std::floor(std::clamp(v, 0.0, 1.0) * bins));
    counts[static_cast<std::size_t>(std::min(b, bins - 1))]++;
  }
  const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));
  const double w = 600.0, h = 300.0, left = 40.0, bottom = 30.0;
  const double bar = (w - left - 10.0) / bins;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">TVD histogram</text>\n";
  for (int b = 0; b < bins; ++b) {
    const double bh = (h - bottom - 30.0) * counts[static_cast<std::size_t>(b)] / peak;
    out << "<rect x=\"" << left + b * bar << "\" y=\"" << h - bottom - bh << "\" width=\"" << bar - 1
        << "\" height=\"" << bh << "\" fill=\"steelblue\"/>\n";
  }
  out << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - 10 << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << left << "\" y=\"" << h - 10 << "\" font-size=\"11\">0</text>\n";
  out << "<text x=\"" << w - 20 << "\" y=\"" << h - 10 << "\" font-size=\"11\">1</text>\n";
  out << "<text x=\"4\" y=\"40\" font-size=\"11\">" << peak << "</text>\n";
  out << "</svg>\n";
}

}  // namespace qmlc::synth
