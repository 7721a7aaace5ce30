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

#include "qmlc/cli/run_config.hpp"

#include <openssl/sha.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qmlc/circuit/circuit_text.hpp"
#include "qmlc/circuit/gate_vocab.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/device/noise_model.hpp"
#include "qmlc/label/transforms.hpp"

namespace qmlc::cli {

using nlohmann::json;

namespace {

// Reads `key` into `out` when present; rejects keys the section does not know.
class Reader {
 public:
  Reader(const json& j, std::string section) : j_(j), section_(std::move(section)) {
    if (!j_.is_object()) throw ValidationError(where("") + " must be an object");
  }
  template <typename T>
  void get(const char* key, T& out) {
    known_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ValidationError(where(key) + ": " + e.what());
    }
  }
  const json* child(const char* key) {
    known_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!known_.count(it.key())) throw ValidationError("unknown config key " + where(it.key()));
    }
  }

 private:
  std::string where(const std::string& key) const {
    return section_.empty() ? key : (key.empty() ? section_ : section_ + "." + key);
  }
  const json& j_;
  std::string section_;
  std::set<std::string> known_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("invalid config: " + what);
}

}  // namespace

int RunConfig::gate_width() const { return d_gate > 0 ? d_gate : static_cast<int>(vocab.size()); }

void RunConfig::validate() const {
  require(num_qubits >= 1 && num_qubits <= 3, "num_qubits must be in [1, 3]");
  require(depth >= 1, "depth must be >= 1");
  circuit::GateVocab v;
  try {
    v = circuit::GateVocab::from_names(vocab);
  } catch (const Error& e) {
    throw ValidationError(std::string("invalid config: vocab: ") + e.what());
  }
  require(gate_width() >= v.size(), "d_gate must be >= vocabulary size");
  try {
    (void)device::NoiseModel::preset(noise, num_qubits);
  } catch (const Error& e) {
    throw ValidationError(std::string("invalid config: noise: ") + e.what());
  }
  require(!data.germs.empty(), "data.germs is empty");
  for (const auto& g : data.germs) {
    circuit::Circuit c(1);
    try {
      c = circuit::parse_circuit(g);
    } catch (const Error& e) {
      throw ValidationError("invalid config: germ '" + g + "': " + e.what());
    }
    require(c.num_qubits() == num_qubits, "germ '" + g + "' has the wrong qubit count");
    for (auto k : c.gate_kinds()) require(v.contains(k), "germ '" + g + "' uses a gate outside the vocabulary");
  }
  require(!data.powers.empty(), "data.powers is empty");
  for (int p : data.powers) require(p >= 1, "data.powers entries must be >= 1");
  require(data.shots > 0, "data.shots must be > 0");
  try {
    (void)label::transform_from_name(label.transform);
  } catch (const Error& e) {
    throw ValidationError(std::string("invalid config: label.transform: ") + e.what());
  }
  require(label.eps > 0.0, "label.eps must be > 0");
  require(label.bands >= 1, "label.bands must be >= 1");
  require(label.hidden >= 1 && label.depth >= 5, "label nets need hidden >= 1 and depth >= 5");
  require(label.sigma >= 0.0, "label.sigma must be >= 0");
  require(label.stage1_epochs >= 0 && label.stage2_epochs >= 0, "label epochs must be >= 0");
  require(label.batch >= 1 && label.lr > 0.0, "label batch/lr must be positive");
  require(label.heldout_fraction >= 0.0 && label.heldout_fraction < 1.0, "label.heldout_fraction in [0, 1)");
  require(encoder.d_model >= 1 && encoder.heads >= 1 && encoder.d_model % encoder.heads == 0,
          "encoder.d_model must be divisible by encoder.heads");
  require(encoder.layers >= 0 && encoder.inducing >= 1 && encoder.seeds >= 1, "encoder sizes");
  require(encoder.ff_hidden >= 0, "encoder.ff_hidden must be >= 0");
  require(gcd.hidden >= 1 && gcd.depth >= 1 && gcd.time_bands >= 1, "gcd sizes");
  require(ctd.layers >= 0 && ctd.heads >= 1 && encoder.d_model % ctd.heads == 0, "ctd.heads must divide d_model");
  require(ctd.hidden >= 0 && ctd.time_bands >= 1, "ctd sizes");
  require(schedule.gamma_max > schedule.gamma_min, "schedule.gamma_max must exceed gamma_min");
  require(training.lambda >= 0.0, "training.lambda must be >= 0");
  require(training.kappa > 0.0 && training.sigma_delta >= 0.0, "training.kappa > 0 and sigma_delta >= 0");
  require(training.steps_per_stage >= 0 && training.batch_sets >= 1, "training steps/batch");
  require(training.lr > 0.0, "training.lr must be > 0");
  require(training.checkpoint_every >= 0, "training.checkpoint_every must be >= 0");
  require(decoder.epochs >= 0 && decoder.noise >= 0.0 && decoder.lr > 0.0, "decoder settings");
  require(curriculum.set_size >= 2 && curriculum.tau >= 0 && curriculum.max_usage >= 1, "curriculum sizes");
  require(curriculum.extra_sets >= 0 && curriculum.diversity_candidates >= 1, "curriculum extras");
  require(!curriculum.edges.empty(), "curriculum.edges is empty");
  for (std::size_t i = 1; i < curriculum.edges.size(); ++i) {
    require(curriculum.edges[i] > curriculum.edges[i - 1], "curriculum.edges must be strictly increasing");
  }
  require(sampling.gcd_steps >= 1 && sampling.ctd_steps >= 1, "sampling steps must be >= 1");
  require(sampling.mode == "argmax" || sampling.mode == "sample", "sampling.mode must be argmax or sample");
  require(sampling.acceptance == "tvd" || sampling.acceptance == "chi2", "sampling.acceptance must be tvd or chi2");
  require(sampling.threshold >= 0.0 && sampling.max_attempts >= 1, "sampling threshold/attempts");
  require(sampling.max_length >= 0 && sampling.max_length <= depth, "sampling.max_length must be in [0, depth]");
}

json RunConfig::to_json() const {
  json j;
  j["num_qubits"] = num_qubits;
  j["depth"] = depth;
  j["vocab"] = vocab;
  j["d_gate"] = d_gate;
  j["noise"] = noise;
  j["seed"] = seed;
  j["data"] = {{"germs", data.germs}, {"powers", data.powers}, {"shots", data.shots}};
  j["label"] = {{"transform", label.transform}, {"eps", label.eps},
                {"bands", label.bands}, {"hidden", label.hidden},
                {"depth", label.depth}, {"sigma", label.sigma},
                {"stage1_epochs", label.stage1_epochs}, {"stage2_epochs", label.stage2_epochs},
                {"batch", label.batch}, {"lr", label.lr},
                {"heldout_fraction", label.heldout_fraction}};
  j["encoder"] = {{"d_model", encoder.d_model}, {"layers", encoder.layers}, {"heads", encoder.heads},
                  {"inducing", encoder.inducing}, {"seeds", encoder.seeds}, {"ff_hidden", encoder.ff_hidden}};
  j["gcd"] = {{"hidden", gcd.hidden}, {"depth", gcd.depth}, {"time_bands", gcd.time_bands}};
  j["ctd"] = {{"layers", ctd.layers}, {"heads", ctd.heads}, {"hidden", ctd.hidden}, {"time_bands", ctd.time_bands}};
  j["schedule"] = {{"gamma_min", schedule.gamma_min}, {"gamma_max", schedule.gamma_max}};
  j["training"] = {{"lambda", training.lambda}, {"use_hvidl", training.use_hvidl},
                   {"kappa", training.kappa}, {"sigma_delta", training.sigma_delta},
                   {"label_state_condition", training.label_state_condition},
                   {"steps_per_stage", training.steps_per_stage}, {"batch_sets", training.batch_sets},
                   {"lr", training.lr}, {"clip_norm", training.clip_norm},
                   {"checkpoint_every", training.checkpoint_every}};
  j["decoder"] = {{"epochs", decoder.epochs}, {"noise", decoder.noise}, {"lr", decoder.lr}};
  j["curriculum"] = {{"set_size", curriculum.set_size}, {"tau", curriculum.tau},
                     {"max_usage", curriculum.max_usage}, {"extra_sets", curriculum.extra_sets},
                     {"diversity_candidates", curriculum.diversity_candidates}, {"edges", curriculum.edges}};
  j["sampling"] = {{"gcd_steps", sampling.gcd_steps}, {"ctd_steps", sampling.ctd_steps},
                   {"clip", sampling.clip}, {"mode", sampling.mode},
                   {"acceptance", sampling.acceptance}, {"threshold", sampling.threshold},
                   {"max_attempts", sampling.max_attempts}, {"max_length", sampling.max_length}};
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  Reader top(j, "");
  top.get("num_qubits", c.num_qubits);
  top.get("depth", c.depth);
  top.get("vocab", c.vocab);
  top.get("d_gate", c.d_gate);
  top.get("noise", c.noise);
  top.get("seed", c.seed);
  if (const json* s = top.child("data")) {
    Reader r(*s, "data");
    r.get("germs", c.data.germs);
    r.get("powers", c.data.powers);
    r.get("shots", c.data.shots);
    r.finish();
  }
  if (const json* s = top.child("label")) {
    Reader r(*s, "label");
    r.get("transform", c.label.transform);
    r.get("eps", c.label.eps);
    r.get("bands", c.label.bands);
    r.get("hidden", c.label.hidden);
    r.get("depth", c.label.depth);
    r.get("sigma", c.label.sigma);
    r.get("stage1_epochs", c.label.stage1_epochs);
    r.get("stage2_epochs", c.label.stage2_epochs);
    r.get("batch", c.label.batch);
    r.get("lr", c.label.lr);
    r.get("heldout_fraction", c.label.heldout_fraction);
    r.finish();
  }
  if (const json* s = top.child("encoder")) {
    Reader r(*s, "encoder");
    r.get("d_model", c.encoder.d_model);
    r.get("layers", c.encoder.layers);
    r.get("heads", c.encoder.heads);
    r.get("inducing", c.encoder.inducing);
    r.get("seeds", c.encoder.seeds);
    r.get("ff_hidden", c.encoder.ff_hidden);
    r.finish();
  }
  if (const json* s = top.child("gcd")) {
    Reader r(*s, "gcd");
    r.get("hidden", c.gcd.hidden);
    r.get("depth", c.gcd.depth);
    r.get("time_bands", c.gcd.time_bands);
    r.finish();
  }
  if (const json* s = top.child("ctd")) {
    Reader r(*s, "ctd");
    r.get("layers", c.ctd.layers);
    r.get("heads", c.ctd.heads);
    r.get("hidden", c.ctd.hidden);
    r.get("time_bands", c.ctd.time_bands);
    r.finish();
  }
  if (const json* s = top.child("schedule")) {
    Reader r(*s, "schedule");
    r.get("gamma_min", c.schedule.gamma_min);
    r.get("gamma_max", c.schedule.gamma_max);
    r.finish();
  }
  if (const json* s = top.child("training")) {
    Reader r(*s, "training");
    r.get("lambda", c.training.lambda);
    r.get("use_hvidl", c.training.use_hvidl);
    r.get("kappa", c.training.kappa);
    r.get("sigma_delta", c.training.sigma_delta);
    r.get("label_state_condition", c.training.label_state_condition);
    r.get("steps_per_stage", c.training.steps_per_stage);
    r.get("batch_sets", c.training.batch_sets);
    r.get("lr", c.training.lr);
    r.get("clip_norm", c.training.clip_norm);
    r.get("checkpoint_every", c.training.checkpoint_every);
    r.finish();
  }
  if (const json* s = top.child("decoder")) {
    Reader r(*s, "decoder");
    r.get("epochs", c.decoder.epochs);
    r.get("noise", c.decoder.noise);
    r.get("lr", c.decoder.lr);
    r.finish();
  }
  if (const json* s = top.child("curriculum")) {
    Reader r(*s, "curriculum");
    r.get("set_size", c.curriculum.set_size);
    r.get("tau", c.curriculum.tau);
    r.get("max_usage", c.curriculum.max_usage);
    r.get("extra_sets", c.curriculum.extra_sets);
    r.get("diversity_candidates", c.curriculum.diversity_candidates);
    r.get("edges", c.curriculum.edges);
    r.finish();
  }
  if (const json* s = top.child("sampling")) {
    Reader r(*s, "sampling");
    r.get("gcd_steps", c.sampling.gcd_steps);
    r.get("ctd_steps", c.sampling.ctd_steps);
    r.get("clip", c.sampling.clip);
    r.get("mode", c.sampling.mode);
    r.get("acceptance", c.sampling.acceptance);
    r.get("threshold", c.sampling.threshold);
    r.get("max_attempts", c.sampling.max_attempts);
    r.get("max_length", c.sampling.max_length);
    r.finish();
  }
  top.finish();
  return c;
}

std::string RunConfig::canonical() const { return to_json().dump(); }

std::string RunConfig::hash() const {
  const std::string text = canonical();
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
  std::string hex;
  char buf[3];
  for (unsigned char b : digest) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    hex += buf;
  }
  return hex;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  RunConfig c = RunConfig::from_json(j);
  c.validate();
  return c;
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config '" + path + "'");
  out << cfg.to_json().dump(2) << '\n';
}

}  // namespace qmlc::cli
