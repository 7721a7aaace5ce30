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

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qmlc/circuit/gate_vocab.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/device/noise_model.hpp"
#include "qmlc/diffusion/networks.hpp"
#include "qmlc/diffusion/schedule.hpp"
#include "qmlc/encoder/set_encoder.hpp"
#include "qmlc/label/label_nets.hpp"
#include "qmlc/synth/decoder.hpp"

namespace qmlc::synth {

/// Half the l1 distance; DimensionError on a length mismatch.
double tvd(const RealVector& p, const RealVector& q);

/// Pearson goodness-of-fit of `target` against `p` with `shots` samples;
/// consistent when the chi-square p-value is at least `alpha`.
bool chi_square_consistent(const RealVector& p, const RealVector& target, std::int64_t shots, double alpha);

enum class AcceptanceTest { Tvd, ChiSquare };

struct SynthesisPrompt {
  RealVector target;
  std::vector<std::string> gates;
  int max_length = 20;
  double threshold = 0.1;
  int max_attempts = 64;
  AcceptanceTest test = AcceptanceTest::Tvd;
  std::int64_t chi_square_shots = 1000;
  double chi_square_alpha = 0.05;
};

/// Whitespace-separated: target (comma list), gate names (comma list), L_max,
/// threshold. '#' starts a comment. Errors carry the line number.
std::vector<SynthesisPrompt> parse_prompts(std::istream& in, int max_attempts = 64);

struct SynthesisResult {
  circuit::Circuit circuit{1};
  RealVector p;
  double tvd = 1.0;
  int attempts = 0;
  bool accepted = false;
  bool valid = false;  // false when no attempt produced a usable circuit
  int accepted_attempt = -1;
  std::map<std::string, int> rejections;
};

class SynthesisExhausted : public Error {
 public:
  SynthesisExhausted(const std::string& what, SynthesisResult best)
      : Error(what), best_(std::move(best)) {}
  const SynthesisResult& best() const { return best_; }

 private:
  SynthesisResult best_;
};

struct SamplingConfig {
  int gcd_steps = 250;
  int ctd_steps = 500;
  std::optional<double> clip = 1.0;
  DecodeMode mode = DecodeMode::Argmax;
  bool label_state_condition = false;
};

struct SynthesisModels {
  const circuit::GateVocab& vocab;
  const circuit::GateEmbedding& embedding;
  const label::LabelPipeline& labels;
  const encoder::SetEncoder& encoder;
  const diffusion::GcdNet& gcd;
  const diffusion::CtdNet& ctd;
  const TokenDecoder& decoder;
  diffusion::NoiseSchedule schedule;
  SamplingConfig sampling;
  int num_qubits;
  int depth;
};

void validate_prompt(const SynthesisPrompt& prompt, const SynthesisModels& models);

/// Attempt a uses seed split_seed(seed, a); the first accepted attempt wins.
/// Returns the lowest-TVD valid attempt when none is accepted, and throws
/// SynthesisExhausted when no attempt yields a valid circuit.
SynthesisResult synthesize(const SynthesisPrompt& prompt, const SynthesisModels& models,
                           const device::NoiseModel& noise, std::uint64_t seed);

struct PromptOutcome {
  std::size_t index;
  SynthesisResult result;
  bool exhausted = false;
};

struct SuiteReport {
  std::vector<PromptOutcome> outcomes;
  double acceptance_rate = 0.0;
  double mean_tvd = 0.0;
  double mean_length = 0.0;  // over valid results
  std::map<int, int> attempt_histogram;  // attempts used -> prompts

  std::size_t accepted() const;
};

SuiteReport evaluate_suite(const std::vector<SynthesisPrompt>& prompts, const SynthesisModels& models,
                           const device::NoiseModel& noise, std::uint64_t seed);

/// One JSON object per prompt.
void write_report_jsonl(std::ostream& out, const SuiteReport& report, const std::vector<SynthesisPrompt>& prompts);
/// Aggregate metrics as a single JSON object.
void write_report_summary(std::ostream& out, const SuiteReport& report);
std::string summarize(const SuiteReport& report);
/// Histogram of per-prompt TVD over [0, 1] as a standalone SVG document.
void write_tvd_histogram_svg(std::ostream& out, const std::vector<double>& tvds, int bins = 20);

}  // namespace qmlc::synth
