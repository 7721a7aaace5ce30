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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qmlc/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qmlc: noise-aware Clifford circuit synthesis"};
  app.require_subcommand(1);
  qmlc::cli::CommandOptions opts;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "run config (JSON)");
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--out", opts.out, "output path")->required();
    sub->add_flag("--plots", opts.plots, "write SVG plots next to the output");
    sub->add_flag("--force", opts.force, "ignore config hash mismatches");
  };

  auto* gen = app.add_subcommand("gen-data", "simulate the germ dataset");
  common(gen);
  auto* group = app.add_subcommand("group", "group records into curriculum mini-sets");
  common(group);
  group->add_option("--dataset", opts.dataset, "dataset file")->required();
  auto* train = app.add_subcommand("train", "run the staged joint training");
  common(train);
  train->add_option("--dataset", opts.dataset, "dataset file")->required();
  train->add_option("--manifest", opts.manifest, "mini-set manifest")->required();
  train->add_option("--resume", opts.resume, "checkpoint to resume from");
  train->add_option("--max-steps", opts.max_steps, "stop after this many total steps");
  auto* sample = app.add_subcommand("sample", "synthesize circuits for target distributions");
  common(sample);
  sample->add_option("--checkpoint", opts.checkpoint, "trained checkpoint")->required();
  sample->add_option("--prompts", opts.prompts, "prompt file")->required();
  auto* eval = app.add_subcommand("eval", "run invariant suites and synthesis metrics");
  common(eval);
  eval->add_option("--checkpoint", opts.checkpoint, "trained checkpoint")->required();
  eval->add_option("--prompts", opts.prompts, "prompt file (default: all reachable targets)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qmlc::cli::kExitValidation;
  }
  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--seed") > 0) opts.seed = seed;
  return qmlc::cli::run_command(chosen->get_name(), opts, {std::cout, std::cerr});
}
