// Copyright 2026 The PSR Engine Authors. All Rights Reserved.
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

// psr: command-line front end for the procedure step recognition engine.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psr/commands.hpp"
#include "psr/error.hpp"
#include "psr/recognition_filter.hpp"

namespace {

using namespace psr;
using namespace psr::cli;

EditWeights parse_weights(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ArgumentError("--weights: '" + item + "' is not a number");
    }
  }
  if (values.size() != 4) {
    throw ArgumentError(
        "--weights expects insertion,deletion,substitution,transposition");
  }
  EditWeights w{values[0], values[1], values[2], values[3]};
  w.validate();
  return w;
}

void add_strictness(CLI::App* cmd, bool& strict) {
  auto* lenient = cmd->add_flag_callback(
      "--lenient", [&strict] { strict = false; },
      "Skip malformed lines instead of aborting");
  cmd->add_flag_callback(
         "--strict", [&strict] { strict = true; },
         "Abort on the first malformed line (default)")
      ->excludes(lenient);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming procedure step recognition: evaluation, recognition, "
               "simulation and sampling"};
  app.require_subcommand(1);

  // evaluate
  EvaluateArgs eval;
  std::string eval_weights;
  std::string eval_matching = "greedy";
  std::string eval_streams;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against labels");
  evaluate->add_option("--labels", eval.labels, "Ground-truth labels (JSONL)")
      ->required();
  evaluate->add_option("--predictions", eval.predictions, "Predicted steps (JSONL)")
      ->required();
  evaluate->add_option("--out", eval.out_dir, "Output directory")->required();
  evaluate->add_option("--procedure", eval.procedure,
                       "Procedure used to validate records ('meccano' or a JSON file)");
  evaluate->add_option("--weights", eval_weights,
                       "Edit costs: insertion,deletion,substitution,transposition");
  evaluate->add_option("--matching", eval_matching, "greedy or optimal (experimental)")
      ->check(CLI::IsMember({"greedy", "optimal"}));
  evaluate->add_flag("--include-incorrect", eval.options.include_incorrect,
                     "Keep incorrect completions in the ground truth");
  evaluate->add_option("--streams", eval_streams,
                       "Detector stream to export as confidence_series.csv");
  add_strictness(evaluate, eval.strict);

  // recognize
  RecognizeArgs rec;
  std::string rec_series;
  std::int64_t rec_frames = -1;
  bool rec_constant = false;
  auto* recognize = app.add_subcommand("recognize", "Turn detector streams into step events");
  recognize->add_option("--streams", rec.streams,
                        "ASD and/or temporal stream files (JSONL)")
      ->required()
      ->expected(1, 2);
  recognize->add_option("--procedure", rec.procedure,
                        "'meccano' or a procedure JSON file");
  recognize->add_option("--threshold", rec.filter.threshold,
                        "Cumulative confidence needed to emit a step")
      ->capture_default_str();
  recognize->add_option("--decay", rec.filter.retention,
                        "Fraction of confidence kept per silent frame")
      ->capture_default_str();
  recognize->add_option("--evidence-floor", rec.filter.evidence_floor,
                        "Probabilities at or below this count as silent")
      ->capture_default_str();
  recognize->add_flag("--fuse", rec.fuse, "Average the ASD and temporal streams");
  recognize->add_option("--asd-weight", rec.weights.asd)->capture_default_str();
  recognize->add_option("--temporal-weight", rec.weights.temporal)
      ->capture_default_str();
  recognize->add_option("--confidence-gate", rec.asd.confidence_gate,
                        "Ignore state detections below this confidence")
      ->capture_default_str();
  recognize->add_flag("--constant-confidence", rec_constant,
                      "Give inferred ASD steps confidence 1.0");
  recognize->add_option("--frames", rec_frames, "Video length in frames");
  recognize->add_option("--series", rec_series,
                        "Write the filtered per-step confidence series (CSV)");
  recognize->add_option("--out", rec.out, "Predictions file (JSONL)")->required();
  add_strictness(recognize, rec.strict);

  // simulate
  SimulateArgs sim;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic traces and compare pipelines");
  simulate->add_option("--config", sim.config, "Simulation config (JSON)")->required();
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Override the config seed");
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();

  // sample
  SampleArgs smp;
  std::string smp_synthetic;
  auto* sample = app.add_subcommand("sample", "Emit KCAS clip specs or KFS batches");
  sample->add_option("--labels", smp.labels, "Step labels (JSONL)")->required();
  sample->add_option("--mode", smp.mode, "kcas or kfs")
      ->check(CLI::IsMember({"kcas", "kfs"}))
      ->capture_default_str();
  sample->add_option("--procedure", smp.procedure)->capture_default_str();
  sample->add_option("--seed", smp.seed)->capture_default_str();
  sample->add_option("--out", smp.out, "Output file (JSONL)")->required();
  sample->add_option("--sigma", smp.sigma)->capture_default_str();
  sample->add_option("--delta", smp.delta)->capture_default_str();
  sample->add_option("--window", smp.window, "Clip window w in frames")
      ->capture_default_str();
  sample->add_option("--samples", smp.samples, "Frames N_w taken per clip")
      ->capture_default_str();
  sample->add_option("--count", smp.count, "Clip ends drawn per video")
      ->capture_default_str();
  std::int64_t smp_frames = -1;
  sample->add_option("--video-frames", smp_frames, "Video length in frames");
  sample->add_option("--tf", smp.window_s, "KFS window after each completion, seconds")
      ->capture_default_str();
  sample->add_option("--fps", smp.fps)->capture_default_str();
  sample->add_option("--n-sample", smp.n_sample)->capture_default_str();
  sample->add_option("--n-syn", smp.n_syn)->capture_default_str();
  sample->add_option("--batches", smp.batches)->capture_default_str();
  sample->add_option("--synthetic", smp_synthetic,
                     "JSON map of state id to synthetic image references");
  add_strictness(sample, smp.strict);

  // validate
  ValidateArgs val;
  std::string val_labels;
  auto* validate = app.add_subcommand("validate", "Check input files");
  validate->add_option("--procedure", val.procedure)->capture_default_str();
  validate->add_option("--labels", val_labels);
  validate->add_option("--streams", val.streams)->expected(0, 2);
  add_strictness(validate, val.strict);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*evaluate) {
      if (!eval_weights.empty()) eval.options.weights = parse_weights(eval_weights);
      eval.options.matching = eval_matching == "optimal" ? MatchingRule::kOptimal
                                                         : MatchingRule::kGreedy;
      if (!eval_streams.empty()) eval.streams = eval_streams;
      cmd_evaluate(eval);
    } else if (*recognize) {
      if (rec_frames >= 0) rec.frames = rec_frames;
      if (!rec_series.empty()) rec.series = rec_series;
      if (rec_constant) rec.asd.mode = StepConfidenceMode::kConstantOne;
      cmd_recognize(rec);
    } else if (*simulate) {
      if (*sim_seed_opt) sim.seed = sim_seed;
      cmd_simulate(sim);
    } else if (*sample) {
      if (smp_frames >= 0) smp.video_frames = smp_frames;
      if (!smp_synthetic.empty()) smp.synthetic = smp_synthetic;
      cmd_sample(smp);
    } else if (*validate) {
      if (!val_labels.empty()) val.labels = val_labels;
      cmd_validate(val, std::cout);
    }
  } catch (...) {
    return exit_code_for_current_exception(std::cerr);
  }
  return kExitOk;
}
