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

#ifndef PSR_COMMANDS_HPP_
#define PSR_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psr/metrics.hpp"
#include "psr/simulator.hpp"

namespace psr::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitUndefinedMetric = 4,
};

// Maps an exception escaping a command onto the documented exit code and
// prints the message to `err`.
int exit_code_for_current_exception(std::ostream& err);

struct EvaluateArgs {
  std::filesystem::path labels;
  std::filesystem::path predictions;
  std::filesystem::path out_dir;
  std::string procedure;  // optional; validates action/component pairs
  std::optional<std::filesystem::path> streams;
  EvaluationOptions options;
  bool strict = true;
};

// Writes report.json and metrics.csv (and confidence_series.csv when streams
// are given) into out_dir. Nothing is written unless every input parses.
void cmd_evaluate(const EvaluateArgs& args);

struct RecognizeArgs {
  std::string procedure = "meccano";
  std::vector<std::filesystem::path> streams;  // one or two files
  FilterConfig filter;
  bool fuse = false;
  FusionWeights weights;
  AsdStreamOptions asd;
  std::optional<std::int64_t> frames;  // video length override
  std::filesystem::path out;
  std::optional<std::filesystem::path> series;
  bool strict = true;
};

void cmd_recognize(const RecognizeArgs& args);

struct SimulateArgs {
  std::filesystem::path config;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
};

// Writes labels.jsonl, asd.jsonl, temporal.jsonl, occlusion.csv,
// predictions_{asd,temporal,fused}.jsonl and comparison.json.
void cmd_simulate(const SimulateArgs& args);

struct SampleArgs {
  std::filesystem::path labels;
  std::string mode = "kcas";  // kcas | kfs
  std::string procedure = "meccano";
  std::uint64_t seed = 0;
  std::filesystem::path out;
  bool strict = true;
  // kcas
  double sigma = 45.0;
  double delta = 80.0;
  std::int64_t window = 256;
  std::int64_t samples = 64;
  std::size_t count = 16;
  std::optional<std::int64_t> video_frames;
  // kfs
  double window_s = 2.0;
  std::int64_t fps = 10;
  std::size_t n_sample = 16;
  std::size_t n_syn = 0;
  std::size_t batches = 1;
  std::optional<std::filesystem::path> synthetic;
};

void cmd_sample(const SampleArgs& args);

struct ValidateArgs {
  std::string procedure = "meccano";
  std::optional<std::filesystem::path> labels;
  std::vector<std::filesystem::path> streams;
  bool strict = true;
};

// Parses every given file and prints a one-line summary per file to `out`.
void cmd_validate(const ValidateArgs& args, std::ostream& out);

}  // namespace psr::cli

#endif  // PSR_COMMANDS_HPP_
