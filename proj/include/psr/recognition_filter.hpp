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

#ifndef PSR_RECOGNITION_FILTER_HPP_
#define PSR_RECOGNITION_FILTER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "psr/procedure.hpp"

namespace psr {

enum class StreamKind { kAsd, kTemporal, kFused };

std::string_view to_string(StreamKind kind);

// Per-frame step-completion probabilities from one stream. `probs` is indexed
// by procedure step.
struct ConfidenceFrame {
  std::int64_t frame = 0;
  std::vector<double> probs;
  StreamKind stream = StreamKind::kTemporal;

  friend bool operator==(const ConfidenceFrame&,
                         const ConfidenceFrame&) = default;
};

struct FilterConfig {
  // Cumulative confidence needed to emit a step.
  double threshold = 1.0;
  // Fraction of the accumulator kept on a frame without evidence for the
  // step; 0.75 loses 25% per frame.
  double retention = 0.75;
  // Probabilities at or below this count as "no prediction".
  double evidence_floor = 0.0;

  // Throws ArgumentError on threshold <= 0, retention outside (0, 1] or a
  // floor outside [0, 1).
  void validate() const;
};

// Thresholds from the two-stream configuration.
inline constexpr double kIndustRealThreshold = 6.0;
inline constexpr double kMeccanoThreshold = 1.0;

// Snapshot of the filter between frames.
struct FilterState {
  std::vector<double> accumulators;
  // Kind of the last emitted event per component; a step is eligible while
  // this differs from its own kind.
  std::vector<std::optional<StepKind>> last_emitted;
  std::optional<std::int64_t> last_frame;
};

// Confidence-accumulation filter over one video stream. Evidence for a step
// is summed frame by frame; frames without evidence shrink the accumulator
// by the retention factor. Reaching the threshold emits the step and resets
// its accumulator. A step that was emitted stays silent (and does not
// accumulate) until the opposite action on the same component is emitted.
class RecognitionFilter {
 public:
  RecognitionFilter(const Procedure& procedure, FilterConfig config);

  // Consumes one frame; returns the steps emitted on it in ascending step
  // index. Throws StreamError for non-increasing frames and ArgumentError for
  // malformed probability vectors.
  std::vector<StepEvent> push(const ConfidenceFrame& frame);

  const FilterState& state() const { return state_; }
  const FilterConfig& config() const { return config_; }
  bool eligible(std::size_t step) const;

 private:
  const Procedure* procedure_;
  FilterConfig config_;
  FilterState state_;
};

// Functional form of RecognitionFilter::push.
std::pair<FilterState, std::vector<StepEvent>> filter_step(
    const Procedure& procedure, const FilterConfig& config, FilterState state,
    const ConfidenceFrame& frame);

FilterState initial_filter_state(const Procedure& procedure);

// Runs the filter over a whole stream.
EventSequence run_filter(std::span<const ConfidenceFrame> frames,
                         const Procedure& procedure, const FilterConfig& config,
                         std::string video_id = {});

struct FusionWeights {
  double asd = 0.5;
  double temporal = 0.5;
};

// Element-wise weighted average of two frames with the same index. Throws
// AlignmentError on mismatched frames or lengths.
ConfidenceFrame fuse(const ConfidenceFrame& asd,
                     const ConfidenceFrame& temporal,
                     const FusionWeights& weights = {});

// Frame-by-frame fusion of two dense streams covering the same frames.
std::vector<ConfidenceFrame> fuse_streams(
    std::span<const ConfidenceFrame> asd,
    std::span<const ConfidenceFrame> temporal,
    const FusionWeights& weights = {});

}  // namespace psr

#endif  // PSR_RECOGNITION_FILTER_HPP_
