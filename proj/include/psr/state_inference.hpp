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

#ifndef PSR_STATE_INFERENCE_HPP_
#define PSR_STATE_INFERENCE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "psr/procedure.hpp"
#include "psr/recognition_filter.hpp"

namespace psr {

// One assembly-state detection on one frame.
struct StateDetection {
  std::int64_t frame = 0;
  AssemblyState state;
  double confidence = 1.0;
};

struct InferredStep {
  ActionId action{};
  StepKind kind = StepKind::kInstall;

  friend bool operator==(const InferredStep&, const InferredStep&) = default;
};

// Actions needed to turn `prev` (the all-zero initial state when absent) into
// `next`, in ascending component order. Throws UnknownTransitionError when a
// changed component has no matching action.
std::vector<InferredStep> infer_steps(const std::optional<AssemblyState>& prev,
                                      const AssemblyState& next,
                                      const Procedure& procedure);

enum class StepConfidenceMode {
  kDetectionConfidence,  // inferred steps carry the detection confidence
  kConstantOne,          // inferred steps carry 1.0
};

struct AsdStreamOptions {
  // Detections with confidence below the gate are ignored.
  double confidence_gate = 0.0;
  StepConfidenceMode mode = StepConfidenceMode::kDetectionConfidence;
};

// Turns state detections into a dense per-step confidence stream over frames
// [0, frame_count). A detection contributes to the steps inferred against the
// last state whose transition was accepted; all other frames are zero.
// Detections must be strictly time-ordered and lie inside the frame range.
std::vector<ConfidenceFrame> asd_stream_probs(
    std::span<const StateDetection> detections, const Procedure& procedure,
    std::int64_t frame_count, const AsdStreamOptions& options = {});

}  // namespace psr

#endif  // PSR_STATE_INFERENCE_HPP_
