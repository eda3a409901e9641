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

#include "psr/state_inference.hpp"

#include <string>

#include "psr/error.hpp"

namespace psr {

std::vector<InferredStep> infer_steps(const std::optional<AssemblyState>& prev,
                                      const AssemblyState& next,
                                      const Procedure& procedure) {
  const AssemblyState from = prev ? *prev : procedure.empty_state();
  if (next.width() != procedure.component_count()) {
    throw StructuralError("detected state has width " +
                          std::to_string(next.width()) + ", procedure has " +
                          std::to_string(procedure.component_count()) +
                          " components");
  }
  std::vector<InferredStep> steps;
  for (const ComponentChange& change : state_diff(from, next)) {
    const std::optional<ActionId> action =
        procedure.action_for(change.component, change.kind);
    if (!action) {
      throw UnknownTransitionError(
          "no action " + std::string(to_string(change.kind)) + "s component " +
          std::to_string(change.component) + " (transition " +
          from.to_string() + " -> " + next.to_string() + ")");
    }
    steps.push_back({*action, change.kind});
  }
  return steps;
}

std::vector<ConfidenceFrame> asd_stream_probs(
    std::span<const StateDetection> detections, const Procedure& procedure,
    std::int64_t frame_count, const AsdStreamOptions& options) {
  if (frame_count < 0) {
    throw ArgumentError("frame count must be non-negative");
  }
  std::vector<ConfidenceFrame> frames(static_cast<std::size_t>(frame_count));
  for (std::int64_t f = 0; f < frame_count; ++f) {
    frames[f] = ConfidenceFrame{
        f, std::vector<double>(procedure.step_count(), 0.0), StreamKind::kAsd};
  }

  std::optional<AssemblyState> accepted;
  std::optional<std::int64_t> last_frame;
  for (const StateDetection& det : detections) {
    if (last_frame && det.frame <= *last_frame) {
      throw StreamError("state detection at frame " +
                        std::to_string(det.frame) + " follows frame " +
                        std::to_string(*last_frame));
    }
    if (det.frame < 0 || det.frame >= frame_count) {
      throw ArgumentError("state detection at frame " +
                          std::to_string(det.frame) + " lies outside [0, " +
                          std::to_string(frame_count) + ")");
    }
    if (!(det.confidence >= 0.0 && det.confidence <= 1.0)) {
      throw ArgumentError("detection confidence at frame " +
                          std::to_string(det.frame) + " outside [0, 1]");
    }
    last_frame = det.frame;
    if (det.confidence < options.confidence_gate) continue;

    const std::vector<InferredStep> steps =
        infer_steps(accepted, det.state, procedure);
    if (steps.empty()) continue;
    const double value = options.mode == StepConfidenceMode::kConstantOne
                             ? 1.0
                             : det.confidence;
    std::vector<double>& probs = frames[det.frame].probs;
    for (const InferredStep& step : steps) {
      probs[procedure.step_index(step.action)] = value;
    }
    accepted = det.state;
  }
  return frames;
}

}  // namespace psr
