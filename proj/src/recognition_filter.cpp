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

#include "psr/recognition_filter.hpp"

#include <string>
#include <utility>

#include "psr/error.hpp"

namespace psr {

std::string_view to_string(StreamKind kind) {
  switch (kind) {
    case StreamKind::kAsd:
      return "asd";
    case StreamKind::kTemporal:
      return "temporal";
    case StreamKind::kFused:
      return "fused";
  }
  return "unknown";
}

void FilterConfig::validate() const {
  if (!(threshold > 0.0)) {
    throw ArgumentError("filter threshold must be positive");
  }
  if (!(retention > 0.0 && retention <= 1.0)) {
    throw ArgumentError("decay retention must lie in (0, 1]");
  }
  if (!(evidence_floor >= 0.0 && evidence_floor < 1.0)) {
    throw ArgumentError("evidence floor must lie in [0, 1)");
  }
}

FilterState initial_filter_state(const Procedure& procedure) {
  FilterState state;
  state.accumulators.assign(procedure.step_count(), 0.0);
  state.last_emitted.assign(procedure.component_count(), std::nullopt);
  return state;
}

namespace {

bool is_eligible(const Procedure& procedure, const FilterState& state,
                 std::size_t step) {
  const ActionEffect& effect = procedure.step(step).effect;
  return state.last_emitted[effect.component] != effect.kind;
}

void check_frame(const Procedure& procedure, const FilterState& state,
                 const ConfidenceFrame& frame) {
  if (state.last_frame && frame.frame <= *state.last_frame) {
    throw StreamError("frame " + std::to_string(frame.frame) +
                      " arrived after frame " +
                      std::to_string(*state.last_frame));
  }
  if (frame.probs.size() != procedure.step_count()) {
    throw ArgumentError("frame " + std::to_string(frame.frame) + " carries " +
                        std::to_string(frame.probs.size()) +
                        " probabilities, expected " +
                        std::to_string(procedure.step_count()));
  }
  for (double p : frame.probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ArgumentError("frame " + std::to_string(frame.frame) +
                          " has probability outside [0, 1]");
    }
  }
}

std::vector<StepEvent> advance(const Procedure& procedure,
                               const FilterConfig& config, FilterState& state,
                               const ConfidenceFrame& frame) {
  check_frame(procedure, state, frame);
  state.last_frame = frame.frame;
  std::vector<StepEvent> emitted;
  for (std::size_t k = 0; k < procedure.step_count(); ++k) {
    double& acc = state.accumulators[k];
    if (!is_eligible(procedure, state, k)) {
      acc = 0.0;
      continue;
    }
    const double p = frame.probs[k];
    if (p > config.evidence_floor) {
      acc += p;
    } else {
      acc *= config.retention;
    }
    if (acc >= config.threshold) {
      const ActionSpec& spec = procedure.step(k);
      emitted.push_back(make_event(procedure, spec.id, frame.frame));
      state.last_emitted[spec.effect.component] = spec.effect.kind;
      acc = 0.0;
    }
  }
  return emitted;
}

}  // namespace

RecognitionFilter::RecognitionFilter(const Procedure& procedure,
                                     FilterConfig config)
    : procedure_(&procedure),
      config_(config),
      state_(initial_filter_state(procedure)) {
  config_.validate();
}

std::vector<StepEvent> RecognitionFilter::push(const ConfidenceFrame& frame) {
  return advance(*procedure_, config_, state_, frame);
}

bool RecognitionFilter::eligible(std::size_t step) const {
  return is_eligible(*procedure_, state_, step);
}

std::pair<FilterState, std::vector<StepEvent>> filter_step(
    const Procedure& procedure, const FilterConfig& config, FilterState state,
    const ConfidenceFrame& frame) {
  config.validate();
  std::vector<StepEvent> emitted = advance(procedure, config, state, frame);
  return {std::move(state), std::move(emitted)};
}

EventSequence run_filter(std::span<const ConfidenceFrame> frames,
                         const Procedure& procedure, const FilterConfig& config,
                         std::string video_id) {
  RecognitionFilter filter(procedure, config);
  std::vector<StepEvent> events;
  for (const ConfidenceFrame& frame : frames) {
    std::vector<StepEvent> emitted = filter.push(frame);
    events.insert(events.end(), emitted.begin(), emitted.end());
  }
  return EventSequence(std::move(video_id), std::move(events), procedure.fps());
}

ConfidenceFrame fuse(const ConfidenceFrame& asd,
                     const ConfidenceFrame& temporal,
                     const FusionWeights& weights) {
  if (asd.frame != temporal.frame) {
    throw AlignmentError("cannot fuse frame " + std::to_string(asd.frame) +
                         " with frame " + std::to_string(temporal.frame));
  }
  if (asd.probs.size() != temporal.probs.size()) {
    throw AlignmentError("frame " + std::to_string(asd.frame) +
                         ": streams carry " + std::to_string(asd.probs.size()) +
                         " and " + std::to_string(temporal.probs.size()) +
                         " steps");
  }
  ConfidenceFrame out{asd.frame, std::vector<double>(asd.probs.size()),
                      StreamKind::kFused};
  for (std::size_t k = 0; k < out.probs.size(); ++k) {
    out.probs[k] = weights.asd * asd.probs[k] + weights.temporal * temporal.probs[k];
  }
  return out;
}

std::vector<ConfidenceFrame> fuse_streams(
    std::span<const ConfidenceFrame> asd,
    std::span<const ConfidenceFrame> temporal, const FusionWeights& weights) {
  if (asd.size() != temporal.size()) {
    throw AlignmentError("streams cover " + std::to_string(asd.size()) +
                         " and " + std::to_string(temporal.size()) +
                         " frames");
  }
  std::vector<ConfidenceFrame> fused;
  fused.reserve(asd.size());
  for (std::size_t i = 0; i < asd.size(); ++i) {
    fused.push_back(fuse(asd[i], temporal[i], weights));
  }
  return fused;
}

}  // namespace psr
