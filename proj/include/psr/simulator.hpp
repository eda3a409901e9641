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

#ifndef PSR_SIMULATOR_HPP_
#define PSR_SIMULATOR_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "psr/metrics.hpp"
#include "psr/pipeline.hpp"
#include "psr/procedure.hpp"
#include "psr/recognition_filter.hpp"
#include "psr/state_inference.hpp"

namespace psr {

// Two-state Markov chain per frame. From a visible frame the next frame is
// occluded with probability p_occlude; from an occluded frame it becomes
// visible with probability p_reveal.
struct OcclusionModel {
  double p_occlude = 0.05;
  double p_reveal = 0.2;
};

struct AsdModel {
  double confidence = 0.9;
  // Chance the detector reports a state on a visible frame.
  double detection_rate = 1.0;
  // Chance a reported state is replaced by a different nominal state.
  double false_detection_rate = 0.0;
};

// The spatio-temporal stream answers each completion with a triangular ramp
// of `ramp_frames` frames peaking at `peak`, starting `delay_min..delay_max`
// frames after the completion. Whether it answers at all depends on the
// visibility at the completion frame.
struct TemporalModel {
  std::int64_t delay_min = 2;
  std::int64_t delay_max = 8;
  std::int64_t ramp_frames = 12;
  double peak = 0.8;
  double hit_probability_visible = 0.98;
  double hit_probability_occluded = 0.7;
  // Per step, per frame.
  double false_positive_rate = 1e-3;
  double false_positive_min = 0.1;
  double false_positive_max = 0.4;
};

// With probability p_error a transition is preceded by an incorrect install
// of one of its components that is then removed.
struct ErrorModel {
  double p_error = 0.0;
};

struct SimConfig {
  Procedure procedure = meccano_procedure();
  std::size_t n_videos = 4;
  // Mean frames between consecutive state transitions, and the floor.
  double step_gap = 120.0;
  std::int64_t min_gap = 20;
  std::int64_t lead_in = 60;
  std::int64_t tail = 600;
  OcclusionModel occlusion;
  AsdModel asd;
  TemporalModel temporal;
  ErrorModel errors;
  std::uint64_t seed = 0;

  // Throws ArgumentError naming the offending field.
  void validate() const;
};

// The heavy-occlusion configuration used for the delay-reduction check.
SimConfig heavy_occlusion_config(std::uint64_t seed);

struct SimTrace {
  std::string video_id;
  std::uint64_t seed = 0;
  std::int64_t frame_count = 0;
  EventSequence ground_truth;
  std::vector<StateDetection> asd_detections;
  std::vector<ConfidenceFrame> temporal_frames;  // dense over [0, frame_count)
  std::vector<bool> occlusion_mask;              // true = occluded
};

// Deterministic in config.seed. Video v uses derive_seed(seed, v), with
// independent child streams for ground truth, occlusion, the ASD detector and
// the temporal stream.
std::vector<SimTrace> simulate(const SimConfig& config);

struct ExperimentThresholds {
  double asd = 0.5;
  double temporal = 0.4;
  double fused = 0.4;
  double retention = 0.75;
};

struct PipelineOutcome {
  PipelineKind kind = PipelineKind::kAsdOnly;
  double threshold = 0.0;
  std::vector<EventSequence> predictions;
  std::vector<EvaluationReport> reports;
  DatasetSummary summary;
};

struct ExperimentRecord {
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> video_seeds;
  std::vector<PipelineOutcome> pipelines;  // asd, temporal, fused

  const PipelineOutcome& pipeline(PipelineKind kind) const;
};

RecognizeOptions experiment_options(const ExperimentThresholds& thresholds,
                                    PipelineKind kind);

ExperimentRecord run_experiment(const std::vector<SimTrace>& traces,
                                const SimConfig& config,
                                const ExperimentThresholds& thresholds = {});
ExperimentRecord run_experiment(const SimConfig& config,
                                const ExperimentThresholds& thresholds = {});

}  // namespace psr

#endif  // PSR_SIMULATOR_HPP_
