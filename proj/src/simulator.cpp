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

#include "psr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "psr/error.hpp"
#include "psr/random.hpp"

namespace psr {

namespace {

void require_probability(double p, const char* field) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ArgumentError(std::string(field) + " must lie in [0, 1]");
  }
}

// Child streams of one video seed.
enum Stream : std::uint64_t {
  kGroundTruth = 0,
  kOcclusion = 1,
  kDetector = 2,
  kTemporalResponse = 3,
  kTemporalNoise = 4,
};

std::string video_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sim-%03zu", index);
  return buf;
}

std::vector<StepEvent> generate_ground_truth(const SimConfig& config, Rng& rng,
                                             std::int64_t& last_frame) {
  const Procedure& proc = config.procedure;
  const auto& states = proc.states();
  const double extra_mean =
      std::max(config.step_gap - static_cast<double>(config.min_gap), 1.0);
  auto gap = [&] {
    return config.min_gap + std::llround(rng.exponential(extra_mean));
  };
  std::vector<StepEvent> events;
  std::int64_t frame = config.lead_in;
  for (std::size_t i = 1; i < states.size(); ++i) {
    const std::vector<ComponentChange> changes =
        state_diff(states[i - 1], states[i]);
    frame += gap();
    if (rng.bernoulli(config.errors.p_error) && !changes.empty() &&
        changes.front().kind == StepKind::kInstall) {
      const std::size_t c = changes.front().component;
      const auto install = proc.action_for(c, StepKind::kInstall);
      const auto remove = proc.action_for(c, StepKind::kRemove);
      if (install && remove) {
        events.push_back(make_event(proc, *install, frame, false));
        frame += gap() / 2 + 1;
        events.push_back(make_event(proc, *remove, frame, true));
        frame += gap();
      }
    }
    for (const ComponentChange& change : changes) {
      const auto action = proc.action_for(change.component, change.kind);
      if (!action) {
        throw UnknownTransitionError("simulated procedure has no action for "
                                     "component " +
                                     std::to_string(change.component));
      }
      events.push_back(make_event(proc, *action, frame, true));
    }
  }
  last_frame = frame;
  return events;
}

SimTrace simulate_video(const SimConfig& config, std::size_t index) {
  const Procedure& proc = config.procedure;
  SimTrace trace;
  trace.video_id = video_name(index);
  trace.seed = derive_seed(config.seed, index);

  Rng gt_rng(derive_seed(trace.seed, kGroundTruth));
  std::int64_t last = 0;
  std::vector<StepEvent> events = generate_ground_truth(config, gt_rng, last);
  trace.frame_count = last + config.tail + 1;
  trace.ground_truth = EventSequence(trace.video_id, std::move(events), proc.fps());
  const auto frames = static_cast<std::size_t>(trace.frame_count);

  // Occlusion: occluded on frame t iff u_t < q(state on t - 1). Sharing u_t
  // across configurations makes the mask monotone in p_occlude.
  Rng occ_rng(derive_seed(trace.seed, kOcclusion));
  trace.occlusion_mask.assign(frames, false);
  for (std::size_t t = 1; t < frames; ++t) {
    const double q = trace.occlusion_mask[t - 1]
                         ? 1.0 - config.occlusion.p_reveal
                         : config.occlusion.p_occlude;
    trace.occlusion_mask[t] = occ_rng.uniform() < q;
  }

  // ASD detector: only on visible frames whose true state is a nominal one.
  Rng det_rng(derive_seed(trace.seed, kDetector));
  const auto& states = proc.states();
  AssemblyState truth = proc.empty_state();
  std::size_t next_event = 0;
  const auto& gt = trace.ground_truth.events();
  for (std::size_t t = 0; t < frames; ++t) {
    for (; next_event < gt.size() &&
           gt[next_event].frame == static_cast<std::int64_t>(t);
         ++next_event) {
      truth.set(gt[next_event].component,
                gt[next_event].kind == StepKind::kInstall);
    }
    const double u_detect = det_rng.uniform();
    const double u_false = det_rng.uniform();
    const double u_pick = det_rng.uniform();
    if (trace.occlusion_mask[t] || u_detect >= config.asd.detection_rate) {
      continue;
    }
    auto it = std::find(states.begin(), states.end(), truth);
    if (it == states.end()) continue;
    std::size_t idx = static_cast<std::size_t>(it - states.begin());
    if (states.size() > 1 && u_false < config.asd.false_detection_rate) {
      const auto shift = 1 + static_cast<std::size_t>(
                                 u_pick * static_cast<double>(states.size() - 1));
      idx = (idx + std::min(shift, states.size() - 1)) % states.size();
    }
    trace.asd_detections.push_back(StateDetection{
        static_cast<std::int64_t>(t), states[idx], config.asd.confidence});
  }

  // Temporal stream: one ramp per correct completion it picks up, plus noise.
  trace.temporal_frames.reserve(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    trace.temporal_frames.push_back(ConfidenceFrame{
        static_cast<std::int64_t>(t),
        std::vector<double>(proc.step_count(), 0.0), StreamKind::kTemporal});
  }
  const TemporalModel& tm = config.temporal;
  Rng resp_rng(derive_seed(trace.seed, kTemporalResponse));
  const double half = static_cast<double>(tm.ramp_frames + 1) / 2.0;
  std::size_t i = 0;
  while (i < gt.size()) {
    const std::int64_t completion = gt[i].frame;
    const std::int64_t delay = resp_rng.uniform_int(tm.delay_min, tm.delay_max);
    const bool occluded = trace.occlusion_mask[static_cast<std::size_t>(completion)];
    for (; i < gt.size() && gt[i].frame == completion; ++i) {
      const double u = resp_rng.uniform();
      if (!gt[i].correct) continue;
      const double hit_p =
          occluded ? tm.hit_probability_occluded : tm.hit_probability_visible;
      if (u >= hit_p) continue;
      const std::size_t step = proc.step_index(gt[i].action);
      for (std::int64_t j = 1; j <= tm.ramp_frames; ++j) {
        const std::int64_t f = completion + delay + j - 1;
        if (f >= trace.frame_count) break;
        const double value =
            tm.peak * static_cast<double>(std::min(j, tm.ramp_frames + 1 - j)) / half;
        double& p = trace.temporal_frames[static_cast<std::size_t>(f)].probs[step];
        p = std::min(1.0, std::max(p, value));
      }
    }
  }
  Rng noise_rng(derive_seed(trace.seed, kTemporalNoise));
  for (ConfidenceFrame& frame : trace.temporal_frames) {
    for (double& p : frame.probs) {
      if (noise_rng.uniform() < tm.false_positive_rate) {
        const double v = tm.false_positive_min +
                         (tm.false_positive_max - tm.false_positive_min) *
                             noise_rng.uniform();
        p = std::max(p, v);
      }
    }
  }
  return trace;
}

}  // namespace

void SimConfig::validate() const {
  if (procedure.states().size() < 2) {
    throw ArgumentError("procedure: simulation needs at least two states");
  }
  if (n_videos == 0) throw ArgumentError("n_videos must be at least 1");
  if (!(step_gap > 0.0)) throw ArgumentError("step_gap must be positive");
  if (min_gap < 1) throw ArgumentError("min_gap must be at least 1 frame");
  if (lead_in < 0) throw ArgumentError("lead_in must be non-negative");
  if (tail < 0) throw ArgumentError("tail must be non-negative");
  require_probability(occlusion.p_occlude, "occlusion.p_occlude");
  require_probability(occlusion.p_reveal, "occlusion.p_reveal");
  if (occlusion.p_reveal == 0.0 && occlusion.p_occlude > 0.0) {
    throw ArgumentError(
        "occlusion.p_reveal must be positive when occlusion can start "
        "(occlusion would be absorbing)");
  }
  require_probability(asd.confidence, "asd.confidence");
  require_probability(asd.detection_rate, "asd.detection_rate");
  require_probability(asd.false_detection_rate, "asd.false_detection_rate");
  if (temporal.delay_min < 0 || temporal.delay_max < temporal.delay_min) {
    throw ArgumentError("temporal.delay_min/delay_max must satisfy "
                        "0 <= delay_min <= delay_max");
  }
  if (temporal.ramp_frames < 1) {
    throw ArgumentError("temporal.ramp_frames must be at least 1");
  }
  require_probability(temporal.peak, "temporal.peak");
  require_probability(temporal.hit_probability_visible,
                      "temporal.hit_probability_visible");
  require_probability(temporal.hit_probability_occluded,
                      "temporal.hit_probability_occluded");
  require_probability(temporal.false_positive_rate,
                      "temporal.false_positive_rate");
  require_probability(temporal.false_positive_min, "temporal.false_positive_min");
  require_probability(temporal.false_positive_max, "temporal.false_positive_max");
  if (temporal.false_positive_max < temporal.false_positive_min) {
    throw ArgumentError(
        "temporal.false_positive_max must not be below false_positive_min");
  }
  require_probability(errors.p_error, "errors.p_error");
}

SimConfig heavy_occlusion_config(std::uint64_t seed) {
  SimConfig config;
  config.occlusion = {0.15, 0.02};
  config.asd.confidence = 0.9;
  config.temporal.hit_probability_occluded = 0.7;
  config.temporal.false_positive_rate = 1e-3;
  config.seed = seed;
  return config;
}

std::vector<SimTrace> simulate(const SimConfig& config) {
  config.validate();
  std::vector<SimTrace> traces;
  traces.reserve(config.n_videos);
  for (std::size_t v = 0; v < config.n_videos; ++v) {
    traces.push_back(simulate_video(config, v));
  }
  return traces;
}

const PipelineOutcome& ExperimentRecord::pipeline(PipelineKind kind) const {
  for (const PipelineOutcome& p : pipelines) {
    if (p.kind == kind) return p;
  }
  throw ArgumentError("experiment has no " + std::string(to_string(kind)) +
                      " pipeline");
}

RecognizeOptions experiment_options(const ExperimentThresholds& thresholds,
                                    PipelineKind kind) {
  RecognizeOptions options;
  options.filter.retention = thresholds.retention;
  switch (kind) {
    case PipelineKind::kAsdOnly:
      options.filter.threshold = thresholds.asd;
      break;
    case PipelineKind::kTemporalOnly:
      options.filter.threshold = thresholds.temporal;
      break;
    case PipelineKind::kFused:
      options.filter.threshold = thresholds.fused;
      break;
  }
  return options;
}

ExperimentRecord run_experiment(const std::vector<SimTrace>& traces,
                                const SimConfig& config,
                                const ExperimentThresholds& thresholds) {
  ExperimentRecord record;
  record.seed = config.seed;
  for (const SimTrace& trace : traces) record.video_seeds.push_back(trace.seed);
  for (PipelineKind kind : {PipelineKind::kAsdOnly, PipelineKind::kTemporalOnly,
                            PipelineKind::kFused}) {
    PipelineOutcome outcome;
    outcome.kind = kind;
    const RecognizeOptions options = experiment_options(thresholds, kind);
    outcome.threshold = options.filter.threshold;
    for (const SimTrace& trace : traces) {
      EventSequence pred =
          recognize(kind, config.procedure, trace.asd_detections,
                    trace.temporal_frames, trace.frame_count, options,
                    trace.video_id);
      outcome.reports.push_back(evaluate(trace.ground_truth, pred));
      outcome.predictions.push_back(std::move(pred));
    }
    outcome.summary = aggregate(outcome.reports);
    record.pipelines.push_back(std::move(outcome));
  }
  return record;
}

ExperimentRecord run_experiment(const SimConfig& config,
                                const ExperimentThresholds& thresholds) {
  return run_experiment(simulate(config), config, thresholds);
}

}  // namespace psr
