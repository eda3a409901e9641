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

#include "psr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "psr/error.hpp"
#include "psr/log.hpp"
#include "psr/random.hpp"

namespace psr {

namespace {

double gaussian(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

double KcasDistribution::at(std::int64_t frame) const {
  if (frame < first_frame || frame > last_frame()) return 0.0;
  return pmf[static_cast<std::size_t>(frame - first_frame)];
}

KcasDistribution kcas_pmf(std::span<const std::int64_t> completions,
                          std::int64_t video_len, double sigma, double delta,
                          std::int64_t window) {
  if (window < 1) throw ArgumentError("clip window must be at least 1 frame");
  if (video_len <= window) {
    throw ArgumentError("video of " + std::to_string(video_len) +
                        " frames is too short for a " + std::to_string(window) +
                        "-frame clip window");
  }
  if (!(sigma > 0.0)) throw ArgumentError("sigma must be positive");
  if (!(delta >= 0.0)) throw ArgumentError("delta must be non-negative");

  KcasDistribution dist;
  dist.first_frame = window;
  dist.sigma = sigma;
  dist.delta = delta;
  dist.window = window;
  std::set<std::int64_t> merged(completions.begin(), completions.end());
  dist.completion_frames.assign(merged.begin(), merged.end());

  const auto size = static_cast<std::size_t>(video_len - window);
  dist.pmf.assign(size, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const auto x = static_cast<double>(dist.first_frame + static_cast<std::int64_t>(i));
    double mass = 0.0;
    for (std::int64_t t : dist.completion_frames) {
      const auto c = static_cast<double>(t);
      mass += gaussian(x, c - delta, sigma) + gaussian(x, c + delta, sigma);
    }
    dist.pmf[i] = mass;
    total += mass;
  }
  if (dist.completion_frames.empty() || !(total > 0.0)) {
    logger()->warn(
        "KCAS: no completion mass inside clip ends [{}, {}]; using a uniform "
        "distribution",
        dist.first_frame, video_len - 1);
    std::fill(dist.pmf.begin(), dist.pmf.end(), 1.0 / static_cast<double>(size));
    return dist;
  }
  for (double& p : dist.pmf) p /= total;
  return dist;
}

std::vector<std::int64_t> sample_clip_ends(const KcasDistribution& dist,
                                           std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("number of clip ends must be at least 1");
  if (dist.pmf.empty()) throw ArgumentError("empty clip-end distribution");
  std::vector<double> cdf(dist.pmf.size());
  double running = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    running += dist.pmf[i];
    cdf[i] = running;
  }
  Rng rng(seed);
  std::vector<std::int64_t> ends;
  ends.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.uniform() * running;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    ends.push_back(dist.first_frame + (it - cdf.begin()));
  }
  return ends;
}

ClipSpec clip_indices(std::int64_t end_frame, std::int64_t window,
                      std::int64_t samples) {
  if (window < 1) throw ArgumentError("clip window must be at least 1 frame");
  if (samples < 1) throw ArgumentError("clip needs at least one sample");
  if (samples > window) {
    throw ArgumentError("cannot take " + std::to_string(samples) +
                        " samples from a " + std::to_string(window) +
                        "-frame window");
  }
  if (end_frame < window - 1) {
    throw ArgumentError("clip ending at frame " + std::to_string(end_frame) +
                        " does not fit a " + std::to_string(window) +
                        "-frame window");
  }
  ClipSpec clip{end_frame, window, {}};
  clip.indices.reserve(static_cast<std::size_t>(samples));
  for (std::int64_t i = 0; i < samples; ++i) {
    clip.indices.push_back(end_frame - (samples - 1 - i) * window / samples);
  }
  return clip;
}

AssemblyState clip_label(const EventSequence& events,
                         const Procedure& procedure, std::int64_t start_frame,
                         std::int64_t end_frame) {
  if (start_frame > end_frame) {
    throw ArgumentError("clip starts after it ends");
  }
  return cumulative_state(events, procedure, start_frame) ^
         cumulative_state(events, procedure, end_frame);
}

std::int64_t KfsParams::window_frames() const {
  return std::llround(window_s * static_cast<double>(fps));
}

std::vector<StateOccurrence> state_occurrences(
    const std::map<std::string, EventSequence>& labels,
    const Procedure& procedure) {
  std::vector<StateOccurrence> out;
  for (const auto& [video_id, sequence] : labels) {
    const EventSequence y = sequence.correct_only();
    AssemblyState state = procedure.empty_state();
    std::size_t i = 0;
    while (i < y.size()) {
      const std::int64_t frame = y[i].frame;
      const AssemblyState before = state;
      for (; i < y.size() && y[i].frame == frame; ++i) {
        if (y[i].component >= state.width()) {
          throw StructuralError("event references component " +
                                std::to_string(y[i].component));
        }
        state.set(y[i].component, y[i].kind == StepKind::kInstall);
      }
      if (state == before) continue;
      if (auto match = procedure.match_state(state);
          match && match->state_id()) {
        out.push_back({video_id, frame, *match->state_id()});
      }
    }
  }
  return out;
}

namespace {

// Draws `count` items from `pool_size` without replacement when possible.
std::vector<std::size_t> draw_indices(Rng& rng, std::size_t pool_size,
                                      std::size_t count, int state_id,
                                      const char* what) {
  std::vector<std::size_t> picked;
  picked.reserve(count);
  if (pool_size >= count) {
    std::vector<std::size_t> order(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) order[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + rng.uniform_index(pool_size - i);
      std::swap(order[i], order[j]);
      picked.push_back(order[i]);
    }
    return picked;
  }
  logger()->info(
      "KFS: state {} has {} eligible {} for {} draws; sampling with "
      "replacement",
      state_id, pool_size, what, count);
  for (std::size_t i = 0; i < count; ++i) {
    picked.push_back(rng.uniform_index(pool_size));
  }
  return picked;
}

}  // namespace

KfsBatchSpec kfs_batch(const std::map<std::string, EventSequence>& labels,
                       const Procedure& procedure, const KfsParams& params,
                       const SyntheticPool& synthetic_pool,
                       std::uint64_t seed) {
  if (!(params.window_s >= 0.0)) {
    throw ArgumentError("KFS window must be non-negative");
  }
  if (params.fps <= 0) throw ArgumentError("KFS fps must be positive");
  if (params.samples_per_state + params.synthetic_per_state == 0) {
    throw ArgumentError("KFS needs at least one sample per state");
  }
  const std::int64_t span_frames = std::max<std::int64_t>(params.window_frames(), 1);

  // Eligible real frames per state, deduplicated on (video, frame).
  std::map<int, std::vector<KfsEntry>> pools;
  std::map<int, std::set<std::pair<std::string, std::int64_t>>> seen;
  for (const StateOccurrence& occ : state_occurrences(labels, procedure)) {
    for (std::int64_t f = occ.frame; f < occ.frame + span_frames; ++f) {
      if (!seen[occ.state_id].emplace(occ.video_id, f).second) continue;
      pools[occ.state_id].push_back(
          KfsEntry{occ.state_id, false, occ.video_id, f, occ.frame, {}});
    }
  }

  KfsBatchSpec batch;
  batch.params = params;
  Rng rng(seed);
  for (const AssemblyState& state : procedure.states()) {
    if (!state.state_id()) continue;
    const int id = *state.state_id();
    auto pool = pools.find(id);
    if (pool == pools.end()) {
      logger()->info("KFS: state {} never occurs in the labels; skipped", id);
      continue;
    }
    const std::vector<std::string>* synthetic = nullptr;
    if (params.synthetic_per_state > 0) {
      auto it = synthetic_pool.find(id);
      if (it == synthetic_pool.end() || it->second.empty()) {
        throw ArgumentError("KFS: state " + std::to_string(id) +
                            " has no synthetic references but " +
                            std::to_string(params.synthetic_per_state) +
                            " were requested");
      }
      synthetic = &it->second;
    }
    batch.state_ids.push_back(id);
    for (std::size_t i : draw_indices(rng, pool->second.size(),
                                      params.samples_per_state, id, "frames")) {
      batch.entries.push_back(pool->second[i]);
    }
    if (synthetic != nullptr) {
      for (std::size_t i :
           draw_indices(rng, synthetic->size(), params.synthetic_per_state, id,
                        "synthetic references")) {
        batch.entries.push_back(KfsEntry{id, true, {}, 0, 0, (*synthetic)[i]});
      }
    }
  }
  return batch;
}

std::vector<std::string> audit_kfs_batch(
    const KfsBatchSpec& batch,
    const std::map<std::string, EventSequence>& labels,
    const Procedure& procedure) {
  std::set<std::tuple<std::string, std::int64_t, int>> occurrences;
  for (const StateOccurrence& occ : state_occurrences(labels, procedure)) {
    occurrences.emplace(occ.video_id, occ.frame, occ.state_id);
  }
  const std::int64_t span_frames =
      std::max<std::int64_t>(batch.params.window_frames(), 1);
  std::vector<std::string> violations;
  std::map<int, std::pair<std::size_t, std::size_t>> per_state;
  for (const KfsEntry& e : batch.entries) {
    auto& counts = per_state[e.state_id];
    if (e.synthetic) {
      ++counts.second;
      continue;
    }
    ++counts.first;
    const bool known =
        occurrences.contains({e.video_id, e.occurrence_frame, e.state_id});
    const bool inside =
        e.frame >= e.occurrence_frame && e.frame < e.occurrence_frame + span_frames;
    if (!known || !inside) {
      violations.push_back("state " + std::to_string(e.state_id) + " frame " +
                           e.video_id + "@" + std::to_string(e.frame) +
                           " is not within an occurrence window");
    }
  }
  for (const auto& [id, counts] : per_state) {
    if (counts.first != batch.params.samples_per_state ||
        counts.second != batch.params.synthetic_per_state) {
      violations.push_back("state " + std::to_string(id) + " has " +
                           std::to_string(counts.first) + " real and " +
                           std::to_string(counts.second) +
                           " synthetic entries");
    }
  }
  return violations;
}

}  // namespace psr
