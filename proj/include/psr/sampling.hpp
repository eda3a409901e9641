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

#ifndef PSR_SAMPLING_HPP_
#define PSR_SAMPLING_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "psr/procedure.hpp"

namespace psr {

// Clip-end defaults used for the temporal encoder.
inline constexpr double kKcasSigma = 45.0;
inline constexpr double kKcasDelta = 80.0;
inline constexpr std::int64_t kClipWindow = 256;
inline constexpr std::int64_t kClipSamples = 64;

// Bimodal clip-end distribution: two Gaussians per completion, one delta
// frames before it (hard negatives) and one delta frames after (positives).
struct KcasDistribution {
  std::int64_t first_frame = 0;  // pmf[0] is the probability of this end
  std::vector<double> pmf;
  double sigma = kKcasSigma;
  double delta = kKcasDelta;
  std::int64_t window = kClipWindow;
  std::vector<std::int64_t> completion_frames;  // merged, ascending

  std::int64_t last_frame() const {
    return first_frame + static_cast<std::int64_t>(pmf.size()) - 1;
  }
  // Zero outside the support.
  double at(std::int64_t frame) const;
};

// Evaluates the Gaussian pair of every distinct completion at each integer
// clip end in [window, video_len - 1] and normalizes. Completions sharing a
// frame count once. With no completions (or no mass inside the support) the
// distribution falls back to uniform. Throws ArgumentError when
// video_len <= window or sigma <= 0.
KcasDistribution kcas_pmf(std::span<const std::int64_t> completions,
                          std::int64_t video_len, double sigma = kKcasSigma,
                          double delta = kKcasDelta,
                          std::int64_t window = kClipWindow);

// i.i.d. inverse-CDF draws. Throws ArgumentError when n == 0.
std::vector<std::int64_t> sample_clip_ends(const KcasDistribution& dist,
                                           std::size_t n, std::uint64_t seed);

struct ClipSpec {
  std::int64_t end_frame = 0;
  std::int64_t window = 0;
  std::vector<std::int64_t> indices;

  friend bool operator==(const ClipSpec&, const ClipSpec&) = default;
};

// `samples` frames spread over the `window` frames ending at `end_frame`.
// Index i (0-based) sits floor((samples - 1 - i) * window / samples) frames
// before the end, so divisible cases get an exact stride and the end frame is
// always included.
ClipSpec clip_indices(std::int64_t end_frame, std::int64_t window,
                      std::int64_t samples);

// Net component change between the first and last frame of a clip.
AssemblyState clip_label(const EventSequence& events,
                         const Procedure& procedure, std::int64_t start_frame,
                         std::int64_t end_frame);

struct KfsParams {
  double window_s = 2.0;  // t_f
  std::int64_t fps = 10;
  std::size_t samples_per_state = 16;
  std::size_t synthetic_per_state = 0;

  std::int64_t window_frames() const;
};

struct KfsEntry {
  int state_id = 0;
  bool synthetic = false;
  std::string video_id;                // real entries
  std::int64_t frame = 0;              // real entries
  std::int64_t occurrence_frame = 0;   // real entries
  std::string synthetic_ref;           // synthetic entries

  friend bool operator==(const KfsEntry&, const KfsEntry&) = default;
};

struct KfsBatchSpec {
  KfsParams params;
  std::vector<int> state_ids;  // states present in the batch, ascending
  std::vector<KfsEntry> entries;
};

// Frame at which each nominal state is reached in a video, replaying correct
// completions only.
struct StateOccurrence {
  std::string video_id;
  std::int64_t frame = 0;
  int state_id = 0;
};

std::vector<StateOccurrence> state_occurrences(
    const std::map<std::string, EventSequence>& labels,
    const Procedure& procedure);

using SyntheticPool = std::map<int, std::vector<std::string>>;

// Key-frame mini-batch: per state, samples_per_state real frames drawn from
// the window after each occurrence and synthetic_per_state references from
// the pool. States without occurrences are skipped. Throws ArgumentError when
// synthetic samples are requested for a state with an empty pool.
KfsBatchSpec kfs_batch(const std::map<std::string, EventSequence>& labels,
                       const Procedure& procedure, const KfsParams& params,
                       const SyntheticPool& synthetic_pool, std::uint64_t seed);

// Re-derives occurrences from the labels and checks every real entry lies in
// the window of an occurrence of its state. Returns the violations.
std::vector<std::string> audit_kfs_batch(
    const KfsBatchSpec& batch,
    const std::map<std::string, EventSequence>& labels,
    const Procedure& procedure);

}  // namespace psr

#endif  // PSR_SAMPLING_HPP_
