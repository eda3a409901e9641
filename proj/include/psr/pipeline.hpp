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

#ifndef PSR_PIPELINE_HPP_
#define PSR_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psr/procedure.hpp"
#include "psr/recognition_filter.hpp"
#include "psr/state_inference.hpp"

namespace psr {

enum class PipelineKind { kAsdOnly, kTemporalOnly, kFused };

std::string_view to_string(PipelineKind kind);

struct RecognizeOptions {
  FilterConfig filter;
  FusionWeights weights;
  AsdStreamOptions asd;
};

// Fills frames missing from `frames` with all-zero vectors so the result
// covers exactly [0, frame_count). Frames must be strictly increasing and
// inside the range.
std::vector<ConfidenceFrame> densify(std::span<const ConfidenceFrame> frames,
                                     std::int64_t frame_count,
                                     std::size_t step_count, StreamKind kind);

// Step recognition for one video. The ASD-only pipeline infers steps from
// state detections, the temporal-only pipeline filters the spatio-temporal
// stream directly, and the fused pipeline averages both per frame before a
// single filter.
EventSequence recognize(PipelineKind kind, const Procedure& procedure,
                        std::span<const StateDetection> asd,
                        std::span<const ConfidenceFrame> temporal,
                        std::int64_t frame_count,
                        const RecognizeOptions& options,
                        std::string video_id = {});

// The per-frame stream the chosen pipeline feeds into its filter.
std::vector<ConfidenceFrame> pipeline_stream(
    PipelineKind kind, const Procedure& procedure,
    std::span<const StateDetection> asd,
    std::span<const ConfidenceFrame> temporal, std::int64_t frame_count,
    const RecognizeOptions& options);

}  // namespace psr

#endif  // PSR_PIPELINE_HPP_
