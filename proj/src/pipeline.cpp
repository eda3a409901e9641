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

#include "psr/pipeline.hpp"

#include <string>
#include <utility>

#include "psr/error.hpp"

namespace psr {

std::string_view to_string(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::kAsdOnly:
      return "asd";
    case PipelineKind::kTemporalOnly:
      return "temporal";
    case PipelineKind::kFused:
      return "fused";
  }
  return "unknown";
}

std::vector<ConfidenceFrame> densify(std::span<const ConfidenceFrame> frames,
                                     std::int64_t frame_count,
                                     std::size_t step_count, StreamKind kind) {
  std::vector<ConfidenceFrame> dense;
  dense.reserve(static_cast<std::size_t>(frame_count));
  std::size_t next = 0;
  for (std::int64_t f = 0; f < frame_count; ++f) {
    if (next < frames.size() && frames[next].frame == f) {
      if (frames[next].probs.size() != step_count) {
        throw ArgumentError("frame " + std::to_string(f) + " carries " +
                            std::to_string(frames[next].probs.size()) +
                            " probabilities, expected " +
                            std::to_string(step_count));
      }
      dense.push_back(frames[next]);
      dense.back().stream = kind;
      ++next;
      continue;
    }
    if (next < frames.size() && frames[next].frame < f) {
      throw StreamError("frame " + std::to_string(frames[next].frame) +
                        " is out of order");
    }
    dense.push_back(
        ConfidenceFrame{f, std::vector<double>(step_count, 0.0), kind});
  }
  if (next != frames.size()) {
    throw StreamError("frame " + std::to_string(frames[next].frame) +
                      " lies outside [0, " + std::to_string(frame_count) +
                      ") or is out of order");
  }
  return dense;
}

std::vector<ConfidenceFrame> pipeline_stream(
    PipelineKind kind, const Procedure& procedure,
    std::span<const StateDetection> asd,
    std::span<const ConfidenceFrame> temporal, std::int64_t frame_count,
    const RecognizeOptions& options) {
  switch (kind) {
    case PipelineKind::kAsdOnly:
      return asd_stream_probs(asd, procedure, frame_count, options.asd);
    case PipelineKind::kTemporalOnly:
      return densify(temporal, frame_count, procedure.step_count(),
                     StreamKind::kTemporal);
    case PipelineKind::kFused: {
      const std::vector<ConfidenceFrame> asd_frames =
          asd_stream_probs(asd, procedure, frame_count, options.asd);
      const std::vector<ConfidenceFrame> temporal_frames = densify(
          temporal, frame_count, procedure.step_count(), StreamKind::kTemporal);
      return fuse_streams(asd_frames, temporal_frames, options.weights);
    }
  }
  throw ArgumentError("unknown pipeline");
}

EventSequence recognize(PipelineKind kind, const Procedure& procedure,
                        std::span<const StateDetection> asd,
                        std::span<const ConfidenceFrame> temporal,
                        std::int64_t frame_count,
                        const RecognizeOptions& options,
                        std::string video_id) {
  const std::vector<ConfidenceFrame> stream =
      pipeline_stream(kind, procedure, asd, temporal, frame_count, options);
  return run_filter(stream, procedure, options.filter, std::move(video_id));
}

}  // namespace psr
