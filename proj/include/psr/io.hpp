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

#ifndef PSR_IO_HPP_
#define PSR_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "psr/metrics.hpp"
#include "psr/procedure.hpp"
#include "psr/recognition_filter.hpp"
#include "psr/sampling.hpp"
#include "psr/simulator.hpp"
#include "psr/state_inference.hpp"

namespace psr::io {

using Json = nlohmann::ordered_json;

// Every file starts with {"format": ..., "version": "1.0"}. Readers accept
// any minor version of major 1 and reject later majors.
inline constexpr std::string_view kSchemaVersion = "1.0";
inline constexpr int kSchemaMajor = 1;

inline constexpr std::string_view kLabelsFormat = "psr.labels";
inline constexpr std::string_view kAsdFormat = "psr.asd";
inline constexpr std::string_view kTemporalFormat = "psr.temporal";
inline constexpr std::string_view kClipsFormat = "psr.clips";
inline constexpr std::string_view kKfsFormat = "psr.kfs";
inline constexpr std::string_view kProcedureFormat = "psr.procedure";
inline constexpr std::string_view kReportFormat = "psr.report";
inline constexpr std::string_view kComparisonFormat = "psr.comparison";

Json header(std::string_view format);
// Throws ParseError for a different format or an unsupported major version.
void check_header(const Json& record, std::string_view format,
                  std::size_t line = 1);

struct ParseOptions {
  // Strict parsing aborts on the first bad line; lenient parsing skips it and
  // records a diagnostic.
  bool strict = true;
};

struct ParseDiagnostics {
  std::vector<std::string> skipped;
};

// Canonical number text: shortest decimal that round-trips.
std::string format_number(double value);

std::string format_fps(Fps fps);
Fps parse_fps(const Json& value);

// --- step labels / predictions ---------------------------------------------

using LabelSet = std::map<std::string, EventSequence>;

// One JSON object per line:
//   {"video_id","frame","fps","action","component","kind","correct"}
// When `procedure` is given, component and kind must agree with the action.
LabelSet parse_labels(std::istream& in, const Procedure* procedure = nullptr,
                      const ParseOptions& options = {},
                      ParseDiagnostics* diagnostics = nullptr);
LabelSet read_labels(const std::filesystem::path& path,
                     const Procedure* procedure = nullptr,
                     const ParseOptions& options = {},
                     ParseDiagnostics* diagnostics = nullptr);
void write_labels(std::ostream& out, const LabelSet& labels);

// --- detector streams --------------------------------------------------------

using AsdStreams = std::map<std::string, std::vector<StateDetection>>;
using TemporalStreams = std::map<std::string, std::vector<ConfidenceFrame>>;

// {"video_id","frame","state_id","confidence"}; state ids must be known to
// the procedure and frames strictly increase per video.
AsdStreams parse_asd(std::istream& in, const Procedure& procedure,
                     const ParseOptions& options = {},
                     ParseDiagnostics* diagnostics = nullptr);
void write_asd(std::ostream& out, const AsdStreams& streams);

// {"video_id","frame","probs":[...]} with exactly step_count probabilities.
TemporalStreams parse_temporal(std::istream& in, std::size_t step_count,
                               const ParseOptions& options = {},
                               ParseDiagnostics* diagnostics = nullptr);
// Frames whose probabilities are all zero are omitted unless `dense`.
void write_temporal(std::ostream& out, const TemporalStreams& streams,
                    bool dense = false);

enum class StreamFileKind { kAsd, kTemporal };
// Decides from the header, or from the first record when there is none.
StreamFileKind detect_stream_kind(const std::filesystem::path& path);

// --- sampler outputs ---------------------------------------------------------

struct ClipRecord {
  std::string video_id;
  ClipSpec clip;

  friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

void write_clips(std::ostream& out, const std::vector<ClipRecord>& clips,
                 const Json& params);
std::vector<ClipRecord> parse_clips(std::istream& in);

struct KfsRecord {
  std::size_t batch = 0;
  KfsEntry entry;

  friend bool operator==(const KfsRecord&, const KfsRecord&) = default;
};

void write_kfs(std::ostream& out, const std::vector<KfsRecord>& records,
               const Json& params);
std::vector<KfsRecord> parse_kfs(std::istream& in);

// --- procedures, configs and reports ----------------------------------------

Json procedure_to_json(const Procedure& procedure);
Procedure procedure_from_json(const Json& doc);
// "meccano" selects the built-in procedure; anything else is a file path.
Procedure load_procedure(const std::string& spec);

// Field errors name the offending key ("occlusion.p_reveal: ...").
SimConfig sim_config_from_json(const Json& doc,
                               ExperimentThresholds* thresholds = nullptr);
Json sim_config_to_json(const SimConfig& config,
                        const ExperimentThresholds& thresholds);

Json report_to_json(const EvaluationReport& report);
Json summary_to_json(const DatasetSummary& summary);

// Flat per-video table followed by an aggregate row ("*").
void write_metrics_csv(std::ostream& out,
                       const std::vector<EvaluationReport>& reports,
                       const DatasetSummary& summary);

// Nonzero per-step confidences as video_id,frame,time_s,stream,step,action,prob.
void write_confidence_series(std::ostream& out, const std::string& video_id,
                             const std::vector<ConfidenceFrame>& frames,
                             const Procedure& procedure, bool with_header);

std::string read_text(const std::filesystem::path& path);
// Writes through a temporary file renamed into place.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace psr::io

#endif  // PSR_IO_HPP_
