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

#include "psr/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "psr/error.hpp"
#include "psr/log.hpp"

namespace psr::io {

namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

Json parse_line(const std::string& text, std::size_t line) {
  try {
    Json record = Json::parse(text);
    if (!record.is_object()) {
      throw ParseError("expected a JSON object", line);
    }
    return record;
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line);
  }
}

const Json& field(const Json& record, const char* name, std::size_t line) {
  auto it = record.find(name);
  if (it == record.end()) {
    throw ParseError(std::string("missing field '") + name + "'", line);
  }
  return *it;
}

std::int64_t get_int(const Json& record, const char* name, std::size_t line) {
  const Json& v = field(record, name, line);
  if (!v.is_number_integer()) {
    throw ParseError(std::string("field '") + name + "' must be an integer",
                     line);
  }
  return v.get<std::int64_t>();
}

double get_number(const Json& record, const char* name, std::size_t line) {
  const Json& v = field(record, name, line);
  if (!v.is_number()) {
    throw ParseError(std::string("field '") + name + "' must be a number",
                     line);
  }
  return v.get<double>();
}

std::string get_string(const Json& record, const char* name,
                       std::size_t line) {
  const Json& v = field(record, name, line);
  if (!v.is_string()) {
    throw ParseError(std::string("field '") + name + "' must be a string",
                     line);
  }
  return v.get<std::string>();
}

bool get_bool(const Json& record, const char* name, std::size_t line) {
  const Json& v = field(record, name, line);
  if (!v.is_boolean()) {
    throw ParseError(std::string("field '") + name + "' must be a boolean",
                     line);
  }
  return v.get<bool>();
}

// Runs `fn` on every record after the optional header. Errors abort in strict
// mode and are logged and skipped in lenient mode.
template <typename Fn>
void for_each_record(std::istream& in, std::string_view format,
                     const ParseOptions& options,
                     ParseDiagnostics* diagnostics, Fn&& fn) {
  std::string text;
  std::size_t line = 0;
  bool first = true;
  while (std::getline(in, text)) {
    ++line;
    if (is_blank(text)) continue;
    try {
      const Json record = parse_line(text, line);
      if (first) {
        first = false;
        if (record.contains("format")) {
          check_header(record, format, line);
          continue;
        }
      }
      fn(record, line);
    } catch (const ParseError& e) {
      if (options.strict) {
        if (e.line() == 0) throw ParseError(e.what(), line);
        throw;
      }
      const std::string what = e.line() == 0
                                   ? "line " + std::to_string(line) + ": " + e.what()
                                   : std::string(e.what());
      logger()->warn("skipping {}", what);
      if (diagnostics != nullptr) diagnostics->skipped.push_back(what);
    } catch (const Error& e) {
      if (options.strict) throw ParseError(e.what(), line);
      logger()->warn("skipping line {}: {}", line, e.what());
      if (diagnostics != nullptr) {
        diagnostics->skipped.push_back("line " + std::to_string(line) + ": " +
                                       e.what());
      }
    }
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

Json header(std::string_view format) {
  Json h;
  h["format"] = format;
  h["version"] = kSchemaVersion;
  return h;
}

void check_header(const Json& record, std::string_view format,
                  std::size_t line) {
  const std::string found = get_string(record, "format", line);
  if (found != format) {
    throw ParseError("expected a " + std::string(format) + " file, found " +
                     found,
                     line);
  }
  const std::string version = get_string(record, "version", line);
  int major = 0;
  try {
    major = std::stoi(version.substr(0, version.find('.')));
  } catch (const std::exception&) {
    throw ParseError("unreadable schema version '" + version + "'", line);
  }
  if (major > kSchemaMajor || major < 1) {
    throw ParseError("unsupported " + found + " schema version " + version +
                         " (this build reads major version " +
                         std::to_string(kSchemaMajor) + ")",
                     line);
  }
}

std::string format_number(double value) { return Json(value).dump(); }

std::string format_fps(Fps fps) {
  if (fps.den == 1) return std::to_string(fps.num);
  return std::to_string(fps.num) + "/" + std::to_string(fps.den);
}

Fps parse_fps(const Json& value) {
  if (value.is_number_integer()) return make_fps(value.get<std::int64_t>(), 1);
  if (value.is_string()) {
    const std::string text = value.get<std::string>();
    const auto slash = text.find('/');
    try {
      if (slash == std::string::npos) return make_fps(std::stoll(text), 1);
      return make_fps(std::stoll(text.substr(0, slash)),
                      std::stoll(text.substr(slash + 1)));
    } catch (const std::logic_error&) {
      throw ParseError("unreadable fps '" + text + "'");
    }
  }
  throw ParseError("fps must be an integer or a \"num/den\" string");
}

namespace {

Json fps_json(Fps fps) {
  if (fps.den == 1) return Json(fps.num);
  return Json(format_fps(fps));
}

}  // namespace

// --- labels ------------------------------------------------------------------

LabelSet parse_labels(std::istream& in, const Procedure* procedure,
                      const ParseOptions& options,
                      ParseDiagnostics* diagnostics) {
  std::map<std::string, std::pair<Fps, std::vector<StepEvent>>> videos;
  std::set<std::tuple<std::string, std::int64_t, std::uint32_t>> seen;
  for_each_record(
      in, kLabelsFormat, options, diagnostics,
      [&](const Json& rec, std::size_t line) {
        const std::string video = get_string(rec, "video_id", line);
        const std::int64_t frame = get_int(rec, "frame", line);
        if (frame < 0) throw ParseError("frame must be non-negative", line);
        Fps fps;
        try {
          fps = parse_fps(field(rec, "fps", line));
        } catch (const Error& e) {
          throw ParseError(e.what(), line);
        }
        const std::int64_t action_raw = get_int(rec, "action", line);
        if (action_raw < 0 || action_raw > UINT32_MAX) {
          throw ParseError("action id out of range", line);
        }
        const ActionId action{static_cast<std::uint32_t>(action_raw)};
        const std::int64_t component = get_int(rec, "component", line);
        if (component < 0) throw ParseError("component must be non-negative", line);
        StepKind kind;
        try {
          kind = parse_step_kind(get_string(rec, "kind", line));
        } catch (const ArgumentError& e) {
          throw ParseError(e.what(), line);
        }
        const bool correct = get_bool(rec, "correct", line);
        if (procedure != nullptr) {
          if (!procedure->has_action(action)) {
            throw ParseError("unknown action " + std::to_string(action_raw),
                             line);
          }
          const ActionEffect& effect = procedure->action(action).effect;
          if (effect.component != static_cast<std::size_t>(component) ||
              effect.kind != kind) {
            throw ParseError("action " + std::to_string(action_raw) +
                                 " does not " + std::string(to_string(kind)) +
                                 " component " + std::to_string(component),
                             line);
          }
        }
        auto [it, inserted] = videos.try_emplace(video, fps, std::vector<StepEvent>{});
        if (!inserted && it->second.first != fps) {
          throw ParseError("video '" + video + "' mixes frame rates", line);
        }
        if (!seen.emplace(video, frame, action_raw).second) {
          throw ParseError("duplicate event for video '" + video +
                               "', frame " + std::to_string(frame) +
                               ", action " + std::to_string(action_raw),
                           line);
        }
        it->second.second.push_back(
            StepEvent{action, static_cast<std::size_t>(component), kind,
                      correct, frame, frame_to_seconds(frame, fps)});
      });
  LabelSet labels;
  for (auto& [video, entry] : videos) {
    labels.emplace(video,
                   EventSequence(video, std::move(entry.second), entry.first));
  }
  return labels;
}

LabelSet read_labels(const std::filesystem::path& path,
                     const Procedure* procedure, const ParseOptions& options,
                     ParseDiagnostics* diagnostics) {
  std::ifstream in = open_input(path);
  try {
    return parse_labels(in, procedure, options, diagnostics);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_labels(std::ostream& out, const LabelSet& labels) {
  out << header(kLabelsFormat).dump() << '\n';
  for (const auto& [video, sequence] : labels) {
    for (const StepEvent& e : sequence.events()) {
      Json rec;
      rec["video_id"] = video;
      rec["frame"] = e.frame;
      rec["fps"] = fps_json(sequence.fps());
      rec["action"] = to_underlying(e.action);
      rec["component"] = e.component;
      rec["kind"] = to_string(e.kind);
      rec["correct"] = e.correct;
      out << rec.dump() << '\n';
    }
  }
}

// --- streams -----------------------------------------------------------------

AsdStreams parse_asd(std::istream& in, const Procedure& procedure,
                     const ParseOptions& options,
                     ParseDiagnostics* diagnostics) {
  AsdStreams streams;
  for_each_record(
      in, kAsdFormat, options, diagnostics,
      [&](const Json& rec, std::size_t line) {
        const std::string video = get_string(rec, "video_id", line);
        const std::int64_t frame = get_int(rec, "frame", line);
        const std::int64_t state_id = get_int(rec, "state_id", line);
        const double confidence = get_number(rec, "confidence", line);
        if (frame < 0) throw ParseError("frame must be non-negative", line);
        if (!(confidence >= 0.0 && confidence <= 1.0)) {
          throw ParseError("confidence must lie in [0, 1]", line);
        }
        std::optional<AssemblyState> state =
            procedure.state_by_id(static_cast<int>(state_id));
        if (!state) {
          std::string known;
          for (const AssemblyState& s : procedure.states()) {
            if (!s.state_id()) continue;
            if (!known.empty()) known += ", ";
            known += std::to_string(*s.state_id());
          }
          throw ParseError("unknown state_id " + std::to_string(state_id) +
                               " (known ids: " + known + ")",
                           line);
        }
        auto& dets = streams[video];
        if (!dets.empty() && frame <= dets.back().frame) {
          throw ParseError("video '" + video + "': frame " +
                               std::to_string(frame) + " is out of order",
                           line);
        }
        dets.push_back(StateDetection{frame, std::move(*state), confidence});
      });
  return streams;
}

void write_asd(std::ostream& out, const AsdStreams& streams) {
  out << header(kAsdFormat).dump() << '\n';
  for (const auto& [video, dets] : streams) {
    for (const StateDetection& d : dets) {
      if (!d.state.state_id()) {
        throw StructuralError("state detection at frame " +
                              std::to_string(d.frame) + " has no state id");
      }
      Json rec;
      rec["video_id"] = video;
      rec["frame"] = d.frame;
      rec["state_id"] = *d.state.state_id();
      rec["confidence"] = d.confidence;
      out << rec.dump() << '\n';
    }
  }
}

TemporalStreams parse_temporal(std::istream& in, std::size_t step_count,
                               const ParseOptions& options,
                               ParseDiagnostics* diagnostics) {
  TemporalStreams streams;
  for_each_record(
      in, kTemporalFormat, options, diagnostics,
      [&](const Json& rec, std::size_t line) {
        const std::string video = get_string(rec, "video_id", line);
        const std::int64_t frame = get_int(rec, "frame", line);
        if (frame < 0) throw ParseError("frame must be non-negative", line);
        const Json& probs = field(rec, "probs", line);
        if (!probs.is_array()) {
          throw ParseError("field 'probs' must be an array", line);
        }
        if (probs.size() != step_count) {
          throw ParseError("frame " + std::to_string(frame) + " of video '" +
                               video + "' has " + std::to_string(probs.size()) +
                               " probabilities, expected " +
                               std::to_string(step_count),
                           line);
        }
        ConfidenceFrame cf{frame, {}, StreamKind::kTemporal};
        cf.probs.reserve(step_count);
        for (const Json& p : probs) {
          if (!p.is_number()) {
            throw ParseError("probabilities must be numbers", line);
          }
          const double v = p.get<double>();
          if (!(v >= 0.0 && v <= 1.0)) {
            throw ParseError("frame " + std::to_string(frame) +
                                 " has a probability outside [0, 1]",
                             line);
          }
          cf.probs.push_back(v);
        }
        auto& frames = streams[video];
        if (!frames.empty() && frame <= frames.back().frame) {
          throw ParseError("video '" + video + "': frame " +
                               std::to_string(frame) + " is out of order",
                           line);
        }
        frames.push_back(std::move(cf));
      });
  return streams;
}

void write_temporal(std::ostream& out, const TemporalStreams& streams,
                    bool dense) {
  out << header(kTemporalFormat).dump() << '\n';
  for (const auto& [video, frames] : streams) {
    for (const ConfidenceFrame& f : frames) {
      const bool silent = std::all_of(f.probs.begin(), f.probs.end(),
                                      [](double p) { return p == 0.0; });
      if (silent && !dense) continue;
      Json rec;
      rec["video_id"] = video;
      rec["frame"] = f.frame;
      rec["probs"] = f.probs;
      out << rec.dump() << '\n';
    }
  }
}

StreamFileKind detect_stream_kind(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (is_blank(text)) continue;
    const Json record = parse_line(text, line);
    if (record.contains("format")) {
      const std::string format = get_string(record, "format", line);
      if (format == kAsdFormat) return StreamFileKind::kAsd;
      if (format == kTemporalFormat) return StreamFileKind::kTemporal;
      throw ParseError(path.string() + " is a " + format +
                       " file, not a detector stream");
    }
    if (record.contains("state_id")) return StreamFileKind::kAsd;
    if (record.contains("probs")) return StreamFileKind::kTemporal;
    throw ParseError(path.string() + ": cannot tell the stream kind", line);
  }
  throw ParseError(path.string() + " is empty");
}

// --- sampler outputs ---------------------------------------------------------

void write_clips(std::ostream& out, const std::vector<ClipRecord>& clips,
                 const Json& params) {
  Json h = header(kClipsFormat);
  h["params"] = params;
  out << h.dump() << '\n';
  for (const ClipRecord& c : clips) {
    Json rec;
    rec["video_id"] = c.video_id;
    rec["end_frame"] = c.clip.end_frame;
    rec["window"] = c.clip.window;
    rec["indices"] = c.clip.indices;
    out << rec.dump() << '\n';
  }
}

std::vector<ClipRecord> parse_clips(std::istream& in) {
  std::vector<ClipRecord> clips;
  for_each_record(in, kClipsFormat, ParseOptions{}, nullptr,
                  [&](const Json& rec, std::size_t line) {
                    ClipRecord c;
                    c.video_id = get_string(rec, "video_id", line);
                    c.clip.end_frame = get_int(rec, "end_frame", line);
                    c.clip.window = get_int(rec, "window", line);
                    const Json& idx = field(rec, "indices", line);
                    if (!idx.is_array()) {
                      throw ParseError("field 'indices' must be an array", line);
                    }
                    for (const Json& v : idx) {
                      if (!v.is_number_integer()) {
                        throw ParseError("indices must be integers", line);
                      }
                      c.clip.indices.push_back(v.get<std::int64_t>());
                    }
                    clips.push_back(std::move(c));
                  });
  return clips;
}

void write_kfs(std::ostream& out, const std::vector<KfsRecord>& records,
               const Json& params) {
  Json h = header(kKfsFormat);
  h["params"] = params;
  out << h.dump() << '\n';
  for (const KfsRecord& r : records) {
    Json rec;
    rec["batch"] = r.batch;
    rec["state_id"] = r.entry.state_id;
    rec["synthetic"] = r.entry.synthetic;
    if (r.entry.synthetic) {
      rec["ref"] = r.entry.synthetic_ref;
    } else {
      rec["video_id"] = r.entry.video_id;
      rec["frame"] = r.entry.frame;
      rec["occurrence_frame"] = r.entry.occurrence_frame;
    }
    out << rec.dump() << '\n';
  }
}

std::vector<KfsRecord> parse_kfs(std::istream& in) {
  std::vector<KfsRecord> records;
  for_each_record(
      in, kKfsFormat, ParseOptions{}, nullptr,
      [&](const Json& rec, std::size_t line) {
        KfsRecord r;
        const std::int64_t batch = get_int(rec, "batch", line);
        if (batch < 0) throw ParseError("batch must be non-negative", line);
        r.batch = static_cast<std::size_t>(batch);
        r.entry.state_id = static_cast<int>(get_int(rec, "state_id", line));
        r.entry.synthetic = get_bool(rec, "synthetic", line);
        if (r.entry.synthetic) {
          r.entry.synthetic_ref = get_string(rec, "ref", line);
        } else {
          r.entry.video_id = get_string(rec, "video_id", line);
          r.entry.frame = get_int(rec, "frame", line);
          r.entry.occurrence_frame = get_int(rec, "occurrence_frame", line);
        }
        records.push_back(std::move(r));
      });
  return records;
}

// --- procedures ----------------------------------------------------------------

Json procedure_to_json(const Procedure& procedure) {
  Json doc = header(kProcedureFormat);
  doc["fps"] = fps_json(procedure.fps());
  doc["components"] = procedure.components();
  Json actions = Json::array();
  for (const ActionSpec& a : procedure.actions()) {
    Json rec;
    rec["id"] = to_underlying(a.id);
    rec["name"] = a.name;
    rec["component"] = a.effect.component;
    rec["kind"] = to_string(a.effect.kind);
    actions.push_back(std::move(rec));
  }
  doc["actions"] = std::move(actions);
  Json states = Json::array();
  for (const AssemblyState& s : procedure.states()) {
    Json rec;
    if (s.state_id()) rec["id"] = *s.state_id();
    rec["bits"] = s.to_string();
    states.push_back(std::move(rec));
  }
  doc["states"] = std::move(states);
  return doc;
}

Procedure procedure_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("procedure must be a JSON object");
  if (doc.contains("format")) check_header(doc, kProcedureFormat, 0);
  const Json& comps = field(doc, "components", 0);
  if (!comps.is_array()) throw ParseError("'components' must be an array");
  std::vector<std::string> components;
  for (const Json& c : comps) {
    if (!c.is_string()) throw ParseError("component names must be strings");
    components.push_back(c.get<std::string>());
  }
  std::vector<ActionSpec> actions;
  const Json& acts = field(doc, "actions", 0);
  if (!acts.is_array()) throw ParseError("'actions' must be an array");
  for (const Json& a : acts) {
    const std::int64_t id = get_int(a, "id", 0);
    const std::int64_t component = get_int(a, "component", 0);
    if (id < 0 || component < 0) {
      throw ParseError("action ids and components must be non-negative");
    }
    StepKind kind;
    try {
      kind = parse_step_kind(get_string(a, "kind", 0));
    } catch (const ArgumentError& e) {
      throw ParseError(e.what());
    }
    std::string name = a.contains("name") ? get_string(a, "name", 0) : "";
    actions.push_back(ActionSpec{ActionId{static_cast<std::uint32_t>(id)},
                                 std::move(name),
                                 {static_cast<std::size_t>(component), kind}});
  }
  std::vector<AssemblyState> states;
  if (doc.contains("states")) {
    for (const Json& s : doc["states"]) {
      std::optional<int> id;
      if (s.contains("id")) id = static_cast<int>(get_int(s, "id", 0));
      try {
        states.push_back(
            AssemblyState::from_string(get_string(s, "bits", 0), id));
      } catch (const ArgumentError& e) {
        throw ParseError(e.what());
      }
    }
  }
  const Fps fps = doc.contains("fps") ? parse_fps(doc["fps"]) : Fps{};
  return Procedure(std::move(components), std::move(actions), std::move(states),
                   fps);
}

Procedure load_procedure(const std::string& spec) {
  if (spec == "meccano") return meccano_procedure();
  const std::string text = read_text(spec);
  try {
    return procedure_from_json(Json::parse(text));
  } catch (const Json::parse_error& e) {
    throw ParseError(spec + ": invalid JSON: " + e.what());
  }
}

// --- simulation config -------------------------------------------------------

namespace {

// Reads optional fields of one JSON object and rejects unknown keys.
class FieldReader {
 public:
  FieldReader(const Json& obj, std::string prefix)
      : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) {
      throw ParseError((prefix_.empty() ? std::string("config")
                                        : prefix_.substr(0, prefix_.size() - 1)) +
                       ": expected an object");
    }
  }

  void number(const char* name, double& target) {
    if (const Json* v = find(name)) {
      if (!v->is_number()) fail(name, "expected a number");
      target = v->get<double>();
    }
  }

  void integer(const char* name, std::int64_t& target) {
    if (const Json* v = find(name)) {
      if (!v->is_number_integer()) fail(name, "expected an integer");
      target = v->get<std::int64_t>();
    }
  }

  void count(const char* name, std::size_t& target) {
    if (const Json* v = find(name)) {
      if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
        fail(name, "expected a non-negative integer");
      }
      target = v->get<std::size_t>();
    }
  }

  void seed(const char* name, std::uint64_t& target) {
    if (const Json* v = find(name)) {
      if (!v->is_number_integer() ||
          (v->is_number_integer() && !v->is_number_unsigned() &&
           v->get<std::int64_t>() < 0)) {
        fail(name, "expected a non-negative integer");
      }
      target = v->get<std::uint64_t>();
    }
  }

  const Json* object(const char* name) { return find(name); }

  std::string path(const char* name) const { return prefix_ + name; }

  [[noreturn]] void fail(const char* name, const std::string& why) const {
    throw ParseError(prefix_ + name + ": " + why);
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) {
        throw ParseError(prefix_ + key + ": unknown field");
      }
    }
  }

 private:
  const Json* find(const char* name) {
    seen_.insert(name);
    auto it = obj_.find(name);
    return it == obj_.end() ? nullptr : &*it;
  }

  const Json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

}  // namespace

SimConfig sim_config_from_json(const Json& doc,
                               ExperimentThresholds* thresholds) {
  SimConfig config;
  FieldReader root(doc, "");
  if (const Json* p = root.object("procedure")) {
    if (p->is_string()) {
      config.procedure = load_procedure(p->get<std::string>());
    } else if (p->is_object()) {
      try {
        config.procedure = procedure_from_json(*p);
      } catch (const Error& e) {
        throw ParseError(std::string("procedure: ") + e.what());
      }
    } else {
      root.fail("procedure", "expected \"meccano\", a path or an object");
    }
  }
  if (const Json* f = root.object("fps")) {
    Fps fps;
    try {
      fps = parse_fps(*f);
    } catch (const Error& e) {
      root.fail("fps", e.what());
    }
    const Procedure& p = config.procedure;
    config.procedure = Procedure(p.components(), p.actions(), p.states(), fps);
  }
  root.count("n_videos", config.n_videos);
  root.number("step_gap", config.step_gap);
  root.integer("min_gap", config.min_gap);
  root.integer("lead_in", config.lead_in);
  root.integer("tail", config.tail);
  root.seed("seed", config.seed);
  if (const Json* o = root.object("occlusion")) {
    FieldReader r(*o, "occlusion.");
    r.number("p_occlude", config.occlusion.p_occlude);
    r.number("p_reveal", config.occlusion.p_reveal);
    r.finish();
  }
  if (const Json* o = root.object("asd")) {
    FieldReader r(*o, "asd.");
    r.number("confidence", config.asd.confidence);
    r.number("detection_rate", config.asd.detection_rate);
    r.number("false_detection_rate", config.asd.false_detection_rate);
    r.finish();
  }
  if (const Json* o = root.object("temporal")) {
    FieldReader r(*o, "temporal.");
    TemporalModel& t = config.temporal;
    r.integer("delay_min", t.delay_min);
    r.integer("delay_max", t.delay_max);
    r.integer("ramp_frames", t.ramp_frames);
    r.number("peak", t.peak);
    r.number("hit_probability_visible", t.hit_probability_visible);
    r.number("hit_probability_occluded", t.hit_probability_occluded);
    r.number("false_positive_rate", t.false_positive_rate);
    r.number("false_positive_min", t.false_positive_min);
    r.number("false_positive_max", t.false_positive_max);
    r.finish();
  }
  if (const Json* o = root.object("errors")) {
    FieldReader r(*o, "errors.");
    r.number("p_error", config.errors.p_error);
    r.finish();
  }
  ExperimentThresholds local;
  ExperimentThresholds& th = thresholds != nullptr ? *thresholds : local;
  if (const Json* o = root.object("thresholds")) {
    FieldReader r(*o, "thresholds.");
    r.number("asd", th.asd);
    r.number("temporal", th.temporal);
    r.number("fused", th.fused);
    r.number("retention", th.retention);
    r.finish();
  }
  root.object("format");
  root.object("version");
  root.finish();
  try {
    config.validate();
  } catch (const ArgumentError& e) {
    throw ParseError(e.what());
  }
  return config;
}

Json sim_config_to_json(const SimConfig& config,
                        const ExperimentThresholds& thresholds) {
  Json doc;
  doc["procedure"] = procedure_to_json(config.procedure);
  doc["n_videos"] = config.n_videos;
  doc["step_gap"] = config.step_gap;
  doc["min_gap"] = config.min_gap;
  doc["lead_in"] = config.lead_in;
  doc["tail"] = config.tail;
  doc["seed"] = config.seed;
  doc["occlusion"] = {{"p_occlude", config.occlusion.p_occlude},
                      {"p_reveal", config.occlusion.p_reveal}};
  doc["asd"] = {{"confidence", config.asd.confidence},
                {"detection_rate", config.asd.detection_rate},
                {"false_detection_rate", config.asd.false_detection_rate}};
  const TemporalModel& t = config.temporal;
  doc["temporal"] = {{"delay_min", t.delay_min},
                     {"delay_max", t.delay_max},
                     {"ramp_frames", t.ramp_frames},
                     {"peak", t.peak},
                     {"hit_probability_visible", t.hit_probability_visible},
                     {"hit_probability_occluded", t.hit_probability_occluded},
                     {"false_positive_rate", t.false_positive_rate},
                     {"false_positive_min", t.false_positive_min},
                     {"false_positive_max", t.false_positive_max}};
  doc["errors"] = {{"p_error", config.errors.p_error}};
  doc["thresholds"] = {{"asd", thresholds.asd},
                       {"temporal", thresholds.temporal},
                       {"fused", thresholds.fused},
                       {"retention", thresholds.retention}};
  return doc;
}

// --- reports -------------------------------------------------------------------

namespace {

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json report_to_json(const EvaluationReport& r) {
  Json doc;
  doc["video_id"] = r.video_id;
  doc["pos"] = r.pos;
  doc["precision"] = r.precision;
  doc["recall"] = r.recall;
  doc["f1"] = r.f1;
  doc["tau_s"] = optional_number(r.tau_s);
  doc["tp"] = r.tp;
  doc["fp"] = r.fp;
  doc["fn"] = r.fn;
  doc["delays_s"] = r.delays_s;
  Json matches = Json::array();
  for (const auto& [p, g] : r.ledger.matches) matches.push_back({p, g});
  doc["ledger"] = {{"matches", std::move(matches)},
                   {"false_positives", r.ledger.false_positives},
                   {"false_negatives", r.ledger.false_negatives}};
  return doc;
}

Json summary_to_json(const DatasetSummary& s) {
  Json doc;
  doc["videos"] = s.videos;
  doc["pos"] = s.pos;
  doc["precision"] = s.precision;
  doc["recall"] = s.recall;
  doc["f1"] = s.f1;
  doc["tau_s"] = optional_number(s.tau_s);
  doc["tp"] = s.tp;
  doc["fp"] = s.fp;
  doc["fn"] = s.fn;
  return doc;
}

void write_metrics_csv(std::ostream& out,
                       const std::vector<EvaluationReport>& reports,
                       const DatasetSummary& summary) {
  auto tau = [](const std::optional<double>& t) {
    return t ? format_number(*t) : std::string();
  };
  out << "video_id,pos,precision,recall,f1,tau_s,tp,fp,fn\n";
  for (const EvaluationReport& r : reports) {
    out << r.video_id << ',' << format_number(r.pos) << ','
        << format_number(r.precision) << ',' << format_number(r.recall) << ','
        << format_number(r.f1) << ',' << tau(r.tau_s) << ',' << r.tp << ','
        << r.fp << ',' << r.fn << '\n';
  }
  out << "*," << format_number(summary.pos) << ','
      << format_number(summary.precision) << ','
      << format_number(summary.recall) << ',' << format_number(summary.f1)
      << ',' << tau(summary.tau_s) << ',' << summary.tp << ',' << summary.fp
      << ',' << summary.fn << '\n';
}

void write_confidence_series(std::ostream& out, const std::string& video_id,
                             const std::vector<ConfidenceFrame>& frames,
                             const Procedure& procedure, bool with_header) {
  if (with_header) out << "video_id,frame,time_s,stream,step,action,prob\n";
  for (const ConfidenceFrame& f : frames) {
    const std::string time = format_number(frame_to_seconds(f.frame, procedure.fps()));
    for (std::size_t k = 0; k < f.probs.size(); ++k) {
      if (f.probs[k] == 0.0) continue;
      out << video_id << ',' << f.frame << ',' << time << ','
          << to_string(f.stream) << ',' << k << ','
          << to_underlying(procedure.step(k).id) << ','
          << format_number(f.probs[k]) << '\n';
    }
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ParseError("failed writing '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace psr::io
