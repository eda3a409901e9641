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

#include "psr/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "psr/error.hpp"
#include "psr/io.hpp"
#include "psr/log.hpp"
#include "psr/pipeline.hpp"
#include "psr/random.hpp"
#include "psr/sampling.hpp"

namespace psr::cli {

namespace fs = std::filesystem;
using io::Json;

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const UndefinedMetricError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUndefinedMetric;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

namespace {

Json weights_json(const EditWeights& w) {
  return Json{{"insertion", w.insertion},
              {"deletion", w.deletion},
              {"substitution", w.substitution},
              {"transposition", w.transposition}};
}

std::string_view to_string(MatchingRule rule) {
  return rule == MatchingRule::kGreedy ? "greedy" : "optimal";
}

struct LoadedStreams {
  std::optional<io::AsdStreams> asd;
  std::optional<io::TemporalStreams> temporal;
};

LoadedStreams load_streams(const std::vector<fs::path>& paths,
                           const Procedure& procedure, bool strict) {
  LoadedStreams loaded;
  const io::ParseOptions options{strict};
  for (const fs::path& path : paths) {
    const io::StreamFileKind kind = io::detect_stream_kind(path);
    std::istringstream in(io::read_text(path));
    try {
      if (kind == io::StreamFileKind::kAsd) {
        if (loaded.asd) throw ArgumentError("more than one ASD stream given");
        loaded.asd = io::parse_asd(in, procedure, options);
      } else {
        if (loaded.temporal) {
          throw ArgumentError("more than one temporal stream given");
        }
        loaded.temporal = io::parse_temporal(in, procedure.step_count(), options);
      }
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  return loaded;
}

template <typename Map>
const typename Map::mapped_type* find_video(const std::optional<Map>& streams,
                                            const std::string& video) {
  if (!streams) return nullptr;
  auto it = streams->find(video);
  return it == streams->end() ? nullptr : &it->second;
}

std::int64_t stream_extent(const std::vector<StateDetection>* asd,
                           const std::vector<ConfidenceFrame>* temporal) {
  std::int64_t count = 0;
  if (asd != nullptr && !asd->empty()) {
    count = std::max(count, asd->back().frame + 1);
  }
  if (temporal != nullptr && !temporal->empty()) {
    count = std::max(count, temporal->back().frame + 1);
  }
  return count;
}

}  // namespace

void cmd_evaluate(const EvaluateArgs& args) {
  std::optional<Procedure> procedure;
  if (!args.procedure.empty()) procedure = io::load_procedure(args.procedure);
  const Procedure* proc = procedure ? &*procedure : nullptr;
  const io::ParseOptions options{args.strict};
  const io::LabelSet gt = io::read_labels(args.labels, proc, options);
  const io::LabelSet pred = io::read_labels(args.predictions, proc, options);
  for (const auto& [video, seq] : pred) {
    if (!gt.contains(video)) {
      logger()->warn("predictions for video '{}' have no ground truth; ignored",
                     video);
    }
  }

  if (gt.empty()) {
    throw UndefinedMetricError("ground truth " + args.labels.string() +
                               " has no videos; metrics are undefined");
  }
  std::vector<EvaluationReport> reports;
  for (const auto& [video, y] : gt) {
    auto it = pred.find(video);
    const EventSequence empty(video, {}, y.fps());
    reports.push_back(
        evaluate(y, it == pred.end() ? empty : it->second, args.options));
  }
  const DatasetSummary summary = aggregate(reports);

  std::string series;
  if (args.streams) {
    const Procedure series_proc =
        procedure ? *procedure : io::load_procedure("meccano");
    const LoadedStreams loaded = load_streams({*args.streams}, series_proc,
                                              args.strict);
    std::ostringstream out;
    bool first = true;
    if (loaded.temporal) {
      for (const auto& [video, frames] : *loaded.temporal) {
        io::write_confidence_series(out, video, frames, series_proc, first);
        first = false;
      }
    }
    if (loaded.asd) {
      for (const auto& [video, dets] : *loaded.asd) {
        const auto frames = asd_stream_probs(dets, series_proc,
                                             stream_extent(&dets, nullptr));
        io::write_confidence_series(out, video, frames, series_proc, first);
        first = false;
      }
    }
    series = out.str();
  }

  Json doc = io::header(io::kReportFormat);
  doc["config"] = {{"labels", args.labels.string()},
                   {"predictions", args.predictions.string()},
                   {"procedure", args.procedure},
                   {"weights", weights_json(args.options.weights)},
                   {"include_incorrect", args.options.include_incorrect},
                   {"matching", to_string(args.options.matching)},
                   {"strict", args.strict}};
  Json videos = Json::array();
  for (const EvaluationReport& r : reports) videos.push_back(io::report_to_json(r));
  doc["videos"] = std::move(videos);
  doc["aggregate"] = io::summary_to_json(summary);

  std::ostringstream csv;
  io::write_metrics_csv(csv, reports, summary);
  io::write_text(args.out_dir / "report.json", doc.dump(2) + "\n");
  io::write_text(args.out_dir / "metrics.csv", csv.str());
  if (args.streams) io::write_text(args.out_dir / "confidence_series.csv", series);
}

void cmd_recognize(const RecognizeArgs& args) {
  if (args.streams.empty() || args.streams.size() > 2) {
    throw ArgumentError("recognize takes one or two stream files");
  }
  args.filter.validate();
  const Procedure procedure = io::load_procedure(args.procedure);
  const LoadedStreams loaded = load_streams(args.streams, procedure, args.strict);
  PipelineKind kind;
  if (loaded.asd && loaded.temporal) {
    if (!args.fuse) {
      throw ArgumentError("an ASD and a temporal stream were given; pass --fuse");
    }
    kind = PipelineKind::kFused;
  } else {
    if (args.fuse) throw ArgumentError("--fuse needs both an ASD and a temporal stream");
    kind = loaded.asd ? PipelineKind::kAsdOnly : PipelineKind::kTemporalOnly;
  }

  std::set<std::string> videos;
  if (loaded.asd) {
    for (const auto& [v, d] : *loaded.asd) videos.insert(v);
  }
  if (loaded.temporal) {
    for (const auto& [v, f] : *loaded.temporal) videos.insert(v);
  }

  RecognizeOptions options;
  options.filter = args.filter;
  options.weights = args.weights;
  options.asd = args.asd;
  io::LabelSet predictions;
  std::ostringstream series;
  bool first = true;
  for (const std::string& video : videos) {
    static const std::vector<StateDetection> kNoDetections;
    static const std::vector<ConfidenceFrame> kNoFrames;
    const auto* asd = find_video(loaded.asd, video);
    const auto* temporal = find_video(loaded.temporal, video);
    const std::int64_t frame_count =
        args.frames ? *args.frames : stream_extent(asd, temporal);
    const auto stream = pipeline_stream(
        kind, procedure, asd ? *asd : kNoDetections,
        temporal ? *temporal : kNoFrames, frame_count, options);
    predictions.emplace(video,
                        run_filter(stream, procedure, options.filter, video));
    if (args.series) {
      io::write_confidence_series(series, video, stream, procedure, first);
      first = false;
    }
  }

  std::ostringstream out;
  io::write_labels(out, predictions);
  io::write_text(args.out, out.str());
  if (args.series) io::write_text(*args.series, series.str());
}

void cmd_simulate(const SimulateArgs& args) {
  Json doc;
  try {
    doc = Json::parse(io::read_text(args.config));
  } catch (const Json::parse_error& e) {
    throw ParseError(args.config.string() + ": invalid JSON: " + e.what());
  }
  ExperimentThresholds thresholds;
  SimConfig config;
  try {
    config = io::sim_config_from_json(doc, &thresholds);
  } catch (const ParseError& e) {
    throw ParseError(args.config.string() + ": " + e.what());
  }
  if (args.seed) config.seed = *args.seed;

  const std::vector<SimTrace> traces = simulate(config);
  const ExperimentRecord record = run_experiment(traces, config, thresholds);

  io::LabelSet labels;
  io::AsdStreams asd;
  io::TemporalStreams temporal;
  std::ostringstream occlusion;
  occlusion << "video_id,start_frame,end_frame\n";
  for (const SimTrace& t : traces) {
    labels.emplace(t.video_id, t.ground_truth);
    asd.emplace(t.video_id, t.asd_detections);
    temporal.emplace(t.video_id, t.temporal_frames);
    std::size_t f = 0;
    while (f < t.occlusion_mask.size()) {
      if (!t.occlusion_mask[f]) {
        ++f;
        continue;
      }
      const std::size_t start = f;
      while (f < t.occlusion_mask.size() && t.occlusion_mask[f]) ++f;
      occlusion << t.video_id << ',' << start << ',' << f << '\n';
    }
  }

  auto dump = [](auto writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
  };
  io::write_text(args.out_dir / "labels.jsonl",
                 dump([&](std::ostream& o) { io::write_labels(o, labels); }));
  io::write_text(args.out_dir / "asd.jsonl",
                 dump([&](std::ostream& o) { io::write_asd(o, asd); }));
  io::write_text(args.out_dir / "temporal.jsonl",
                 dump([&](std::ostream& o) { io::write_temporal(o, temporal); }));
  io::write_text(args.out_dir / "occlusion.csv", occlusion.str());

  Json comparison = io::header(io::kComparisonFormat);
  comparison["config"] = io::sim_config_to_json(config, thresholds);
  comparison["seed"] = record.seed;
  comparison["video_seeds"] = record.video_seeds;
  Json pipelines = Json::array();
  for (const PipelineOutcome& p : record.pipelines) {
    Json entry;
    entry["pipeline"] = to_string(p.kind);
    entry["threshold"] = p.threshold;
    entry["summary"] = io::summary_to_json(p.summary);
    Json videos = Json::array();
    for (const EvaluationReport& r : p.reports) {
      videos.push_back(io::report_to_json(r));
    }
    entry["videos"] = std::move(videos);
    pipelines.push_back(std::move(entry));

    io::LabelSet preds;
    for (const EventSequence& s : p.predictions) preds.emplace(s.video_id(), s);
    io::write_text(
        args.out_dir / ("predictions_" + std::string(to_string(p.kind)) + ".jsonl"),
        dump([&](std::ostream& o) { io::write_labels(o, preds); }));
  }
  comparison["pipelines"] = std::move(pipelines);
  io::write_text(args.out_dir / "comparison.json", comparison.dump(2) + "\n");
}

namespace {

SyntheticPool load_synthetic_pool(const fs::path& path) {
  Json doc;
  try {
    doc = Json::parse(io::read_text(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError(path.string() + ": expected {\"<state id>\": [refs]}");
  }
  SyntheticPool pool;
  for (const auto& [key, refs] : doc.items()) {
    int id = 0;
    try {
      id = std::stoi(key);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": state id '" + key + "' is not an integer");
    }
    if (!refs.is_array()) {
      throw ParseError(path.string() + ": state " + key + " must map to an array");
    }
    for (const Json& r : refs) {
      if (!r.is_string()) {
        throw ParseError(path.string() + ": references must be strings");
      }
      pool[id].push_back(r.get<std::string>());
    }
  }
  return pool;
}

}  // namespace

void cmd_sample(const SampleArgs& args) {
  const Procedure procedure = io::load_procedure(args.procedure);
  const io::LabelSet labels =
      io::read_labels(args.labels, &procedure, io::ParseOptions{args.strict});
  std::ostringstream out;
  if (args.mode == "kcas") {
    std::vector<io::ClipRecord> clips;
    std::size_t v = 0;
    for (const auto& [video, seq] : labels) {
      std::vector<std::int64_t> completions;
      for (const StepEvent& e : seq.correct_only().events()) {
        completions.push_back(e.frame);
      }
      std::int64_t video_len = 0;
      if (args.video_frames) {
        video_len = *args.video_frames;
      } else {
        const std::int64_t last = completions.empty() ? 0 : completions.back();
        video_len = std::max<std::int64_t>(
            last + static_cast<std::int64_t>(std::ceil(args.delta + 4 * args.sigma)) + 1,
            args.window + 1);
      }
      const KcasDistribution dist =
          kcas_pmf(completions, video_len, args.sigma, args.delta, args.window);
      for (std::int64_t end :
           sample_clip_ends(dist, args.count, derive_seed(args.seed, v))) {
        clips.push_back({video, clip_indices(end, args.window, args.samples)});
      }
      ++v;
    }
    Json params = {{"mode", "kcas"},        {"sigma", args.sigma},
                   {"delta", args.delta},   {"window", args.window},
                   {"samples", args.samples}, {"count", args.count},
                   {"seed", args.seed}};
    params["video_frames"] =
        args.video_frames ? Json(*args.video_frames) : Json(nullptr);
    io::write_clips(out, clips, params);
  } else if (args.mode == "kfs") {
    SyntheticPool pool;
    if (args.synthetic) pool = load_synthetic_pool(*args.synthetic);
    KfsParams params;
    params.window_s = args.window_s;
    params.fps = args.fps;
    params.samples_per_state = args.n_sample;
    params.synthetic_per_state = args.n_syn;
    std::vector<io::KfsRecord> records;
    for (std::size_t b = 0; b < args.batches; ++b) {
      const KfsBatchSpec batch =
          kfs_batch(labels, procedure, params, pool, derive_seed(args.seed, b));
      for (const KfsEntry& e : batch.entries) records.push_back({b, e});
    }
    io::write_kfs(out, records,
                  Json{{"mode", "kfs"},
                       {"window_s", args.window_s},
                       {"fps", args.fps},
                       {"n_sample", args.n_sample},
                       {"n_syn", args.n_syn},
                       {"batches", args.batches},
                       {"seed", args.seed}});
  } else {
    throw ArgumentError("unknown sampling mode '" + args.mode +
                        "' (expected kcas or kfs)");
  }
  io::write_text(args.out, out.str());
}

void cmd_validate(const ValidateArgs& args, std::ostream& out) {
  const Procedure procedure = io::load_procedure(args.procedure);
  out << "procedure " << args.procedure << ": " << procedure.component_count()
      << " components, " << procedure.step_count() << " actions, "
      << procedure.states().size() << " states\n";
  if (args.labels) {
    io::ParseDiagnostics diag;
    const io::LabelSet labels = io::read_labels(
        *args.labels, &procedure, io::ParseOptions{args.strict}, &diag);
    std::size_t events = 0;
    for (const auto& [v, s] : labels) events += s.size();
    out << "labels " << args.labels->string() << ": " << labels.size()
        << " videos, " << events << " events, " << diag.skipped.size()
        << " skipped lines\n";
  }
  for (const fs::path& path : args.streams) {
    const LoadedStreams loaded = load_streams({path}, procedure, args.strict);
    if (loaded.asd) {
      std::size_t n = 0;
      for (const auto& [v, d] : *loaded.asd) n += d.size();
      out << "asd stream " << path.string() << ": " << loaded.asd->size()
          << " videos, " << n << " detections\n";
    } else if (loaded.temporal) {
      std::size_t n = 0;
      for (const auto& [v, f] : *loaded.temporal) n += f.size();
      out << "temporal stream " << path.string() << ": "
          << loaded.temporal->size() << " videos, " << n << " frames\n";
    }
  }
}

}  // namespace psr::cli
