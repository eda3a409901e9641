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

// Python bindings for the core operations. Sequences cross the boundary as
// plain lists; configs as JSON text or dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "psr/error.hpp"
#include "psr/io.hpp"
#include "psr/losses.hpp"
#include "psr/metrics.hpp"
#include "psr/pipeline.hpp"
#include "psr/recognition_filter.hpp"
#include "psr/sampling.hpp"
#include "psr/simulator.hpp"

namespace py = pybind11;

namespace psr {
namespace {

using Weights = std::tuple<double, double, double, double>;

EditWeights to_weights(const Weights& w) {
  EditWeights out{std::get<0>(w), std::get<1>(w), std::get<2>(w), std::get<3>(w)};
  out.validate();
  return out;
}

ActionId to_action(std::int64_t id) {
  if (id < 0) throw ArgumentError("action ids are non-negative");
  return ActionId{static_cast<std::uint32_t>(id)};
}

std::vector<ActionId> to_actions(const std::vector<std::int64_t>& ids) {
  std::vector<ActionId> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(to_action(id));
  return out;
}

// (action, frame) or (action, frame, correct).
EventSequence make_sequence(const Procedure& proc, const std::string& video_id,
                            const std::vector<py::tuple>& items) {
  std::vector<StepEvent> events;
  for (const py::tuple& item : items) {
    if (item.size() != 2 && item.size() != 3) {
      throw ArgumentError("events are (action, frame[, correct]) tuples");
    }
    const bool correct = item.size() == 3 ? item[2].cast<bool>() : true;
    events.push_back(make_event(proc, to_action(item[0].cast<std::int64_t>()),
                                item[1].cast<std::int64_t>(), correct));
  }
  return EventSequence(video_id, std::move(events), proc.fps());
}

MatchingRule to_matching(const std::string& name) {
  if (name == "greedy") return MatchingRule::kGreedy;
  if (name == "optimal") return MatchingRule::kOptimal;
  throw ArgumentError("matching must be 'greedy' or 'optimal'");
}

py::dict report_dict(const EvaluationReport& r) {
  py::dict d;
  d["video_id"] = r.video_id;
  d["pos"] = r.pos;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["tau_s"] = r.tau_s;
  d["tp"] = r.tp;
  d["fp"] = r.fp;
  d["fn"] = r.fn;
  d["delays_s"] = r.delays_s;
  return d;
}

py::dict summary_dict(const DatasetSummary& s) {
  py::dict d;
  d["videos"] = s.videos;
  d["pos"] = s.pos;
  d["precision"] = s.precision;
  d["recall"] = s.recall;
  d["f1"] = s.f1;
  d["tau_s"] = s.tau_s;
  d["tp"] = s.tp;
  d["fp"] = s.fp;
  d["fn"] = s.fn;
  return d;
}

std::vector<ConfidenceFrame> to_frames(const std::vector<std::vector<double>>& probs,
                                       const std::optional<std::vector<std::int64_t>>& frames,
                                       StreamKind kind) {
  if (frames && frames->size() != probs.size()) {
    throw ArgumentError("frames and probs differ in length");
  }
  std::vector<ConfidenceFrame> out;
  out.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    out.push_back({frames ? (*frames)[i] : static_cast<std::int64_t>(i), probs[i], kind});
  }
  return out;
}

SimConfig parse_config(const std::optional<std::string>& json,
                       std::optional<std::uint64_t> seed,
                       ExperimentThresholds* thresholds) {
  SimConfig config = json ? io::sim_config_from_json(io::Json::parse(*json), thresholds)
                          : heavy_occlusion_config(seed.value_or(0));
  if (seed) config.seed = *seed;
  return config;
}

}  // namespace
}  // namespace psr

PYBIND11_MODULE(_psr, m) {
  using namespace psr;
  m.doc() = "Streaming procedure step recognition engine";

  static py::exception<Error> base(m, "PsrError");
  py::register_exception<StructuralError>(m, "StructuralError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<StreamError>(m, "StreamError", base.ptr());
  py::register_exception<AlignmentError>(m, "AlignmentError", base.ptr());
  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", base.ptr());
  py::register_exception<UnknownTransitionError>(m, "UnknownTransitionError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<Procedure>(m, "Procedure")
      .def_property_readonly("components", &Procedure::components)
      .def_property_readonly("step_count", &Procedure::step_count)
      .def_property_readonly("fps", [](const Procedure& p) { return p.fps().value(); })
      .def_property_readonly("states",
                             [](const Procedure& p) {
                               std::vector<std::string> out;
                               for (const auto& s : p.states()) out.push_back(s.to_string());
                               return out;
                             })
      .def("action_for",
           [](const Procedure& p, std::size_t component, const std::string& kind) {
             const auto id = p.action_for(component, parse_step_kind(kind));
             return id ? std::optional<std::uint32_t>(to_underlying(*id)) : std::nullopt;
           },
           py::arg("component"), py::arg("kind"))
      .def("to_json", [](const Procedure& p) { return io::procedure_to_json(p).dump(); });

  m.def("meccano_procedure", [](std::int64_t fps) { return meccano_procedure(make_fps(fps)); },
        py::arg("fps") = 10, "The 17-component motorbike toy assembly.");
  m.def("load_procedure", &io::load_procedure, py::arg("spec"),
        "Load 'meccano' or a procedure JSON file.");

  py::class_<StepEvent>(m, "StepEvent")
      .def_property_readonly("action", [](const StepEvent& e) { return to_underlying(e.action); })
      .def_readonly("component", &StepEvent::component)
      .def_property_readonly("kind", [](const StepEvent& e) { return std::string(to_string(e.kind)); })
      .def_readonly("correct", &StepEvent::correct)
      .def_readonly("frame", &StepEvent::frame)
      .def_readonly("time_s", &StepEvent::time_s)
      .def("__repr__", [](const StepEvent& e) {
        return "StepEvent(action=" + std::to_string(to_underlying(e.action)) +
               ", frame=" + std::to_string(e.frame) + ")";
      });

  py::class_<EventSequence>(m, "EventSequence")
      .def(py::init(&make_sequence), py::arg("procedure"), py::arg("video_id"),
           py::arg("events"))
      .def_property_readonly("video_id", &EventSequence::video_id)
      .def_property_readonly("events", &EventSequence::events)
      .def("action_order",
           [](const EventSequence& s) {
             std::vector<std::uint32_t> out;
             for (auto a : s.action_order()) out.push_back(to_underlying(a));
             return out;
           })
      .def("__len__", &EventSequence::size)
      .def("__eq__", [](const EventSequence& a, const EventSequence& b) { return a == b; });

  m.def("damerau_levenshtein",
        [](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
           const Weights& w) {
          return damerau_levenshtein(to_actions(a), to_actions(b), to_weights(w));
        },
        py::arg("a"), py::arg("b"), py::arg("weights") = Weights{1, 1, 1, 1});
  m.def("pos_score",
        [](const EventSequence& gt, const EventSequence& pred, const Weights& w) {
          return pos_score(gt, pred, to_weights(w));
        },
        py::arg("gt"), py::arg("pred"), py::arg("weights") = Weights{1, 1, 1, 1});
  m.def("f1_score",
        [](std::size_t tp, std::size_t fp, std::size_t fn) {
          const auto r = f1_score(tp, fp, fn);
          return std::make_tuple(r.precision, r.recall, r.f1);
        },
        py::arg("tp"), py::arg("fp"), py::arg("fn"));
  m.def("evaluate",
        [](const EventSequence& gt, const EventSequence& pred, const Weights& w,
           bool include_incorrect, const std::string& matching) {
          EvaluationOptions options{to_weights(w), include_incorrect, to_matching(matching)};
          return report_dict(evaluate(gt, pred, options));
        },
        py::arg("gt"), py::arg("pred"), py::arg("weights") = Weights{1, 1, 1, 1},
        py::arg("include_incorrect") = false, py::arg("matching") = "greedy");

  m.def("run_filter",
        [](const Procedure& proc, const std::vector<std::vector<double>>& probs,
           const std::optional<std::vector<std::int64_t>>& frames, double threshold,
           double retention, double evidence_floor, const std::string& video_id) {
          const auto stream = to_frames(probs, frames, StreamKind::kTemporal);
          return run_filter(stream, proc, FilterConfig{threshold, retention, evidence_floor},
                            video_id);
        },
        py::arg("procedure"), py::arg("probs"), py::arg("frames") = std::nullopt,
        py::arg("threshold") = 1.0, py::arg("retention") = 0.75,
        py::arg("evidence_floor") = 0.0, py::arg("video_id") = "");
  m.def("fuse",
        [](const std::vector<double>& asd, const std::vector<double>& temporal,
           double w_asd, double w_temporal) {
          return fuse(ConfidenceFrame{0, asd, StreamKind::kAsd},
                      ConfidenceFrame{0, temporal, StreamKind::kTemporal},
                      FusionWeights{w_asd, w_temporal})
              .probs;
        },
        py::arg("asd"), py::arg("temporal"), py::arg("w_asd") = 0.5,
        py::arg("w_temporal") = 0.5);

  m.def("kcas_pmf",
        [](const std::vector<std::int64_t>& completions, std::int64_t video_len,
           double sigma, double delta, std::int64_t window) {
          const auto d = kcas_pmf(completions, video_len, sigma, delta, window);
          return std::make_pair(d.first_frame, d.pmf);
        },
        py::arg("completions"), py::arg("video_len"), py::arg("sigma") = kKcasSigma,
        py::arg("delta") = kKcasDelta, py::arg("window") = kClipWindow,
        "Returns (first_frame, pmf) over valid clip-end frames.");
  m.def("sample_clip_ends",
        [](const std::vector<std::int64_t>& completions, std::int64_t video_len,
           std::size_t n, std::uint64_t seed, double sigma, double delta,
           std::int64_t window) {
          return sample_clip_ends(kcas_pmf(completions, video_len, sigma, delta, window),
                                  n, seed);
        },
        py::arg("completions"), py::arg("video_len"), py::arg("n"), py::arg("seed"),
        py::arg("sigma") = kKcasSigma, py::arg("delta") = kKcasDelta,
        py::arg("window") = kClipWindow);
  m.def("clip_indices",
        [](std::int64_t end, std::int64_t window, std::int64_t samples) {
          return clip_indices(end, window, samples).indices;
        },
        py::arg("end_frame"), py::arg("window") = kClipWindow,
        py::arg("samples") = kClipSamples);
  m.def("clip_label",
        [](const EventSequence& events, const Procedure& proc, std::int64_t start,
           std::int64_t end) { return clip_label(events, proc, start, end).to_string(); },
        py::arg("events"), py::arg("procedure"), py::arg("start_frame"),
        py::arg("end_frame"));

  m.def("supcon_loss",
        [](const std::vector<std::vector<double>>& vectors, const std::vector<int>& labels,
           double temperature, bool log_outside) {
          return supcon_loss({Matrix::from_rows(vectors), labels, temperature},
                             log_outside ? SupConVariant::kLogOutside
                                         : SupConVariant::kLogInside);
        },
        py::arg("vectors"), py::arg("labels"), py::arg("temperature") = 0.07,
        py::arg("log_outside") = false);
  m.def("multilabel_bce",
        [](const std::vector<std::vector<double>>& predictions,
           const std::vector<std::vector<double>>& targets) {
          return multilabel_bce({Matrix::from_rows(predictions), Matrix::from_rows(targets)});
        },
        py::arg("predictions"), py::arg("targets"));

  m.def("heavy_occlusion_config",
        [](std::uint64_t seed) {
          return io::sim_config_to_json(heavy_occlusion_config(seed), ExperimentThresholds{})
              .dump();
        },
        py::arg("seed") = 0, "The heavy-occlusion simulator config as JSON text.");
  m.def("simulate",
        [](const std::optional<std::string>& config, std::optional<std::uint64_t> seed) {
          py::list out;
          for (const SimTrace& t : simulate(parse_config(config, seed, nullptr))) {
            py::dict d;
            d["video_id"] = t.video_id;
            d["seed"] = t.seed;
            d["frame_count"] = t.frame_count;
            d["ground_truth"] = t.ground_truth;
            std::size_t occluded = 0;
            for (bool b : t.occlusion_mask) occluded += b;
            d["occluded_frames"] = occluded;
            d["asd_detections"] = t.asd_detections.size();
            out.append(std::move(d));
          }
          return out;
        },
        py::arg("config") = std::nullopt, py::arg("seed") = std::nullopt,
        "Simulate videos; defaults to the heavy-occlusion config.");
  m.def("run_experiment",
        [](const std::optional<std::string>& config, std::optional<std::uint64_t> seed) {
          ExperimentThresholds thresholds;
          const SimConfig cfg = parse_config(config, seed, &thresholds);
          const ExperimentRecord record = run_experiment(cfg, thresholds);
          py::dict out;
          for (const PipelineOutcome& p : record.pipelines) {
            py::dict entry = summary_dict(p.summary);
            entry["threshold"] = p.threshold;
            out[py::str(std::string(to_string(p.kind)))] = entry;
          }
          return out;
        },
        py::arg("config") = std::nullopt, py::arg("seed") = std::nullopt,
        "Run the three pipelines on simulated videos; returns per-pipeline summaries.");
}
