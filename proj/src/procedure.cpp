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

#include "psr/procedure.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>
#include <utility>

#include "psr/error.hpp"

namespace psr {

std::string_view to_string(StepKind kind) {
  return kind == StepKind::kInstall ? "install" : "remove";
}

StepKind parse_step_kind(std::string_view text) {
  if (text == "install") return StepKind::kInstall;
  if (text == "remove") return StepKind::kRemove;
  throw ArgumentError("unknown step kind '" + std::string(text) +
                      "' (expected install or remove)");
}

Fps make_fps(std::int64_t num, std::int64_t den) {
  if (den == 0 || num == 0 || (num < 0) != (den < 0)) {
    throw StructuralError("fps must be positive, got " + std::to_string(num) +
                          "/" + std::to_string(den));
  }
  if (num < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return Fps{num / g, den / g};
}

double frame_to_seconds(std::int64_t frame, Fps fps) {
  if (fps.num <= 0 || fps.den <= 0) {
    throw StructuralError("fps must be positive");
  }
  // frame * den / num as a single correctly rounded division.
  return static_cast<double>(frame * fps.den) / static_cast<double>(fps.num);
}

int compare_time(std::int64_t frame_a, Fps fps_a, std::int64_t frame_b,
                 Fps fps_b) {
  // a_f * a_d / a_n  vs  b_f * b_d / b_n
  const __int128 lhs = static_cast<__int128>(frame_a) * fps_a.den * fps_b.num;
  const __int128 rhs = static_cast<__int128>(frame_b) * fps_b.den * fps_a.num;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

AssemblyState AssemblyState::from_string(std::string_view bits,
                                         std::optional<int> state_id) {
  AssemblyState state(bits.size(), state_id);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') {
      throw ArgumentError("assembly state '" + std::string(bits) +
                          "' contains a character other than 0/1");
    }
    state.bits_[i] = bits[i] == '1';
  }
  return state;
}

std::size_t AssemblyState::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

std::string AssemblyState::to_string() const {
  std::string out(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out[i] = '1';
  }
  return out;
}

AssemblyState AssemblyState::operator^(const AssemblyState& other) const {
  if (width() != other.width()) {
    throw StructuralError("assembly state width mismatch: " +
                          std::to_string(width()) + " vs " +
                          std::to_string(other.width()));
  }
  AssemblyState out(width());
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    out.bits_[i] = bits_[i] != other.bits_[i];
  }
  return out;
}

Procedure::Procedure(std::vector<std::string> components,
                     std::vector<ActionSpec> actions,
                     std::vector<AssemblyState> states, Fps fps)
    : components_(std::move(components)),
      actions_(std::move(actions)),
      states_(std::move(states)),
      fps_(make_fps(fps.num, fps.den)) {
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    const ActionSpec& spec = actions_[i];
    if (spec.effect.component >= components_.size()) {
      throw StructuralError("action " + std::to_string(to_underlying(spec.id)) +
                            " references component " +
                            std::to_string(spec.effect.component) +
                            " but the procedure has " +
                            std::to_string(components_.size()));
    }
    if (!index_.emplace(spec.id, i).second) {
      throw StructuralError("duplicate action id " +
                            std::to_string(to_underlying(spec.id)));
    }
  }
  std::set<int> ids;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (states_[i].width() != components_.size()) {
      throw StructuralError("state " + std::to_string(i) + " has width " +
                            std::to_string(states_[i].width()) +
                            ", expected " + std::to_string(components_.size()));
    }
    if (const auto& id = states_[i].state_id(); id && !ids.insert(*id).second) {
      throw StructuralError("duplicate state id " + std::to_string(*id));
    }
    if (i > 0 && states_[i] == states_[i - 1]) {
      throw StructuralError("consecutive states " + std::to_string(i - 1) +
                            " and " + std::to_string(i) + " are identical");
    }
  }
}

bool Procedure::has_action(ActionId id) const { return index_.contains(id); }

const ActionSpec& Procedure::action(ActionId id) const {
  return actions_[step_index(id)];
}

std::size_t Procedure::step_index(ActionId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw StructuralError("unknown action id " +
                          std::to_string(to_underlying(id)));
  }
  return it->second;
}

std::optional<ActionId> Procedure::action_for(std::size_t component,
                                              StepKind kind) const {
  for (const ActionSpec& spec : actions_) {
    if (spec.effect.component == component && spec.effect.kind == kind) {
      return spec.id;
    }
  }
  return std::nullopt;
}

std::optional<AssemblyState> Procedure::state_by_id(int id) const {
  for (const AssemblyState& s : states_) {
    if (s.state_id() == id) return s;
  }
  return std::nullopt;
}

std::optional<AssemblyState> Procedure::match_state(
    const AssemblyState& bits) const {
  for (const AssemblyState& s : states_) {
    if (s == bits) return s;
  }
  return std::nullopt;
}

Procedure meccano_procedure(Fps fps) {
  std::vector<std::string> components = {
      "left damping fork", "right damping fork", "left rear chassis",
      "right rear chassis", "left frame",        "right frame",
      "left tail wings",   "right tail wing",    "headlamp",
      "left handle",       "right handle",       "front wheel",
      "rear wheel",        "swimarm",            "fuel tank",
      "tail wing pin",     "driving shaft"};
  const auto n = static_cast<std::uint32_t>(components.size());
  std::vector<ActionSpec> actions;
  actions.reserve(2 * n);
  for (std::uint32_t c = 0; c < n; ++c) {
    actions.push_back(
        {ActionId{c}, "install " + components[c], {c, StepKind::kInstall}});
  }
  for (std::uint32_t c = 0; c < n; ++c) {
    actions.push_back(
        {ActionId{n + c}, "remove " + components[c], {c, StepKind::kRemove}});
  }
  static constexpr const char* kLabels[] = {
      "00000000000000000", "10001000100000000", "11001100100000000",
      "11001100111000000", "11101110111000000", "11111110111001000",
      "11111111111001000", "11111111111001001", "11111111111001101",
      "11111111111101101", "11111111111111101", "11111111111111111"};
  std::vector<AssemblyState> states;
  for (int id = 0; id < static_cast<int>(std::size(kLabels)); ++id) {
    states.push_back(AssemblyState::from_string(kLabels[id], id));
  }
  return Procedure(std::move(components), std::move(actions),
                   std::move(states), fps);
}

StepEvent make_event(const Procedure& procedure, ActionId action,
                     std::int64_t frame, bool correct) {
  const ActionSpec& spec = procedure.action(action);
  return StepEvent{action,  spec.effect.component,
                   spec.effect.kind, correct,
                   frame,   frame_to_seconds(frame, procedure.fps())};
}

EventSequence::EventSequence(std::string video_id,
                             std::vector<StepEvent> events, Fps fps)
    : video_id_(std::move(video_id)),
      events_(std::move(events)),
      fps_(make_fps(fps.num, fps.den)) {
  std::stable_sort(events_.begin(), events_.end(),
                   [](const StepEvent& a, const StepEvent& b) {
                     return std::tuple(a.frame, to_underlying(a.action)) <
                            std::tuple(b.frame, to_underlying(b.action));
                   });
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (events_[i].frame < 0) {
      throw StructuralError("video '" + video_id_ + "': negative frame " +
                            std::to_string(events_[i].frame));
    }
    if (i > 0 && events_[i].frame == events_[i - 1].frame &&
        events_[i].action == events_[i - 1].action) {
      throw StructuralError(
          "video '" + video_id_ + "': duplicate event for action " +
          std::to_string(to_underlying(events_[i].action)) + " at frame " +
          std::to_string(events_[i].frame));
    }
  }
}

EventSequence EventSequence::correct_only() const {
  std::vector<StepEvent> kept;
  std::copy_if(events_.begin(), events_.end(), std::back_inserter(kept),
               [](const StepEvent& e) { return e.correct; });
  return EventSequence(video_id_, std::move(kept), fps_);
}

std::vector<ActionId> EventSequence::action_order() const {
  std::vector<ActionId> out;
  out.reserve(events_.size());
  for (const StepEvent& e : events_) out.push_back(e.action);
  return out;
}

AssemblyState cumulative_state(const EventSequence& sequence,
                               const Procedure& procedure,
                               std::int64_t frame) {
  AssemblyState state = procedure.empty_state();
  for (const StepEvent& e : sequence.events()) {
    if (e.frame > frame) break;
    if (e.component >= state.width()) {
      throw StructuralError("event references component " +
                            std::to_string(e.component) +
                            " but the procedure has " +
                            std::to_string(state.width()));
    }
    state.set(e.component, e.kind == StepKind::kInstall);
  }
  return state;
}

std::vector<ComponentChange> state_diff(const AssemblyState& prev,
                                        const AssemblyState& next) {
  if (prev.width() != next.width()) {
    throw StructuralError("assembly state width mismatch: " +
                          std::to_string(prev.width()) + " vs " +
                          std::to_string(next.width()));
  }
  std::vector<ComponentChange> changes;
  for (std::size_t c = 0; c < prev.width(); ++c) {
    if (prev.test(c) != next.test(c)) {
      changes.push_back(
          {c, next.test(c) ? StepKind::kInstall : StepKind::kRemove});
    }
  }
  return changes;
}

AssemblyState apply_changes(AssemblyState state,
                            const std::vector<ComponentChange>& changes) {
  for (const ComponentChange& change : changes) {
    state.set(change.component, change.kind == StepKind::kInstall);
  }
  return state;
}

}  // namespace psr
