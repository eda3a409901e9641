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

#ifndef PSR_PROCEDURE_HPP_
#define PSR_PROCEDURE_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psr {

// Identifier of one procedural action (e.g. "install headlamp").
enum class ActionId : std::uint32_t {};

constexpr std::uint32_t to_underlying(ActionId id) {
  return static_cast<std::uint32_t>(id);
}

enum class StepKind { kInstall, kRemove };

std::string_view to_string(StepKind kind);
// Throws ArgumentError for anything other than "install" / "remove".
StepKind parse_step_kind(std::string_view text);

constexpr StepKind opposite(StepKind kind) {
  return kind == StepKind::kInstall ? StepKind::kRemove : StepKind::kInstall;
}

// Frames per second as an exact positive rational.
struct Fps {
  std::int64_t num = 10;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / den; }
  friend bool operator==(const Fps&, const Fps&) = default;
};

// Reduces and validates; throws StructuralError when fps <= 0.
Fps make_fps(std::int64_t num, std::int64_t den = 1);

double frame_to_seconds(std::int64_t frame, Fps fps);

// Exact comparison of frame_a / fps_a against frame_b / fps_b.
int compare_time(std::int64_t frame_a, Fps fps_a, std::int64_t frame_b,
                 Fps fps_b);

// Installed-component bit-vector. Bit i is component i; the string form
// writes component 0 first, matching the assembly-state labels
// ("10001000100000000").
class AssemblyState {
 public:
  AssemblyState() = default;
  explicit AssemblyState(std::size_t width,
                         std::optional<int> state_id = std::nullopt)
      : bits_(width, false), state_id_(state_id) {}

  // Throws ArgumentError on characters other than '0' / '1'.
  static AssemblyState from_string(std::string_view bits,
                                   std::optional<int> state_id = std::nullopt);

  std::size_t width() const { return bits_.size(); }
  bool test(std::size_t component) const { return bits_.at(component); }
  void set(std::size_t component, bool installed) {
    bits_.at(component) = installed;
  }
  std::size_t count() const;

  const std::optional<int>& state_id() const { return state_id_; }
  void set_state_id(std::optional<int> id) { state_id_ = id; }

  std::string to_string() const;

  // Bitwise XOR; widths must match.
  AssemblyState operator^(const AssemblyState& other) const;

  // Equality compares bits only.
  bool same_bits(const AssemblyState& other) const {
    return bits_ == other.bits_;
  }
  friend bool operator==(const AssemblyState& a, const AssemblyState& b) {
    return a.bits_ == b.bits_;
  }

 private:
  std::vector<bool> bits_;
  std::optional<int> state_id_;
};

struct ActionEffect {
  std::size_t component = 0;
  StepKind kind = StepKind::kInstall;
};

struct ActionSpec {
  ActionId id{};
  std::string name;
  ActionEffect effect;
};

// The action vocabulary, component set and nominal state graph of one
// procedure. Immutable once built.
class Procedure {
 public:
  // Validates all invariants; throws StructuralError on violation.
  Procedure(std::vector<std::string> components,
            std::vector<ActionSpec> actions,
            std::vector<AssemblyState> states, Fps fps);

  std::size_t component_count() const { return components_.size(); }
  // Steps are the actions in declaration order; step index k is the k-th
  // action. Confidence vectors are indexed by step.
  std::size_t step_count() const { return actions_.size(); }

  const std::vector<std::string>& components() const { return components_; }
  const std::vector<ActionSpec>& actions() const { return actions_; }
  const std::vector<AssemblyState>& states() const { return states_; }
  Fps fps() const { return fps_; }

  bool has_action(ActionId id) const;
  const ActionSpec& action(ActionId id) const;
  std::size_t step_index(ActionId id) const;
  const ActionSpec& step(std::size_t index) const { return actions_.at(index); }

  // The action that applies `kind` to `component`, if the vocabulary has one.
  std::optional<ActionId> action_for(std::size_t component,
                                     StepKind kind) const;

  std::optional<AssemblyState> state_by_id(int id) const;
  // The nominal state whose bits equal `bits`, if any.
  std::optional<AssemblyState> match_state(const AssemblyState& bits) const;

  AssemblyState empty_state() const {
    return AssemblyState(components_.size());
  }

 private:
  std::vector<std::string> components_;
  std::vector<ActionSpec> actions_;
  std::vector<AssemblyState> states_;
  Fps fps_;
  std::map<ActionId, std::size_t> index_;
};

// The 17-component toy-motorcycle procedure with its 12 nominal assembly
// states. Install of component c has id c; removal has id 17 + c.
Procedure meccano_procedure(Fps fps = Fps{10, 1});

struct StepEvent {
  ActionId action{};
  std::size_t component = 0;
  StepKind kind = StepKind::kInstall;
  bool correct = true;
  std::int64_t frame = 0;
  double time_s = 0.0;

  friend bool operator==(const StepEvent&, const StepEvent&) = default;
};

// Builds an event whose component / kind come from the procedure and whose
// time is derived from its fps.
StepEvent make_event(const Procedure& procedure, ActionId action,
                     std::int64_t frame, bool correct = true);

// Step events of one video, ordered by frame with ties broken by ascending
// action id. No two events share (frame, action).
class EventSequence {
 public:
  EventSequence() = default;
  // Sorts; throws StructuralError on duplicate (frame, action) or negative
  // frames.
  EventSequence(std::string video_id, std::vector<StepEvent> events,
                Fps fps = Fps{});

  const std::string& video_id() const { return video_id_; }
  const std::vector<StepEvent>& events() const { return events_; }
  Fps fps() const { return fps_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const StepEvent& operator[](std::size_t i) const { return events_[i]; }

  // Ground truth Y: correctly executed steps only.
  EventSequence correct_only() const;
  std::vector<ActionId> action_order() const;

  friend bool operator==(const EventSequence&, const EventSequence&) = default;

 private:
  std::string video_id_;
  std::vector<StepEvent> events_;
  Fps fps_;
};

// Component c is installed iff the last event on c at or before `frame` was
// an install. Throws StructuralError for components outside the procedure.
AssemblyState cumulative_state(const EventSequence& sequence,
                               const Procedure& procedure,
                               std::int64_t frame);

struct ComponentChange {
  std::size_t component = 0;
  StepKind kind = StepKind::kInstall;

  friend bool operator==(const ComponentChange&,
                         const ComponentChange&) = default;
};

// One entry per differing bit, ascending component index.
std::vector<ComponentChange> state_diff(const AssemblyState& prev,
                                        const AssemblyState& next);

AssemblyState apply_changes(AssemblyState state,
                            const std::vector<ComponentChange>& changes);

}  // namespace psr

#endif  // PSR_PROCEDURE_HPP_
