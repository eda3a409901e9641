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

#include <gtest/gtest.h>

#include <set>

#include "psr/error.hpp"
#include "psr/procedure.hpp"
#include "psr/random.hpp"

namespace psr {
namespace {

ActionId install(std::size_t c) { return ActionId{static_cast<std::uint32_t>(c)}; }
ActionId removal(std::size_t c) {
  return ActionId{static_cast<std::uint32_t>(17 + c)};
}

TEST(CumulativeState, EmptySequenceIsAllZero) {
  const Procedure proc = meccano_procedure();
  const EventSequence seq("v", {}, proc.fps());
  EXPECT_EQ(cumulative_state(seq, proc, 500).count(), 0u);
}

TEST(CumulativeState, LastWriteWins) {
  const Procedure proc = meccano_procedure();
  const EventSequence seq(
      "v", {make_event(proc, install(0), 10), make_event(proc, removal(0), 20)},
      proc.fps());
  EXPECT_TRUE(cumulative_state(seq, proc, 15).test(0));
  EXPECT_FALSE(cumulative_state(seq, proc, 25).test(0));
}

TEST(CumulativeState, FirstTransitionIsStateOne) {
  const Procedure proc = meccano_procedure();
  const EventSequence seq("v",
                          {make_event(proc, install(0), 5),
                           make_event(proc, install(4), 5),
                           make_event(proc, install(8), 5)},
                          proc.fps());
  EXPECT_EQ(cumulative_state(seq, proc, 5).to_string(), "10001000100000000");
  EXPECT_EQ(proc.state_by_id(1)->to_string(), "10001000100000000");
}

TEST(StateDiff, ZeroToStateOne) {
  const auto a = AssemblyState::from_string("00000000000000000");
  const auto b = AssemblyState::from_string("10001000100000000");
  const std::vector<ComponentChange> want{{0, StepKind::kInstall},
                                          {4, StepKind::kInstall},
                                          {8, StepKind::kInstall}};
  EXPECT_EQ(state_diff(a, b), want);
  EXPECT_TRUE(state_diff(b, b).empty());
}

TEST(StateDiff, StateOneToStateTwo) {
  const auto a = AssemblyState::from_string("10001000100000000");
  const auto b = AssemblyState::from_string("11001100100000000");
  const std::vector<ComponentChange> want{{1, StepKind::kInstall},
                                          {5, StepKind::kInstall}};
  EXPECT_EQ(state_diff(a, b), want);
}

TEST(StateDiff, RoundTripAndSymmetry) {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    AssemblyState a(17), b(17);
    for (std::size_t c = 0; c < 17; ++c) {
      a.set(c, rng.bernoulli(0.5));
      b.set(c, rng.bernoulli(0.5));
    }
    const auto ab = state_diff(a, b);
    EXPECT_EQ(apply_changes(a, ab), b);
    const auto ba = state_diff(b, a);
    ASSERT_EQ(ab.size(), ba.size());
    for (std::size_t i = 0; i < ab.size(); ++i) {
      EXPECT_EQ(ab[i].component, ba[i].component);
      EXPECT_EQ(ab[i].kind, opposite(ba[i].kind));
    }
  }
}

TEST(Time, FrameToSeconds) {
  EXPECT_DOUBLE_EQ(frame_to_seconds(100, Fps{10, 1}), 10.0);
  EXPECT_DOUBLE_EQ(frame_to_seconds(0, Fps{30, 1}), 0.0);
  EXPECT_DOUBLE_EQ(frame_to_seconds(765, Fps{10, 1}), 76.5);
  EXPECT_DOUBLE_EQ(frame_to_seconds(30, make_fps(30000, 1001)), 1.001);
}

TEST(Time, CompareAcrossRates) {
  EXPECT_EQ(compare_time(10, Fps{10, 1}, 30, Fps{30, 1}), 0);
  EXPECT_LT(compare_time(9, Fps{10, 1}, 30, Fps{30, 1}), 0);
  EXPECT_THROW(make_fps(0), Error);
}

TEST(EventSequence, SortsByFrameThenAction) {
  const Procedure proc = meccano_procedure();
  const EventSequence seq("v",
                          {make_event(proc, install(5), 20),
                           make_event(proc, install(3), 10),
                           make_event(proc, install(1), 20)},
                          proc.fps());
  ASSERT_EQ(seq.size(), 3u);
  EXPECT_EQ(seq[0].action, install(3));
  EXPECT_EQ(seq[1].action, install(1));
  EXPECT_EQ(seq[2].action, install(5));
  EXPECT_DOUBLE_EQ(seq[2].time_s, 2.0);
}

TEST(EventSequence, RejectsDuplicatesAndNegativeFrames) {
  const Procedure proc = meccano_procedure();
  EXPECT_THROW(EventSequence("v",
                             {make_event(proc, install(1), 20),
                              make_event(proc, install(1), 20)}),
               StructuralError);
  EXPECT_THROW(EventSequence("v", {make_event(proc, install(1), -1)}),
               StructuralError);
}

TEST(EventSequence, CorrectOnlyDropsIncorrect) {
  const Procedure proc = meccano_procedure();
  const EventSequence seq("v",
                          {make_event(proc, install(1), 20, false),
                           make_event(proc, install(2), 30)},
                          proc.fps());
  const auto y = seq.correct_only();
  ASSERT_EQ(y.size(), 1u);
  EXPECT_EQ(y[0].action, install(2));
}

TEST(CumulativeState, ConstantBetweenEvents) {
  const Procedure proc = meccano_procedure();
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<StepEvent> events;
    std::set<std::pair<std::int64_t, std::uint32_t>> seen;
    for (int k = 0; k < 8; ++k) {
      const auto a = static_cast<std::uint32_t>(rng.uniform_index(34));
      const auto f = rng.uniform_int(0, 100);
      if (!seen.insert({f, a}).second) continue;
      events.push_back(make_event(proc, ActionId{a}, f));
    }
    const EventSequence seq("v", events, proc.fps());
    for (std::int64_t f = 0; f < 100; ++f) {
      bool event_next = false;
      for (const auto& e : seq.events()) event_next |= e.frame == f + 1;
      if (!event_next) {
        EXPECT_EQ(cumulative_state(seq, proc, f),
                  cumulative_state(seq, proc, f + 1));
      }
    }
  }
}

TEST(Procedure, MeccanoShape) {
  const Procedure proc = meccano_procedure();
  EXPECT_EQ(proc.component_count(), 17u);
  EXPECT_EQ(proc.step_count(), 34u);
  EXPECT_EQ(proc.states().size(), 12u);
  EXPECT_EQ(proc.states().back().count(), 17u);
  EXPECT_EQ(*proc.action_for(4, StepKind::kRemove), removal(4));
  for (std::size_t s = 1; s < proc.states().size(); ++s) {
    EXPECT_FALSE(state_diff(proc.states()[s - 1], proc.states()[s]).empty());
  }
}

TEST(Procedure, RejectsOutOfRangeComponent) {
  std::vector<ActionSpec> actions{
      {ActionId{0}, "a", {0, StepKind::kInstall}},
      {ActionId{1}, "b", {3, StepKind::kInstall}}};
  EXPECT_THROW(Procedure({"x", "y"}, actions, {}, Fps{}), StructuralError);
}

TEST(Procedure, RejectsRepeatedConsecutiveStates) {
  std::vector<ActionSpec> actions{{ActionId{0}, "a", {0, StepKind::kInstall}}};
  std::vector<AssemblyState> states{AssemblyState::from_string("0", 0),
                                    AssemblyState::from_string("0", 1)};
  EXPECT_THROW(Procedure({"x"}, actions, states, Fps{}), StructuralError);
}

TEST(AssemblyState, ParseRejectsGarbage) {
  EXPECT_THROW(AssemblyState::from_string("01x"), ArgumentError);
  EXPECT_THROW(AssemblyState(3) ^ AssemblyState(4), StructuralError);
}

}  // namespace
}  // namespace psr
