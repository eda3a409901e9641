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

#include <algorithm>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "psr/error.hpp"
#include "psr/metrics.hpp"

namespace psr {
namespace {

constexpr ActionId kA{0}, kB{1}, kC{2};

EventSequence seq(const Procedure& proc,
                  std::vector<std::pair<ActionId, std::int64_t>> items) {
  std::vector<StepEvent> events;
  for (auto [a, f] : items) events.push_back(make_event(proc, a, f));
  return EventSequence("v", events, proc.fps());
}

std::vector<std::pair<ActionId, std::int64_t>> timed(
    const std::vector<oracle::TimedStep>& steps) {
  std::vector<std::pair<ActionId, std::int64_t>> out;
  for (const auto& s : steps) {
    out.emplace_back(ActionId{static_cast<std::uint32_t>(s.action)}, s.frame);
  }
  return out;
}

TEST(DamerauLevenshtein, Fixtures) {
  const std::vector<ActionId> abc{kA, kB, kC}, acb{kA, kC, kB}, none;
  EXPECT_EQ(damerau_levenshtein(abc, abc), 0.0);
  EXPECT_EQ(damerau_levenshtein(abc, acb), 1.0);
  EXPECT_EQ(damerau_levenshtein(abc, none), 3.0);
}

TEST(DamerauLevenshtein, MatchesEditScriptSearch) {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = oracle::random_word(rng, 5, 3);
    const auto b = oracle::random_word(rng, 5, 3);
    const int want = oracle::edit_script_distance(a, b, 3);
    EXPECT_EQ(damerau_levenshtein(oracle::to_actions(a), oracle::to_actions(b)),
              want);
  }
}

TEST(DamerauLevenshtein, NonAdjacentTranspositionNeedsUnrestrictedForm) {
  // "CA" -> "ABC" costs 2 with an edit between the swapped symbols.
  const std::vector<ActionId> ca{kC, kA}, abc{kA, kB, kC};
  EXPECT_EQ(damerau_levenshtein(ca, abc), 2.0);
}

TEST(DamerauLevenshtein, SymmetricAndTriangle) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = oracle::to_actions(oracle::random_word(rng, 6, 4));
    const auto b = oracle::to_actions(oracle::random_word(rng, 6, 4));
    const auto c = oracle::to_actions(oracle::random_word(rng, 6, 4));
    EXPECT_EQ(damerau_levenshtein(a, b), damerau_levenshtein(b, a));
    EXPECT_LE(damerau_levenshtein(a, c),
              damerau_levenshtein(a, b) + damerau_levenshtein(b, c));
  }
}

TEST(DamerauLevenshtein, WeightsApply) {
  const std::vector<ActionId> abc{kA, kB, kC}, acb{kA, kC, kB}, ab{kA, kB};
  EXPECT_EQ(damerau_levenshtein(abc, acb, {1, 1, 1, 0.25}), 0.25);
  EXPECT_EQ(damerau_levenshtein(abc, ab, {1, 3, 1, 1}), 3.0);
  EXPECT_THROW((EditWeights{-1, 1, 1, 1}.validate()), ArgumentError);
}

TEST(PosScore, Fixtures) {
  const Procedure proc = meccano_procedure();
  const auto gt = seq(proc, {{kA, 10}, {kB, 20}, {kC, 30}});
  EXPECT_EQ(pos_score(gt, gt), 1.0);
  EXPECT_NEAR(pos_score(gt, seq(proc, {{kA, 10}, {kC, 20}, {kB, 30}})),
              0.6667, 1e-4);
  EXPECT_NEAR(pos_score(gt, seq(proc, {{kA, 10}, {kC, 20}, {kB, 30}})),
              1.0 - 1.0 / 3.0, 1e-9);
  EXPECT_EQ(pos_score(gt, seq(proc, {})), 0.0);
}

TEST(PosScore, InvariantToTimeShift) {
  const Procedure proc = meccano_procedure();
  const auto gt = seq(proc, {{kA, 10}, {kB, 20}, {kC, 30}});
  const auto p1 = seq(proc, {{kB, 5}, {kA, 15}});
  const auto p2 = seq(proc, {{kB, 505}, {kA, 515}});
  const auto g2 = seq(proc, {{kA, 410}, {kB, 420}, {kC, 430}});
  EXPECT_EQ(pos_score(gt, p1), pos_score(g2, p2));
}

TEST(Matching, TwoEventFixture) {
  const Procedure proc = meccano_procedure();
  const auto gt = seq(proc, {{kA, 100}, {kB, 200}});
  const auto pred = seq(proc, {{kA, 120}, {kC, 150}});
  const auto ledger = match_predictions(gt, pred);
  ASSERT_EQ(ledger.tp(), 1u);
  EXPECT_EQ(pred[ledger.matches[0].first].action, kA);
  ASSERT_EQ(ledger.fp(), 1u);
  EXPECT_EQ(pred[ledger.false_positives[0]].action, kC);
  ASSERT_EQ(ledger.fn(), 1u);
  EXPECT_EQ(gt[ledger.false_negatives[0]].action, kB);

  const auto report = evaluate(gt, pred);
  EXPECT_DOUBLE_EQ(report.f1, 0.5);
  ASSERT_TRUE(report.tau_s.has_value());
  EXPECT_DOUBLE_EQ(*report.tau_s, 2.0);
  EXPECT_DOUBLE_EQ(report.pos,
                   1.0 - oracle::edit_script_distance({0, 1}, {0, 2}, 3) / 2.0);
}

TEST(Matching, EarlyPredictionIsFalsePositiveAndMiss) {
  const Procedure proc = meccano_procedure();
  const auto ledger =
      match_predictions(seq(proc, {{kA, 100}}), seq(proc, {{kA, 50}}));
  EXPECT_EQ(ledger.tp(), 0u);
  EXPECT_EQ(ledger.fp(), 1u);
  EXPECT_EQ(ledger.fn(), 1u);
  const auto report =
      evaluate(seq(proc, {{kA, 100}}), seq(proc, {{kA, 50}}));
  EXPECT_FALSE(report.tau_s.has_value());
}

TEST(Matching, DuplicatePredictionCountsAsFalsePositive) {
  const Procedure proc = meccano_procedure();
  const auto ledger = match_predictions(seq(proc, {{kA, 100}}),
                                        seq(proc, {{kA, 110}, {kA, 120}}));
  EXPECT_EQ(ledger.tp(), 1u);
  EXPECT_EQ(ledger.fp(), 1u);
}

TEST(F1, Conventions) {
  const auto half = f1_score(1, 1, 1);
  EXPECT_DOUBLE_EQ(half.precision, 0.5);
  EXPECT_DOUBLE_EQ(half.recall, 0.5);
  EXPECT_DOUBLE_EQ(half.f1, 0.5);
  const auto empty = f1_score(0, 0, 0);
  EXPECT_EQ(empty.f1, 0.0);
  EXPECT_EQ(empty.precision, 0.0);
  EXPECT_EQ(f1_score(7, 0, 0).f1, 1.0);
}

TEST(AverageDelay, MeanOverMatches) {
  const Procedure proc = meccano_procedure();
  const auto gt = seq(proc, {{kA, 100}, {kB, 200}});
  const auto pred = seq(proc, {{kA, 120}, {kB, 240}});
  EXPECT_DOUBLE_EQ(*average_delay(match_predictions(gt, pred), gt, pred), 3.0);
  const auto same = seq(proc, {{kA, 100}});
  EXPECT_EQ(*average_delay(match_predictions(same, same), same, same), 0.0);
}

TEST(Evaluate, PerfectAndEmpty) {
  const Procedure proc = meccano_procedure();
  const auto gt = seq(proc, {{kA, 100}, {kB, 200}});
  const auto perfect = evaluate(gt, gt);
  EXPECT_EQ(perfect.pos, 1.0);
  EXPECT_EQ(perfect.f1, 1.0);
  EXPECT_EQ(*perfect.tau_s, 0.0);
  const auto empty = evaluate(gt, seq(proc, {}));
  EXPECT_EQ(empty.pos, 0.0);
  EXPECT_EQ(empty.f1, 0.0);
  EXPECT_FALSE(empty.tau_s.has_value());
}

TEST(Evaluate, IncorrectGroundTruthExcludedByDefault) {
  const Procedure proc = meccano_procedure();
  const EventSequence gt("v",
                         {make_event(proc, kA, 100, false),
                          make_event(proc, kB, 200)},
                         proc.fps());
  const auto pred = seq(proc, {{kB, 200}});
  EXPECT_EQ(evaluate(gt, pred).f1, 1.0);
  EvaluationOptions diag;
  diag.include_incorrect = true;
  EXPECT_EQ(evaluate(gt, pred, diag).fn, 1u);
}

std::vector<oracle::TimedStep> random_unique(Rng& rng, int alphabet) {
  std::vector<oracle::TimedStep> out;
  for (int a = 0; a < alphabet; ++a) {
    if (rng.bernoulli(0.6)) out.push_back({a, rng.uniform_int(0, 60)});
  }
  return out;
}

TEST(Evaluate, MatchesPerEventEnumeration) {
  const Procedure proc = meccano_procedure();
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = random_unique(rng, 5);
    const auto p = random_unique(rng, 5);
    if (g.empty()) continue;  // POS is undefined without ground truth
    const auto gt = seq(proc, timed(g));
    const auto pred = seq(proc, timed(p));
    const auto report = evaluate(gt, pred);
    const auto want = oracle::classify_unique(g, p, 10.0);
    EXPECT_EQ(report.tp, static_cast<std::size_t>(want.tp));
    EXPECT_EQ(report.fp, static_cast<std::size_t>(want.fp));
    EXPECT_EQ(report.fn, static_cast<std::size_t>(want.fn));
    ASSERT_EQ(report.tau_s.has_value(), want.tau.has_value());
    if (want.tau) EXPECT_NEAR(*report.tau_s, *want.tau, 1e-12);
  }
}

TEST(Matching, GreedyReachesMaximumCardinality) {
  const Procedure proc = meccano_procedure();
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<oracle::TimedStep> g, p;
    std::set<std::pair<int, std::int64_t>> seen_g, seen_p;
    for (int k = 0; k < 5; ++k) {
      oracle::TimedStep s{static_cast<int>(rng.uniform_index(2)),
                          rng.uniform_int(0, 30)};
      if (seen_g.insert({s.action, s.frame}).second) g.push_back(s);
      oracle::TimedStep t{static_cast<int>(rng.uniform_index(2)),
                          rng.uniform_int(0, 30)};
      if (seen_p.insert({t.action, t.frame}).second) p.push_back(t);
    }
    const auto gt = seq(proc, timed(g));
    const auto pred = seq(proc, timed(p));
    const int best = oracle::max_matching(g, p);
    for (auto rule : {MatchingRule::kGreedy, MatchingRule::kOptimal}) {
      const auto ledger = match_predictions(gt, pred, rule);
      EXPECT_EQ(ledger.tp(), static_cast<std::size_t>(best));
      EXPECT_EQ(ledger.tp() + ledger.fp(), pred.size());
      EXPECT_EQ(ledger.tp() + ledger.fn(), gt.size());
      std::set<std::size_t> ps, gs;
      for (auto [pi, gi] : ledger.matches) {
        EXPECT_TRUE(ps.insert(pi).second);
        EXPECT_TRUE(gs.insert(gi).second);
        EXPECT_GE(pred[pi].frame, gt[gi].frame);
        EXPECT_EQ(pred[pi].action, gt[gi].action);
      }
    }
    const auto greedy = match_delays(match_predictions(gt, pred), gt, pred);
    const auto optimal = match_delays(
        match_predictions(gt, pred, MatchingRule::kOptimal), gt, pred);
    EXPECT_LE(std::accumulate(optimal.begin(), optimal.end(), 0.0),
              std::accumulate(greedy.begin(), greedy.end(), 0.0) + 1e-9);
  }
}

TEST(Aggregate, MacroAveragesAndPoolsDelay) {
  const Procedure proc = meccano_procedure();
  const auto gt1 = seq(proc, {{kA, 100}});
  const auto gt2 = seq(proc, {{kA, 100}, {kB, 200}, {kC, 300}});
  std::vector<EvaluationReport> reports{
      evaluate(gt1, seq(proc, {{kA, 140}})),
      evaluate(gt2, seq(proc, {{kA, 100}, {kB, 200}, {kC, 300}}))};
  const auto summary = aggregate(reports);
  EXPECT_EQ(summary.videos, 2u);
  EXPECT_DOUBLE_EQ(summary.f1, 1.0);
  EXPECT_DOUBLE_EQ(*summary.tau_s, 1.0);
  EXPECT_EQ(summary.tp, 4u);
}

TEST(Evaluate, Deterministic) {
  const Procedure proc = meccano_procedure();
  const auto gt = seq(proc, {{kA, 100}, {kB, 200}, {kC, 250}});
  const auto pred = seq(proc, {{kB, 210}, {kA, 230}});
  const auto a = evaluate(gt, pred);
  const auto b = evaluate(gt, pred);
  EXPECT_EQ(a.pos, b.pos);
  EXPECT_EQ(a.f1, b.f1);
  EXPECT_EQ(a.tau_s, b.tau_s);
  EXPECT_EQ(a.delays_s, b.delays_s);
}

}  // namespace
}  // namespace psr
