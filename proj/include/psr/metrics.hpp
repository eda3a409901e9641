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

#ifndef PSR_METRICS_HPP_
#define PSR_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "psr/procedure.hpp"

namespace psr {

// Per-operation edit costs. The unit default gives the standard
// Damerau-Levenshtein distance.
struct EditWeights {
  double insertion = 1.0;
  double deletion = 1.0;
  double substitution = 1.0;
  double transposition = 1.0;

  // Throws ArgumentError when any cost is negative or not finite.
  void validate() const;
  friend bool operator==(const EditWeights&, const EditWeights&) = default;
};

// Minimal cost of turning `a` into `b` with insertions, deletions,
// substitutions and transpositions of adjacent symbols (unrestricted
// Lowrance-Wagner recurrence, so symbols may be edited after being
// transposed). Exact for any weights with 2*transposition >=
// insertion + deletion, which includes unit costs.
double damerau_levenshtein(std::span<const ActionId> a,
                           std::span<const ActionId> b,
                           const EditWeights& weights = {});

// 1 - min(distance(Y, Y_hat) / |Y|, 1) over the action orders. Throws
// UndefinedMetricError when `gt` is empty.
double pos_score(const EventSequence& gt, const EventSequence& pred,
                 const EditWeights& weights = {});

struct MatchLedger {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (pred, gt)
  std::vector<std::size_t> false_positives;                   // pred indices
  std::vector<std::size_t> false_negatives;                   // gt indices

  std::size_t tp() const { return matches.size(); }
  std::size_t fp() const { return false_positives.size(); }
  std::size_t fn() const { return false_negatives.size(); }
};

enum class MatchingRule {
  // Predictions in ascending time each take the earliest unmatched
  // ground-truth event of the same action completed no later.
  kGreedy,
  // Experimental: maximum number of matches, then minimum total delay.
  kOptimal,
};

// Classifies every prediction as TP or FP and every ground-truth event as
// matched or FN. `gt` should already be restricted to correct completions.
MatchLedger match_predictions(const EventSequence& gt,
                              const EventSequence& pred,
                              MatchingRule rule = MatchingRule::kGreedy);

struct F1Result {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Zero denominators yield 0.
F1Result f1_score(std::size_t tp, std::size_t fp, std::size_t fn);
inline F1Result f1_score(const MatchLedger& ledger) {
  return f1_score(ledger.tp(), ledger.fp(), ledger.fn());
}

// Per-match delays (prediction time minus completion time), seconds.
std::vector<double> match_delays(const MatchLedger& ledger,
                                 const EventSequence& gt,
                                 const EventSequence& pred);

// Mean delay over true positives; nullopt when there are none.
std::optional<double> average_delay(const MatchLedger& ledger,
                                    const EventSequence& gt,
                                    const EventSequence& pred);

struct EvaluationOptions {
  EditWeights weights;
  // Keep incorrect ground-truth completions in Y (diagnostics only).
  bool include_incorrect = false;
  MatchingRule matching = MatchingRule::kGreedy;
};

struct EvaluationReport {
  std::string video_id;
  double pos = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> tau_s;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  MatchLedger ledger;
  std::vector<double> delays_s;
};

EvaluationReport evaluate(const EventSequence& gt, const EventSequence& pred,
                          const EvaluationOptions& options = {});

// Dataset-level view: POS / precision / recall / F1 macro-averaged over
// videos, tau pooled over every matched pair.
struct DatasetSummary {
  std::size_t videos = 0;
  double pos = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> tau_s;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

DatasetSummary aggregate(std::span<const EvaluationReport> reports);

}  // namespace psr

#endif  // PSR_METRICS_HPP_
