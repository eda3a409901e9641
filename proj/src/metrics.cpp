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

#include "psr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "psr/error.hpp"

namespace psr {

void EditWeights::validate() const {
  for (double w : {insertion, deletion, substitution, transposition}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ArgumentError("edit weights must be finite and non-negative");
    }
  }
}

double damerau_levenshtein(std::span<const ActionId> a,
                           std::span<const ActionId> b,
                           const EditWeights& weights) {
  weights.validate();
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  const std::size_t cols = n + 1;
  std::vector<double> d((m + 1) * cols);
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return d[i * cols + j];
  };
  for (std::size_t i = 0; i <= m; ++i) at(i, 0) = i * weights.deletion;
  for (std::size_t j = 0; j <= n; ++j) at(0, j) = j * weights.insertion;

  // Last row (1-based) in which each symbol of `a` was seen.
  std::map<ActionId, std::size_t> last_row;
  for (std::size_t i = 1; i <= m; ++i) {
    std::size_t last_match_col = 0;
    for (std::size_t j = 1; j <= n; ++j) {
      const auto seen = last_row.find(b[j - 1]);
      const std::size_t k = seen == last_row.end() ? 0 : seen->second;
      const std::size_t l = last_match_col;
      const bool same = a[i - 1] == b[j - 1];
      if (same) last_match_col = j;

      double best = at(i - 1, j - 1) + (same ? 0.0 : weights.substitution);
      best = std::min(best, at(i, j - 1) + weights.insertion);
      best = std::min(best, at(i - 1, j) + weights.deletion);
      if (k > 0 && l > 0) {
        best = std::min(best, at(k - 1, l - 1) +
                                  (i - k - 1) * weights.deletion +
                                  weights.transposition +
                                  (j - l - 1) * weights.insertion);
      }
      at(i, j) = best;
    }
    last_row[a[i - 1]] = i;
  }
  return at(m, n);
}

double pos_score(const EventSequence& gt, const EventSequence& pred,
                 const EditWeights& weights) {
  if (gt.empty()) {
    throw UndefinedMetricError("POS is undefined for video '" +
                               gt.video_id() + "' with no ground-truth steps");
  }
  const std::vector<ActionId> y = gt.action_order();
  const std::vector<ActionId> y_hat = pred.action_order();
  const double distance = damerau_levenshtein(y, y_hat, weights);
  return 1.0 - std::min(distance / static_cast<double>(y.size()), 1.0);
}

namespace {

// True when the prediction is at or after the completion.
bool not_before(const EventSequence& gt, std::size_t g,
                const EventSequence& pred, std::size_t p) {
  return compare_time(pred[p].frame, pred.fps(), gt[g].frame, gt.fps()) >= 0;
}

// Rectangular min-cost assignment (rows <= cols). Returns the column of each
// row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost,
                                   std::size_t cols) {
  const std::size_t rows = cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> match(cols + 1, 0), way(cols + 1, 0);
  for (std::size_t i = 1; i <= rows; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (match[j] != 0) assignment[match[j] - 1] = j - 1;
  }
  return assignment;
}

void optimal_matches(const EventSequence& gt, const EventSequence& pred,
                     std::vector<std::pair<std::size_t, std::size_t>>& out) {
  std::map<ActionId, std::vector<std::size_t>> gt_by_action, pred_by_action;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    gt_by_action[gt[g].action].push_back(g);
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    pred_by_action[pred[p].action].push_back(p);
  }
  for (const auto& [action, preds] : pred_by_action) {
    auto it = gt_by_action.find(action);
    if (it == gt_by_action.end()) continue;
    const std::vector<std::size_t>& gts = it->second;
    // Each feasible match is worth more than any achievable total delay, so
    // the assignment maximizes the match count before minimizing delay.
    double max_delay = 0.0;
    for (std::size_t p : preds) {
      for (std::size_t g : gts) {
        max_delay = std::max(max_delay, pred[p].time_s - gt[g].time_s);
      }
    }
    const double bonus =
        (max_delay + 1.0) * static_cast<double>(std::max(preds.size(), gts.size()) + 1);
    const bool transpose = preds.size() > gts.size();
    const auto& row_ids = transpose ? gts : preds;
    const auto& col_ids = transpose ? preds : gts;
    std::vector<std::vector<double>> cost(row_ids.size(),
                                          std::vector<double>(col_ids.size()));
    for (std::size_t r = 0; r < row_ids.size(); ++r) {
      for (std::size_t c = 0; c < col_ids.size(); ++c) {
        const std::size_t p = transpose ? col_ids[c] : row_ids[r];
        const std::size_t g = transpose ? row_ids[r] : col_ids[c];
        cost[r][c] = not_before(gt, g, pred, p)
                         ? (pred[p].time_s - gt[g].time_s) - bonus
                         : 0.0;
      }
    }
    const std::vector<std::size_t> assignment =
        hungarian(cost, col_ids.size());
    for (std::size_t r = 0; r < row_ids.size(); ++r) {
      const std::size_t p = transpose ? col_ids[assignment[r]] : row_ids[r];
      const std::size_t g = transpose ? row_ids[r] : col_ids[assignment[r]];
      if (not_before(gt, g, pred, p)) out.emplace_back(p, g);
    }
  }
}

}  // namespace

MatchLedger match_predictions(const EventSequence& gt,
                              const EventSequence& pred, MatchingRule rule) {
  MatchLedger ledger;
  if (rule == MatchingRule::kGreedy) {
    std::vector<bool> taken(gt.size(), false);
    // `pred` is already in ascending time order.
    for (std::size_t p = 0; p < pred.size(); ++p) {
      bool matched = false;
      for (std::size_t g = 0; g < gt.size(); ++g) {
        if (taken[g] || gt[g].action != pred[p].action) continue;
        if (!not_before(gt, g, pred, p)) break;  // gt is time-ordered
        taken[g] = true;
        ledger.matches.emplace_back(p, g);
        matched = true;
        break;
      }
      if (!matched) ledger.false_positives.push_back(p);
    }
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (!taken[g]) ledger.false_negatives.push_back(g);
    }
    return ledger;
  }

  optimal_matches(gt, pred, ledger.matches);
  std::sort(ledger.matches.begin(), ledger.matches.end());
  std::vector<bool> pred_used(pred.size(), false), gt_used(gt.size(), false);
  for (const auto& [p, g] : ledger.matches) {
    pred_used[p] = true;
    gt_used[g] = true;
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!pred_used[p]) ledger.false_positives.push_back(p);
  }
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gt_used[g]) ledger.false_negatives.push_back(g);
  }
  return ledger;
}

F1Result f1_score(std::size_t tp, std::size_t fp, std::size_t fn) {
  F1Result r;
  const auto t = static_cast<double>(tp);
  if (tp + fp > 0) r.precision = t / static_cast<double>(tp + fp);
  if (tp + fn > 0) r.recall = t / static_cast<double>(tp + fn);
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  }
  return r;
}

std::vector<double> match_delays(const MatchLedger& ledger,
                                 const EventSequence& gt,
                                 const EventSequence& pred) {
  std::vector<double> delays;
  delays.reserve(ledger.matches.size());
  for (const auto& [p, g] : ledger.matches) {
    delays.push_back(pred[p].time_s - gt[g].time_s);
  }
  return delays;
}

std::optional<double> average_delay(const MatchLedger& ledger,
                                    const EventSequence& gt,
                                    const EventSequence& pred) {
  if (ledger.matches.empty()) return std::nullopt;
  const std::vector<double> delays = match_delays(ledger, gt, pred);
  return std::accumulate(delays.begin(), delays.end(), 0.0) /
         static_cast<double>(delays.size());
}

EvaluationReport evaluate(const EventSequence& gt, const EventSequence& pred,
                          const EvaluationOptions& options) {
  const EventSequence y = options.include_incorrect ? gt : gt.correct_only();
  EvaluationReport report;
  report.video_id = gt.video_id();
  report.pos = pos_score(y, pred, options.weights);
  report.ledger = match_predictions(y, pred, options.matching);
  const F1Result f1 = f1_score(report.ledger);
  report.precision = f1.precision;
  report.recall = f1.recall;
  report.f1 = f1.f1;
  report.tp = report.ledger.tp();
  report.fp = report.ledger.fp();
  report.fn = report.ledger.fn();
  report.delays_s = match_delays(report.ledger, y, pred);
  report.tau_s = average_delay(report.ledger, y, pred);
  return report;
}

DatasetSummary aggregate(std::span<const EvaluationReport> reports) {
  DatasetSummary s;
  s.videos = reports.size();
  if (reports.empty()) return s;
  double delay_sum = 0.0;
  for (const EvaluationReport& r : reports) {
    s.pos += r.pos;
    s.precision += r.precision;
    s.recall += r.recall;
    s.f1 += r.f1;
    s.tp += r.tp;
    s.fp += r.fp;
    s.fn += r.fn;
    for (double d : r.delays_s) delay_sum += d;
  }
  const auto n = static_cast<double>(reports.size());
  s.pos /= n;
  s.precision /= n;
  s.recall /= n;
  s.f1 /= n;
  if (s.tp > 0) s.tau_s = delay_sum / static_cast<double>(s.tp);
  return s;
}

}  // namespace psr
