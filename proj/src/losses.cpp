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

#include "psr/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "psr/error.hpp"
#include "psr/log.hpp"

namespace psr {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw ArgumentError("row " + std::to_string(r) + " has " +
                          std::to_string(rows[r].size()) +
                          " entries, expected " + std::to_string(cols));
    }
    std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + r * cols);
  }
  return m;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void validate(const EmbeddingBatch& batch) {
  const std::size_t n = batch.vectors.rows();
  if (n < 2) throw ArgumentError("SupCon needs at least two samples");
  if (batch.labels.size() != n) {
    throw ArgumentError("SupCon batch has " + std::to_string(n) +
                        " vectors but " + std::to_string(batch.labels.size()) +
                        " labels");
  }
  if (!(batch.temperature > 0.0)) {
    throw ArgumentError("SupCon temperature must be positive");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = std::sqrt(dot(batch.vectors.row(i), batch.vectors.row(i)));
    if (std::abs(norm - 1.0) > 1e-6) {
      throw ArgumentError("embedding " + std::to_string(i) +
                          " is not unit norm (|z| = " + std::to_string(norm) +
                          ")");
    }
  }
}

}  // namespace

double supcon_loss(const EmbeddingBatch& batch, SupConVariant variant) {
  validate(batch);
  const std::size_t n = batch.vectors.rows();
  const double inv_t = 1.0 / batch.temperature;
  std::vector<double> logits(n);
  double loss = 0.0;
  std::size_t anchors = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double peak = -std::numeric_limits<double>::infinity();
    std::size_t positives = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (a == i) continue;
      logits[a] = dot(batch.vectors.row(i), batch.vectors.row(a)) * inv_t;
      peak = std::max(peak, logits[a]);
      if (batch.labels[a] == batch.labels[i]) ++positives;
    }
    if (positives == 0) {
      logger()->debug("SupCon: anchor {} has no positives; skipped", i);
      continue;
    }
    ++anchors;
    // log sum_a exp(l_a), shifted by the row maximum.
    double denom = 0.0;
    double numer = 0.0;
    double mean_logit = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      if (a == i) continue;
      const double e = std::exp(logits[a] - peak);
      denom += e;
      if (batch.labels[a] == batch.labels[i]) {
        numer += e;
        mean_logit += logits[a];
      }
    }
    const double log_denom = peak + std::log(denom);
    const auto p = static_cast<double>(positives);
    if (variant == SupConVariant::kLogInside) {
      const double log_numer = peak + std::log(numer);
      loss -= log_numer - std::log(p) - log_denom;
    } else {
      loss -= mean_logit / p - log_denom;
    }
  }
  if (anchors == 0) {
    throw UndefinedMetricError(
        "SupCon loss is undefined: no anchor has a positive partner");
  }
  return loss;
}

double multilabel_bce(const ProbBatch& batch) {
  const Matrix& y_hat = batch.predictions;
  const Matrix& y = batch.targets;
  if (y_hat.rows() != y.rows() || y_hat.cols() != y.cols()) {
    throw ArgumentError("prediction and target shapes differ");
  }
  if (y_hat.rows() == 0) throw ArgumentError("empty probability batch");
  double total = 0.0;
  for (std::size_t i = 0; i < y_hat.rows(); ++i) {
    for (std::size_t j = 0; j < y_hat.cols(); ++j) {
      const double p =
          std::clamp(y_hat(i, j), kProbabilityClamp, 1.0 - kProbabilityClamp);
      const double t = y(i, j);
      if (!(y_hat(i, j) >= 0.0 && y_hat(i, j) <= 1.0) ||
          !(t >= 0.0 && t <= 1.0)) {
        throw ArgumentError("probability batch entry (" + std::to_string(i) +
                            ", " + std::to_string(j) + ") is outside [0, 1]");
      }
      total += t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    }
  }
  return -total / static_cast<double>(y_hat.rows());
}

}  // namespace psr
