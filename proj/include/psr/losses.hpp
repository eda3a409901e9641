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

#ifndef PSR_LOSSES_HPP_
#define PSR_LOSSES_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace psr {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  // Throws ArgumentError on ragged rows.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct EmbeddingBatch {
  Matrix vectors;           // N x d, unit-norm rows
  std::vector<int> labels;  // N state ids
  double temperature = 0.07;
};

enum class SupConVariant {
  // 1/|P(i)| inside the logarithm.
  kLogInside,
  // Mean over positives of the per-positive log-likelihood.
  kLogOutside,
};

// Supervised contrastive loss summed over anchors. The denominator set of an
// anchor is every other sample. Anchors without a positive are skipped;
// throws UndefinedMetricError if no anchor has one. Throws ArgumentError when
// rows are not unit norm (1e-6), N < 2 or the temperature is not positive.
double supcon_loss(const EmbeddingBatch& batch,
                   SupConVariant variant = SupConVariant::kLogInside);

struct ProbBatch {
  Matrix predictions;  // N x C in [0, 1]
  Matrix targets;      // N x C in {0, 1}
};

inline constexpr double kProbabilityClamp = 1e-7;

// Multi-label binary cross-entropy averaged over samples and summed over
// classes, with predictions clamped to [1e-7, 1 - 1e-7].
double multilabel_bce(const ProbBatch& batch);

}  // namespace psr

#endif  // PSR_LOSSES_HPP_
