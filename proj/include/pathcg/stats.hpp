// Copyright 2026 The pathcg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "pathcg/common.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pathcg
{
/// A Monte Carlo mean with its standard error.
struct Estimate
{
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

inline constexpr int kDefaultBatches = 32;

/// Pairwise (cascade) summation; rounding error grows as O(log n).
double pairwise_sum(std::span<const double> values);

double pairwise_mean(std::span<const double> values);

/// Mean with the i.i.d. standard error sd / sqrt(n).
Estimate iid_mean(std::span<const double> values);

/// Mean with a batch-means standard error over contiguous batches. Falls back
/// to the i.i.d. formula when there are fewer than two samples per batch.
Estimate batch_means(std::span<const double> values, int batches = kDefaultBatches);

/// Sample covariance of the overall mean of vector-valued samples, estimated
/// from contiguous batch means (columns of `samples` are samples).
Matrix batch_mean_covariance(const Matrix& samples, int batches = kDefaultBatches);

/// Covariance of the overall mean when the columns are i.i.d. (e.g. group means).
Matrix iid_mean_covariance(const Matrix& samples);

/// Neumaier-compensated running sum of equally shaped matrices.
class CompensatedSum
{
public:
    CompensatedSum(Eigen::Index rows, Eigen::Index cols);

    void add(const Matrix& term);
    Matrix value() const { return sum_ + compensation_; }

private:
    Matrix sum_;
    Matrix compensation_;
};

}  // namespace pathcg
