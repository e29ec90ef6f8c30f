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

#include "pathcg/stats.hpp"

#include <cmath>

namespace pathcg
{
namespace
{
double pairwise_impl(const double* data, std::size_t n)
{
    if (n <= 16)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_impl(data, half) + pairwise_impl(data + half, n - half);
}
}  // namespace

double pairwise_sum(std::span<const double> values) { return pairwise_impl(values.data(), values.size()); }

double pairwise_mean(std::span<const double> values)
{
    if (values.empty()) throw NumericalError("mean of an empty sample");
    return pairwise_sum(values) / static_cast<double>(values.size());
}

Estimate iid_mean(std::span<const double> values)
{
    Estimate e;
    e.n = values.size();
    e.mean = pairwise_mean(values);
    if (values.size() < 2) return e;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        const double d = values[i] - e.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(values.size() - 1);
    e.se = std::sqrt(var / static_cast<double>(values.size()));
    return e;
}

Estimate batch_means(std::span<const double> values, int batches)
{
    const std::size_t n = values.size();
    if (batches < 2 || n < 2 * static_cast<std::size_t>(batches)) return iid_mean(values);
    const std::size_t size = n / static_cast<std::size_t>(batches);
    std::vector<double> means(static_cast<std::size_t>(batches));
    for (int b = 0; b < batches; ++b)
    {
        const std::size_t begin = static_cast<std::size_t>(b) * size;
        const std::size_t len = (b == batches - 1) ? n - begin : size;
        means[static_cast<std::size_t>(b)] = pairwise_mean(values.subspan(begin, len));
    }
    Estimate e = iid_mean(means);
    e.mean = pairwise_mean(values);
    e.n = n;
    return e;
}

Matrix iid_mean_covariance(const Matrix& samples)
{
    const Eigen::Index k = samples.rows();
    const Eigen::Index n = samples.cols();
    if (n < 2) return Matrix::Zero(k, k);
    const Vector mean = samples.rowwise().mean();
    const Matrix centered = samples.colwise() - mean;
    return centered * centered.transpose() / static_cast<double>(n - 1) / static_cast<double>(n);
}

Matrix batch_mean_covariance(const Matrix& samples, int batches)
{
    const Eigen::Index n = samples.cols();
    if (batches < 2 || n < 2 * batches) return iid_mean_covariance(samples);
    const Eigen::Index size = n / batches;
    Matrix means(samples.rows(), batches);
    for (int b = 0; b < batches; ++b)
    {
        const Eigen::Index begin = b * size;
        const Eigen::Index len = (b == batches - 1) ? n - begin : size;
        means.col(b) = samples.middleCols(begin, len).rowwise().mean();
    }
    return iid_mean_covariance(means);
}

CompensatedSum::CompensatedSum(Eigen::Index rows, Eigen::Index cols)
    : sum_(Matrix::Zero(rows, cols)), compensation_(Matrix::Zero(rows, cols))
{
}

void CompensatedSum::add(const Matrix& term)
{
    for (Eigen::Index j = 0; j < sum_.cols(); ++j)
    {
        for (Eigen::Index i = 0; i < sum_.rows(); ++i)
        {
            const double s = sum_(i, j);
            const double x = term(i, j);
            const double t = s + x;
            if (std::abs(s) >= std::abs(x))
                compensation_(i, j) += (s - t) + x;
            else
                compensation_(i, j) += (x - t) + s;
            sum_(i, j) = t;
        }
    }
}

}  // namespace pathcg
