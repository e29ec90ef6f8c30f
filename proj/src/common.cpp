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

#include "pathcg/common.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace pathcg
{
int numerical_rank(const Matrix& m)
{
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    const double cutoff = kRankTolerance * s(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
    {
        if (s(i) > cutoff) ++rank;
    }
    return rank;
}

double smallest_singular_value(const Matrix& m)
{
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

Matrix symmetric_sqrt(const Matrix& spd)
{
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (spd + spd.transpose()));
    if (eig.info() != Eigen::Success) throw NumericalError("symmetric_sqrt: eigendecomposition failed");
    const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    Vector root(eig.eigenvalues().size());
    for (Eigen::Index i = 0; i < root.size(); ++i)
    {
        const double lambda = eig.eigenvalues()(i);
        if (lambda < -1e-12 * scale)
            throw NumericalError("symmetric_sqrt: matrix is not positive semidefinite (eigenvalue " +
                                 std::to_string(lambda) + ")");
        root(i) = std::sqrt(std::max(lambda, 0.0));
    }
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

Matrix block_diagonal(const Matrix& a, const Matrix& b)
{
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

void require_dim(std::ptrdiff_t actual, std::ptrdiff_t expected, const std::string& what)
{
    if (actual != expected)
        throw DimensionError(what + ": expected dimension " + std::to_string(expected) + ", got " +
                             std::to_string(actual));
}

}  // namespace pathcg
