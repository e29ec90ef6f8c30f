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

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace pathcg
{
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// State-space vector field x -> f(x).
using VectorField = std::function<Vector(const Vector&)>;
/// State-dependent matrix coefficient x -> M(x).
using MatrixField = std::function<Matrix(const Vector&)>;
/// Scalar observable x -> phi(x).
using ScalarField = std::function<double(const Vector&)>;

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Shape or size mismatch between collaborating objects.
class DimensionError : public Error
{
public:
    using Error::Error;
};

/// Singular systems, non-finite values, failed convergence.
class NumericalError : public Error
{
public:
    using Error::Error;
};

/// Invalid user configuration (CLI config files, option values).
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// Relative threshold for numerical rank decisions.
inline constexpr double kRankTolerance = 1e-10;

/// Number of singular values above kRankTolerance * sigma_max.
int numerical_rank(const Matrix& m);

/// Smallest / largest singular value, for diagnostics.
double smallest_singular_value(const Matrix& m);

/// Symmetric positive square root of a symmetric positive semidefinite matrix.
Matrix symmetric_sqrt(const Matrix& spd);

bool all_finite(const Eigen::Ref<const Matrix>& m);

/// Block diagonal [a 0; 0 b].
Matrix block_diagonal(const Matrix& a, const Matrix& b);

void require_dim(std::ptrdiff_t actual, std::ptrdiff_t expected, const std::string& what);

}  // namespace pathcg
