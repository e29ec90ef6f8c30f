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

// Independent ground truth for the statistical tests. Depends on Eigen only;
// nothing here calls into the pathcg library.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace pathcg::oracle
{
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// dX = -A X dt + sigma dB.
struct OUModel
{
    Mat a;
    Mat sigma;

    Mat diffusion() const { return sigma * sigma.transpose(); }
    /// All eigenvalues of A have positive real part.
    bool stable() const;
};

/// Solves A C + C A^T = Q on the n(n+1)/2 symmetric unknowns. Throws
/// std::runtime_error if the residual exceeds 1e-12 |Q| or A is unstable.
Mat lyapunov_solve(const Mat& a, const Mat& q);

double lyapunov_residual(const Mat& a, const Mat& c, const Mat& q);

/// Stationary covariance of the OU model.
Mat stationary_covariance(const OUModel& ou);

/// Second-moment matrix S = E[x x^T] of the law being averaged over.
/// Linear CG basis phi_k(xbar) = E_k xbar with metric W: returns theta solving
/// sum_l tr(E_k^T W E_l Pi S Pi^T) theta_l = tr(E_k^T W Pi (-A) S Pi^T).
Vec linear_regression_theta(const Mat& a, const Mat& second_moment, const Mat& pi, const std::vector<Mat>& basis,
                            const Mat& weight);

/// Stationary optimum for the basis {xbar} (single parameter, identity E).
double ou_optimal_theta(const OUModel& ou, const Mat& pi, const Mat& weight);

/// Stationary optimum for a general linear basis.
Vec ou_optimal_theta(const OUModel& ou, const Mat& pi, const std::vector<Mat>& basis, const Mat& weight);

/// Minimal value of 1/2 E|Pi(-A x) - theta Pi x|^2_W over scalar theta.
double ou_optimal_objective(const OUModel& ou, const Mat& pi, const Mat& weight);

struct GaussianMoments
{
    Vec mean;
    Mat cov;
};

/// Exact law at time t from N(mean0, cov0): mean e^{-At} m0 and covariance
/// C + e^{-At} (P0 - C) e^{-A^T t}.
GaussianMoments ou_transient_moments(const OUModel& ou, const Vec& mean0, const Mat& cov0, double t);

/// Finite-time optimum for the basis {xbar}: second moments averaged over the
/// left-rectangle grid t_i = i h, i < steps, of the exact transient law.
double ou_finite_time_theta(const OUModel& ou, const Mat& pi, const Mat& weight, const Vec& mean0, const Mat& cov0,
                            double h, std::size_t steps);

struct QuadratureResult
{
    double value = 0.0;
    double error_estimate = 0.0;
    double tail_mass = 0.0;
};

struct GridSpec
{
    /// Grid half-width in units of the scale per axis.
    double width = 10.0;
    int points = 2001;
    double tail_tol = 1e-10;
    /// Refinement acceptance: |I_fine - I_coarse| <= rel_tol * max(1, |I_fine|).
    double rel_tol = 1e-8;
};

/// Trapezoid rule of integrand * density on [c - w s, c + w s] plus one
/// doubling for the error estimate. The density must be normalised; the mass
/// missing from the grid must be below tail_tol.
QuadratureResult quadrature_expectation(const std::function<double(double)>& density,
                                        const std::function<double(double)>& integrand, double center, double scale,
                                        const GridSpec& grid = {});

/// Tensor-grid version for two dimensions.
QuadratureResult quadrature_expectation(const std::function<double(const Vec&)>& density,
                                        const std::function<double(const Vec&)>& integrand, const Vec& center,
                                        const Vec& scale, const GridSpec& grid = {});

/// Normalised Gaussian density.
std::function<double(const Vec&)> gaussian_density(const Vec& mean, const Mat& cov);
std::function<double(double)> gaussian_density(double mean, double variance);

struct MleEstimate
{
    double theta = 0.0;
    /// sqrt(sigma^2 / (h sum x_i^2)) when sigma is known.
    std::optional<double> se;
};

/// theta = sum x_i (x_{i+1} - x_i) / (h sum x_i^2) for the Euler chain of
/// dX = theta X dt + sigma dB. Throws on a zero denominator.
MleEstimate discrete_ou_mle(const std::vector<double>& series, double h, std::optional<double> sigma = std::nullopt);

}  // namespace pathcg::oracle
