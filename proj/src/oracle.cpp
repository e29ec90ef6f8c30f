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

#include "pathcg/oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pathcg::oracle
{
bool OUModel::stable() const
{
    if (a.rows() != a.cols() || a.rows() == 0) return false;
    Eigen::EigenSolver<Mat> es(a, false);
    return (es.eigenvalues().real().array() > 0.0).all();
}

Mat lyapunov_solve(const Mat& a, const Mat& q)
{
    const Eigen::Index n = a.rows();
    if (a.cols() != n || q.rows() != n || q.cols() != n) throw std::runtime_error("lyapunov_solve: shape mismatch");
    if (!OUModel{a, Mat()}.stable()) throw std::runtime_error("lyapunov_solve: A is not stable");
    const Eigen::Index p = n * (n + 1) / 2;
    auto idx = [n](Eigen::Index i, Eigen::Index j) {
        if (i > j) std::swap(i, j);
        return i * n - i * (i - 1) / 2 + (j - i);
    };
    Mat lhs = Mat::Zero(p, p);
    Vec rhs(p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j)
        {
            const Eigen::Index row = idx(i, j);
            rhs(row) = q(i, j);
            for (Eigen::Index k = 0; k < n; ++k)
            {
                lhs(row, idx(k, j)) += a(i, k);
                lhs(row, idx(i, k)) += a(j, k);
            }
        }
    const Vec sol = lhs.fullPivLu().solve(rhs);
    Mat c(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) c(i, j) = sol(idx(i, j));
    const double res = lyapunov_residual(a, c, q);
    if (!(res <= 1e-12 * std::max(q.norm(), 1e-300)))
        throw std::runtime_error("lyapunov_solve: residual " + std::to_string(res) + " too large");
    return c;
}

double lyapunov_residual(const Mat& a, const Mat& c, const Mat& q)
{
    return (a * c + c * a.transpose() - q).norm();
}

Mat stationary_covariance(const OUModel& ou) { return lyapunov_solve(ou.a, ou.diffusion()); }

Vec linear_regression_theta(const Mat& a, const Mat& second_moment, const Mat& pi, const std::vector<Mat>& basis,
                            const Mat& weight)
{
    const auto k = static_cast<Eigen::Index>(basis.size());
    if (k == 0) throw std::runtime_error("linear_regression_theta: empty basis");
    const Mat s = pi * second_moment * pi.transpose();
    const Mat cross = pi * (-a) * second_moment * pi.transpose();
    Mat phi(k, k);
    Vec rhs(k);
    for (Eigen::Index i = 0; i < k; ++i)
    {
        const Mat& ei = basis[static_cast<std::size_t>(i)];
        rhs(i) = (ei.transpose() * weight * cross).trace();
        for (Eigen::Index j = 0; j < k; ++j)
            phi(i, j) = (ei.transpose() * weight * basis[static_cast<std::size_t>(j)] * s).trace();
    }
    Eigen::FullPivLU<Mat> lu(phi);
    if (!lu.isInvertible()) throw std::runtime_error("linear_regression_theta: singular normal matrix");
    return lu.solve(rhs);
}

double ou_optimal_theta(const OUModel& ou, const Mat& pi, const Mat& weight)
{
    return ou_optimal_theta(ou, pi, {Mat::Identity(pi.rows(), pi.rows())}, weight)(0);
}

Vec ou_optimal_theta(const OUModel& ou, const Mat& pi, const std::vector<Mat>& basis, const Mat& weight)
{
    return linear_regression_theta(ou.a, stationary_covariance(ou), pi, basis, weight);
}

double ou_optimal_objective(const OUModel& ou, const Mat& pi, const Mat& weight)
{
    const Mat c = stationary_covariance(ou);
    const double theta = ou_optimal_theta(ou, pi, weight);
    // residual r = Pi(-A)x - theta Pi x = L x, E|r|^2_W = tr(L^T W L C)
    const Mat l = pi * (-ou.a) - theta * pi;
    return 0.5 * (l.transpose() * weight * l * c).trace();
}

GaussianMoments ou_transient_moments(const OUModel& ou, const Vec& mean0, const Mat& cov0, double t)
{
    const Mat c = stationary_covariance(ou);
    const Mat e = (-ou.a * t).exp();
    return GaussianMoments{e * mean0, c + e * (cov0 - c) * e.transpose()};
}

double ou_finite_time_theta(const OUModel& ou, const Mat& pi, const Mat& weight, const Vec& mean0, const Mat& cov0,
                            double h, std::size_t steps)
{
    if (steps == 0) throw std::runtime_error("ou_finite_time_theta: no steps");
    const Eigen::Index n = ou.a.rows();
    Mat s = Mat::Zero(n, n);
    for (std::size_t i = 0; i < steps; ++i)
    {
        const GaussianMoments m = ou_transient_moments(ou, mean0, cov0, static_cast<double>(i) * h);
        s += m.cov + m.mean * m.mean.transpose();
    }
    s /= static_cast<double>(steps);
    return linear_regression_theta(ou.a, s, pi, {Mat::Identity(pi.rows(), pi.rows())}, weight)(0);
}

namespace
{
double trapezoid_1d(const std::function<double(double)>& f, double lo, double hi, int points)
{
    const double dx = (hi - lo) / (points - 1);
    double sum = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < points - 1; ++i) sum += f(lo + i * dx);
    return sum * dx;
}

double trapezoid_2d(const std::function<double(const Vec&)>& f, const Vec& lo, const Vec& hi, int points)
{
    const double dx = (hi(0) - lo(0)) / (points - 1);
    const double dy = (hi(1) - lo(1)) / (points - 1);
    Vec x(2);
    double sum = 0.0;
    for (int i = 0; i < points; ++i)
    {
        const double wi = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        x(0) = lo(0) + i * dx;
        double row = 0.0;
        for (int j = 0; j < points; ++j)
        {
            const double wj = (j == 0 || j == points - 1) ? 0.5 : 1.0;
            x(1) = lo(1) + j * dy;
            row += wj * f(x);
        }
        sum += wi * row;
    }
    return sum * dx * dy;
}

void check(const QuadratureResult& r, double fine, const GridSpec& grid)
{
    if (!(r.tail_mass <= grid.tail_tol))
        throw std::runtime_error("quadrature: density mass outside the grid is " + std::to_string(r.tail_mass));
    if (!(r.error_estimate <= grid.rel_tol * std::max(1.0, std::abs(fine))))
        throw std::runtime_error("quadrature: refinement did not converge (difference " +
                                 std::to_string(r.error_estimate) + ")");
}
}  // namespace

QuadratureResult quadrature_expectation(const std::function<double(double)>& density,
                                        const std::function<double(double)>& integrand, double center, double scale,
                                        const GridSpec& grid)
{
    if (!(scale > 0.0) || grid.points < 3) throw std::runtime_error("quadrature: bad grid");
    const double lo = center - grid.width * scale, hi = center + grid.width * scale;
    auto prod = [&](double x) { return density(x) * integrand(x); };
    const double coarse = trapezoid_1d(prod, lo, hi, grid.points);
    const double fine = trapezoid_1d(prod, lo, hi, 2 * grid.points - 1);
    QuadratureResult r;
    r.value = fine;
    r.error_estimate = std::abs(fine - coarse);
    r.tail_mass = std::abs(1.0 - trapezoid_1d(density, lo, hi, 2 * grid.points - 1));
    check(r, fine, grid);
    return r;
}

QuadratureResult quadrature_expectation(const std::function<double(const Vec&)>& density,
                                        const std::function<double(const Vec&)>& integrand, const Vec& center,
                                        const Vec& scale, const GridSpec& grid)
{
    if (center.size() != 2 || scale.size() != 2 || (scale.array() <= 0.0).any() || grid.points < 3)
        throw std::runtime_error("quadrature: the tensor grid supports two dimensions");
    const Vec lo = center - grid.width * scale, hi = center + grid.width * scale;
    auto prod = [&](const Vec& x) { return density(x) * integrand(x); };
    const double coarse = trapezoid_2d(prod, lo, hi, grid.points);
    const double fine = trapezoid_2d(prod, lo, hi, 2 * grid.points - 1);
    QuadratureResult r;
    r.value = fine;
    r.error_estimate = std::abs(fine - coarse);
    r.tail_mass = std::abs(1.0 - trapezoid_2d(density, lo, hi, grid.points));
    check(r, fine, grid);
    return r;
}

std::function<double(const Vec&)> gaussian_density(const Vec& mean, const Mat& cov)
{
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success) throw std::runtime_error("gaussian_density: covariance not positive definite");
    const Mat prec = llt.solve(Mat::Identity(cov.rows(), cov.cols()));
    const double log_det = 2.0 * Mat(llt.matrixL()).diagonal().array().log().sum();
    const double norm = std::exp(-0.5 * (static_cast<double>(cov.rows()) * std::log(2.0 * std::numbers::pi) + log_det));
    return [mean, prec, norm](const Vec& x) {
        const Vec d = x - mean;
        return norm * std::exp(-0.5 * d.dot(prec * d));
    };
}

std::function<double(double)> gaussian_density(double mean, double variance)
{
    if (!(variance > 0.0)) throw std::runtime_error("gaussian_density: variance must be positive");
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance);
    return [=](double x) { return norm * std::exp(-0.5 * (x - mean) * (x - mean) / variance); };
}

MleEstimate discrete_ou_mle(const std::vector<double>& series, double h, std::optional<double> sigma)
{
    if (series.size() < 2) throw std::runtime_error("discrete_ou_mle: need at least two points");
    if (!(h > 0.0)) throw std::runtime_error("discrete_ou_mle: h must be positive");
    double num = 0.0, den = 0.0, moves = 0.0;
    for (std::size_t i = 0; i + 1 < series.size(); ++i)
    {
        const double dx = series[i + 1] - series[i];
        num += series[i] * dx;
        den += series[i] * series[i];
        moves += dx * dx;
    }
    if (den == 0.0) throw std::runtime_error("discrete_ou_mle: zero denominator");
    if (moves == 0.0) throw std::runtime_error("discrete_ou_mle: constant series has no increments");
    MleEstimate e;
    e.theta = num / (h * den);
    if (sigma) e.se = std::sqrt(*sigma * *sigma / (h * den));
    return e;
}

}  // namespace pathcg::oracle
