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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace o = pathcg::oracle;

namespace
{
o::Mat test_a()
{
    o::Mat a(2, 2);
    a << 1.0, 0.5, 0.0, 2.0;
    return a;
}
}  // namespace

TEST(Lyapunov, ScalarIdentity)
{
    const o::Mat c = o::lyapunov_solve(o::Mat::Constant(1, 1, 3.0), o::Mat::Constant(1, 1, 1.5));
    EXPECT_NEAR(c(0, 0), 1.5 / 6.0, 1e-15);
}

TEST(Lyapunov, IdentityDrift)
{
    const o::Mat c = o::lyapunov_solve(o::Mat::Identity(3, 3), 2.0 * o::Mat::Identity(3, 3));
    EXPECT_LE((c - o::Mat::Identity(3, 3)).norm(), 1e-14);
}

TEST(Lyapunov, TwoByTwoMatchesHandSolution)
{
    // Symmetric unknowns (c11, c12, c22): 2c11 + c12 = 1, 3c12 + 0.5c22 = 0, 4c22 = 1.
    const o::Mat c = o::lyapunov_solve(test_a(), o::Mat::Identity(2, 2));
    EXPECT_NEAR(c(1, 1), 0.25, 1e-15);
    EXPECT_NEAR(c(0, 1), -1.0 / 24.0, 1e-15);
    EXPECT_NEAR(c(0, 0), 25.0 / 48.0, 1e-15);
    EXPECT_EQ(c(0, 1), c(1, 0));
    EXPECT_LE(o::lyapunov_residual(test_a(), c, o::Mat::Identity(2, 2)), 1e-14);
}

TEST(Lyapunov, RejectsUnstableDrift)
{
    EXPECT_THROW(o::lyapunov_solve(-o::Mat::Identity(2, 2), o::Mat::Identity(2, 2)), std::runtime_error);
}

TEST(OuOptimalTheta, KeepFirstCoordinate)
{
    const o::OUModel ou{test_a(), o::Mat::Identity(2, 2)};
    const o::Mat pi = (o::Mat(1, 2) << 1.0, 0.0).finished();
    const double c11 = 25.0 / 48.0, c12 = -1.0 / 24.0;
    EXPECT_NEAR(o::ou_optimal_theta(ou, pi, o::Mat::Identity(1, 1)), -(c11 + 0.5 * c12) / c11, 1e-14);
    EXPECT_NEAR(o::ou_optimal_theta(ou, pi, o::Mat::Identity(1, 1)), -0.96, 1e-14);
}

TEST(OuOptimalTheta, ScalarAndIdentityMap)
{
    const o::OUModel ou1{o::Mat::Constant(1, 1, 2.5), o::Mat::Constant(1, 1, 0.7)};
    EXPECT_NEAR(o::ou_optimal_theta(ou1, o::Mat::Identity(1, 1), o::Mat::Identity(1, 1)), -2.5, 1e-14);

    // Pi = I with the full matrix basis E_ij reproduces -A.
    const o::OUModel ou{test_a(), o::Mat::Identity(2, 2)};
    std::vector<o::Mat> basis;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
        {
            o::Mat e = o::Mat::Zero(2, 2);
            e(i, j) = 1.0;
            basis.push_back(e);
        }
    const o::Vec theta = o::ou_optimal_theta(ou, o::Mat::Identity(2, 2), basis, o::Mat::Identity(2, 2));
    EXPECT_NEAR(theta(0), -1.0, 1e-12);
    EXPECT_NEAR(theta(1), -0.5, 1e-12);
    EXPECT_NEAR(theta(2), 0.0, 1e-12);
    EXPECT_NEAR(theta(3), -2.0, 1e-12);
}

TEST(OuOptimalTheta, ObjectiveMatchesQuadrature)
{
    const o::OUModel ou{test_a(), o::Mat::Identity(2, 2)};
    const o::Mat pi = (o::Mat(1, 2) << 1.0, 0.0).finished();
    const o::Mat c = o::stationary_covariance(ou);
    const double theta = o::ou_optimal_theta(ou, pi, o::Mat::Identity(1, 1));
    const auto q = o::quadrature_expectation(
        o::gaussian_density(o::Vec::Zero(2), c),
        [&](const o::Vec& x) {
            const double r = -(x(0) + 0.5 * x(1)) - theta * x(0);
            return 0.5 * r * r;
        },
        o::Vec::Zero(2), c.diagonal().cwiseSqrt(), o::GridSpec{10.0, 401, 1e-10, 1e-6});
    EXPECT_NEAR(o::ou_optimal_objective(ou, pi, o::Mat::Identity(1, 1)), q.value, 1e-8);
}

TEST(Quadrature, GaussianMoments)
{
    const auto d = o::gaussian_density(0.0, 1.0);
    EXPECT_NEAR(o::quadrature_expectation(d, [](double) { return 1.0; }, 0.0, 1.0).value, 1.0, 1e-10);
    EXPECT_NEAR(o::quadrature_expectation(d, [](double x) { return x * x; }, 0.0, 1.0).value, 1.0, 1e-8);
}

TEST(Quadrature, OuRerIntegrandAtZero)
{
    // 1/2 |x - 0|^2 / sigma^2 with sigma^2 = 2 under N(0, 1).
    const auto d = o::gaussian_density(0.0, 1.0);
    const auto r = o::quadrature_expectation(d, [](double x) { return 0.5 * x * x / 2.0; }, 0.0, 1.0);
    EXPECT_NEAR(r.value, 0.25, 1e-8);
}

TEST(Quadrature, RejectsTailMass)
{
    const auto d = o::gaussian_density(0.0, 1.0);
    EXPECT_THROW(o::quadrature_expectation(d, [](double) { return 1.0; }, 0.0, 1.0, o::GridSpec{3.0, 2001, 1e-10, 1e-8}),
                 std::runtime_error);
}

TEST(TransientMoments, EndpointsAndStationarity)
{
    const o::OUModel ou{test_a(), o::Mat::Identity(2, 2)};
    const o::Vec m0 = (o::Vec(2) << 5.0, -1.0).finished();
    const o::Mat p0 = 0.1 * o::Mat::Identity(2, 2);
    const auto at0 = o::ou_transient_moments(ou, m0, p0, 0.0);
    EXPECT_LE((at0.mean - m0).norm(), 1e-14);
    EXPECT_LE((at0.cov - p0).norm(), 1e-14);
    const auto late = o::ou_transient_moments(ou, m0, p0, 50.0);
    EXPECT_LE(late.mean.norm(), 1e-12);
    EXPECT_LE((late.cov - o::stationary_covariance(ou)).norm(), 1e-12);
    const o::Mat c = o::stationary_covariance(ou);
    const auto stat = o::ou_transient_moments(ou, o::Vec::Zero(2), c, 0.7);
    EXPECT_LE((stat.cov - c).norm(), 1e-13);
}

TEST(FiniteTimeTheta, StationaryStartEqualsStationaryOptimum)
{
    const o::OUModel ou{test_a(), o::Mat::Identity(2, 2)};
    const o::Mat pi = (o::Mat(1, 2) << 1.0, 0.0).finished();
    const double t = o::ou_finite_time_theta(ou, pi, o::Mat::Identity(1, 1), o::Vec::Zero(2),
                                             o::stationary_covariance(ou), 0.01, 100);
    EXPECT_NEAR(t, -0.96, 1e-12);
}

TEST(DiscreteOuMle, NoiselessDecayIsExact)
{
    const double theta0 = -0.7, h = 0.01;
    std::vector<double> x{2.0};
    for (int i = 0; i < 50; ++i) x.push_back((1 + theta0 * h) * x.back());
    EXPECT_NEAR(o::discrete_ou_mle(x, h).theta, theta0, 1e-12);
}

TEST(DiscreteOuMle, RejectsDegenerateSeries)
{
    EXPECT_THROW(o::discrete_ou_mle({0.0, 0.0, 0.0}, 0.1), std::runtime_error);
    EXPECT_THROW(o::discrete_ou_mle({1.5, 1.5, 1.5}, 0.1), std::runtime_error);
    EXPECT_THROW(o::discrete_ou_mle({1.0}, 0.1), std::runtime_error);
}

TEST(DiscreteOuMle, SimulatedSeriesWithinThreeSe)
{
    // Euler chain of dX = -X dt + sqrt(2) dB, h = 1e-2, T = 1e5.
    const double h = 1e-2, sigma = std::sqrt(2.0);
    std::mt19937_64 eng(7);
    std::normal_distribution<double> n;
    std::vector<double> x{0.0};
    for (int i = 0; i < 10'000'000; ++i) x.push_back(x.back() - h * x.back() + sigma * std::sqrt(h) * n(eng));
    const auto est = o::discrete_ou_mle(x, h, sigma);
    ASSERT_TRUE(est.se.has_value());
    EXPECT_LE(std::abs(est.theta + 1.0), 3 * *est.se);
}
