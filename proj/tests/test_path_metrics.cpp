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

#include "pathcg/builtin_models.hpp"
#include "pathcg/cg_maps.hpp"
#include "pathcg/oracle.hpp"
#include "pathcg/path_metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace pathcg;

namespace
{
Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

Matrix normal_samples(int dim, Eigen::Index n, std::uint64_t seed, double sd = 1.0)
{
    GaussianStream g(RngSpec{seed}, 0);
    return sd * g.draw(dim * n).reshaped(dim, n);
}

VectorField constant_field(Vector c)
{
    return [c](const Vector&) { return c; };
}

double normal_logpdf(double x, double mean, double var)
{
    return -0.5 * std::log(2 * std::numbers::pi * var) - 0.5 * (x - mean) * (x - mean) / var;
}
}  // namespace

TEST(Xi, Scalings)
{
    EXPECT_EQ(xi_matrix(Matrix::Identity(3, 3)), Matrix::Identity(3, 3));
    EXPECT_LE((xi_matrix(2.5 * Matrix::Identity(2, 2)) - Matrix::Identity(2, 2) / 2.5).norm(), 1e-15);
}

TEST(Xi, LangevinSelectsMomentumBlock)
{
    const LangevinModel m = LangevinModel::thermostatted(
        1, 2, Vector::Ones(1), [](const Vector& q) -> Vector { return -q; }, 2.0, 1.0);
    const Matrix xi = xi_matrix(make_langevin_sde(m).constant_diffusion());
    ASSERT_EQ(xi.rows(), 2);
    ASSERT_EQ(xi.cols(), 4);
    EXPECT_EQ(xi.leftCols(2).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((xi.rightCols(2) - m.noise.inverse()).norm(), 1e-15);
}

TEST(WeightedNorm, NonNegativeAndKernel)
{
    Matrix sigma(3, 2);
    sigma << 1, 0, 0, 2, 0, 0;
    const WeightedNorm w = WeightedNorm::xi(sigma);
    EXPECT_DOUBLE_EQ(w.squared(vec({0, 0, 5})), 0.0);
    EXPECT_GT(w.squared(vec({1, 0, 0})), 0.0);
    const WeightedNorm c = WeightedNorm::xi(3.0 * Matrix::Identity(2, 2));
    EXPECT_NEAR(c.squared(vec({1.0, 2.0})), 5.0 / 9.0, 1e-15);
}

TEST(WeightedNorm, CenterOfMassWeight)
{
    // Two groups of N/2 equal masses with sigma = s I: W = I / ((N/2) s^2).
    const int n = 4;
    const double s = 1.5;
    const PhaseCGMap pm = make_center_of_mass_map(Vector::Ones(n), {{0, 1}, {2, 3}}, 3);
    const WeightedNorm w = WeightedNorm::cg_xi(Matrix(s * Matrix::Identity(3 * n, 3 * n)), pm.mom.right_inverse());
    EXPECT_LE((w.constant_metric() - Matrix::Identity(6, 6) * 2.0 / (n * s * s)).norm(), 1e-14);
}

TEST(RerStationary, MatchedDriftIsZero)
{
    const Matrix x = normal_samples(2, 1000, 1);
    const VectorField b = [](const Vector& v) -> Vector { return -v; };
    const RERReport r = rer_stationary(x, b, b, WeightedNorm::xi(Matrix::Identity(2, 2)));
    EXPECT_EQ(r.value, 0.0);
    EXPECT_EQ(r.std_error, 0.0);
}

TEST(RerStationary, ConstantMismatchIsExact)
{
    const Matrix x = normal_samples(1, 1000, 1);
    const RERReport r = rer_stationary(x, constant_field(Vector::Zero(1)), constant_field(vec({0.7})),
                                       WeightedNorm::xi(Matrix::Identity(1, 1)));
    EXPECT_NEAR(r.value, 0.49 / 2, 1e-15);
    EXPECT_NEAR(r.std_error, 0.0, 1e-15);
}

TEST(RerStationary, OuAgainstQuadrature)
{
    const Matrix x = normal_samples(1, 200'000, 2);
    const auto density = oracle::gaussian_density(0.0, 1.0);
    for (double theta : {0.0, 0.5})
    {
        const VectorField b = [](const Vector& v) -> Vector { return -v; };
        const VectorField bt = [theta](const Vector& v) -> Vector { return -theta * v; };
        const RERReport r = rer_stationary(x, b, bt, WeightedNorm::xi(Matrix::Constant(1, 1, std::sqrt(2.0))));
        const double exact = oracle::quadrature_expectation(
                                 density, [theta](double v) { return 0.25 * (1 - theta) * (1 - theta) * v * v; }, 0.0,
                                 1.0)
                                 .value;
        EXPECT_NEAR(exact, (1 - theta) * (1 - theta) / 4, 1e-8);
        EXPECT_LE(std::abs(r.value - exact), 3 * r.std_error) << theta;
    }
}

TEST(ReFiniteTime, MatchedAndConstantMismatch)
{
    Ensemble e;
    for (int r = 0; r < 3; ++r)
    {
        Trajectory t;
        t.dim = 1;
        t.step = 0.1;
        t.states = normal_samples(1, 21, 10 + static_cast<std::uint64_t>(r));
        t.replica = static_cast<std::uint64_t>(r);
        e.trajectories.push_back(t);
    }
    const WeightedNorm xi = WeightedNorm::xi(Matrix::Identity(1, 1));
    const VectorField b = [](const Vector& v) -> Vector { return -v; };
    const RERReport zero = re_finite_time(e, b, b, xi, 0.0);
    EXPECT_EQ(zero.value, 0.0);
    const double c = 1.3;
    const RERReport r = re_finite_time(e, constant_field(Vector::Zero(1)), constant_field(vec({c})), xi, 0.0);
    EXPECT_NEAR(r.value, c * c, 1e-13);
    const RERReport shifted = re_finite_time(e, b, b, xi, 0.125);
    EXPECT_NEAR(shifted.value, 0.125, 1e-15);
}

TEST(DiscreteRerOverdamped, Pieces)
{
    const Matrix x = normal_samples(2, 500, 3);
    const SDEModel micro = make_ou_model(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    const Matrix pi = make_projection_map(2, {0}).matrix();
    const VectorField exact = [](const Vector& xb) -> Vector { return -xb; };
    const auto matched = discrete_rer_overdamped(x, micro, pi, exact,
                                                 [](const Vector&) -> Matrix { return Matrix::Identity(1, 1); }, 0.1);
    EXPECT_NEAR(matched.a.mean, 0.5, 1e-14);
    EXPECT_NEAR(matched.b.mean, 0.0, 1e-14);

    const SDEModel wide = make_ou_model(Matrix::Identity(1, 1), Matrix::Constant(1, 1, std::sqrt(2.0)));
    const auto mis = discrete_rer_overdamped(normal_samples(1, 10, 4), wide, Matrix::Identity(1, 1), exact,
                                             [](const Vector&) -> Matrix { return Matrix::Identity(1, 1); }, 0.1);
    EXPECT_NEAR(mis.a.mean, 0.5 * (-std::log(2.0) + 2.0), 1e-14);
}

TEST(DiscreteRerBbk, ExactCases)
{
    const double gamma = 1.0, beta = 2.0;
    const double sigma2 = 2 * gamma / beta;
    const LangevinModel m = LangevinModel::thermostatted(
        1, 1, Vector::Ones(1), [](const Vector& q) -> Vector { return -q; }, gamma, beta);
    const auto family = ParametricDriftFamily::affine(1);
    const Matrix samples = normal_samples(2, 2000, 5);
    BbkRerInput in;
    in.model = &m;
    in.pi_q = Matrix::Identity(1, 1);
    in.family = &family;
    in.h = 1e-2;
    in.theta = vec({-1.0, 0.0});
    const BbkPieces exact = discrete_rer_bbk(samples, in, RngSpec{1});
    EXPECT_NEAR(exact.c.mean, 0.0, 1e-15);
    EXPECT_NEAR(exact.d.mean, 0.0, 1e-15);

    const double c = 0.4;
    in.theta = vec({-1.0, -c});
    const BbkPieces shifted = discrete_rer_bbk(samples, in, RngSpec{1});
    EXPECT_NEAR(shifted.c.mean, c * c / (4 * sigma2), 1e-14);
    EXPECT_NEAR(shifted.d.mean, c * c / sigma2, 1e-14);
}

TEST(DiscreteRerBbk, GradientRatioTendsToOne)
{
    const LangevinModel m = LangevinModel::thermostatted(
        1, 1, Vector::Ones(1), [](const Vector& q) -> Vector { return -q; }, 1.0, 1.0);
    const auto family = ParametricDriftFamily::linear(1);
    const Matrix samples = normal_samples(2, 100'000, 6);
    std::vector<double> err;
    for (double h : {1e-1, 1e-2, 1e-3})
    {
        BbkRerInput in;
        in.model = &m;
        in.pi_q = Matrix::Identity(1, 1);
        in.family = &family;
        in.h = h;
        in.theta = Vector::Zero(1);
        const BbkPieces p = discrete_rer_bbk(samples, in, RngSpec{2});
        err.push_back(std::abs((p.grad_c(0) + p.grad_d(0)) / (5 * p.grad_c(0)) - 1.0));
    }
    EXPECT_LT(err[2], 0.02);
    EXPECT_LT(err[2], err[0]);
}

TEST(DiscreteRerBbk, RejectsUnequalMasses)
{
    LangevinModel m = LangevinModel::thermostatted(
        2, 1, vec({1.0, 2.0}), [](const Vector& q) -> Vector { return -q; }, 1.0, 1.0);
    const auto family = ParametricDriftFamily::linear(2);
    BbkRerInput in;
    in.model = &m;
    in.pi_q = Matrix::Identity(2, 2);
    in.family = &family;
    in.theta = Vector::Zero(1);
    EXPECT_THROW(discrete_rer_bbk(normal_samples(4, 10, 1), in, RngSpec{1}), Error);
}

TEST(Likelihood, ExactEulerTransitionGivesNormalisation)
{
    const Matrix cov = (Matrix(2, 2) << 2.0, 0.3, 0.3, 1.0).finished();
    const double h = 0.05;
    const auto family = ParametricDriftFamily::linear(2);
    const auto kernel = std::make_shared<EulerKernel>(family, cov, h);
    Trajectory t;
    t.dim = 2;
    t.step = h;
    t.states = Matrix(2, 2);
    t.states.col(0) = vec({1.0, -2.0});
    t.states.col(1) = t.states.col(0) + h * (-0.5) * t.states.col(0);
    const PathLogLikelihood ll(kernel, {t});
    const double expected = -std::log(2 * std::numbers::pi) - 0.5 * std::log((h * cov).determinant());
    EXPECT_NEAR(ll.value(vec({-0.5})), expected, 1e-12);
}

TEST(Likelihood, BbkMatchesDirectDensity)
{
    const double h = 0.1, m = 2.0, g = 0.7, s2 = 0.9;
    const auto family = ParametricDriftFamily::affine(1);
    const BbkKernel kernel(family, Vector::Constant(1, m), Matrix::Constant(1, 1, g), Matrix::Constant(1, 1, s2), h);
    const double q = 0.3, p = -0.4, q1 = 0.25, p1 = -0.1;
    const Vector theta = vec({-1.2, 0.4});
    auto force = [&](double x) { return theta(0) * x + theta(1); };

    const double mean_q = q + h / m * (p + 0.5 * h * force(q) - 0.5 * h * g * p / m);
    const double var_q = h * h / (m * m) * s2 * h / 2;
    const double bb = 1 + 0.5 * h * g / m;
    const double mean_p = (m * (q1 - q) / h + 0.5 * h * force(q1)) / bb;
    const double var_p = s2 * h / 2 / (bb * bb);
    const double direct = normal_logpdf(q1, mean_q, var_q) + normal_logpdf(p1, mean_p, var_p);

    double got = 0.0;
    for (const auto& block : kernel.residuals(vec({q, p}), vec({q1, p1})))
    {
        const Vector r = block.r0 - block.jacobian * theta;
        got += block.log_norm - 0.5 * r.dot(block.precision * r);
    }
    EXPECT_NEAR(got, direct, 1e-10);
}

TEST(Likelihood, PrefersGeneratingParameter)
{
    const SDEModel ou = make_ou_model(Matrix::Identity(1, 1), Matrix::Constant(1, 1, std::sqrt(2.0)));
    SimulationOptions o;
    o.h = 1e-2;
    o.steps = 100'000;
    o.burn_in = 0;
    const Trajectory t = simulate_trajectory(ou, Vector::Zero(1), o, RngSpec{3});
    const PathLogLikelihood ll(
        std::make_shared<EulerKernel>(ParametricDriftFamily::linear(1), 2.0 * Matrix::Identity(1, 1), 1e-2), {t});
    EXPECT_GT(ll.value(vec({-1.0})), ll.value(vec({0.0})));
    EXPECT_EQ(ll.transitions(), 100'000u);
    const Vector g = ll.gradient(vec({-0.3}));
    const double fd = (ll.value(vec({-0.3 + 1e-4})) - ll.value(vec({-0.3 - 1e-4}))) / 2e-4;
    EXPECT_NEAR(g(0), fd, 1e-6 * std::abs(fd));
}

TEST(Ckp, IdenticalAndZeroDivergence)
{
    const Matrix a = normal_samples(1, 5000, 1);
    const ScalarField phi = [](const Vector& x) { return std::tanh(x(0)); };
    const CkpResult same = ckp_bound(phi, a, a, 0.0, 1.0);
    EXPECT_EQ(same.lhs, 0.0);
    EXPECT_TRUE(same.holds);

    const Matrix b = normal_samples(1, 5000, 2);
    const CkpResult zero = ckp_bound(phi, a, b, 0.0, 1.0);
    EXPECT_EQ(zero.rhs, 0.0);
    EXPECT_EQ(zero.holds, zero.lhs <= 3 * zero.se);

    const CkpResult empirical = ckp_bound(phi, a, b, 0.1);
    EXPECT_TRUE(empirical.sup_is_empirical);
    EXPECT_LE(empirical.sup_norm, 1.0);
}

TEST(Ckp, MisfitOuBoundHolds)
{
    // Projected 2D OU marginal N(0, 25/48) against a CG OU at half the fitted rate.
    const double c11 = 25.0 / 48.0;
    const Matrix a = normal_samples(1, 20'000, 3, std::sqrt(c11));
    const Matrix b = normal_samples(1, 20'000, 4, std::sqrt(1.0 / (2 * 0.48)));
    const double r = gaussian_kl_estimate(a, b);
    const ScalarField phi = [](const Vector& x) { return std::tanh(x(0)); };
    EXPECT_TRUE(ckp_bound(phi, a, b, r, 1.0).holds);
    const ScalarField lorentz = [](const Vector& x) { return 1.0 / (1.0 + x(0) * x(0)); };
    const CkpResult l = ckp_bound(lorentz, a, b, r, 1.0);
    EXPECT_TRUE(l.holds);
    EXPECT_GT(l.lhs, 3 * l.se);
}

TEST(ObservableDiscrepancy, Cases)
{
    const Matrix a = normal_samples(1, 20'000, 5);
    const ScalarField id = [](const Vector& x) { return x(0); };
    const Estimate same = observable_discrepancy({id}, a, a);
    EXPECT_EQ(same.mean, 0.0);

    const double d = 0.5;
    const Matrix b = a.array() + d;
    const Estimate shift = observable_discrepancy({id}, a, b);
    EXPECT_NEAR(shift.mean, d * d, 1e-12);

    const Matrix c = normal_samples(1, 20'000, 6);
    const ScalarField sq = [](const Vector& x) { return x(0) * x(0); };
    const Estimate matched = observable_discrepancy({id, sq}, a, c);
    EXPECT_LE(matched.mean, 3 * matched.se);
}

TEST(GaussianKl, MatchesClosedForm)
{
    const Matrix a = normal_samples(1, 400'000, 7);
    const Matrix b = (normal_samples(1, 400'000, 8, 2.0).array() + 1.0).matrix();
    const double exact = 0.5 * (0.25 + 0.25 - 1.0 + std::log(4.0));
    EXPECT_NEAR(gaussian_kl_estimate(a, b), exact, 0.01);
    EXPECT_NEAR(gaussian_kl_estimate(a, a), 0.0, 1e-12);
}
