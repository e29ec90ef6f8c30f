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

#include "pathcg/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

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

LangevinModel single_particle(VectorField force, double gamma, double sigma)
{
    LangevinModel m;
    m.n_particles = 1;
    m.space_dim = 1;
    m.masses = Vector::Ones(1);
    m.force = std::move(force);
    m.friction = Matrix::Constant(1, 1, gamma);
    m.noise = Matrix::Constant(1, 1, sigma);
    return m;
}
}  // namespace

TEST(SdeModel, RejectsRankDeficientDiffusion)
{
    Matrix s(2, 2);
    s << 1.0, 2.0, 2.0, 4.0;
    EXPECT_THROW(SDEModel::with_constant_diffusion(2, [](const Vector& x) { return x; }, s), NumericalError);
}

TEST(SdeModel, RejectsShapeErrors)
{
    EXPECT_THROW(SDEModel::with_constant_diffusion(2, [](const Vector& x) { return x; }, Matrix::Identity(3, 3)),
                 DimensionError);
    EXPECT_THROW(SDEModel(0, [](const Vector& x) { return x; }, [](const Vector&) { return Matrix(); }, 0),
                 DimensionError);
}

TEST(SdeModel, CheckStateFlagsNonFiniteDrift)
{
    const auto m = SDEModel::with_constant_diffusion(
        1, [](const Vector& x) -> Vector { return Vector::Constant(1, 1.0 / x(0)); }, Matrix::Identity(1, 1));
    EXPECT_NO_THROW(m.check_state(vec({1.0})));
    EXPECT_THROW(m.check_state(vec({0.0})), NumericalError);
}

TEST(LangevinSde, FreeParticleDrift)
{
    LangevinModel m = single_particle([](const Vector& q) -> Vector { return Vector::Zero(q.size()); }, 0.0, 1.0);
    m.masses(0) = 2.0;
    const SDEModel sde = make_langevin_sde(m);
    const Vector b = sde.drift(vec({0.3, 1.0}));
    EXPECT_DOUBLE_EQ(b(0), 0.5);
    EXPECT_DOUBLE_EQ(b(1), 0.0);
}

TEST(LangevinSde, HarmonicOscillatorDrift)
{
    const SDEModel sde = make_langevin_sde(single_particle([](const Vector& q) -> Vector { return -q; }, 1.0, 1.0));
    const Vector b = sde.drift(vec({0.7, -0.2}));
    EXPECT_DOUBLE_EQ(b(0), -0.2);
    EXPECT_DOUBLE_EQ(b(1), -0.7 + 0.2);
}

TEST(LangevinSde, NoiseActsOnMomentaOnly)
{
    LangevinModel m = LangevinModel::thermostatted(
        2, 3, vec({1.0, 3.0}), [](const Vector& q) -> Vector { return -q; }, 0.5, 2.0);
    Eigen::Matrix<double, 6, 6> r = Eigen::Matrix<double, 6, 6>::Random();
    m.noise = r + 6.0 * Matrix::Identity(6, 6);
    const SDEModel sde = make_langevin_sde(m);
    const Matrix s0 = sde.constant_diffusion();
    ASSERT_EQ(s0.rows(), 12);
    ASSERT_EQ(s0.cols(), 6);
    EXPECT_EQ(s0.topRows(6).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(numerical_rank(s0), 6);
}

TEST(FluctuationDissipation, Cases)
{
    auto m = single_particle([](const Vector& q) { return q; }, 1.0, std::sqrt(2.0));
    EXPECT_TRUE(check_fluctuation_dissipation(m));
    m.noise(0, 0) = 1.0;
    EXPECT_FALSE(check_fluctuation_dissipation(m));
    for (double beta : {0.3, 1.0, 7.0})
    {
        m.beta = beta;
        m.noise(0, 0) = std::sqrt(2.0 / beta);
        EXPECT_TRUE(check_fluctuation_dissipation(m));
    }
}

TEST(LangevinModel, ValidateRejectsBadMasses)
{
    auto m = single_particle([](const Vector& q) { return q; }, 1.0, 1.0);
    m.masses(0) = 0.0;
    EXPECT_THROW(m.validate(), NumericalError);
    m.masses(0) = 1.0;
    m.beta = 0.0;
    EXPECT_THROW(m.validate(), NumericalError);
}

TEST(DriftFamily, ZeroUnitAndScalarCoefficients)
{
    const auto lin = ParametricDriftFamily::linear(3);
    const Vector x = vec({1.0, -2.0, 0.5});
    EXPECT_EQ(lin.eval(x, Vector::Zero(1)).norm(), 0.0);
    EXPECT_EQ(lin.eval(x, vec({-2.0})), -2.0 * x);

    const auto fam = ParametricDriftFamily::affine(3).concat(ParametricDriftFamily::cubic(3));
    for (int j = 0; j < fam.size(); ++j)
    {
        Vector e = Vector::Zero(fam.size());
        e(j) = 1.0;
        EXPECT_EQ(fam.eval(x, e), fam.design(x).col(j));
    }
}

TEST(DriftFamily, LinearInTheta)
{
    std::mt19937_64 eng(3);
    std::normal_distribution<double> n;
    const auto fam = ParametricDriftFamily::linear_matrix(3).concat(ParametricDriftFamily::cubic(3));
    for (int trial = 0; trial < 20; ++trial)
    {
        Vector x(3), t1(fam.size()), t2(fam.size());
        for (auto& v : x) v = n(eng);
        for (auto& v : t1) v = n(eng);
        for (auto& v : t2) v = n(eng);
        const double alpha = n(eng);
        const Vector lhs = fam.eval(x, alpha * t1 + t2);
        const Vector rhs = alpha * fam.eval(x, t1) + fam.eval(x, t2);
        EXPECT_LE((lhs - rhs).norm(), 1e-12 * (1.0 + rhs.norm()));
    }
}

TEST(DriftFamily, LinearMatrixLayoutIsRowMajor)
{
    const auto fam = ParametricDriftFamily::linear_matrix(2);
    const Vector theta = vec({1.0, 2.0, 3.0, 4.0});
    const Vector x = vec({1.0, 10.0});
    const Vector b = fam.eval(x, theta);
    EXPECT_DOUBLE_EQ(b(0), 21.0);
    EXPECT_DOUBLE_EQ(b(1), 43.0);
}

TEST(DriftFamily, PairwiseSpringsIsHarmonicChainForce)
{
    const auto fam = ParametricDriftFamily::pairwise_springs(3, 1);
    const Vector q = vec({0.0, 1.0, 3.0});
    const Vector f = fam.eval(q, vec({2.0}));
    EXPECT_DOUBLE_EQ(f(0), 2.0);
    EXPECT_DOUBLE_EQ(f(1), -2.0 + 4.0);
    EXPECT_DOUBLE_EQ(f(2), -4.0);
    EXPECT_NEAR(f.sum(), 0.0, 1e-15);
}

TEST(DriftFamily, ScaledAndDimensionChecks)
{
    const auto fam = ParametricDriftFamily::affine(2).scaled(3.0);
    EXPECT_EQ(fam.eval(vec({1.0, 2.0}), vec({1.0, 1.0})), vec({6.0, 9.0}));
    EXPECT_THROW(fam.eval(vec({1.0}), vec({1.0, 1.0})), DimensionError);
    EXPECT_THROW(fam.eval(vec({1.0, 2.0}), vec({1.0})), DimensionError);
    EXPECT_THROW(ParametricDriftFamily(2, {}), DimensionError);
}
