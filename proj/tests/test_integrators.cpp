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
#include "pathcg/integrators.hpp"
#include "pathcg/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

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

SDEModel ou1(double a = 1.0, double sigma = std::sqrt(2.0))
{
    return make_ou_model(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, sigma));
}

LangevinModel particle(VectorField force, double gamma, double sigma, double mass = 1.0)
{
    LangevinModel m;
    m.n_particles = 1;
    m.space_dim = 1;
    m.masses = Vector::Constant(1, mass);
    m.force = std::move(force);
    m.friction = Matrix::Constant(1, 1, gamma);
    m.noise = Matrix::Constant(1, 1, sigma);
    return m;
}

SimulationOptions opts(double h, std::size_t steps, std::size_t burn_in = 0, std::size_t stride = 1)
{
    SimulationOptions o;
    o.h = h;
    o.steps = steps;
    o.burn_in = burn_in;
    o.record_stride = stride;
    return o;
}
}  // namespace

TEST(EulerMaruyamaStep, SpecialCases)
{
    const auto zero = SDEModel::with_constant_diffusion(
        2, [](const Vector& x) -> Vector { return Vector::Zero(x.size()); }, Matrix::Identity(2, 2));
    EXPECT_EQ(euler_maruyama_step(zero, vec({1.0, 2.0}), 0.1, Vector::Zero(2)), vec({1.0, 2.0}));

    const SDEModel decay(1, [](const Vector& x) -> Vector { return -x; },
                         [](const Vector&) -> Matrix { return Matrix::Zero(1, 1); }, 1);
    EXPECT_NEAR(euler_maruyama_step(decay, vec({1.0}), 0.1, vec({0.5}))(0), 0.9, 1e-15);

    const auto noise = SDEModel::with_constant_diffusion(
        1, [](const Vector& x) -> Vector { return Vector::Zero(x.size()); }, Matrix::Identity(1, 1));
    EXPECT_DOUBLE_EQ(euler_maruyama_step(noise, vec({0.0}), 0.1, vec({0.3}))(0), 0.3);
}

TEST(BbkStep, FreeFlight)
{
    const auto m = particle([](const Vector& q) -> Vector { return Vector::Zero(q.size()); }, 0.0, 0.0, 2.0);
    const auto [q, p] = bbk_step(m, vec({1.0}), vec({3.0}), 0.1, vec({0.4}), vec({-0.2}));
    EXPECT_DOUBLE_EQ(q(0), 1.0 + 1.5 * 0.1);
    EXPECT_DOUBLE_EQ(p(0), 3.0);
}

TEST(BbkStep, FrictionOnlyMomentumUpdate)
{
    const double h = 0.1;
    const auto m = particle([](const Vector& q) -> Vector { return Vector::Zero(q.size()); }, 1.0, 1.0);
    const auto [q, p] = bbk_step(m, vec({0.0}), vec({2.0}), h, Vector::Zero(1), Vector::Zero(1));
    EXPECT_NEAR(p(0), (1 - h / 2) / (1 + h / 2) * 2.0, 1e-15);
}

TEST(BbkStep, HarmonicEnergyErrorIsSecondOrder)
{
    const auto m = particle([](const Vector& q) -> Vector { return -q; }, 0.0, 0.0);
    for (double h : {0.1, 0.01})
    {
        const Vector q0 = vec({1.0}), p0 = vec({0.5});
        const auto [q, p] = bbk_step(m, q0, p0, h, Vector::Zero(1), Vector::Zero(1));
        const double e0 = 0.5 * (q0.squaredNorm() + p0.squaredNorm());
        const double e1 = 0.5 * (q.squaredNorm() + p.squaredNorm());
        EXPECT_LE(std::abs(e1 - e0), h * h);
    }
}

TEST(BbkStep, FlippedForceConvention)
{
    const auto m = particle([](const Vector&) -> Vector { return Vector::Ones(1); }, 0.0, 0.0);
    const auto s = bbk_step(m, vec({0.0}), vec({0.0}), 0.2, Vector::Zero(1), Vector::Zero(1));
    const auto l = bbk_step(m, vec({0.0}), vec({0.0}), 0.2, Vector::Zero(1), Vector::Zero(1),
                            BbkConvention::flipped_force);
    EXPECT_NEAR(s.first(0), 0.02, 1e-15);
    EXPECT_NEAR(s.second(0), 0.2, 1e-15);
    EXPECT_NEAR(l.first(0), -0.02, 1e-15);
    EXPECT_NEAR(l.second(0), -0.2, 1e-15);
}

TEST(Simulate, ZeroStepsGivesInitialState)
{
    const Trajectory t = simulate_trajectory(ou1(), vec({0.7}), opts(0.01, 0), RngSpec{1});
    ASSERT_EQ(t.length(), 1);
    EXPECT_EQ(t.states(0, 0), 0.7);
}

TEST(Simulate, StrideAndLength)
{
    const Trajectory t = simulate_trajectory(ou1(), vec({0.0}), opts(0.01, 100, 0, 10), RngSpec{1});
    EXPECT_EQ(t.length(), 11);
    EXPECT_DOUBLE_EQ(t.step, 0.1);
}

TEST(Simulate, DeterministicGivenSeed)
{
    const Trajectory a = simulate_trajectory(ou1(), vec({0.0}), opts(0.01, 500, 50), RngSpec{42});
    const Trajectory b = simulate_trajectory(ou1(), vec({0.0}), opts(0.01, 500, 50), RngSpec{42});
    EXPECT_EQ(a.states, b.states);
    const Trajectory c = simulate_trajectory(ou1(), vec({0.0}), opts(0.01, 500, 50), RngSpec{43});
    EXPECT_NE(a.states, c.states);
}

TEST(Simulate, DefaultBurnInIsTenPercent)
{
    SimulationOptions o;
    o.steps = 250;
    EXPECT_EQ(o.effective_burn_in(), 25u);
}

TEST(Simulate, OuStationaryVariance)
{
    // Stationary variance sigma^2 / (2a) = 1.
    const Trajectory t = simulate_trajectory(ou1(), vec({0.0}), opts(1e-3, 1'000'000, 10'000), RngSpec{11});
    std::vector<double> sq(static_cast<std::size_t>(t.length()));
    for (Eigen::Index j = 0; j < t.length(); ++j) sq[static_cast<std::size_t>(j)] = t.states(0, j) * t.states(0, j);
    const Estimate v = batch_means(sq);
    EXPECT_LE(std::abs(v.mean - 1.0), 3 * v.se);
}

TEST(Simulate, BlowUpReportsStepAndReplica)
{
    const auto unstable = make_ou_model(Matrix::Constant(1, 1, -500.0), Matrix::Identity(1, 1));
    try
    {
        simulate_trajectory(unstable, vec({1.0}), opts(0.5, 10'000), RngSpec{1}, 3);
        FAIL() << "expected a blow-up";
    }
    catch (const BlowUpError& e)
    {
        EXPECT_GT(e.step(), 0u);
        EXPECT_NE(std::string(e.what()).find("replica 3"), std::string::npos) << e.what();
    }
}

TEST(Ensemble, SingleReplicaMatchesTrajectory)
{
    const Ensemble e = simulate_ensemble(ou1(), fixed_initial(vec({0.3})), opts(0.01, 200), 1, RngSpec{5});
    const Trajectory t = simulate_trajectory(ou1(), vec({0.3}), opts(0.01, 200), RngSpec{5}, 0);
    ASSERT_EQ(e.size(), 1u);
    EXPECT_EQ(e.trajectories[0].states, t.states);
}

TEST(Ensemble, ReplicasDifferAndDoNotDependOnThreads)
{
    setenv("PATHCG_THREADS", "1", 1);
    const Ensemble one = simulate_ensemble(ou1(), fixed_initial(vec({0.0})), opts(0.01, 300), 5, RngSpec{9});
    setenv("PATHCG_THREADS", "4", 1);
    const Ensemble four = simulate_ensemble(ou1(), fixed_initial(vec({0.0})), opts(0.01, 300), 5, RngSpec{9});
    unsetenv("PATHCG_THREADS");
    for (std::size_t r = 0; r < 5; ++r)
    {
        EXPECT_EQ(one.trajectories[r].states, four.trajectories[r].states);
        EXPECT_EQ(one.trajectories[r].replica, r);
    }
    EXPECT_NE(one.trajectories[0].states, one.trajectories[1].states);
}

TEST(Ensemble, InitialMeanMatchesSampler)
{
    const InitialSampler init = [](GaussianStream& g) -> Vector { return vec({2.0}) + g.draw(1); };
    const Ensemble e = simulate_ensemble(ou1(), init, opts(0.01, 0), 4000, RngSpec{21});
    std::vector<double> x0;
    for (const auto& t : e.trajectories) x0.push_back(t.states(0, 0));
    const Estimate m = iid_mean(x0);
    EXPECT_LE(std::abs(m.mean - 2.0), 3 * m.se);
}

TEST(Ensemble, LangevinBbkRuns)
{
    const LangevinModel chain = make_harmonic_chain(HarmonicChainSpec{});
    const Ensemble e = simulate_ensemble(chain, Scheme::bbk, fixed_initial(Vector::Zero(6)), opts(0.01, 100), 3,
                                         RngSpec{2});
    EXPECT_EQ(e.dim(), 6);
    EXPECT_EQ(e.length(), 101);
    EXPECT_EQ(e.trajectories[0].scheme, "bbk");
}

TEST(Brownian, CoarseningSumsIncrements)
{
    GaussianStream g(RngSpec{1}, 0);
    const Matrix dw = brownian_increments(2, 0.01, 8, g);
    const Matrix c = coarsen_increments(dw, 4);
    ASSERT_EQ(c.cols(), 2);
    EXPECT_NEAR(c(1, 1), dw.row(1).segment(4, 4).sum(), 1e-15);
    EXPECT_THROW(coarsen_increments(dw, 3), DimensionError);
}

TEST(Brownian, PathMatchesStepByStep)
{
    GaussianStream g(RngSpec{1}, 0);
    const Matrix dw = brownian_increments(1, 0.01, 20, g);
    const Trajectory t = euler_maruyama_path(ou1(), vec({1.0}), 0.01, dw);
    Vector x = vec({1.0});
    for (Eigen::Index i = 0; i < 20; ++i) x = euler_maruyama_step(ou1(), x, 0.01, dw.col(i));
    EXPECT_EQ(t.states.col(20), x);
}

TEST(Scheme, ParseNames)
{
    EXPECT_EQ(parse_scheme("bbk"), Scheme::bbk);
    EXPECT_EQ(parse_scheme("euler"), Scheme::euler_maruyama);
    EXPECT_THROW(parse_scheme("rk4"), ConfigError);
}
