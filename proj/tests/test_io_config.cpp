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

#include "pathcg/commands.hpp"
#include "pathcg/config.hpp"
#include "pathcg/expression.hpp"
#include "pathcg/trajectory_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace pathcg;

namespace
{
Ensemble small_ensemble()
{
    Ensemble e;
    for (std::uint64_t r = 0; r < 2; ++r)
    {
        Trajectory t;
        t.dim = 2;
        t.step = 0.1;
        t.seed = 17;
        t.replica = r;
        t.scheme = "euler_maruyama";
        t.states = Matrix::Random(2, 4);
        t.states(0, 0) = 1.0 / 3.0;
        t.states(1, 3) = -1e-300;
        e.trajectories.push_back(t);
    }
    return e;
}
}  // namespace

TEST(FormatDouble, RoundTripsExactly)
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-310, 1e300, std::numeric_limits<double>::max(), -0.0})
        EXPECT_EQ(parse_double(format_double(v)), v);
    EXPECT_THROW(parse_double("1.0x"), ConfigError);
    EXPECT_THROW(parse_double(""), ConfigError);
}

TEST(EnsembleCsv, RoundTrip)
{
    const Ensemble e = small_ensemble();
    std::stringstream s;
    write_ensemble_csv(s, e);
    const Ensemble back = read_ensemble_csv(s);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back.step(), 0.1);
    for (std::size_t r = 0; r < 2; ++r)
    {
        EXPECT_EQ(back.trajectories[r].states, e.trajectories[r].states);
        EXPECT_EQ(back.trajectories[r].replica, r);
    }
}

TEST(EnsembleCsv, LayoutAndErrors)
{
    std::stringstream s;
    write_ensemble_csv(s, small_ensemble());
    std::string meta, header;
    std::getline(s, meta);
    std::getline(s, header);
    EXPECT_EQ(meta.rfind("# ", 0), 0u);
    EXPECT_EQ(header, "replica,step,t,x_1,x_2");

    std::stringstream bad("# dim=2 step=0.1 seed=1 scheme=euler_maruyama\nreplica,step,t,x_1,x_2\n0,0,0,1\n");
    EXPECT_THROW(read_ensemble_csv(bad), ConfigError);
    std::stringstream none("replica,step\n");
    EXPECT_THROW(read_ensemble_csv(none), ConfigError);
}

TEST(MatrixCsv, RoundTrip)
{
    const Matrix m = Matrix::Random(3, 2);
    std::stringstream s;
    write_matrix_csv(s, m, "pi");
    std::string kind;
    EXPECT_EQ(read_matrix_csv(s, &kind), m);
    EXPECT_EQ(kind, "pi");
}

TEST(Config, ParseSerializeRoundTrip)
{
    const std::string text =
        "# comment\nmodel = harmonic_chain\n  cg.kind = center_of_mass # trailing\ncg.groups = 1,2;3\n"
        "seed = 12\nh=0.01\n";
    const RunConfig a = RunConfig::parse(text);
    const RunConfig b = RunConfig::parse(a.serialize());
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.serialize(), b.serialize());
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.seed(), 12u);
    EXPECT_EQ(a.get_groups("cg.groups"), (std::vector<std::vector<int>>{{0, 1}, {2}}));
}

TEST(Config, Errors)
{
    EXPECT_THROW(RunConfig::parse("nonsense = 1\n"), ConfigError);
    EXPECT_THROW(RunConfig::parse("h = 1\nh = 2\n"), ConfigError);
    EXPECT_THROW(RunConfig::parse("h = -1\n"), ConfigError);
    EXPECT_THROW(RunConfig::parse("steps = ten\n"), ConfigError);
    EXPECT_THROW(RunConfig::parse("model = ou\nscheme = bbk\n"), ConfigError);
    EXPECT_THROW(RunConfig::parse("cg.groups = 0,1\n"), ConfigError);
    EXPECT_THROW(RunConfig::parse("just text\n"), ConfigError);
    EXPECT_THROW(RunConfig::parse("model.a = 1,2;3\n").get_matrix("model.a"), ConfigError);
    RunConfig c;
    EXPECT_THROW(c.set("seed", ""), ConfigError);
    EXPECT_THROW(c.set("seed", "1 # x"), ConfigError);
}

TEST(Config, HashChangesWithContent)
{
    EXPECT_NE(RunConfig::parse("seed = 1\n").hash(), RunConfig::parse("seed = 2\n").hash());
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
}

TEST(Expression, Evaluates)
{
    const Expression e = Expression::parse("-q1^2 + 2*sin(q2) - exp(0) / (1 + abs(-3))", {"q1", "q2"});
    const std::vector<double> v{3.0, 0.5};
    EXPECT_NEAR(e.eval(v), -9.0 + 2 * std::sin(0.5) - 0.25, 1e-15);
    EXPECT_NEAR(Expression::parse("2^3^2", {}).eval({}), 512.0, 1e-12);
    EXPECT_NEAR(Expression::parse("cos(pi)", {}).eval({}), -1.0, 1e-15);
}

TEST(Expression, Errors)
{
    EXPECT_THROW(Expression::parse("1 +", {}), ConfigError);
    EXPECT_THROW(Expression::parse("(1", {}), ConfigError);
    EXPECT_THROW(Expression::parse("foo(1)", {}), ConfigError);
    EXPECT_THROW(Expression::parse("x", {"q"}), ConfigError);
}

TEST(Expression, ForceField)
{
    const VectorField f = parse_force_field("-q1 + 0.5*q2; -q2", 2);
    Vector q(2);
    q << 1.0, 2.0;
    const Vector v = f(q);
    EXPECT_DOUBLE_EQ(v(0), 0.0);
    EXPECT_DOUBLE_EQ(v(1), -2.0);
    EXPECT_DOUBLE_EQ(parse_force_field("-q + 0.5", 1)(Vector::Ones(1))(0), -0.5);
    EXPECT_THROW(parse_force_field("-q1", 2), ConfigError);
}

TEST(Setup, BuildsModelsAndMaps)
{
    const RunSetup ou = build_setup(RunConfig::parse("model.a = 1,0.5;0,2\ncg.kind = projection\ncg.indices = 1\n"));
    EXPECT_FALSE(ou.is_langevin());
    EXPECT_EQ(ou.state_dim(), 2);
    EXPECT_EQ(ou.map->cg_dim(), 1);
    EXPECT_EQ(ou.sde->constant_diffusion(), std::sqrt(2.0) * Matrix::Identity(2, 2));

    const RunSetup chain = build_setup(
        RunConfig::parse("model = harmonic_chain\nscheme = bbk\ncg.kind = center_of_mass\ncg.groups = 1,2,3\n"));
    EXPECT_TRUE(chain.is_langevin());
    EXPECT_EQ(chain.state_dim(), 6);
    EXPECT_EQ(chain.state_map().cg_dim(), 2);

    const RunSetup expr = build_setup(RunConfig::parse("model = expression\nmodel.force = -q + 0.5\nx0 = 1\n"));
    EXPECT_EQ(expr.x0, Vector::Ones(2));
}

TEST(Setup, Errors)
{
    EXPECT_THROW(build_setup(RunConfig::parse("cg.kind = center_of_mass\ncg.groups = 1\n")), ConfigError);
    EXPECT_THROW(build_setup(RunConfig::parse("cg.kind = projection\n")), ConfigError);
    EXPECT_THROW(build_setup(RunConfig::parse("x0 = 1,2,3\n")), ConfigError);
    EXPECT_THROW(build_setup(RunConfig::parse("model.a = 1,2\n")), ConfigError);
    EXPECT_THROW(build_setup(RunConfig::parse("model = harmonic_chain\ncg.kind = com\n")), ConfigError);
}
