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
#include "pathcg/trajectory_io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace
{
struct RunResult
{
    int code = -1;
    std::string output;
};

class CliTest : public ::testing::Test
{
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("pathcg_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write_config(const std::string& name, const std::string& body)
    {
        const fs::path p = dir_ / name;
        std::ofstream(p) << body << "output = " << (dir_ / "out").string() << "\n";
        return p;
    }

    RunResult run(const std::string& args)
    {
        const fs::path log = dir_ / "stdout.txt";
        const std::string cmd = std::string(PATHCG_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        RunResult r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        std::ifstream in(log);
        std::stringstream s;
        s << in.rdbuf();
        r.output = s.str();
        return r;
    }

    std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    /// name -> (theta, se) from theta.csv.
    std::vector<std::pair<double, double>> theta_csv()
    {
        std::ifstream in(dir_ / "out" / "theta.csv");
        std::string line;
        std::getline(in, line);
        std::vector<std::pair<double, double>> out;
        while (std::getline(in, line))
        {
            const auto c1 = line.find(','), c2 = line.rfind(',');
            out.emplace_back(pathcg::parse_double(line.substr(c1 + 1, c2 - c1 - 1)),
                             pathcg::parse_double(line.substr(c2 + 1)));
        }
        return out;
    }

    fs::path dir_;
};

int data_rows(const std::string& csv)
{
    int rows = 0;
    std::istringstream s(csv);
    std::string line;
    while (std::getline(s, line))
        if (!line.empty() && line[0] != '#' && line.rfind("replica", 0) != 0) ++rows;
    return rows;
}
}  // namespace

TEST_F(CliTest, SimulateRowCountAndDeterminism)
{
    const auto cfg = write_config("ou.cfg", "model = ou\nsteps = 10\nh = 0.01\nreplicas = 1\nseed = 5\n");
    ASSERT_EQ(run("simulate " + cfg.string()).code, 0);
    const std::string first = slurp(dir_ / "out" / "trajectory.csv");
    const std::string report = slurp(dir_ / "out" / "report.txt");
    EXPECT_EQ(data_rows(first), 11);
    ASSERT_EQ(run("simulate " + cfg.string()).code, 0);
    EXPECT_EQ(slurp(dir_ / "out" / "trajectory.csv"), first);
    EXPECT_EQ(slurp(dir_ / "out" / "report.txt"), report);
    EXPECT_NE(report.find("config_hash="), std::string::npos);
}

TEST_F(CliTest, ReplicaColumn)
{
    const auto cfg = write_config("ou.cfg", "steps = 10\nreplicas = 4\nseed = 5\n");
    ASSERT_EQ(run("simulate " + cfg.string()).code, 0);
    std::istringstream s(slurp(dir_ / "out" / "trajectory.csv"));
    std::string line;
    std::set<std::string> replicas;
    while (std::getline(s, line))
        if (!line.empty() && line[0] != '#' && line.rfind("replica", 0) != 0) replicas.insert(line.substr(0, line.find(',')));
    EXPECT_EQ(replicas, (std::set<std::string>{"0", "1", "2", "3"}));
}

TEST_F(CliTest, ExitCodes)
{
    EXPECT_EQ(run("simulate " + write_config("bad.cfg", "no_such_key = 1\n").string()).code, 2);
    EXPECT_EQ(run("simulate " + (dir_ / "missing.cfg").string()).code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("fit --mode fm " + write_config("nofile.cfg", "steps = 10\n").string()).code, 2);
    const auto unstable = write_config("blow.cfg", "model.a = -500\nh = 0.5\nsteps = 100000\n");
    const RunResult r = run("simulate " + unstable.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("blew up"), std::string::npos) << r.output;
}

TEST_F(CliTest, MleOnLangevinRequiresBbk)
{
    const auto cfg = write_config("d.cfg", "model = driven_langevin\nsteps = 100\nh = 0.01\nbasis = affine\n");
    ASSERT_EQ(run("simulate " + cfg.string()).code, 0);
    EXPECT_EQ(run("fit --mode mle " + cfg.string()).code, 2);
}

TEST_F(CliTest, FitModesOnOuData)
{
    const auto cfg = write_config("ou2.cfg",
                                  "model = ou\nmodel.a = 1,0.5;0,2\nmodel.sigma = 1\nh = 0.01\nsteps = 1000000\n"
                                  "stride = 10\nseed = 3\ncg.kind = projection\ncg.indices = 1\nbasis = linear\n");
    ASSERT_EQ(run("simulate " + cfg.string()).code, 0);
    ASSERT_EQ(run("fit --mode fm " + cfg.string()).code, 0);
    const auto fm = theta_csv();
    ASSERT_EQ(fm.size(), 1u);
    EXPECT_LE(std::abs(fm[0].first + 0.96), 3 * fm[0].second);

    ASSERT_EQ(run("fit --mode rer " + cfg.string()).code, 0);
    const auto rer = theta_csv();
    EXPECT_NEAR(rer[0].first, fm[0].first, 1e-4);

    ASSERT_EQ(run("project " + cfg.string()).code, 0);
    EXPECT_TRUE(fs::exists(dir_ / "out" / "projected.csv"));
}

TEST_F(CliTest, MleSelfFit)
{
    const auto cfg = write_config("ou1.cfg", "model = ou\nh = 0.01\nsteps = 1000000\nseed = 8\n");
    ASSERT_EQ(run("simulate " + cfg.string()).code, 0);
    ASSERT_EQ(run("fit --mode mle " + cfg.string()).code, 0);
    const auto mle = theta_csv();
    EXPECT_LE(std::abs(mle[0].first + 1.0), 3 * mle[0].second);
    EXPECT_NE(slurp(dir_ / "out" / "report.txt").find("method="), std::string::npos);
}

TEST_F(CliTest, LangevinPipeline)
{
    const auto cfg = write_config("chain.cfg",
                                  "model = harmonic_chain\nscheme = bbk\nh = 0.01\nsteps = 20000\nreplicas = 2\n"
                                  "cg.kind = center_of_mass\ncg.groups = 1,2;3\nbasis = linear_matrix\n"
                                  "friction = b\ntheta = -1,0,0,-1\n");
    ASSERT_EQ(run("simulate " + cfg.string()).code, 0);
    for (const std::string mode : {"fm", "rer", "re_finite", "mle"})
        EXPECT_EQ(run("fit --mode " + mode + " " + cfg.string()).code, 0) << mode;
    const RunResult e = run("eval-rer " + cfg.string());
    EXPECT_EQ(e.code, 0) << e.output;
    EXPECT_NE(e.output.find("value="), std::string::npos);
}

TEST_F(CliTest, ValidateFaultInjection)
{
    const RunResult ok = run("validate --only 8 9");
    EXPECT_EQ(ok.code, 0) << ok.output;
    EXPECT_NE(ok.output.find("[PASS] 8"), std::string::npos);
    EXPECT_NE(ok.output.find(" s)"), std::string::npos);
    const RunResult bad = run("validate --only 8 --inject-fault right_inverse");
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.output.find("[FAIL] 8"), std::string::npos) << bad.output;
}
