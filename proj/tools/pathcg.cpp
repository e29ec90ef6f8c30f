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

#include "pathcg/acceptance.hpp"
#include "pathcg/commands.hpp"
#include "pathcg/common.hpp"
#include "pathcg/config.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace
{
int run_guarded(const std::function<std::string()>& body)
{
    try
    {
        std::cout << body();
        return 0;
    }
    catch (const pathcg::ConfigError& ex)
    {
        std::cerr << "pathcg: config error: " << ex.what() << '\n';
        return 2;
    }
    catch (const pathcg::DimensionError& ex)
    {
        std::cerr << "pathcg: config error: " << ex.what() << '\n';
        return 2;
    }
    catch (const std::exception& ex)
    {
        std::cerr << "pathcg: " << ex.what() << '\n';
        return 1;
    }
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Path-space coarse-graining of Langevin and overdamped dynamics"};
    app.require_subcommand(1);

    std::string config_path;
    auto* simulate = app.add_subcommand("simulate", "Simulate trajectories from a config");
    simulate->add_option("config", config_path)->required();
    auto* project = app.add_subcommand("project", "Apply the CG map to stored trajectories");
    project->add_option("config", config_path)->required();
    std::string mode;
    auto* fit = app.add_subcommand("fit", "Fit CG drift parameters");
    fit->add_option("--mode", mode)->required()->check(CLI::IsMember({"fm", "rer", "re_finite", "mle"}));
    fit->add_option("config", config_path)->required();
    auto* eval = app.add_subcommand("eval-rer", "Evaluate the RER at the config theta");
    eval->add_option("config", config_path)->required();

    std::string fault;
    std::vector<int> only;
    std::uint64_t seed = pathcg::AcceptanceOptions{}.seed;
    auto* validate = app.add_subcommand("validate", "Run the acceptance battery");
    validate->add_option("--inject-fault", fault)->check(CLI::IsMember({"right_inverse"}));
    validate->add_option("--only", only, "Criterion ids to run");
    validate->add_option("--seed", seed);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*validate)
    {
        pathcg::AcceptanceOptions opts;
        opts.inject_right_inverse_fault = fault == "right_inverse";
        opts.only.insert(only.begin(), only.end());
        opts.seed = seed;
        bool ok = true;
        for (const auto& r : pathcg::run_acceptance(opts))
        {
            std::cout << pathcg::format_criterion(r) << std::endl;
            ok = ok && r.pass;
        }
        return ok ? 0 : 1;
    }
    return run_guarded([&] {
        const auto cfg = pathcg::RunConfig::load(config_path);
        if (*simulate) return pathcg::cmd_simulate(cfg);
        if (*project) return pathcg::cmd_project(cfg);
        if (*fit) return pathcg::cmd_fit(cfg, mode);
        return pathcg::cmd_eval_rer(cfg);
    });
}
