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

#include "pathcg/cg_maps.hpp"
#include "pathcg/config.hpp"
#include "pathcg/inference.hpp"
#include "pathcg/integrators.hpp"
#include "pathcg/model.hpp"

#include <memory>
#include <optional>
#include <string>

namespace pathcg
{
/// Everything a command needs, built from a RunConfig.
struct RunSetup
{
    std::string model_name;
    std::optional<SDEModel> sde;          ///< set for overdamped/OU models
    std::optional<LangevinModel> langevin;  ///< set for Langevin models
    std::optional<CGMap> map;             ///< SDE coarse-graining
    std::optional<PhaseCGMap> phase;      ///< Langevin coarse-graining
    std::shared_ptr<ParametricDriftFamily> family;
    FrictionOption friction = FrictionOption::a;
    Scheme scheme = Scheme::euler_maruyama;
    SimulationOptions options;
    std::size_t replicas = 1;
    Vector x0;

    bool is_langevin() const { return langevin.has_value(); }
    int state_dim() const;
    /// Pi on the full state (phase map for Langevin models).
    CGMap state_map() const;
};

RunSetup build_setup(const RunConfig& config);

std::string output_dir(const RunConfig& config);
/// `input` key, or <output>/trajectory.csv.
std::string input_path(const RunConfig& config);

/// Each command writes its files under the output directory and returns the
/// report text (also written to <output>/report.txt).
std::string cmd_simulate(const RunConfig& config);
std::string cmd_project(const RunConfig& config);
std::string cmd_fit(const RunConfig& config, const std::string& mode);
std::string cmd_eval_rer(const RunConfig& config);

}  // namespace pathcg
