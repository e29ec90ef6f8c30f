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

#include "pathcg/model.hpp"

namespace pathcg
{
/// dX = -A X dt + sigma dB.
SDEModel make_ou_model(const Matrix& a, const Matrix& sigma);

struct HarmonicChainSpec
{
    int n_particles = 3;
    int space_dim = 1;
    double mass = 1.0;
    double spring = 1.0;  ///< nearest-neighbour spring constant
    double tether = 1.0;  ///< spring of particle 1 to the origin
    double gamma = 1.0;
    double beta = 1.0;
};

/// U(q) = spring/2 sum |q_{i+1} - q_i|^2 + tether/2 |q_1|^2 with a
/// thermostat satisfying fluctuation-dissipation.
LangevinModel make_harmonic_chain(const HarmonicChainSpec& spec);

/// Stiffness matrix K of the chain (U = q^T K q / 2).
Matrix harmonic_chain_stiffness(const HarmonicChainSpec& spec);

/// One particle in one dimension with F(q) = -q + drive, declared
/// non-conservative and without a Gibbs description.
LangevinModel make_driven_langevin(double drive = 0.5, double gamma = 1.0, double beta = 1.0, double mass = 1.0);

}  // namespace pathcg
