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

namespace pathcg
{
SDEModel make_ou_model(const Matrix& a, const Matrix& sigma)
{
    require_dim(a.rows(), a.cols(), "OU drift matrix must be square");
    require_dim(sigma.rows(), a.rows(), "OU noise rows");
    return SDEModel::with_constant_diffusion(
        static_cast<int>(a.rows()), [a](const Vector& x) -> Vector { return -(a * x); }, sigma);
}

Matrix harmonic_chain_stiffness(const HarmonicChainSpec& spec)
{
    if (spec.n_particles < 1 || spec.space_dim < 1) throw DimensionError("harmonic chain: bad size");
    const int n = spec.n_particles;
    Matrix k1 = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i)
    {
        k1(i, i) += spec.spring;
        k1(i + 1, i + 1) += spec.spring;
        k1(i, i + 1) -= spec.spring;
        k1(i + 1, i) -= spec.spring;
    }
    k1(0, 0) += spec.tether;
    const int d = spec.space_dim;
    Matrix k = Matrix::Zero(n * d, n * d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < d; ++c) k(i * d + c, j * d + c) = k1(i, j);
    return k;
}

LangevinModel make_harmonic_chain(const HarmonicChainSpec& spec)
{
    const Matrix k = harmonic_chain_stiffness(spec);
    LangevinModel m = LangevinModel::thermostatted(
        spec.n_particles, spec.space_dim, Vector::Constant(spec.n_particles, spec.mass),
        [k](const Vector& q) -> Vector { return -(k * q); }, spec.gamma, spec.beta);
    m.conservative = true;
    m.gibbs = GibbsSpec{[k](const Vector& q) { return 0.5 * q.dot(k * q); }, spec.beta};
    return m;
}

LangevinModel make_driven_langevin(double drive, double gamma, double beta, double mass)
{
    LangevinModel m = LangevinModel::thermostatted(
        1, 1, Vector::Constant(1, mass), [drive](const Vector& q) -> Vector { return -q.array() + drive; }, gamma,
        beta);
    m.conservative = false;
    m.gibbs.reset();
    return m;
}

}  // namespace pathcg
