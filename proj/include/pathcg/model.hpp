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

#include "pathcg/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pathcg
{
/// Ito diffusion dX = b(X) dt + sigma(X) dB on R^n with k-dimensional noise.
///
/// The diffusion must have full column rank k wherever it is evaluated. For a
/// constant diffusion this is checked once at construction; state-dependent
/// diffusions are checked through check_state().
class SDEModel
{
public:
    SDEModel(int dim, VectorField drift, MatrixField diffusion, int noise_dim);

    static SDEModel with_constant_diffusion(int dim, VectorField drift, const Matrix& sigma);

    int dim() const { return dim_; }
    int noise_dim() const { return noise_dim_; }

    Vector drift(const Vector& x) const;
    Matrix diffusion(const Vector& x) const;

    bool has_constant_diffusion() const { return constant_sigma_.has_value(); }
    const Matrix& constant_diffusion() const;

    const VectorField& drift_field() const { return drift_; }
    const MatrixField& diffusion_field() const { return diffusion_; }

    /// Checks finiteness of drift and diffusion and the rank of sigma at x.
    void check_state(const Vector& x) const;

private:
    int dim_;
    int noise_dim_;
    VectorField drift_;
    MatrixField diffusion_;
    std::optional<Matrix> constant_sigma_;
};

/// Equilibrium description U(q), beta. The partition function is never needed.
struct GibbsSpec
{
    std::function<double(const Vector&)> potential;
    double beta = 1.0;
};

/// Underdamped Langevin dynamics
///   dq = M^{-1} p dt,  dp = F(q) dt - gamma M^{-1} p dt + sigma dB
/// for n_particles particles in space_dim dimensions. Friction and noise are
/// constant matrices on the dof = n_particles * space_dim momentum space.
struct LangevinModel
{
    int n_particles = 1;
    int space_dim = 3;
    Vector masses;  ///< one entry per particle
    VectorField force;
    Matrix friction;
    Matrix noise;
    double beta = 1.0;
    bool conservative = false;
    std::optional<GibbsSpec> gibbs;

    int dof() const { return n_particles * space_dim; }

    /// Diagonal of M^{-1} expanded to dof entries.
    Vector inverse_mass_diagonal() const;

    /// Throws on non-positive masses, shape mismatches or non-finite coefficients.
    void validate() const;

    /// Scalar friction g*I with noise sqrt(2g/beta)*I (fluctuation-dissipation holds).
    static LangevinModel thermostatted(int n_particles, int space_dim, Vector masses, VectorField force,
                                       double gamma, double beta);
};

/// Default tolerance for the fluctuation-dissipation check.
inline constexpr double kFluctuationDissipationTol = 1e-10;

/// The Langevin system as an SDE on x = (q, p) in R^{2 dof} with
/// b(x) = (M^{-1} p, F(q) - gamma M^{-1} p) and sigma_0 = (0, sigma)^T.
SDEModel make_langevin_sde(const LangevinModel& model);

/// max |sigma sigma^T - 2 gamma / beta| <= tol.
bool check_fluctuation_dissipation(const LangevinModel& model, double tol = kFluctuationDissipationTol);

/// Drift family b(x; theta) = sum_k theta_k phi_k(x), linear in theta.
class ParametricDriftFamily
{
public:
    ParametricDriftFamily(int cg_dim, std::vector<VectorField> basis, std::vector<std::string> names = {});

    int cg_dim() const { return cg_dim_; }
    int size() const { return static_cast<int>(basis_.size()); }
    const std::vector<std::string>& names() const { return names_; }

    /// m x K matrix whose k-th column is phi_k(xbar).
    Matrix design(const Vector& xbar) const;

    Vector eval(const Vector& xbar, const Vector& theta) const;

    /// Every basis function multiplied by c.
    ParametricDriftFamily scaled(double c) const;

    /// Basis functions of `other` appended after this family's.
    ParametricDriftFamily concat(const ParametricDriftFamily& other) const;

    /// phi(x) = x.
    static ParametricDriftFamily linear(int m);
    /// phi_{ij}(x) = x_j e_i, K = m*m, theta laid out row-major.
    static ParametricDriftFamily linear_matrix(int m);
    /// phi_i(x) = e_i.
    static ParametricDriftFamily constant(int m);
    /// phi_1(x) = x, phi_2(x) = 1.
    static ParametricDriftFamily affine(int m);
    /// phi_1(x) = x, phi_2(x) = x^3 componentwise.
    static ParametricDriftFamily cubic(int m);
    /// Nearest-neighbour harmonic springs between consecutive CG particles
    /// (single spring constant), on n_particles * space_dim coordinates.
    static ParametricDriftFamily pairwise_springs(int n_particles, int space_dim);

private:
    int cg_dim_;
    std::vector<VectorField> basis_;
    std::vector<std::string> names_;
};

/// sum_k theta_k phi_k(xbar).
Vector eval_parametric_drift(const ParametricDriftFamily& family, const Vector& theta, const Vector& xbar);

}  // namespace pathcg
