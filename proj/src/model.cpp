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

#include <cmath>

namespace pathcg
{
namespace
{
void check_sigma_rank(const Matrix& sigma, int noise_dim)
{
    if (noise_dim == 0) return;
    const int rank = numerical_rank(sigma);
    if (rank != noise_dim)
        throw NumericalError("diffusion coefficient is rank deficient: rank " + std::to_string(rank) + " < " +
                             std::to_string(noise_dim) + " (smallest singular value " +
                             std::to_string(smallest_singular_value(sigma)) + ")");
}
}  // namespace

SDEModel::SDEModel(int dim, VectorField drift, MatrixField diffusion, int noise_dim)
    : dim_(dim), noise_dim_(noise_dim), drift_(std::move(drift)), diffusion_(std::move(diffusion))
{
    if (dim <= 0) throw DimensionError("SDEModel: dimension must be positive");
    if (noise_dim < 0 || noise_dim > dim) throw DimensionError("SDEModel: noise dimension must lie in [0, dim]");
    if (!drift_ || !diffusion_) throw Error("SDEModel: drift and diffusion must be callable");
}

SDEModel SDEModel::with_constant_diffusion(int dim, VectorField drift, const Matrix& sigma)
{
    require_dim(sigma.rows(), dim, "SDEModel diffusion rows");
    if (!sigma.allFinite()) throw NumericalError("SDEModel: non-finite diffusion");
    const int k = static_cast<int>(sigma.cols());
    check_sigma_rank(sigma, k);
    SDEModel model(dim, std::move(drift), [sigma](const Vector&) { return sigma; }, k);
    model.constant_sigma_ = sigma;
    return model;
}

Vector SDEModel::drift(const Vector& x) const { return drift_(x); }

Matrix SDEModel::diffusion(const Vector& x) const
{
    if (constant_sigma_) return *constant_sigma_;
    return diffusion_(x);
}

const Matrix& SDEModel::constant_diffusion() const
{
    if (!constant_sigma_) throw Error("SDEModel: diffusion is state dependent");
    return *constant_sigma_;
}

void SDEModel::check_state(const Vector& x) const
{
    require_dim(x.size(), dim_, "SDEModel state");
    const Vector b = drift(x);
    require_dim(b.size(), dim_, "SDEModel drift output");
    if (!b.allFinite()) throw NumericalError("SDEModel: non-finite drift");
    const Matrix s = diffusion(x);
    require_dim(s.rows(), dim_, "SDEModel diffusion rows");
    require_dim(s.cols(), noise_dim_, "SDEModel diffusion columns");
    if (!s.allFinite()) throw NumericalError("SDEModel: non-finite diffusion");
    check_sigma_rank(s, noise_dim_);
}

Vector LangevinModel::inverse_mass_diagonal() const
{
    Vector inv(dof());
    for (int i = 0; i < n_particles; ++i)
        for (int d = 0; d < space_dim; ++d) inv(i * space_dim + d) = 1.0 / masses(i);
    return inv;
}

void LangevinModel::validate() const
{
    if (n_particles <= 0 || space_dim <= 0) throw DimensionError("LangevinModel: particle count and dimension");
    require_dim(masses.size(), n_particles, "LangevinModel masses");
    if ((masses.array() <= 0.0).any() || !masses.allFinite())
        throw NumericalError("LangevinModel: masses must be strictly positive");
    require_dim(friction.rows(), dof(), "LangevinModel friction rows");
    require_dim(friction.cols(), dof(), "LangevinModel friction cols");
    require_dim(noise.rows(), dof(), "LangevinModel noise rows");
    require_dim(noise.cols(), dof(), "LangevinModel noise cols");
    if (!friction.allFinite() || !noise.allFinite()) throw NumericalError("LangevinModel: non-finite coefficients");
    if (!(beta > 0.0)) throw NumericalError("LangevinModel: beta must be positive");
    if (!force) throw Error("LangevinModel: force must be callable");
}

LangevinModel LangevinModel::thermostatted(int n_particles, int space_dim, Vector masses, VectorField force,
                                           double gamma, double beta)
{
    LangevinModel m;
    m.n_particles = n_particles;
    m.space_dim = space_dim;
    m.masses = std::move(masses);
    m.force = std::move(force);
    const int dof = n_particles * space_dim;
    m.friction = gamma * Matrix::Identity(dof, dof);
    m.noise = std::sqrt(2.0 * gamma / beta) * Matrix::Identity(dof, dof);
    m.beta = beta;
    return m;
}

SDEModel make_langevin_sde(const LangevinModel& model)
{
    model.validate();
    const int dof = model.dof();
    const Vector inv_mass = model.inverse_mass_diagonal();
    const Matrix friction = model.friction;
    const VectorField force = model.force;
    VectorField drift = [dof, inv_mass, friction, force](const Vector& x) {
        const Vector velocity = inv_mass.cwiseProduct(x.tail(dof));
        const Vector f = force(x.head(dof));
        require_dim(f.size(), dof, "Langevin force output");
        Vector b(2 * dof);
        b.head(dof) = velocity;
        b.tail(dof) = f - friction * velocity;
        return b;
    };
    Matrix sigma0 = Matrix::Zero(2 * dof, dof);
    sigma0.bottomRows(dof) = model.noise;
    return SDEModel::with_constant_diffusion(2 * dof, std::move(drift), sigma0);
}

bool check_fluctuation_dissipation(const LangevinModel& model, double tol)
{
    const Matrix gap = model.noise * model.noise.transpose() - (2.0 / model.beta) * model.friction;
    return gap.cwiseAbs().maxCoeff() <= tol;
}

ParametricDriftFamily::ParametricDriftFamily(int cg_dim, std::vector<VectorField> basis,
                                             std::vector<std::string> names)
    : cg_dim_(cg_dim), basis_(std::move(basis)), names_(std::move(names))
{
    if (cg_dim <= 0) throw DimensionError("ParametricDriftFamily: cg dimension must be positive");
    if (basis_.empty()) throw DimensionError("ParametricDriftFamily: empty basis");
    if (names_.empty())
    {
        for (std::size_t k = 0; k < basis_.size(); ++k) names_.push_back("phi" + std::to_string(k + 1));
    }
    require_dim(static_cast<std::ptrdiff_t>(names_.size()), static_cast<std::ptrdiff_t>(basis_.size()),
                "ParametricDriftFamily names");
}

Matrix ParametricDriftFamily::design(const Vector& xbar) const
{
    require_dim(xbar.size(), cg_dim_, "ParametricDriftFamily input");
    Matrix d(cg_dim_, size());
    for (int k = 0; k < size(); ++k)
    {
        const Vector v = basis_[static_cast<std::size_t>(k)](xbar);
        require_dim(v.size(), cg_dim_, "basis function " + names_[static_cast<std::size_t>(k)] + " output");
        d.col(k) = v;
    }
    return d;
}

Vector ParametricDriftFamily::eval(const Vector& xbar, const Vector& theta) const
{
    require_dim(theta.size(), size(), "ParametricDriftFamily theta");
    return design(xbar) * theta;
}

ParametricDriftFamily ParametricDriftFamily::scaled(double c) const
{
    std::vector<VectorField> basis;
    for (const auto& phi : basis_) basis.push_back([phi, c](const Vector& x) -> Vector { return c * phi(x); });
    return ParametricDriftFamily(cg_dim_, std::move(basis), names_);
}

ParametricDriftFamily ParametricDriftFamily::concat(const ParametricDriftFamily& other) const
{
    require_dim(other.cg_dim_, cg_dim_, "ParametricDriftFamily concat");
    auto basis = basis_;
    auto names = names_;
    basis.insert(basis.end(), other.basis_.begin(), other.basis_.end());
    names.insert(names.end(), other.names_.begin(), other.names_.end());
    return ParametricDriftFamily(cg_dim_, std::move(basis), std::move(names));
}

ParametricDriftFamily ParametricDriftFamily::linear(int m)
{
    return ParametricDriftFamily(m, {[](const Vector& x) -> Vector { return x; }}, {"x"});
}

ParametricDriftFamily ParametricDriftFamily::linear_matrix(int m)
{
    std::vector<VectorField> basis;
    std::vector<std::string> names;
    for (int i = 0; i < m; ++i)
    {
        for (int j = 0; j < m; ++j)
        {
            basis.push_back([m, i, j](const Vector& x) -> Vector {
                Vector v = Vector::Zero(m);
                v(i) = x(j);
                return v;
            });
            names.push_back("x" + std::to_string(j + 1) + "->e" + std::to_string(i + 1));
        }
    }
    return ParametricDriftFamily(m, std::move(basis), std::move(names));
}

ParametricDriftFamily ParametricDriftFamily::constant(int m)
{
    std::vector<VectorField> basis;
    std::vector<std::string> names;
    for (int i = 0; i < m; ++i)
    {
        basis.push_back([m, i](const Vector&) -> Vector { return Vector::Unit(m, i); });
        names.push_back("e" + std::to_string(i + 1));
    }
    return ParametricDriftFamily(m, std::move(basis), std::move(names));
}

ParametricDriftFamily ParametricDriftFamily::affine(int m)
{
    return ParametricDriftFamily(
        m, {[](const Vector& x) -> Vector { return x; }, [m](const Vector&) -> Vector { return Vector::Ones(m); }},
        {"x", "1"});
}

ParametricDriftFamily ParametricDriftFamily::cubic(int m)
{
    return ParametricDriftFamily(m,
                                 {[](const Vector& x) -> Vector { return x; },
                                  [](const Vector& x) -> Vector { return x.array().cube().matrix(); }},
                                 {"x", "x^3"});
}

ParametricDriftFamily ParametricDriftFamily::pairwise_springs(int n_particles, int space_dim)
{
    const int m = n_particles * space_dim;
    VectorField spring = [n_particles, space_dim, m](const Vector& q) -> Vector {
        Vector f = Vector::Zero(m);
        for (int i = 0; i + 1 < n_particles; ++i)
        {
            const Vector bond = q.segment(i * space_dim, space_dim) - q.segment((i + 1) * space_dim, space_dim);
            f.segment(i * space_dim, space_dim) -= bond;
            f.segment((i + 1) * space_dim, space_dim) += bond;
        }
        return f;
    };
    return ParametricDriftFamily(m, {spring}, {"spring"});
}

Vector eval_parametric_drift(const ParametricDriftFamily& family, const Vector& theta, const Vector& xbar)
{
    if (!xbar.allFinite()) throw NumericalError("eval_parametric_drift: non-finite input");
    return family.eval(xbar, theta);
}

}  // namespace pathcg
