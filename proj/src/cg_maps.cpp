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

#include "pathcg/cg_maps.hpp"

#include "pathcg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace pathcg
{
std::string to_string(MapKind kind)
{
    switch (kind)
    {
        case MapKind::center_of_mass: return "center_of_mass";
        case MapKind::projection: return "projection";
        case MapKind::general: return "general";
    }
    return "general";
}

MapKind parse_map_kind(const std::string& name)
{
    if (name == "center_of_mass" || name == "com") return MapKind::center_of_mass;
    if (name == "projection") return MapKind::projection;
    if (name == "general") return MapKind::general;
    throw ConfigError("unknown CG map kind '" + name + "'");
}

Matrix right_inverse(const Matrix& pi)
{
    if (pi.rows() == 0 || pi.rows() > pi.cols())
        throw DimensionError("right_inverse: need 0 < m <= n, got " + std::to_string(pi.rows()) + "x" +
                             std::to_string(pi.cols()));
    const int rank = numerical_rank(pi);
    if (rank < pi.rows())
    {
        Eigen::JacobiSVD<Matrix> svd(pi);
        std::ostringstream msg;
        msg << "right_inverse: CG map is rank deficient (rank " << rank << " < " << pi.rows()
            << "); singular values:";
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) msg << ' ' << svd.singularValues()(i);
        throw NumericalError(msg.str());
    }
    const Matrix gram = pi * pi.transpose();
    return pi.transpose() * gram.llt().solve(Matrix::Identity(pi.rows(), pi.rows()));
}

double right_inverse_error(const Matrix& pi, const Matrix& sharp)
{
    if (sharp.rows() != pi.cols() || sharp.cols() != pi.rows()) return INFINITY;
    return (pi * sharp - Matrix::Identity(pi.rows(), pi.rows())).cwiseAbs().maxCoeff();
}

CGMap::CGMap(Matrix matrix, MapKind kind) : matrix_(std::move(matrix)), kind_(kind)
{
    sharp_ = pathcg::right_inverse(matrix_);
}

CGMap::CGMap(Matrix matrix, Matrix sharp, MapKind kind) : matrix_(std::move(matrix)), sharp_(std::move(sharp)), kind_(kind)
{
    if (numerical_rank(matrix_) < matrix_.rows()) pathcg::right_inverse(matrix_);  // throws with the report
    const double err = right_inverse_error();
    if (!(err <= kRightInverseTol))
        throw NumericalError("CGMap: supplied right inverse violates Pi Pi# = I (max error " + std::to_string(err) +
                             ")");
}

CGMap CGMap::unchecked(Matrix matrix, Matrix sharp, MapKind kind)
{
    CGMap map;
    map.matrix_ = std::move(matrix);
    map.sharp_ = std::move(sharp);
    map.kind_ = kind;
    return map;
}

Vector CGMap::apply(const Vector& x) const
{
    require_dim(x.size(), dim(), "CGMap::apply input");
    return matrix_ * x;
}

double CGMap::right_inverse_error() const { return pathcg::right_inverse_error(matrix_, sharp_); }

namespace
{
Vector expand(const Vector& per_particle, int space_dim)
{
    Vector out(per_particle.size() * space_dim);
    for (Eigen::Index i = 0; i < per_particle.size(); ++i) out.segment(i * space_dim, space_dim).setConstant(per_particle(i));
    return out;
}

void check_masses(const Vector& masses)
{
    if (masses.size() == 0) throw DimensionError("no particles");
    if (!masses.allFinite() || (masses.array() <= 0.0).any()) throw DimensionError("masses must be positive");
}

/// kron(a, I_d).
Matrix kron_identity(const Matrix& a, int d)
{
    Matrix out = Matrix::Zero(a.rows() * d, a.cols() * d);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0.0)
                for (int k = 0; k < d; ++k) out(i * d + k, j * d + k) = a(i, j);
    return out;
}
}  // namespace

Vector PhaseCGMap::mass_diagonal() const { return expand(masses, space_dim); }
Vector PhaseCGMap::cg_mass_diagonal() const { return expand(cg_masses, space_dim); }

CGMap PhaseCGMap::phase_map() const
{
    return CGMap(block_diagonal(pos.matrix(), mom.matrix()), block_diagonal(pos.right_inverse(), mom.right_inverse()),
                 pos.kind());
}

PhaseCGMap make_phase_map(const CGMap& pos, const Vector& masses, const Vector& cg_masses, int space_dim)
{
    check_masses(masses);
    check_masses(cg_masses);
    if (space_dim <= 0) throw DimensionError("space_dim must be positive");
    require_dim(pos.dim(), masses.size() * space_dim, "position map columns");
    require_dim(pos.cg_dim(), cg_masses.size() * space_dim, "position map rows");
    const Vector m = expand(masses, space_dim);
    const Vector mbar = expand(cg_masses, space_dim);
    Matrix pi_p = mbar.asDiagonal() * pos.matrix() * m.cwiseInverse().asDiagonal();
    Matrix sharp_p = m.asDiagonal() * pos.right_inverse() * mbar.cwiseInverse().asDiagonal();
    return PhaseCGMap{pos, CGMap(std::move(pi_p), std::move(sharp_p), pos.kind()), masses, cg_masses, space_dim};
}

PhaseCGMap make_center_of_mass_map(const Vector& masses, const std::vector<std::vector<int>>& groups, int space_dim)
{
    check_masses(masses);
    const int n = static_cast<int>(masses.size());
    std::vector<int> owner(n, -1);
    for (std::size_t j = 0; j < groups.size(); ++j)
    {
        if (groups[j].empty()) throw DimensionError("center-of-mass map: group " + std::to_string(j) + " is empty");
        for (int i : groups[j])
        {
            if (i < 0 || i >= n) throw DimensionError("center-of-mass map: particle index out of range");
            if (owner[i] != -1) throw DimensionError("center-of-mass map: groups overlap at particle " + std::to_string(i));
            owner[i] = static_cast<int>(j);
        }
    }
    for (int i = 0; i < n; ++i)
        if (owner[i] == -1) throw DimensionError("center-of-mass map: particle " + std::to_string(i) + " unassigned");

    const auto m = static_cast<Eigen::Index>(groups.size());
    Vector cg_masses = Vector::Zero(m);
    for (int i = 0; i < n; ++i) cg_masses(owner[i]) += masses(i);
    Matrix zeta = Matrix::Zero(m, n);
    for (int i = 0; i < n; ++i) zeta(owner[i], i) = masses(i) / cg_masses(owner[i]);
    return make_phase_map(CGMap(kron_identity(zeta, space_dim), MapKind::center_of_mass), masses, cg_masses, space_dim);
}

CGMap make_projection_map(int n, const std::vector<int>& kept)
{
    if (kept.empty()) throw DimensionError("projection map: nothing kept");
    std::set<int> seen;
    Matrix pi = Matrix::Zero(static_cast<Eigen::Index>(kept.size()), n);
    for (std::size_t r = 0; r < kept.size(); ++r)
    {
        const int i = kept[r];
        if (i < 0 || i >= n) throw DimensionError("projection map: index " + std::to_string(i) + " out of range");
        if (!seen.insert(i).second) throw DimensionError("projection map: duplicate index " + std::to_string(i));
        pi(static_cast<Eigen::Index>(r), i) = 1.0;
    }
    Matrix sharp = pi.transpose();
    return CGMap(std::move(pi), std::move(sharp), MapKind::projection);
}

PhaseCGMap make_particle_projection_map(const Vector& masses, const std::vector<int>& kept_particles, int space_dim)
{
    check_masses(masses);
    std::vector<int> coords;
    for (int i : kept_particles)
        for (int k = 0; k < space_dim; ++k) coords.push_back(i * space_dim + k);
    const CGMap pos = make_projection_map(static_cast<int>(masses.size()) * space_dim, coords);
    Vector cg_masses(static_cast<Eigen::Index>(kept_particles.size()));
    for (std::size_t r = 0; r < kept_particles.size(); ++r) cg_masses(static_cast<Eigen::Index>(r)) = masses(kept_particles[r]);
    return make_phase_map(pos, masses, cg_masses, space_dim);
}

namespace
{
CGDiffusion finish_diffusion(Matrix cov)
{
    cov = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(eig.eigenvalues().minCoeff() > kRankTolerance * top) || top == 0.0)
        throw NumericalError("CG diffusion Pi Sigma Pi^T is not positive definite");
    return CGDiffusion{cov, symmetric_sqrt(cov)};
}
}  // namespace

CGDiffusion cg_diffusion(const Matrix& sigma, const Matrix& pi)
{
    require_dim(pi.cols(), sigma.rows(), "cg_diffusion: Pi columns vs sigma rows");
    return finish_diffusion(pi * sigma * sigma.transpose() * pi.transpose());
}

CGDiffusion cg_diffusion(const MatrixField& sigma, const Matrix& pi, const Matrix& samples, double tol)
{
    if (samples.cols() == 0) throw DimensionError("cg_diffusion: no samples");
    Matrix first;
    for (Eigen::Index j = 0; j < samples.cols(); ++j)
    {
        const Matrix s = sigma(samples.col(j));
        require_dim(s.rows(), pi.cols(), "cg_diffusion: sigma rows");
        const Matrix cov = pi * s * s.transpose() * pi.transpose();
        if (j == 0)
        {
            first = cov;
            continue;
        }
        const double scale = std::max(first.norm(), 1.0);
        if ((cov - first).norm() > tol * scale)
            throw NumericalError("cg_diffusion: Pi Sigma(x) Pi^T depends on x; CG diffusion is not a function of xbar");
    }
    return finish_diffusion(first);
}

FrictionOption parse_friction_option(const std::string& name)
{
    if (name == "a") return FrictionOption::a;
    if (name == "b") return FrictionOption::b;
    throw ConfigError("friction option must be 'a' or 'b', got '" + name + "'");
}

std::string to_string(FrictionOption option) { return option == FrictionOption::a ? "a" : "b"; }

Matrix cg_friction(const LangevinModel& model, const PhaseCGMap& pm, FrictionOption option)
{
    model.validate();
    require_dim(model.dof(), pm.dof(), "cg_friction: model dof vs map");
    const Matrix& pi_p = pm.mom.matrix();
    const Matrix pg = pi_p * model.friction;
    if (option == FrictionOption::b)
    {
        Matrix g = pg * pi_p.transpose();
        return 0.5 * (g + g.transpose());
    }
    Matrix g = pg * pm.pos.right_inverse();
    const double residual = (g * pm.pos.matrix() - pg).norm();
    if (residual > kFrictionConsistencyTol * std::max(pg.norm(), 1e-300))
        throw NumericalError("cg_friction option a: Pi_p gamma is not in the row space of Pi_q (residual " +
                             std::to_string(residual) + ")");
    return g;
}

LangevinModel make_cg_langevin(const PhaseCGMap& pm, VectorField force, const Matrix& friction, const Matrix& noise,
                               double beta)
{
    LangevinModel cg;
    cg.n_particles = pm.n_cg();
    cg.space_dim = pm.space_dim;
    cg.masses = pm.cg_masses;
    cg.force = std::move(force);
    cg.friction = friction;
    cg.noise = noise;
    cg.beta = beta;
    cg.validate();
    return cg;
}

VectorField reconstruct_drift(const VectorField& b, const VectorField& cg_drift, const ReconstructionSpec& spec)
{
    const Matrix pi = spec.map.matrix();
    const Matrix sharp = spec.map.right_inverse();
    const Matrix complement = Matrix::Identity(pi.cols(), pi.cols()) - sharp * pi;
    const VectorField y = spec.orthogonal_part ? spec.orthogonal_part : b;
    return [pi, sharp, complement, y, cg_drift](const Vector& x) -> Vector {
        const Vector bbar = cg_drift(pi * x);
        require_dim(bbar.size(), pi.rows(), "CG drift output");
        const Vector yx = y(x);
        require_dim(yx.size(), pi.cols(), "orthogonal part output");
        return sharp * bbar + complement * yx;
    };
}

VectorField reconstruct_drift(const VectorField& b, const ParametricDriftFamily& family, const Vector& theta,
                              const ReconstructionSpec& spec)
{
    require_dim(family.cg_dim(), spec.map.cg_dim(), "reconstruct_drift: family dimension");
    require_dim(theta.size(), family.size(), "reconstruct_drift: theta");
    return reconstruct_drift(b, [family, theta](const Vector& xbar) { return family.eval(xbar, theta); }, spec);
}

namespace
{
struct Moments
{
    Vector mean;
    Vector mean_se;
    Matrix cov;
    Matrix cov_se;
};

/// Columns are i.i.d. samples.
Moments sample_moments(const Matrix& x)
{
    const auto n = static_cast<double>(x.cols());
    Moments m;
    m.mean = x.rowwise().mean();
    const Matrix c = x.colwise() - m.mean;
    m.cov = c * c.transpose() / n;
    m.mean_se = ((c.array().square().rowwise().sum() / (n - 1.0)) / n).sqrt().matrix();
    m.cov_se.resize(x.rows(), x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.rows(); ++j)
        {
            const Eigen::ArrayXd z = c.row(i).array() * c.row(j).array();
            const double var = (z - z.mean()).square().sum() / (n - 1.0);
            m.cov_se(i, j) = std::sqrt(var / n);
        }
    return m;
}

bool within(double diff, double se, double& worst)
{
    const double ad = std::abs(diff);
    if (se > 0.0) worst = std::max(worst, ad / se);
    return ad <= 3.0 * se || ad <= 1e-12 * (1.0 + se);
}
}  // namespace

ReconstructionReport verify_reconstruction(const ReconstructionCheck& check, const std::vector<double>& times,
                                           double h, std::size_t replicas, RngSpec rng)
{
    require_dim(check.reconstructed.dim(), check.map.dim(), "verify_reconstruction: microscopic dimension");
    require_dim(check.coarse.dim(), check.map.cg_dim(), "verify_reconstruction: coarse dimension");
    if (replicas < 2) throw DimensionError("verify_reconstruction: need at least two replicas");
    if (times.empty()) throw DimensionError("verify_reconstruction: no times");

    std::vector<std::size_t> index;
    for (double t : times)
    {
        if (t < 0.0) throw DimensionError("verify_reconstruction: negative time");
        index.push_back(static_cast<std::size_t>(std::llround(t / h)));
    }
    SimulationOptions opts;
    opts.h = h;
    opts.steps = *std::max_element(index.begin(), index.end());
    opts.burn_in = 0;

    const Matrix pi = check.map.matrix();
    const Ensemble micro = simulate_ensemble(check.reconstructed, check.initial, opts, replicas, rng);
    const InitialSampler projected = [&](GaussianStream& s) -> Vector { return pi * check.initial(s); };
    const RngSpec coarse_rng{rng.master_seed ^ 0xa0761d6478bd642fULL};
    const Ensemble coarse = simulate_ensemble(check.coarse, projected, opts, replicas, coarse_rng);

    ReconstructionReport report;
    for (std::size_t k = 0; k < times.size(); ++k)
    {
        const auto col = static_cast<Eigen::Index>(index[k]);
        Matrix a(pi.rows(), static_cast<Eigen::Index>(replicas));
        Matrix b(pi.rows(), static_cast<Eigen::Index>(replicas));
        for (std::size_t r = 0; r < replicas; ++r)
        {
            a.col(static_cast<Eigen::Index>(r)) = pi * micro.trajectories[r].states.col(col);
            b.col(static_cast<Eigen::Index>(r)) = coarse.trajectories[r].states.col(col);
        }
        const Moments ma = sample_moments(a);
        const Moments mb = sample_moments(b);
        MomentComparison cmp;
        cmp.time = static_cast<double>(index[k]) * h;
        cmp.mean_diff = ma.mean - mb.mean;
        cmp.mean_se = (ma.mean_se.array().square() + mb.mean_se.array().square()).sqrt().matrix();
        cmp.cov_diff = ma.cov - mb.cov;
        cmp.cov_se = (ma.cov_se.array().square() + mb.cov_se.array().square()).sqrt().matrix();
        for (Eigen::Index i = 0; i < pi.rows(); ++i)
        {
            cmp.pass = within(cmp.mean_diff(i), cmp.mean_se(i), report.worst_ratio) && cmp.pass;
            for (Eigen::Index j = i; j < pi.rows(); ++j)
                cmp.pass = within(cmp.cov_diff(i, j), cmp.cov_se(i, j), report.worst_ratio) && cmp.pass;
        }
        report.pass = report.pass && cmp.pass;
        report.times.push_back(std::move(cmp));
    }
    return report;
}

Trajectory project_trajectory(const Trajectory& traj, const Matrix& pi)
{
    require_dim(pi.cols(), traj.dim, "project_trajectory: map columns vs trajectory dimension");
    Trajectory out = traj;
    out.dim = static_cast<int>(pi.rows());
    out.states = pi * traj.states;
    return out;
}

Ensemble project_ensemble(const Ensemble& ensemble, const Matrix& pi)
{
    Ensemble out;
    out.trajectories.reserve(ensemble.size());
    for (const auto& t : ensemble.trajectories) out.trajectories.push_back(project_trajectory(t, pi));
    return out;
}

}  // namespace pathcg
