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
#include "pathcg/integrators.hpp"
#include "pathcg/model.hpp"

#include <string>
#include <vector>

namespace pathcg
{
enum class MapKind
{
    center_of_mass,
    projection,
    general,
};

std::string to_string(MapKind kind);
MapKind parse_map_kind(const std::string& name);

/// Entrywise tolerance for Pi * Pi# = I.
inline constexpr double kRightInverseTol = 1e-12;

/// Pi^T (Pi Pi^T)^{-1}. Throws NumericalError listing the singular values when
/// Pi does not have full row rank.
Matrix right_inverse(const Matrix& pi);

/// max |Pi * sharp - I| entrywise.
double right_inverse_error(const Matrix& pi, const Matrix& sharp);

/// Full-rank linear map Pi : R^n -> R^m with a cached right inverse.
class CGMap
{
public:
    /// Right inverse Pi^T (Pi Pi^T)^{-1}.
    explicit CGMap(Matrix matrix, MapKind kind = MapKind::general);
    /// Caller-supplied right inverse, verified to kRightInverseTol.
    CGMap(Matrix matrix, Matrix sharp, MapKind kind);

    /// No verification at all. Only for fault-injection checks.
    static CGMap unchecked(Matrix matrix, Matrix sharp, MapKind kind);

    const Matrix& matrix() const { return matrix_; }
    const Matrix& right_inverse() const { return sharp_; }
    MapKind kind() const { return kind_; }
    int cg_dim() const { return static_cast<int>(matrix_.rows()); }
    int dim() const { return static_cast<int>(matrix_.cols()); }

    Vector apply(const Vector& x) const;
    Vector lift(const Vector& xbar) const { return sharp_ * xbar; }
    double right_inverse_error() const;

private:
    CGMap() = default;
    Matrix matrix_;
    Matrix sharp_;
    MapKind kind_ = MapKind::general;
};

/// Position and momentum maps of a particle coarse-graining, with
/// Pi_p = Mbar Pi_q M^{-1} and Pi#_p = M Pi#_q Mbar^{-1}.
struct PhaseCGMap
{
    CGMap pos;
    CGMap mom;
    Vector masses;     ///< per microscopic particle
    Vector cg_masses;  ///< per CG particle
    int space_dim = 3;

    int n_particles() const { return static_cast<int>(masses.size()); }
    int n_cg() const { return static_cast<int>(cg_masses.size()); }
    int dof() const { return n_particles() * space_dim; }
    int cg_dof() const { return n_cg() * space_dim; }

    /// Diagonals of M and Mbar expanded to dof entries.
    Vector mass_diagonal() const;
    Vector cg_mass_diagonal() const;

    /// blockdiag(Pi_q, Pi_p) and blockdiag(Pi#_q, Pi#_p) on x = (q, p).
    CGMap phase_map() const;
};

/// Builds the momentum map from a position map and both mass vectors.
PhaseCGMap make_phase_map(const CGMap& pos, const Vector& masses, const Vector& cg_masses, int space_dim);

/// Centre-of-mass lumping: zeta_ji = m_i / mbar_j on group C_j, mbar_j = sum of
/// its masses. Groups hold 0-based particle indices and must partition 0..N-1.
PhaseCGMap make_center_of_mass_map(const Vector& masses, const std::vector<std::vector<int>>& groups,
                                   int space_dim = 3);

/// 0/1 selection of the given 0-based coordinates out of n.
CGMap make_projection_map(int n, const std::vector<int>& kept);

/// Keeps whole particles (all space_dim coordinates); Pi_p = Pi_q.
PhaseCGMap make_particle_projection_map(const Vector& masses, const std::vector<int>& kept_particles,
                                        int space_dim = 3);

/// Sigmabar = Pi Sigma Pi^T together with its symmetric square root.
struct CGDiffusion
{
    Matrix covariance;
    Matrix factor;
};

CGDiffusion cg_diffusion(const Matrix& sigma, const Matrix& pi);

/// State-dependent sigma: Pi Sigma(x) Pi^T must agree across the samples
/// (columns) within tol relative to its norm.
CGDiffusion cg_diffusion(const MatrixField& sigma, const Matrix& pi, const Matrix& samples, double tol = 1e-10);

enum class FrictionOption
{
    a,  ///< gammabar Pi_q = Pi_p gamma
    b,  ///< gammabar = Pi_p gamma Pi_p^T
};

FrictionOption parse_friction_option(const std::string& name);
std::string to_string(FrictionOption option);

inline constexpr double kFrictionConsistencyTol = 1e-10;

/// Option a solves through Pi#_q and rejects a residual above
/// kFrictionConsistencyTol * |Pi_p gamma|.
Matrix cg_friction(const LangevinModel& model, const PhaseCGMap& pm, FrictionOption option);

/// Coarse Langevin model on the CG particles with the given force, friction
/// and noise; beta is inherited from the caller.
LangevinModel make_cg_langevin(const PhaseCGMap& pm, VectorField force, const Matrix& friction, const Matrix& noise,
                               double beta);

/// Reconstruction btilde(x) = Pi# bbar(Pi x) + (I - Pi# Pi) y(x). An empty
/// orthogonal_part means y = b, the microscopic drift.
struct ReconstructionSpec
{
    CGMap map;
    VectorField orthogonal_part;
};

/// btilde for a fixed CG drift bbar.
VectorField reconstruct_drift(const VectorField& b, const VectorField& cg_drift, const ReconstructionSpec& spec);

/// btilde for bbar = sum_k theta_k phi_k.
VectorField reconstruct_drift(const VectorField& b, const ParametricDriftFamily& family, const Vector& theta,
                              const ReconstructionSpec& spec);

struct MomentComparison
{
    double time = 0.0;
    Vector mean_diff;  ///< E[Pi Xtilde_t] - E[Xbar_t]
    Vector mean_se;
    Matrix cov_diff;
    Matrix cov_se;
    bool pass = true;
};

struct ReconstructionReport
{
    std::vector<MomentComparison> times;
    bool pass = true;
    /// Largest |diff| / SE over all compared entries (0 when all SEs vanish).
    double worst_ratio = 0.0;
};

struct ReconstructionCheck
{
    SDEModel reconstructed;  ///< on R^n
    SDEModel coarse;         ///< on R^m
    CGMap map;
    /// Draws microscopic initial states; the coarse ensemble starts from the
    /// projection of independent draws.
    InitialSampler initial;
};

/// Simulates both processes with Euler-Maruyama and compares componentwise
/// means and covariances of Pi Xtilde_t and Xbar_t at the requested times.
/// Each entry passes iff |diff| <= 3 SE.
ReconstructionReport verify_reconstruction(const ReconstructionCheck& check, const std::vector<double>& times,
                                           double h, std::size_t replicas, RngSpec rng);

Trajectory project_trajectory(const Trajectory& traj, const Matrix& pi);
Ensemble project_ensemble(const Ensemble& ensemble, const Matrix& pi);

}  // namespace pathcg
