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
#include "pathcg/common.hpp"
#include "pathcg/integrators.hpp"
#include "pathcg/model.hpp"
#include "pathcg/path_metrics.hpp"
#include "pathcg/stats.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pathcg
{
inline constexpr double kMaxConditionNumber = 1e12;

struct FitResult
{
    Vector theta;
    double objective = 0.0;
    double objective_se = 0.0;
    std::optional<Vector> std_errors;
    std::string method;
    double condition_number = std::numeric_limits<double>::quiet_NaN();
    /// |Phi theta - a| / |a| for least-squares fits.
    double normal_residual = std::numeric_limits<double>::quiet_NaN();
    /// Normal matrix singular or too ill-conditioned: theta is the minimal-norm solution.
    bool degenerate = false;
    std::string diagnostic;
    bool converged = true;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;

    /// `theta=[...] objective=... se=[...] method=... cond=...`
    std::string to_string() const;
};

/// Phi_ij = E<phi_i, phi_j>_W and a_i = E<phi_i, target>_W.
struct NormalSystem
{
    Matrix phi;
    Vector a;
    /// E|target|^2_W, so that E|target - D theta|^2_W = c - 2 a.theta + theta.Phi.theta.
    double target_norm = 0.0;
    std::size_t n_samples = 0;
};

/// One term of a weighted least-squares objective 1/2 |target - design theta|^2_metric.
struct LsSample
{
    Matrix design;
    Vector target;
    Matrix metric;
};

struct LsProblem
{
    Eigen::Index n_samples = 0;
    int n_params = 0;
    /// Fills sample j; called twice per sample (assembly, then diagnostics).
    std::function<void(Eigen::Index, LsSample&)> sample;
    /// When > 0 the samples form this many equal contiguous i.i.d. groups
    /// (replicas); otherwise standard errors use batch means.
    std::size_t groups = 0;
    int batches = kDefaultBatches;
    /// Reported objective = scale * mean per-sample objective.
    double scale = 1.0;
    std::vector<std::string> names;
};

NormalSystem assemble_normal_system(const LsProblem& problem);

/// Solves Phi theta = a by LDLT; falls back to the minimal-norm solution when
/// Phi is not positive definite or cond(Phi) > kMaxConditionNumber.
FitResult solve_normal_system(const NormalSystem& system, const std::vector<std::string>& names = {});

/// Normal equations plus sandwich standard errors and objective SE.
FitResult solve_least_squares(const LsProblem& problem, const std::string& method);

/// Force matching of a CG drift family: minimises 1/2 E|Pi b(x) - bbar(Pi x)|^2_W
/// over the sample columns, with W the metric of `weight` (cg_xi for the RER).
FitResult force_matching_ls(const Matrix& samples, const ParametricDriftFamily& family, const CGMap& map,
                            const VectorField& b, const WeightedNorm& weight, int batches = kDefaultBatches);

/// Langevin fitting context: CG force family on qbar, friction option.
struct LangevinFitContext
{
    const LangevinModel* model = nullptr;
    const PhaseCGMap* map = nullptr;
    const ParametricDriftFamily* family = nullptr;
    FrictionOption option = FrictionOption::a;
};

/// Per-sample pieces on x = (q, p): the momentum-drift target
/// Pi_p F - Pi_p gamma M^{-1} p + gammabar Mbar^{-1} Pi_p p (option a reduces
/// to Pi_p F), the design D(Pi_q q) and the metric Pi#_p^T Xi^T Xi Pi#_p.
class LangevinTarget
{
public:
    explicit LangevinTarget(const LangevinFitContext& ctx);

    void fill(const Vector& x, LsSample& out) const;
    const Matrix& metric() const { return metric_; }
    const Matrix& cg_friction() const { return gamma_bar_; }

private:
    LangevinFitContext ctx_;
    Matrix gamma_bar_;
    Matrix metric_;
    Vector inv_mass_;
    Vector cg_inv_mass_;
};

/// Stationary RER fit of the CG force for Langevin data (columns (q; p)).
FitResult fit_rer_stationary_langevin(const Matrix& samples, const LangevinFitContext& ctx,
                                      int batches = kDefaultBatches);

/// Finite-time path functional: time-integrated force matching over [0, T)
/// with the left rectangle rule; replicas are the i.i.d. units.
FitResult fit_re_finite_time(const Ensemble& ensemble, const ParametricDriftFamily& family, const CGMap& map,
                             const VectorField& b, const WeightedNorm& weight);
FitResult fit_re_finite_time(const Ensemble& ensemble, const LangevinFitContext& ctx);

/// Maximum likelihood for a theta-linear Gaussian kernel (closed form).
/// Standard errors are sqrt(diag(H^{-1})); the objective is the mean negative
/// log-likelihood per transition.
FitResult fit_mle_discrete(const std::vector<Trajectory>& series, std::shared_ptr<const TransitionKernel> kernel,
                           int batches = kDefaultBatches);

using Objective = std::function<std::pair<double, Vector>(const Vector&)>;

struct DescentOptions
{
    std::size_t max_iterations = 10000;
    double grad_tol = 1e-10;
    double initial_step = 1.0;
    double armijo = 1e-4;
};

/// Barzilai-Borwein gradient descent with Armijo backtracking.
FitResult fit_descent(const Objective& objective, const Vector& theta0, const DescentOptions& options = {});

/// Mean of 1/2 |target - design theta|^2_metric over the problem's samples
/// with the problem's standard-error rule (scaled like the fitted objective).
Estimate evaluate_ls_objective(const LsProblem& problem, const Vector& theta);

/// The same functional as a descent objective; samples are materialised once.
Objective make_ls_objective(const LsProblem& problem);

/// Monte Carlo RER theta -> (E 1/2 |b - btilde_theta|^2_Xi, gradient) on fixed
/// samples, with btilde from reconstruct_drift (y = b unless given).
Objective make_rer_objective(const Matrix& samples, const VectorField& b, const ParametricDriftFamily& family,
                             const ReconstructionSpec& spec, const WeightedNorm& xi_norm);

struct MapCandidate
{
    std::string name;
    int cg_dim = 0;
    std::function<FitResult()> fit;
};

struct RankedMap
{
    std::string name;
    int cg_dim = 0;
    FitResult fit;
    std::size_t rank = 0;   ///< 1-based; tied entries share a rank
    bool tied_with_previous = false;
};

/// Sorted ascending by fitted objective; entries within 3 combined SE of the
/// previous one are ties, ordered by smaller cg_dim.
std::vector<RankedMap> compare_cg_maps(const std::vector<MapCandidate>& candidates);

}  // namespace pathcg
