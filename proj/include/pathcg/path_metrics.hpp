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
#include "pathcg/stats.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pathcg
{
/// (sigma^T sigma)^{-1} sigma^T; throws NumericalError if sigma^T sigma is singular.
Matrix xi_matrix(const Matrix& sigma);

enum class NormMode
{
    xi,     ///< |z|^2 = z^T Xi^T Xi z on the microscopic space
    cg_xi,  ///< |z|^2 = (Pi# z)^T Xi^T Xi (Pi# z) on the CG space
};

/// Quadratic form |z|^2_G with G = Xi^T Xi or Pi#^T Xi^T Xi Pi#. For a
/// state-dependent sigma, G depends on the microscopic state x.
class WeightedNorm
{
public:
    static WeightedNorm xi(const Matrix& sigma);
    static WeightedNorm xi(MatrixField sigma, int dim);
    static WeightedNorm cg_xi(const Matrix& sigma, const Matrix& sharp);
    static WeightedNorm cg_xi(MatrixField sigma, const Matrix& sharp);
    /// Fixed metric G (symmetric PSD), e.g. an explicit CG weight.
    static WeightedNorm from_metric(const Matrix& metric, NormMode mode);

    NormMode mode() const { return mode_; }
    bool is_constant() const { return !sigma_field_; }
    /// Dimension of the vectors being measured.
    int dim() const { return dim_; }

    /// G at the microscopic state x (ignored for constant metrics).
    Matrix metric(const Vector& x) const;
    const Matrix& constant_metric() const;

    double squared(const Vector& z, const Vector& x) const;
    double squared(const Vector& z) const { return squared(z, Vector()); }

private:
    NormMode mode_ = NormMode::xi;
    int dim_ = 0;
    Matrix metric_;
    MatrixField sigma_field_;
    Matrix sharp_;
};

enum class RERMode
{
    stationary,
    finite_time,
    discrete,
};

std::string to_string(RERMode mode);

struct RERReport
{
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    RERMode mode = RERMode::stationary;

    /// `value=... se=... n=... mode=...`
    std::string to_string() const;
};

/// E_mu[ 1/2 |b(x) - btilde(x)|^2_Xi ] over the columns of `samples`, with a
/// batch-means standard error. The norm must be in xi mode.
RERReport rer_stationary(const Matrix& samples, const VectorField& b, const VectorField& b_tilde,
                         const WeightedNorm& norm, int batches = kDefaultBatches);

/// Per path h * sum_{i<T} 1/2 |b - btilde|^2_Xi at the recorded states (left
/// rectangle rule), averaged over replicas, plus the initial-law term.
RERReport re_finite_time(const Ensemble& paths, const VectorField& b, const VectorField& b_tilde,
                         const WeightedNorm& norm, double initial_term = 0.0);

/// Pieces of the Euler-chain RER: objective = A / h + B up to a
/// theta-independent constant.
struct OverdampedPieces
{
    Estimate a;
    Estimate b;
    double h = 0.0;
    double objective() const { return a.mean / h + b.mean; }
};

/// A = 1/2 E[-log|S Sbar^{-1}| + tr(S Sbar^{-1})] with S = Pi Sigma(x) Pi^T and
/// B = 1/2 E[(Pi b - bbar)^T Sbar^{-1} (Pi b - bbar)] over microscopic samples.
OverdampedPieces discrete_rer_overdamped(const Matrix& samples, const SDEModel& micro, const Matrix& pi,
                                         const VectorField& cg_drift, const MatrixField& cg_covariance, double h,
                                         int batches = kDefaultBatches);

/// BBK-chain objective C + D_h and the theta-gradients of both pieces for a
/// force family Fbar(qbar; theta) = sum theta_k phi_k(qbar).
struct BbkPieces
{
    Estimate c;
    Estimate d;
    Vector grad_c;
    Vector grad_d;
    double h = 0.0;
    double objective() const { return c.mean + d.mean; }
};

struct BbkRerInput
{
    const LangevinModel* model = nullptr;  ///< equal masses, scalar gamma and sigma
    Matrix pi_q;                           ///< position map (orthogonal rows)
    const ParametricDriftFamily* family = nullptr;
    Vector theta;
    double h = 1e-3;
    BbkConvention convention = BbkConvention::standard;
};

/// C = 1/4 E|sigma^{-1}(Pi F(q) - Fbar(Pi q))|^2 and
/// D_h = E|sigma^{-1}(Pi F(q') - Fbar(Pi q'))|^2 with q' drawn once per sample
/// from the one-step BBK position kernel. Samples are columns (q; p).
BbkPieces discrete_rer_bbk(const Matrix& samples, const BbkRerInput& input, RngSpec rng,
                           int batches = kDefaultBatches);

/// One Gaussian factor of a transition density in a theta-linear family:
/// residual r(theta) = r0 - J theta ~ N(0, precision^{-1}); log_norm is the
/// theta-independent log normalisation (including any Jacobian).
struct GaussianResidual
{
    Vector r0;
    Matrix jacobian;
    Matrix precision;
    double log_norm = 0.0;
};

/// Scheme-induced Gaussian transition kernel of a CG chain.
class TransitionKernel
{
public:
    virtual ~TransitionKernel() = default;
    virtual int state_dim() const = 0;
    virtual int num_params() const = 0;
    /// Residual blocks of log p(x -> x_next); their log-densities add up.
    virtual std::vector<GaussianResidual> residuals(const Vector& x, const Vector& x_next) const = 0;
};

/// Euler: xbar' ~ N(xbar + h (offset(xbar) + D(xbar) theta), Sigmabar h).
class EulerKernel : public TransitionKernel
{
public:
    EulerKernel(ParametricDriftFamily family, Matrix cg_covariance, double h, VectorField offset = {});

    int state_dim() const override { return family_.cg_dim(); }
    int num_params() const override { return family_.size(); }
    std::vector<GaussianResidual> residuals(const Vector& x, const Vector& x_next) const override;

private:
    ParametricDriftFamily family_;
    Matrix precision_;
    double log_norm_;
    double h_;
    VectorField offset_;
};

/// BBK on xbar = (qbar, pbar) with force Fbar = offset + D theta:
///   qbar' ~ N(qbar + h Mbar^{-1}[pbar + s Fbar(qbar) h/2 - gammabar Mbar^{-1} pbar h/2],
///             h^3/2 Mbar^{-1} Sigmabar Mbar^{-1}),
///   B pbar' - Mbar (qbar' - qbar)/h - s Fbar(qbar') h/2 ~ N(0, Sigmabar h/2),
/// with B = I + gammabar Mbar^{-1} h/2 and s = +1 (standard) or -1.
class BbkKernel : public TransitionKernel
{
public:
    BbkKernel(ParametricDriftFamily force_family, Vector cg_mass_diagonal, Matrix friction, Matrix cg_covariance,
              double h, BbkConvention convention = BbkConvention::standard, VectorField offset = {});

    int state_dim() const override { return 2 * family_.cg_dim(); }
    int num_params() const override { return family_.size(); }
    std::vector<GaussianResidual> residuals(const Vector& x, const Vector& x_next) const override;

private:
    ParametricDriftFamily family_;
    Vector inv_mass_;
    Vector mass_;
    Matrix friction_;
    Matrix b_matrix_;
    Matrix precision_q_;
    Matrix precision_p_;
    double log_norm_q_;
    double log_norm_p_;
    double h_;
    double sign_;
    VectorField offset_;
};

/// L(theta) = sum over consecutive pairs of log p_theta(x_i, x_{i+1}) for a set
/// of CG series. Quadratic in theta: L = c + g^T theta - theta^T H theta / 2.
class PathLogLikelihood
{
public:
    PathLogLikelihood(std::shared_ptr<const TransitionKernel> kernel, std::vector<Trajectory> series);

    /// Direct sum of log-densities.
    double value(const Vector& theta) const;
    /// g - H theta.
    Vector gradient(const Vector& theta) const;
    /// -H.
    Matrix hessian() const { return -info_; }

    /// sum J^T P r0 and sum J^T P J.
    const Vector& score_offset() const { return score_; }
    const Matrix& information() const { return info_; }
    std::size_t transitions() const { return transitions_; }

    /// Per-transition gradient contributions at theta (columns), for sandwich errors.
    Matrix per_transition_scores(const Vector& theta) const;
    /// Per-transition log-densities at theta, in series order.
    std::vector<double> per_transition_values(const Vector& theta) const;

    const TransitionKernel& kernel() const { return *kernel_; }

private:
    std::shared_ptr<const TransitionKernel> kernel_;
    std::vector<Trajectory> series_;
    Vector score_;
    Matrix info_;
    std::size_t transitions_ = 0;
};

struct CkpResult
{
    double lhs = 0.0;        ///< |E_a phi - E_b phi|
    double rhs = 0.0;        ///< sup|phi| sqrt(2 R)
    double se = 0.0;         ///< combined SE of lhs
    double sup_norm = 0.0;
    bool sup_is_empirical = false;
    bool holds = false;      ///< lhs <= rhs + 3 se
};

/// CKP check between sample sets (columns). Without an explicit sup, the
/// empirical sup over both sample sets is used and flagged.
CkpResult ckp_bound(const ScalarField& phi, const Matrix& samples_a, const Matrix& samples_b, double divergence,
                    std::optional<double> sup_norm = std::nullopt, int batches = kDefaultBatches);

/// sum_i |E_a phi_i - E_b phi_i|^2 with a delta-method standard error.
Estimate observable_discrepancy(const std::vector<ScalarField>& phis, const Matrix& samples_a,
                                const Matrix& samples_b, int batches = kDefaultBatches);

/// KL(N(mean_a, cov_a) | N(mean_b, cov_b)) from the sample moments of both sets.
double gaussian_kl_estimate(const Matrix& samples_a, const Matrix& samples_b);

}  // namespace pathcg
