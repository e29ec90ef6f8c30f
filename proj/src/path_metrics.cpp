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

#include "pathcg/path_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pathcg/trajectory_io.hpp"

namespace pathcg
{
Matrix xi_matrix(const Matrix& sigma)
{
    if (sigma.cols() == 0) throw DimensionError("xi_matrix: sigma has no columns");
    const Matrix gram = sigma.transpose() * sigma;
    if (numerical_rank(gram) < gram.rows()) throw NumericalError("xi_matrix: sigma^T sigma is singular");
    return gram.ldlt().solve(sigma.transpose());
}

namespace
{
double log_det_spd(const Matrix& a, const char* what)
{
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + " is not positive definite");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Matrix spd_inverse(const Matrix& a, const char* what)
{
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + " is not positive definite");
    Matrix inv = llt.solve(Matrix::Identity(a.rows(), a.cols()));
    return 0.5 * (inv + inv.transpose());
}

Vector row_means(const Matrix& columns)
{
    Vector out(columns.rows());
    std::vector<double> buf(static_cast<std::size_t>(columns.cols()));
    for (Eigen::Index i = 0; i < columns.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < columns.cols(); ++j) buf[static_cast<std::size_t>(j)] = columns(i, j);
        out(i) = pairwise_mean(buf);
    }
    return out;
}

std::vector<double> evaluate(const ScalarField& phi, const Matrix& samples)
{
    std::vector<double> out(static_cast<std::size_t>(samples.cols()));
    for (Eigen::Index j = 0; j < samples.cols(); ++j) out[static_cast<std::size_t>(j)] = phi(samples.col(j));
    return out;
}
}  // namespace

WeightedNorm WeightedNorm::xi(const Matrix& sigma)
{
    const Matrix x = xi_matrix(sigma);
    WeightedNorm w;
    w.mode_ = NormMode::xi;
    w.dim_ = static_cast<int>(sigma.rows());
    w.metric_ = x.transpose() * x;
    return w;
}

WeightedNorm WeightedNorm::xi(MatrixField sigma, int dim)
{
    WeightedNorm w;
    w.mode_ = NormMode::xi;
    w.dim_ = dim;
    w.sigma_field_ = std::move(sigma);
    return w;
}

WeightedNorm WeightedNorm::cg_xi(const Matrix& sigma, const Matrix& sharp)
{
    require_dim(sharp.rows(), sigma.rows(), "cg_xi: Pi# rows vs sigma rows");
    const Matrix x = xi_matrix(sigma) * sharp;
    WeightedNorm w;
    w.mode_ = NormMode::cg_xi;
    w.dim_ = static_cast<int>(sharp.cols());
    w.metric_ = x.transpose() * x;
    w.sharp_ = sharp;
    return w;
}

WeightedNorm WeightedNorm::cg_xi(MatrixField sigma, const Matrix& sharp)
{
    WeightedNorm w;
    w.mode_ = NormMode::cg_xi;
    w.dim_ = static_cast<int>(sharp.cols());
    w.sigma_field_ = std::move(sigma);
    w.sharp_ = sharp;
    return w;
}

WeightedNorm WeightedNorm::from_metric(const Matrix& metric, NormMode mode)
{
    require_dim(metric.rows(), metric.cols(), "WeightedNorm metric must be square");
    WeightedNorm w;
    w.mode_ = mode;
    w.dim_ = static_cast<int>(metric.rows());
    w.metric_ = 0.5 * (metric + metric.transpose());
    return w;
}

Matrix WeightedNorm::metric(const Vector& x) const
{
    if (!sigma_field_) return metric_;
    Matrix xi = xi_matrix(sigma_field_(x));
    if (mode_ == NormMode::cg_xi) xi = xi * sharp_;
    return xi.transpose() * xi;
}

const Matrix& WeightedNorm::constant_metric() const
{
    if (sigma_field_) throw Error("WeightedNorm: metric is state dependent");
    return metric_;
}

double WeightedNorm::squared(const Vector& z, const Vector& x) const
{
    require_dim(z.size(), dim_, "WeightedNorm argument");
    if (!sigma_field_) return z.dot(metric_ * z);
    const Matrix g = metric(x);
    return z.dot(g * z);
}

std::string to_string(RERMode mode)
{
    switch (mode)
    {
        case RERMode::stationary: return "stationary";
        case RERMode::finite_time: return "finite_time";
        case RERMode::discrete: return "discrete";
    }
    return "stationary";
}

std::string RERReport::to_string() const
{
    std::ostringstream s;
    s << "value=" << format_double(value) << " se=" << format_double(std_error) << " n=" << n_samples
      << " mode=" << pathcg::to_string(mode);
    return s.str();
}

RERReport rer_stationary(const Matrix& samples, const VectorField& b, const VectorField& b_tilde,
                         const WeightedNorm& norm, int batches)
{
    if (samples.cols() == 0) throw DimensionError("rer_stationary: no samples");
    std::vector<double> vals(static_cast<std::size_t>(samples.cols()));
    for (Eigen::Index j = 0; j < samples.cols(); ++j)
    {
        const Vector x = samples.col(j);
        vals[static_cast<std::size_t>(j)] = 0.5 * norm.squared(b(x) - b_tilde(x), x);
    }
    const Estimate e = batch_means(vals, batches);
    return RERReport{e.mean, e.se, e.n, RERMode::stationary};
}

RERReport re_finite_time(const Ensemble& paths, const VectorField& b, const VectorField& b_tilde,
                         const WeightedNorm& norm, double initial_term)
{
    paths.validate();
    if (paths.length() < 2) throw DimensionError("re_finite_time: paths need at least two states");
    const double h = paths.step();
    std::vector<double> per_path;
    std::vector<double> per_step;
    for (const auto& t : paths.trajectories)
    {
        std::vector<double> terms(static_cast<std::size_t>(t.length() - 1));
        for (Eigen::Index i = 0; i + 1 < t.length(); ++i)
        {
            const Vector x = t.states.col(i);
            terms[static_cast<std::size_t>(i)] = 0.5 * h * norm.squared(b(x) - b_tilde(x), x);
        }
        per_path.push_back(pairwise_sum(terms) + initial_term);
        if (paths.size() == 1) per_step = std::move(terms);
    }
    RERReport r;
    r.mode = RERMode::finite_time;
    r.n_samples = paths.size();
    if (paths.size() >= 2)
    {
        const Estimate e = iid_mean(per_path);
        r.value = e.mean;
        r.std_error = e.se;
    }
    else
    {
        const Estimate e = batch_means(per_step);
        const auto steps = static_cast<double>(per_step.size());
        r.value = per_path.front();
        r.std_error = e.se * steps;
    }
    return r;
}

OverdampedPieces discrete_rer_overdamped(const Matrix& samples, const SDEModel& micro, const Matrix& pi,
                                         const VectorField& cg_drift, const MatrixField& cg_covariance, double h,
                                         int batches)
{
    if (!(h > 0.0)) throw DimensionError("discrete_rer_overdamped: h must be positive");
    require_dim(pi.cols(), micro.dim(), "discrete_rer_overdamped: map columns");
    if (samples.cols() == 0) throw DimensionError("discrete_rer_overdamped: no samples");
    std::vector<double> av(static_cast<std::size_t>(samples.cols()));
    std::vector<double> bv(av.size());
    for (Eigen::Index j = 0; j < samples.cols(); ++j)
    {
        const Vector x = samples.col(j);
        const Vector xbar = pi * x;
        const Matrix sig = micro.diffusion(x);
        const Matrix s = pi * sig * sig.transpose() * pi.transpose();
        const Matrix sbar = cg_covariance(xbar);
        require_dim(sbar.rows(), pi.rows(), "CG covariance");
        const Matrix sbar_inv = spd_inverse(sbar, "CG covariance");
        const double log_ratio = log_det_spd(s, "Pi Sigma Pi^T") - log_det_spd(sbar, "CG covariance");
        av[static_cast<std::size_t>(j)] = 0.5 * (-log_ratio + (s * sbar_inv).trace());
        const Vector d = pi * micro.drift(x) - cg_drift(xbar);
        bv[static_cast<std::size_t>(j)] = 0.5 * d.dot(sbar_inv * d);
    }
    return OverdampedPieces{batch_means(av, batches), batch_means(bv, batches), h};
}

namespace
{
double scalar_multiple_of_identity(const Matrix& a, const char* what)
{
    const double c = a(0, 0);
    const Matrix diff = a - c * Matrix::Identity(a.rows(), a.cols());
    if (diff.cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, std::abs(c)))
        throw DimensionError(std::string("discrete_rer_bbk: ") + what + " must be a scalar multiple of I");
    return c;
}
}  // namespace

BbkPieces discrete_rer_bbk(const Matrix& samples, const BbkRerInput& input, RngSpec rng, int batches)
{
    if (!input.model || !input.family) throw DimensionError("discrete_rer_bbk: model and family required");
    const LangevinModel& model = *input.model;
    model.validate();
    const ParametricDriftFamily& family = *input.family;
    const int dof = model.dof();
    require_dim(samples.rows(), 2 * dof, "discrete_rer_bbk samples");
    require_dim(input.pi_q.cols(), dof, "discrete_rer_bbk position map");
    require_dim(input.pi_q.rows(), family.cg_dim(), "discrete_rer_bbk family dimension");
    require_dim(input.theta.size(), family.size(), "discrete_rer_bbk theta");
    if ((model.masses.array() != model.masses(0)).any())
        throw DimensionError("discrete_rer_bbk: unequal particle masses are not supported");
    const double gamma = scalar_multiple_of_identity(model.friction, "friction");
    const double sigma = scalar_multiple_of_identity(model.noise, "noise");
    if (!(sigma > 0.0)) throw NumericalError("discrete_rer_bbk: sigma must be positive");
    const double mass = model.masses(0);
    const double h = input.h;
    const double s = input.convention == BbkConvention::standard ? 1.0 : -1.0;
    const auto k = static_cast<Eigen::Index>(family.size());

    GaussianStream stream(rng, 0);
    const auto n = samples.cols();
    std::vector<double> cv(static_cast<std::size_t>(n)), dv(static_cast<std::size_t>(n));
    Matrix gc(k, n), gd(k, n);
    for (Eigen::Index j = 0; j < n; ++j)
    {
        const Vector q = samples.col(j).head(dof);
        const Vector p = samples.col(j).tail(dof);
        const Vector f = model.force(q);
        const Vector qbar = input.pi_q * q;
        const Vector u = (input.pi_q * f - family.eval(qbar, input.theta)) / sigma;
        cv[static_cast<std::size_t>(j)] = 0.25 * u.squaredNorm();
        gc.col(j) = -0.5 * family.design(qbar).transpose() * u / sigma;

        const Vector noise = sigma * stream.draw(dof, 0.5 * h);
        const Vector p_half = p + s * 0.5 * h * f - 0.5 * h * gamma * p / mass + noise;
        const Vector q1 = q + h * p_half / mass;
        const Vector qbar1 = input.pi_q * q1;
        const Vector u1 = (input.pi_q * model.force(q1) - family.eval(qbar1, input.theta)) / sigma;
        dv[static_cast<std::size_t>(j)] = u1.squaredNorm();
        gd.col(j) = -2.0 * family.design(qbar1).transpose() * u1 / sigma;
    }
    BbkPieces out;
    out.c = batch_means(cv, batches);
    out.d = batch_means(dv, batches);
    out.grad_c = row_means(gc);
    out.grad_d = row_means(gd);
    out.h = h;
    return out;
}

EulerKernel::EulerKernel(ParametricDriftFamily family, Matrix cg_covariance, double h, VectorField offset)
    : family_(std::move(family)), h_(h), offset_(std::move(offset))
{
    if (!(h > 0.0)) throw DimensionError("EulerKernel: h must be positive");
    require_dim(cg_covariance.rows(), family_.cg_dim(), "EulerKernel covariance");
    const Matrix cov = h * cg_covariance;
    precision_ = spd_inverse(cov, "Euler kernel covariance");
    log_norm_ = -0.5 * (static_cast<double>(cov.rows()) * std::log(2.0 * std::numbers::pi) + log_det_spd(cov, "Euler kernel covariance"));
}

std::vector<GaussianResidual> EulerKernel::residuals(const Vector& x, const Vector& x_next) const
{
    Vector r0 = x_next - x;
    if (offset_) r0 -= h_ * offset_(x);
    return {GaussianResidual{std::move(r0), h_ * family_.design(x), precision_, log_norm_}};
}

BbkKernel::BbkKernel(ParametricDriftFamily force_family, Vector cg_mass_diagonal, Matrix friction,
                     Matrix cg_covariance, double h, BbkConvention convention, VectorField offset)
    : family_(std::move(force_family)),
      friction_(std::move(friction)),
      h_(h),
      sign_(convention == BbkConvention::standard ? 1.0 : -1.0),
      offset_(std::move(offset))
{
    const int m = family_.cg_dim();
    if (!(h > 0.0)) throw DimensionError("BbkKernel: h must be positive");
    require_dim(cg_mass_diagonal.size(), m, "BbkKernel masses");
    require_dim(friction_.rows(), m, "BbkKernel friction rows");
    require_dim(friction_.cols(), m, "BbkKernel friction cols");
    require_dim(cg_covariance.rows(), m, "BbkKernel covariance");
    if ((cg_mass_diagonal.array() <= 0.0).any()) throw DimensionError("BbkKernel: masses must be positive");
    mass_ = cg_mass_diagonal;
    inv_mass_ = mass_.cwiseInverse();
    b_matrix_ = Matrix::Identity(m, m) + 0.5 * h * friction_ * inv_mass_.asDiagonal();
    const double two_pi_log = static_cast<double>(m) * std::log(2.0 * std::numbers::pi);

    const Matrix cov_q = 0.5 * h * h * h * (inv_mass_.asDiagonal() * cg_covariance * inv_mass_.asDiagonal());
    precision_q_ = spd_inverse(cov_q, "BBK position covariance");
    log_norm_q_ = -0.5 * (two_pi_log + log_det_spd(cov_q, "BBK position covariance"));

    const Matrix cov_p = 0.5 * h * cg_covariance;
    precision_p_ = spd_inverse(cov_p, "BBK momentum covariance");
    Eigen::PartialPivLU<Matrix> lu(b_matrix_);
    const double det_b = lu.determinant();
    if (!(std::abs(det_b) > 0.0)) throw NumericalError("BbkKernel: implicit friction matrix is singular");
    log_norm_p_ = -0.5 * (two_pi_log + log_det_spd(cov_p, "BBK momentum covariance")) + std::log(std::abs(det_b));
}

std::vector<GaussianResidual> BbkKernel::residuals(const Vector& x, const Vector& x_next) const
{
    const int m = family_.cg_dim();
    require_dim(x.size(), 2 * m, "BbkKernel state");
    require_dim(x_next.size(), 2 * m, "BbkKernel next state");
    const Vector q = x.head(m), p = x.tail(m);
    const Vector q1 = x_next.head(m), p1 = x_next.tail(m);
    const double h = h_;

    Vector f0 = offset_ ? offset_(q) : Vector::Zero(m);
    const Vector v = inv_mass_.cwiseProduct(p);
    Vector rq = q1 - q - h * inv_mass_.cwiseProduct(p + sign_ * 0.5 * h * f0 - 0.5 * h * (friction_ * v));
    Matrix jq = sign_ * 0.5 * h * h * (inv_mass_.asDiagonal() * family_.design(q));

    Vector f1 = offset_ ? offset_(q1) : Vector::Zero(m);
    Vector rp = b_matrix_ * p1 - mass_.cwiseProduct(q1 - q) / h - sign_ * 0.5 * h * f1;
    Matrix jp = sign_ * 0.5 * h * family_.design(q1);

    return {GaussianResidual{std::move(rq), std::move(jq), precision_q_, log_norm_q_},
            GaussianResidual{std::move(rp), std::move(jp), precision_p_, log_norm_p_}};
}

PathLogLikelihood::PathLogLikelihood(std::shared_ptr<const TransitionKernel> kernel, std::vector<Trajectory> series)
    : kernel_(std::move(kernel)), series_(std::move(series))
{
    if (!kernel_) throw DimensionError("PathLogLikelihood: no kernel");
    if (series_.empty()) throw DimensionError("PathLogLikelihood: no series");
    const auto k = static_cast<Eigen::Index>(kernel_->num_params());
    CompensatedSum score(k, 1), info(k, k);
    for (const auto& t : series_)
    {
        t.validate();
        require_dim(t.dim, kernel_->state_dim(), "PathLogLikelihood series dimension");
        if (t.length() < 2) throw DimensionError("PathLogLikelihood: series need at least two states");
        for (Eigen::Index i = 0; i + 1 < t.length(); ++i)
        {
            for (const auto& block : kernel_->residuals(t.states.col(i), t.states.col(i + 1)))
            {
                const Matrix jp = block.jacobian.transpose() * block.precision;
                score.add(jp * block.r0);
                info.add(jp * block.jacobian);
            }
            ++transitions_;
        }
    }
    score_ = score.value();
    info_ = info.value();
    info_ = 0.5 * (info_ + info_.transpose());
}

std::vector<double> PathLogLikelihood::per_transition_values(const Vector& theta) const
{
    require_dim(theta.size(), kernel_->num_params(), "PathLogLikelihood theta");
    std::vector<double> terms;
    terms.reserve(transitions_);
    for (const auto& t : series_)
        for (Eigen::Index i = 0; i + 1 < t.length(); ++i)
        {
            double v = 0.0;
            for (const auto& block : kernel_->residuals(t.states.col(i), t.states.col(i + 1)))
            {
                const Vector r = block.r0 - block.jacobian * theta;
                v += block.log_norm - 0.5 * r.dot(block.precision * r);
            }
            terms.push_back(v);
        }
    return terms;
}

double PathLogLikelihood::value(const Vector& theta) const { return pairwise_sum(per_transition_values(theta)); }

Vector PathLogLikelihood::gradient(const Vector& theta) const
{
    require_dim(theta.size(), kernel_->num_params(), "PathLogLikelihood theta");
    return score_ - info_ * theta;
}

Matrix PathLogLikelihood::per_transition_scores(const Vector& theta) const
{
    Matrix out(kernel_->num_params(), static_cast<Eigen::Index>(transitions_));
    Eigen::Index col = 0;
    for (const auto& t : series_)
        for (Eigen::Index i = 0; i + 1 < t.length(); ++i, ++col)
        {
            Vector g = Vector::Zero(kernel_->num_params());
            for (const auto& block : kernel_->residuals(t.states.col(i), t.states.col(i + 1)))
                g += block.jacobian.transpose() * (block.precision * (block.r0 - block.jacobian * theta));
            out.col(col) = g;
        }
    return out;
}

CkpResult ckp_bound(const ScalarField& phi, const Matrix& samples_a, const Matrix& samples_b, double divergence,
                    std::optional<double> sup_norm, int batches)
{
    const auto va = evaluate(phi, samples_a);
    const auto vb = evaluate(phi, samples_b);
    if (va.empty() || vb.empty()) throw DimensionError("ckp_bound: empty sample set");
    const Estimate ea = batch_means(va, batches);
    const Estimate eb = batch_means(vb, batches);
    CkpResult r;
    r.lhs = std::abs(ea.mean - eb.mean);
    r.se = std::hypot(ea.se, eb.se);
    if (sup_norm)
    {
        r.sup_norm = *sup_norm;
    }
    else
    {
        r.sup_is_empirical = true;
        for (double v : va) r.sup_norm = std::max(r.sup_norm, std::abs(v));
        for (double v : vb) r.sup_norm = std::max(r.sup_norm, std::abs(v));
    }
    r.rhs = r.sup_norm * std::sqrt(2.0 * std::max(divergence, 0.0));
    r.holds = r.lhs <= r.rhs + 3.0 * r.se;
    return r;
}

Estimate observable_discrepancy(const std::vector<ScalarField>& phis, const Matrix& samples_a, const Matrix& samples_b,
                                int batches)
{
    if (phis.empty()) throw DimensionError("observable_discrepancy: no observables");
    double total = 0.0, var = 0.0;
    for (const auto& phi : phis)
    {
        const Estimate ea = batch_means(evaluate(phi, samples_a), batches);
        const Estimate eb = batch_means(evaluate(phi, samples_b), batches);
        const double d = ea.mean - eb.mean;
        const double s2 = ea.se * ea.se + eb.se * eb.se;
        total += d * d;
        var += 4.0 * d * d * s2 + 2.0 * s2 * s2;
    }
    return Estimate{total, std::sqrt(var), static_cast<std::size_t>(std::min(samples_a.cols(), samples_b.cols()))};
}

double gaussian_kl_estimate(const Matrix& samples_a, const Matrix& samples_b)
{
    require_dim(samples_a.rows(), samples_b.rows(), "gaussian_kl_estimate dimension");
    if (samples_a.cols() < 2 || samples_b.cols() < 2) throw DimensionError("gaussian_kl_estimate: too few samples");
    auto moments = [](const Matrix& x) {
        const Vector mu = x.rowwise().mean();
        const Matrix c = x.colwise() - mu;
        return std::pair<Vector, Matrix>{mu, c * c.transpose() / static_cast<double>(x.cols() - 1)};
    };
    const auto [ma, ca] = moments(samples_a);
    const auto [mb, cb] = moments(samples_b);
    const Matrix cb_inv = spd_inverse(cb, "sample covariance");
    const Vector d = mb - ma;
    const double k = static_cast<double>(ca.rows());
    const double kl = 0.5 * ((cb_inv * ca).trace() + d.dot(cb_inv * d) - k + log_det_spd(cb, "sample covariance") -
                             log_det_spd(ca, "sample covariance"));
    return std::max(kl, 0.0);
}

}  // namespace pathcg
