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

#include "pathcg/inference.hpp"

#include "pathcg/trajectory_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pathcg
{
namespace
{
std::string format_vector(const Vector& v)
{
    std::string s = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v(i));
    return s + "]";
}

std::string param_name(const std::vector<std::string>& names, Eigen::Index i)
{
    if (i < static_cast<Eigen::Index>(names.size()) && !names[static_cast<std::size_t>(i)].empty())
        return names[static_cast<std::size_t>(i)];
    return "phi_" + std::to_string(i + 1);
}

std::string dependence_report(const Matrix& phi, const std::vector<std::string>& names)
{
    std::ostringstream out;
    const double top = phi.diagonal().cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < phi.rows(); ++i)
        if (phi(i, i) <= 1e-12 * top) out << " " << param_name(names, i) << " vanishes on the samples;";
    for (Eigen::Index i = 0; i < phi.rows(); ++i)
        for (Eigen::Index j = i + 1; j < phi.cols(); ++j)
        {
            const double denom = std::sqrt(phi(i, i) * phi(j, j));
            if (denom > 0.0 && std::abs(phi(i, j)) / denom > 1.0 - 1e-8)
                out << " (" << param_name(names, i) << ", " << param_name(names, j) << ") nearly dependent;";
        }
    std::string s = out.str();
    return s.empty() ? " no single pair is nearly dependent; the dependence involves three or more functions" : s;
}

void check_sample(const LsSample& s, int k, Eigen::Index j)
{
    if (s.design.cols() != k || s.design.rows() != s.target.size() || s.metric.rows() != s.target.size() ||
        s.metric.cols() != s.target.size())
        throw DimensionError("least squares: inconsistent sample shapes at sample " + std::to_string(j));
}

Matrix pseudo_inverse(const Matrix& a) { return a.completeOrthogonalDecomposition().pseudoInverse(); }
}  // namespace

std::string FitResult::to_string() const
{
    std::ostringstream s;
    s << "theta=" << format_vector(theta) << " objective=" << format_double(objective)
      << " objective_se=" << format_double(objective_se) << " se=";
    if (std_errors)
        s << format_vector(*std_errors);
    else
        s << "[]";
    s << " method=" << method << " cond=" << format_double(condition_number);
    if (degenerate) s << " degenerate=1";
    if (!converged) s << " converged=0";
    return s.str();
}

NormalSystem assemble_normal_system(const LsProblem& problem)
{
    if (problem.n_samples <= 0) throw DimensionError("least squares: no samples");
    if (problem.n_params <= 0) throw DimensionError("least squares: no parameters");
    const int k = problem.n_params;
    CompensatedSum phi(k, k), a(k, 1), c(1, 1);
    LsSample s;
    for (Eigen::Index j = 0; j < problem.n_samples; ++j)
    {
        problem.sample(j, s);
        check_sample(s, k, j);
        const Matrix dw = s.design.transpose() * s.metric;
        phi.add(dw * s.design);
        a.add(dw * s.target);
        c.add(Matrix::Constant(1, 1, s.target.dot(s.metric * s.target)));
    }
    const auto n = static_cast<double>(problem.n_samples);
    NormalSystem sys;
    sys.phi = phi.value() / n;
    sys.phi = 0.5 * (sys.phi + sys.phi.transpose());
    sys.a = a.value() / n;
    sys.target_norm = c.value()(0, 0) / n;
    sys.n_samples = static_cast<std::size_t>(problem.n_samples);
    if (!sys.phi.allFinite() || !sys.a.allFinite()) throw NumericalError("least squares: non-finite normal system");
    return sys;
}

FitResult solve_normal_system(const NormalSystem& system, const std::vector<std::string>& names)
{
    const Matrix& phi = system.phi;
    require_dim(phi.rows(), system.a.size(), "normal system");
    FitResult r;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(phi, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
    r.condition_number = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();

    Eigen::LDLT<Matrix> ldlt(phi);
    const bool pd = ldlt.info() == Eigen::Success && ldlt.isPositive() && lo > 0.0;
    if (pd && r.condition_number <= kMaxConditionNumber)
    {
        r.theta = ldlt.solve(system.a);
    }
    else
    {
        r.degenerate = true;
        r.theta = phi.completeOrthogonalDecomposition().solve(system.a);
        std::ostringstream d;
        d << "normal matrix is " << (pd ? "ill-conditioned" : "singular") << " (cond " << r.condition_number
          << "); minimal-norm solution returned;" << dependence_report(phi, names);
        r.diagnostic = d.str();
    }
    const double an = system.a.norm();
    const double res = (phi * r.theta - system.a).norm();
    r.normal_residual = an > 0.0 ? res / an : res;
    r.objective = 0.5 * (system.target_norm - 2.0 * system.a.dot(r.theta) + r.theta.dot(phi * r.theta));
    return r;
}

FitResult solve_least_squares(const LsProblem& problem, const std::string& method)
{
    const NormalSystem sys = assemble_normal_system(problem);
    FitResult r = solve_normal_system(sys, problem.names);
    r.method = method;

    const int k = problem.n_params;
    const Eigen::Index n = problem.n_samples;
    std::vector<double> values(static_cast<std::size_t>(n));
    Matrix scores(k, n);
    LsSample s;
    for (Eigen::Index j = 0; j < n; ++j)
    {
        problem.sample(j, s);
        const Vector res = s.target - s.design * r.theta;
        const Vector wres = s.metric * res;
        values[static_cast<std::size_t>(j)] = 0.5 * res.dot(wres);
        scores.col(j) = s.design.transpose() * wres;
    }

    Matrix score_cov;
    Estimate obj;
    if (problem.groups > 0)
    {
        if (n % static_cast<Eigen::Index>(problem.groups) != 0)
            throw DimensionError("least squares: samples do not split into equal groups");
        const Eigen::Index per = n / static_cast<Eigen::Index>(problem.groups);
        Matrix group_scores(k, static_cast<Eigen::Index>(problem.groups));
        std::vector<double> group_values(problem.groups);
        for (std::size_t g = 0; g < problem.groups; ++g)
        {
            const Eigen::Index off = static_cast<Eigen::Index>(g) * per;
            group_scores.col(static_cast<Eigen::Index>(g)) = scores.middleCols(off, per).rowwise().mean();
            group_values[g] = pairwise_mean(std::span<const double>(values).subspan(static_cast<std::size_t>(off),
                                                                                    static_cast<std::size_t>(per)));
        }
        obj = problem.groups >= 2 ? iid_mean(group_values) : Estimate{group_values.front(), 0.0, 1};
        score_cov = problem.groups >= 2 ? iid_mean_covariance(group_scores) : Matrix::Zero(k, k);
    }
    else
    {
        obj = batch_means(values, problem.batches);
        score_cov = batch_mean_covariance(scores, problem.batches);
    }
    r.objective = problem.scale * obj.mean;
    r.objective_se = problem.scale * obj.se;
    const Matrix inv = r.degenerate ? pseudo_inverse(sys.phi) : Matrix(sys.phi.ldlt().solve(Matrix::Identity(k, k)));
    const Matrix cov = inv * score_cov * inv.transpose();
    r.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return r;
}

FitResult force_matching_ls(const Matrix& samples, const ParametricDriftFamily& family, const CGMap& map,
                            const VectorField& b, const WeightedNorm& weight, int batches)
{
    require_dim(samples.rows(), map.dim(), "force_matching_ls samples");
    require_dim(family.cg_dim(), map.cg_dim(), "force_matching_ls family dimension");
    require_dim(weight.dim(), map.cg_dim(), "force_matching_ls weight dimension");
    const Matrix pi = map.matrix();
    LsProblem p;
    p.n_samples = samples.cols();
    p.n_params = family.size();
    p.batches = batches;
    p.names = family.names();
    p.sample = [&](Eigen::Index j, LsSample& s) {
        const Vector x = samples.col(j);
        const Vector xbar = pi * x;
        s.design = family.design(xbar);
        s.target = pi * b(x);
        s.metric = weight.metric(x);
    };
    return solve_least_squares(p, "force_matching");
}

LangevinTarget::LangevinTarget(const LangevinFitContext& ctx) : ctx_(ctx)
{
    if (!ctx.model || !ctx.map || !ctx.family) throw DimensionError("Langevin fit: model, map and family required");
    ctx.model->validate();
    require_dim(ctx.model->dof(), ctx.map->dof(), "Langevin fit: model dof vs map");
    require_dim(ctx.family->cg_dim(), ctx.map->cg_dof(), "Langevin fit: family dimension vs CG dof");
    gamma_bar_ = pathcg::cg_friction(*ctx.model, *ctx.map, ctx.option);
    metric_ = WeightedNorm::cg_xi(ctx.model->noise, ctx.map->mom.right_inverse()).constant_metric();
    inv_mass_ = ctx.model->inverse_mass_diagonal();
    cg_inv_mass_ = ctx.map->cg_mass_diagonal().cwiseInverse();
}

void LangevinTarget::fill(const Vector& x, LsSample& out) const
{
    const int dof = ctx_.model->dof();
    require_dim(x.size(), 2 * dof, "Langevin sample");
    const Vector q = x.head(dof);
    const Vector p = x.tail(dof);
    const Matrix& pi_p = ctx_.map->mom.matrix();
    const Vector f = ctx_.model->force(q);
    require_dim(f.size(), dof, "Langevin force output");
    const Vector pbar = pi_p * p;
    out.target = pi_p * (f - ctx_.model->friction * inv_mass_.cwiseProduct(p)) + gamma_bar_ * cg_inv_mass_.cwiseProduct(pbar);
    out.design = ctx_.family->design(ctx_.map->pos.matrix() * q);
    out.metric = metric_;
}

FitResult fit_rer_stationary_langevin(const Matrix& samples, const LangevinFitContext& ctx, int batches)
{
    const LangevinTarget target(ctx);
    require_dim(samples.rows(), 2 * ctx.model->dof(), "fit_rer_stationary_langevin samples");
    LsProblem p;
    p.n_samples = samples.cols();
    p.n_params = ctx.family->size();
    p.batches = batches;
    p.names = ctx.family->names();
    p.sample = [&](Eigen::Index j, LsSample& s) { target.fill(samples.col(j), s); };
    return solve_least_squares(p, std::string("rer_stationary_") + to_string(ctx.option));
}

namespace
{
LsProblem path_problem(const Ensemble& ensemble, int n_params)
{
    ensemble.validate();
    if (ensemble.length() < 2) throw DimensionError("finite-time fit: paths need at least two states");
    LsProblem p;
    p.n_samples = static_cast<Eigen::Index>(ensemble.size()) * (ensemble.length() - 1);
    p.n_params = n_params;
    p.groups = ensemble.size();
    p.scale = ensemble.step() * static_cast<double>(ensemble.length() - 1);
    return p;
}

Vector path_state(const Ensemble& e, Eigen::Index j)
{
    const Eigen::Index per = e.length() - 1;
    return e.trajectories[static_cast<std::size_t>(j / per)].states.col(j % per);
}
}  // namespace

FitResult fit_re_finite_time(const Ensemble& ensemble, const ParametricDriftFamily& family, const CGMap& map,
                             const VectorField& b, const WeightedNorm& weight)
{
    require_dim(ensemble.dim(), map.dim(), "fit_re_finite_time ensemble dimension");
    require_dim(family.cg_dim(), map.cg_dim(), "fit_re_finite_time family dimension");
    const Matrix pi = map.matrix();
    LsProblem p = path_problem(ensemble, family.size());
    p.names = family.names();
    p.sample = [&](Eigen::Index j, LsSample& s) {
        const Vector x = path_state(ensemble, j);
        s.design = family.design(pi * x);
        s.target = pi * b(x);
        s.metric = weight.metric(x);
    };
    return solve_least_squares(p, "re_finite_time");
}

FitResult fit_re_finite_time(const Ensemble& ensemble, const LangevinFitContext& ctx)
{
    const LangevinTarget target(ctx);
    require_dim(ensemble.dim(), 2 * ctx.model->dof(), "fit_re_finite_time ensemble dimension");
    LsProblem p = path_problem(ensemble, ctx.family->size());
    p.names = ctx.family->names();
    p.sample = [&](Eigen::Index j, LsSample& s) { target.fill(path_state(ensemble, j), s); };
    return solve_least_squares(p, std::string("re_finite_time_") + to_string(ctx.option));
}

FitResult fit_mle_discrete(const std::vector<Trajectory>& series, std::shared_ptr<const TransitionKernel> kernel,
                           int batches)
{
    const PathLogLikelihood ll(std::move(kernel), series);
    NormalSystem sys;
    sys.phi = ll.information();
    sys.a = ll.score_offset();
    sys.n_samples = ll.transitions();
    FitResult r = solve_normal_system(sys);
    r.method = "mle";
    if (r.degenerate) r.diagnostic = "likelihood Hessian is not negative definite; " + r.diagnostic;
    const auto values = ll.per_transition_values(r.theta);
    const Estimate e = batch_means(values, batches);
    r.objective = -e.mean;
    r.objective_se = e.se;
    if (!r.degenerate)
    {
        const Matrix inv = sys.phi.ldlt().solve(Matrix::Identity(sys.phi.rows(), sys.phi.cols()));
        r.std_errors = inv.diagonal().cwiseMax(0.0).cwiseSqrt();
    }
    r.gradient_norm = ll.gradient(r.theta).norm();
    return r;
}

FitResult fit_descent(const Objective& objective, const Vector& theta0, const DescentOptions& options)
{
    FitResult r;
    r.method = "descent";
    Vector theta = theta0;
    auto [f, g] = objective(theta);
    require_dim(g.size(), theta.size(), "fit_descent gradient");
    double alpha = options.initial_step;
    std::size_t it = 0;
    r.converged = g.norm() <= options.grad_tol;
    while (!r.converged && it < options.max_iterations)
    {
        ++it;
        const double g2 = g.squaredNorm();
        Vector next;
        double fn = 0.0;
        Vector gn;
        bool accepted = false;
        for (int k = 0; k < 80; ++k)
        {
            next = theta - alpha * g;
            std::tie(fn, gn) = objective(next);
            // Near the optimum f stops resolving the decrease; a smaller gradient then decides.
            const bool armijo = fn <= f - options.armijo * alpha * g2;
            const bool flat = fn <= f + 1e-14 * std::abs(f) && gn.norm() < std::sqrt(g2);
            if (std::isfinite(fn) && (armijo || flat))
            {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        const Vector s = next - theta;
        const Vector y = gn - g;
        theta = next;
        f = fn;
        g = gn;
        const double sy = s.dot(y);
        alpha = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * alpha;
        r.converged = g.norm() <= options.grad_tol;
    }
    r.theta = theta;
    r.objective = f;
    r.iterations = it;
    r.gradient_norm = g.norm();
    if (!r.converged)
        r.diagnostic = "stopped after " + std::to_string(it) + " iterations with gradient norm " +
                       format_double(r.gradient_norm);
    return r;
}

Objective make_rer_objective(const Matrix& samples, const VectorField& b, const ParametricDriftFamily& family,
                             const ReconstructionSpec& spec, const WeightedNorm& xi_norm)
{
    const CGMap& map = spec.map;
    require_dim(samples.rows(), map.dim(), "RER objective samples");
    require_dim(family.cg_dim(), map.cg_dim(), "RER objective family dimension");
    require_dim(xi_norm.dim(), map.dim(), "RER objective norm dimension");
    const Matrix pi = map.matrix();
    const Matrix sharp = map.right_inverse();
    const Matrix complement = Matrix::Identity(pi.cols(), pi.cols()) - sharp * pi;
    const VectorField y = spec.orthogonal_part ? spec.orthogonal_part : b;
    const Eigen::Index n = samples.cols();
    const int k = family.size();

    // residual(theta) = base - lift * theta per sample
    auto base = std::make_shared<Matrix>(pi.cols(), n);
    auto lift = std::make_shared<std::vector<Matrix>>(static_cast<std::size_t>(n));
    auto metrics = std::make_shared<std::vector<Matrix>>();
    for (Eigen::Index j = 0; j < n; ++j)
    {
        const Vector x = samples.col(j);
        base->col(j) = b(x) - complement * y(x);
        (*lift)[static_cast<std::size_t>(j)] = sharp * family.design(pi * x);
        if (!xi_norm.is_constant()) metrics->push_back(xi_norm.metric(x));
    }
    const Matrix fixed = xi_norm.is_constant() ? xi_norm.constant_metric() : Matrix();
    return [base, lift, metrics, fixed, n, k](const Vector& theta) {
        require_dim(theta.size(), k, "RER objective theta");
        std::vector<double> vals(static_cast<std::size_t>(n));
        CompensatedSum grad(k, 1);
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const auto idx = static_cast<std::size_t>(j);
            const Matrix& g = metrics->empty() ? fixed : (*metrics)[idx];
            const Vector r = base->col(j) - (*lift)[idx] * theta;
            const Vector gr = g * r;
            vals[idx] = 0.5 * r.dot(gr);
            grad.add(-((*lift)[idx].transpose() * gr));
        }
        return std::pair<double, Vector>{pairwise_mean(vals), grad.value() / static_cast<double>(n)};
    };
}

Estimate evaluate_ls_objective(const LsProblem& problem, const Vector& theta)
{
    require_dim(theta.size(), problem.n_params, "objective theta");
    std::vector<double> values(static_cast<std::size_t>(problem.n_samples));
    LsSample s;
    for (Eigen::Index j = 0; j < problem.n_samples; ++j)
    {
        problem.sample(j, s);
        check_sample(s, problem.n_params, j);
        const Vector res = s.target - s.design * theta;
        values[static_cast<std::size_t>(j)] = 0.5 * res.dot(s.metric * res);
    }
    Estimate e;
    if (problem.groups >= 2)
    {
        const std::size_t per = values.size() / problem.groups;
        std::vector<double> means(problem.groups);
        for (std::size_t g = 0; g < problem.groups; ++g)
            means[g] = pairwise_mean(std::span<const double>(values).subspan(g * per, per));
        e = iid_mean(means);
    }
    else
    {
        e = batch_means(values, problem.batches);
    }
    e.mean *= problem.scale;
    e.se *= problem.scale;
    return e;
}

Objective make_ls_objective(const LsProblem& problem)
{
    struct Store
    {
        std::vector<LsSample> samples;
    };
    auto store = std::make_shared<Store>();
    store->samples.resize(static_cast<std::size_t>(problem.n_samples));
    for (Eigen::Index j = 0; j < problem.n_samples; ++j)
    {
        problem.sample(j, store->samples[static_cast<std::size_t>(j)]);
        check_sample(store->samples[static_cast<std::size_t>(j)], problem.n_params, j);
    }
    const int k = problem.n_params;
    const double scale = problem.scale;
    return [store, k, scale](const Vector& theta) {
        require_dim(theta.size(), k, "objective theta");
        std::vector<double> vals(store->samples.size());
        CompensatedSum grad(k, 1);
        for (std::size_t j = 0; j < store->samples.size(); ++j)
        {
            const LsSample& s = store->samples[j];
            const Vector res = s.target - s.design * theta;
            const Vector wres = s.metric * res;
            vals[j] = 0.5 * res.dot(wres);
            grad.add(-(s.design.transpose() * wres));
        }
        const double n = static_cast<double>(vals.size());
        return std::pair<double, Vector>{scale * pairwise_mean(vals), scale * grad.value() / n};
    };
}

std::vector<RankedMap> compare_cg_maps(const std::vector<MapCandidate>& candidates)
{
    std::vector<RankedMap> out;
    for (const auto& c : candidates) out.push_back(RankedMap{c.name, c.cg_dim, c.fit(), 0, false});
    std::stable_sort(out.begin(), out.end(),
                     [](const RankedMap& a, const RankedMap& b) { return a.fit.objective < b.fit.objective; });
    auto tied = [](const RankedMap& a, const RankedMap& b) {
        return std::abs(a.fit.objective - b.fit.objective) <=
               3.0 * std::hypot(a.fit.objective_se, b.fit.objective_se) + 1e-14 * std::max(1.0, std::abs(a.fit.objective));
    };
    // Within each run of ties, prefer the smaller CG dimension.
    std::size_t start = 0;
    while (start < out.size())
    {
        std::size_t end = start + 1;
        while (end < out.size() && tied(out[end - 1], out[end])) ++end;
        std::stable_sort(out.begin() + static_cast<std::ptrdiff_t>(start), out.begin() + static_cast<std::ptrdiff_t>(end),
                         [](const RankedMap& a, const RankedMap& b) { return a.cg_dim < b.cg_dim; });
        for (std::size_t i = start; i < end; ++i)
        {
            out[i].rank = start + 1;
            out[i].tied_with_previous = i > start;
        }
        start = end;
    }
    return out;
}

}  // namespace pathcg
