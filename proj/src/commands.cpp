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

#include "pathcg/commands.hpp"

#include "pathcg/builtin_models.hpp"
#include "pathcg/expression.hpp"
#include "pathcg/path_metrics.hpp"
#include "pathcg/trajectory_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace pathcg
{
namespace
{
Matrix noise_matrix(const RunConfig& cfg, int n)
{
    if (!cfg.has("model.sigma")) return std::sqrt(2.0) * Matrix::Identity(n, n);
    const Matrix s = cfg.get_matrix("model.sigma");
    if (s.size() == 1) return s(0, 0) * Matrix::Identity(n, n);
    if (s.rows() != n) throw ConfigError("model.sigma must have " + std::to_string(n) + " rows");
    return s;
}

ParametricDriftFamily make_family(const std::string& name, int cg_dim, int n_cg, int space_dim)
{
    if (name == "linear") return ParametricDriftFamily::linear(cg_dim);
    if (name == "linear_matrix") return ParametricDriftFamily::linear_matrix(cg_dim);
    if (name == "affine") return ParametricDriftFamily::affine(cg_dim);
    if (name == "cubic") return ParametricDriftFamily::cubic(cg_dim);
    if (name == "constant") return ParametricDriftFamily::constant(cg_dim);
    // pairwise_springs, also accepted as pairwise_distance
    return ParametricDriftFamily::pairwise_springs(n_cg, space_dim);
}

std::string provenance(const RunConfig& cfg)
{
    std::ostringstream s;
    s << "config_hash=0x" << std::hex << cfg.hash() << std::dec << " seed=" << cfg.seed();
    return s.str();
}

std::string write_report(const RunConfig& cfg, const std::string& body)
{
    const std::string text = body + provenance(cfg) + "\n";
    std::ofstream out(std::filesystem::path(output_dir(cfg)) / "report.txt", std::ios::binary);
    if (!out) throw Error("cannot write report.txt in '" + output_dir(cfg) + "'");
    out << text;
    return text;
}

void ensure_output(const RunConfig& cfg)
{
    std::error_code ec;
    std::filesystem::create_directories(output_dir(cfg), ec);
    if (ec) throw Error("cannot create output directory '" + output_dir(cfg) + "': " + ec.message());
}

Ensemble load_input(const RunConfig& cfg, const RunSetup& setup)
{
    const std::string path = input_path(cfg);
    if (!std::filesystem::exists(path)) throw ConfigError("input trajectory file '" + path + "' does not exist");
    Ensemble e = read_ensemble_csv(path);
    if (e.dim() != setup.state_dim())
        throw ConfigError("input trajectories have dimension " + std::to_string(e.dim()) + " but the model state has " +
                          std::to_string(setup.state_dim()));
    return e;
}

/// Least-squares problem over the columns of `samples` for the configured model.
struct FitProblem
{
    LsProblem problem;
    std::shared_ptr<LangevinTarget> target;
    std::shared_ptr<Matrix> samples;
    WeightedNorm weight;
};

FitProblem stationary_problem(const RunSetup& setup, Matrix samples)
{
    FitProblem fp;
    fp.samples = std::make_shared<Matrix>(std::move(samples));
    auto family = setup.family;
    fp.problem.n_samples = fp.samples->cols();
    fp.problem.n_params = family->size();
    fp.problem.names = family->names();
    if (setup.is_langevin())
    {
        LangevinFitContext ctx{&*setup.langevin, &*setup.phase, family.get(), setup.friction};
        fp.target = std::make_shared<LangevinTarget>(ctx);
        auto target = fp.target;
        auto data = fp.samples;
        fp.problem.sample = [target, data](Eigen::Index j, LsSample& s) { target->fill(data->col(j), s); };
    }
    else
    {
        const CGMap& map = *setup.map;
        fp.weight = WeightedNorm::cg_xi(setup.sde->constant_diffusion(), map.right_inverse());
        const Matrix pi = map.matrix();
        const Matrix metric = fp.weight.constant_metric();
        const SDEModel model = *setup.sde;
        auto data = fp.samples;
        fp.problem.sample = [pi, metric, model, family, data](Eigen::Index j, LsSample& s) {
            const Vector x = data->col(j);
            s.design = family->design(pi * x);
            s.target = pi * model.drift(x);
            s.metric = metric;
        };
    }
    return fp;
}

void write_theta_csv(const RunConfig& cfg, const FitResult& r, const ParametricDriftFamily& family)
{
    std::ofstream out(std::filesystem::path(output_dir(cfg)) / "theta.csv", std::ios::binary);
    if (!out) throw Error("cannot write theta.csv");
    out << "name,theta,se\n";
    for (Eigen::Index i = 0; i < r.theta.size(); ++i)
    {
        const auto idx = static_cast<std::size_t>(i);
        const std::string name = idx < family.names().size() ? family.names()[idx] : "phi_" + std::to_string(i + 1);
        out << name << ',' << format_double(r.theta(i)) << ','
            << (r.std_errors ? format_double((*r.std_errors)(i)) : std::string("nan")) << '\n';
    }
}
}  // namespace

int RunSetup::state_dim() const { return is_langevin() ? 2 * langevin->dof() : sde->dim(); }

CGMap RunSetup::state_map() const { return is_langevin() ? phase->phase_map() : *map; }

std::string output_dir(const RunConfig& config) { return config.get("output", "pathcg_out"); }

std::string input_path(const RunConfig& config)
{
    return config.get("input", (std::filesystem::path(output_dir(config)) / "trajectory.csv").string());
}

RunSetup build_setup(const RunConfig& cfg)
{
    RunSetup s;
    s.model_name = cfg.get("model", "ou");
    const double gamma = cfg.get_double("model.gamma", 1.0);
    const double beta = cfg.get_double("model.beta", 1.0);
    const double mass = cfg.get_double("model.mass", 1.0);
    if (s.model_name == "ou")
    {
        const Matrix a = cfg.has("model.a") ? cfg.get_matrix("model.a") : Matrix::Identity(1, 1);
        if (a.rows() != a.cols()) throw ConfigError("model.a must be square");
        s.sde = make_ou_model(a, noise_matrix(cfg, static_cast<int>(a.rows())));
    }
    else if (s.model_name == "harmonic_chain")
    {
        HarmonicChainSpec spec;
        spec.n_particles = static_cast<int>(cfg.get_int("model.particles", 3));
        spec.space_dim = static_cast<int>(cfg.get_int("model.space_dim", 1));
        spec.mass = mass;
        spec.spring = cfg.get_double("model.spring", 1.0);
        spec.tether = cfg.get_double("model.tether", 1.0);
        spec.gamma = gamma;
        spec.beta = beta;
        s.langevin = make_harmonic_chain(spec);
    }
    else if (s.model_name == "driven_langevin")
    {
        s.langevin = make_driven_langevin(cfg.get_double("model.drive", 0.5), gamma, beta, mass);
    }
    else
    {
        const int n = static_cast<int>(cfg.get_int("model.particles", 1));
        const int d = static_cast<int>(cfg.get_int("model.space_dim", 1));
        s.langevin = LangevinModel::thermostatted(n, d, Vector::Constant(n, mass),
                                                  parse_force_field(cfg.get("model.force", ""), n * d), gamma, beta);
        s.langevin->conservative = false;
    }

    const std::string kind = cfg.get("cg.kind", "identity");
    const auto indices = cfg.get_groups("cg.indices");
    std::vector<int> kept;
    for (const auto& g : indices) kept.insert(kept.end(), g.begin(), g.end());
    int n_cg = 0, space_dim = 1, cg_dim = 0;
    if (s.is_langevin())
    {
        const LangevinModel& m = *s.langevin;
        space_dim = m.space_dim;
        if (kind == "identity")
        {
            std::vector<int> all(static_cast<std::size_t>(m.n_particles));
            std::iota(all.begin(), all.end(), 0);
            s.phase = make_particle_projection_map(m.masses, all, m.space_dim);
        }
        else if (kind == "projection")
        {
            if (kept.empty()) throw ConfigError("cg.kind = projection requires cg.indices");
            s.phase = make_particle_projection_map(m.masses, kept, m.space_dim);
        }
        else
        {
            const auto groups = cfg.get_groups("cg.groups");
            if (groups.empty()) throw ConfigError("cg.kind = center_of_mass requires cg.groups");
            s.phase = make_center_of_mass_map(m.masses, groups, m.space_dim);
        }
        n_cg = s.phase->n_cg();
        cg_dim = s.phase->cg_dof();
    }
    else
    {
        const int n = s.sde->dim();
        if (kind == "identity")
        {
            std::vector<int> all(static_cast<std::size_t>(n));
            std::iota(all.begin(), all.end(), 0);
            s.map = make_projection_map(n, all);
        }
        else if (kind == "projection")
        {
            if (kept.empty()) throw ConfigError("cg.kind = projection requires cg.indices");
            s.map = make_projection_map(n, kept);
        }
        else
        {
            throw ConfigError("cg.kind = center_of_mass requires a Langevin model");
        }
        cg_dim = s.map->cg_dim();
        n_cg = cg_dim;
    }
    s.family = std::make_shared<ParametricDriftFamily>(make_family(cfg.get("basis", "linear"), cg_dim, n_cg, space_dim));
    s.friction = parse_friction_option(cfg.get("friction", "a"));
    s.scheme = parse_scheme(cfg.get("scheme", "euler_maruyama"));

    s.options.h = cfg.get_double("h", 1e-3);
    s.options.steps = static_cast<std::size_t>(cfg.get_int("steps", 1000));
    if (cfg.has("burn_in")) s.options.burn_in = static_cast<std::size_t>(cfg.get_int("burn_in", 0));
    s.options.record_stride = static_cast<std::size_t>(cfg.get_int("stride", 1));
    s.options.bbk_convention =
        cfg.get("bbk.convention", "standard") == "standard" ? BbkConvention::standard : BbkConvention::flipped_force;
    s.replicas = static_cast<std::size_t>(cfg.get_int("replicas", 1));

    const auto x0 = cfg.get_list("x0");
    const int n = s.state_dim();
    if (x0.empty())
        s.x0 = Vector::Zero(n);
    else if (x0.size() == 1)
        s.x0 = Vector::Constant(n, x0.front());
    else if (static_cast<int>(x0.size()) == n)
        s.x0 = Eigen::Map<const Vector>(x0.data(), n);
    else
        throw ConfigError("x0 must have 1 or " + std::to_string(n) + " entries");
    return s;
}

std::string cmd_simulate(const RunConfig& config)
{
    const RunSetup s = build_setup(config);
    ensure_output(config);
    const RngSpec rng{config.seed()};
    const Ensemble e = s.is_langevin()
                           ? simulate_ensemble(*s.langevin, s.scheme, fixed_initial(s.x0), s.options, s.replicas, rng)
                           : simulate_ensemble(*s.sde, fixed_initial(s.x0), s.options, s.replicas, rng);
    const std::string path = (std::filesystem::path(output_dir(config)) / "trajectory.csv").string();
    write_ensemble_csv(path, e);
    std::ostringstream body;
    body << "command=simulate model=" << s.model_name << " scheme=" << to_string(s.is_langevin() ? s.scheme : Scheme::euler_maruyama)
         << " replicas=" << e.size() << " length=" << e.length() << " step=" << format_double(e.step())
         << " file=" << path << "\n";
    return write_report(config, body.str());
}

std::string cmd_project(const RunConfig& config)
{
    const RunSetup s = build_setup(config);
    const Ensemble e = load_input(config, s);
    ensure_output(config);
    const CGMap map = s.state_map();
    const Ensemble p = project_ensemble(e, map.matrix());
    const std::string path = (std::filesystem::path(output_dir(config)) / "projected.csv").string();
    write_ensemble_csv(path, p);
    std::ostringstream body;
    body << "command=project kind=" << to_string(map.kind()) << " m=" << map.cg_dim() << " n=" << map.dim()
         << " right_inverse_error=" << format_double(map.right_inverse_error()) << " file=" << path << "\n";
    return write_report(config, body.str());
}

std::string cmd_fit(const RunConfig& config, const std::string& mode)
{
    const RunSetup s = build_setup(config);
    const Ensemble e = load_input(config, s);
    ensure_output(config);
    FitResult r;
    if (mode == "fm" || mode == "rer")
    {
        FitProblem fp = stationary_problem(s, e.pooled_states());
        if (mode == "fm")
        {
            r = solve_least_squares(fp.problem, "force_matching");
        }
        else
        {
            Objective obj;
            if (s.is_langevin())
                obj = make_ls_objective(fp.problem);
            else
                obj = make_rer_objective(*fp.samples, s.sde->drift_field(), *s.family, ReconstructionSpec{*s.map, {}},
                                         WeightedNorm::xi(s.sde->constant_diffusion()));
            DescentOptions opts;
            opts.grad_tol = 1e-12;
            r = fit_descent(obj, Vector::Zero(s.family->size()), opts);
            const Estimate at = evaluate_ls_objective(fp.problem, r.theta);
            r.objective = at.mean;
            r.objective_se = at.se;
            r.method = "rer_descent";
        }
    }
    else if (mode == "re_finite")
    {
        if (s.is_langevin())
        {
            LangevinFitContext ctx{&*s.langevin, &*s.phase, s.family.get(), s.friction};
            r = fit_re_finite_time(e, ctx);
        }
        else
        {
            r = fit_re_finite_time(e, *s.family, *s.map, s.sde->drift_field(),
                                   WeightedNorm::cg_xi(s.sde->constant_diffusion(), s.map->right_inverse()));
        }
    }
    else if (mode == "mle")
    {
        const CGMap map = s.state_map();
        const Ensemble p = project_ensemble(e, map.matrix());
        std::shared_ptr<const TransitionKernel> kernel;
        if (s.is_langevin())
        {
            if (s.scheme != Scheme::bbk) throw ConfigError("fit --mode mle on Langevin data requires scheme = bbk");
            const Matrix gbar = cg_friction(*s.langevin, *s.phase, s.friction);
            const CGDiffusion diff = cg_diffusion(s.langevin->noise, s.phase->mom.matrix());
            kernel = std::make_shared<BbkKernel>(*s.family, s.phase->cg_mass_diagonal(), gbar, diff.covariance, e.step(),
                                                 s.options.bbk_convention);
        }
        else
        {
            const CGDiffusion diff = cg_diffusion(s.sde->constant_diffusion(), s.map->matrix());
            kernel = std::make_shared<EulerKernel>(*s.family, diff.covariance, e.step());
        }
        r = fit_mle_discrete(p.trajectories, kernel);
    }
    else
    {
        throw ConfigError("fit mode must be fm, rer, re_finite or mle");
    }
    write_theta_csv(config, r, *s.family);
    std::ostringstream body;
    body << "command=fit mode=" << mode << "\n" << r.to_string() << "\n";
    if (!r.diagnostic.empty()) body << "diagnostic=" << r.diagnostic << "\n";
    return write_report(config, body.str());
}

std::string cmd_eval_rer(const RunConfig& config)
{
    const RunSetup s = build_setup(config);
    const Ensemble e = load_input(config, s);
    ensure_output(config);
    const auto tl = config.get_list("theta");
    if (static_cast<int>(tl.size()) != s.family->size())
        throw ConfigError("theta must have " + std::to_string(s.family->size()) + " entries");
    const Vector theta = Eigen::Map<const Vector>(tl.data(), static_cast<Eigen::Index>(tl.size()));
    const Matrix samples = e.pooled_states();
    RERReport rep;
    if (s.is_langevin())
    {
        const FitProblem fp = stationary_problem(s, samples);
        const Estimate est = evaluate_ls_objective(fp.problem, theta);
        rep = RERReport{est.mean, est.se, est.n, RERMode::stationary};
    }
    else
    {
        const VectorField bt =
            reconstruct_drift(s.sde->drift_field(), *s.family, theta, ReconstructionSpec{*s.map, {}});
        rep = rer_stationary(samples, s.sde->drift_field(), bt, WeightedNorm::xi(s.sde->constant_diffusion()));
    }
    std::ostringstream body;
    body << "command=eval-rer\n" << rep.to_string() << "\n";
    return write_report(config, body.str());
}

}  // namespace pathcg
