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

#include "pathcg/integrators.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace pathcg
{
std::string to_string(Scheme scheme)
{
    switch (scheme)
    {
        case Scheme::euler_maruyama: return "euler_maruyama";
        case Scheme::bbk: return "bbk";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& name)
{
    if (name == "euler_maruyama" || name == "euler") return Scheme::euler_maruyama;
    if (name == "bbk") return Scheme::bbk;
    throw ConfigError("unknown scheme '" + name + "' (expected euler_maruyama or bbk)");
}

void Trajectory::validate() const
{
    if (dim <= 0) throw DimensionError("Trajectory: dimension must be positive");
    require_dim(states.rows(), dim, "Trajectory states");
    if (states.cols() < 1) throw DimensionError("Trajectory: no states");
    if (!(step > 0.0)) throw DimensionError("Trajectory: step must be positive");
    if (!states.allFinite()) throw NumericalError("Trajectory: non-finite state");
}

int Ensemble::dim() const
{
    if (trajectories.empty()) throw DimensionError("Ensemble: empty");
    return trajectories.front().dim;
}

double Ensemble::step() const
{
    if (trajectories.empty()) throw DimensionError("Ensemble: empty");
    return trajectories.front().step;
}

Eigen::Index Ensemble::length() const
{
    if (trajectories.empty()) throw DimensionError("Ensemble: empty");
    return trajectories.front().length();
}

void Ensemble::validate() const
{
    if (trajectories.empty()) throw DimensionError("Ensemble: empty");
    for (const auto& t : trajectories)
    {
        t.validate();
        require_dim(t.dim, dim(), "Ensemble replica dimension");
        require_dim(t.length(), length(), "Ensemble replica length");
        if (t.step != step()) throw DimensionError("Ensemble: step mismatch across replicas");
    }
}

Matrix Ensemble::pooled_states() const
{
    validate();
    Matrix out(dim(), length() * static_cast<Eigen::Index>(size()));
    for (std::size_t r = 0; r < size(); ++r)
        out.middleCols(static_cast<Eigen::Index>(r) * length(), length()) = trajectories[r].states;
    return out;
}

BlowUpError::BlowUpError(std::size_t step, std::uint64_t replica)
    : NumericalError("integration blew up (non-finite state) at step " + std::to_string(step) + " of replica " +
                     std::to_string(replica)),
      step_(step),
      replica_(replica)
{
}

InitialSampler fixed_initial(Vector x0)
{
    return [x0 = std::move(x0)](GaussianStream&) { return x0; };
}

Vector euler_maruyama_step(const SDEModel& model, const Vector& x, double h, const Vector& dW)
{
    require_dim(dW.size(), model.noise_dim(), "euler_maruyama_step increment");
    Vector next = x + h * model.drift(x);
    if (model.noise_dim() > 0) next += model.diffusion(x) * dW;
    return next;
}

namespace
{
/// BBK with the implicit half-kick matrix factorized once.
class BbkStepper
{
public:
    BbkStepper(const LangevinModel& model, double h, BbkConvention convention)
        : model_(model),
          h_(h),
          sign_(convention == BbkConvention::standard ? 1.0 : -1.0),
          inv_mass_(model.inverse_mass_diagonal())
    {
        model.validate();
        if (!(h > 0.0)) throw NumericalError("BBK: step must be positive");
        friction_velocity_ = model.friction * inv_mass_.asDiagonal();
        const Matrix implicit = Matrix::Identity(model.dof(), model.dof()) + 0.5 * h * friction_velocity_;
        lu_ = Eigen::FullPivLU<Matrix>(implicit);
        if (!lu_.isInvertible() || lu_.rcond() < 1e-14)
            throw NumericalError("BBK: implicit friction matrix (I + gamma M^-1 h/2) is singular");
    }

    void step(Vector& q, Vector& p, const Vector& dW1, const Vector& dW2) const
    {
        const double half = 0.5 * h_;
        const Vector f0 = model_.force(q);
        require_dim(f0.size(), model_.dof(), "Langevin force output");
        const Vector p_half = p + sign_ * half * f0 - half * (friction_velocity_ * p) + model_.noise * dW1;
        q += h_ * inv_mass_.cwiseProduct(p_half);
        const Vector f1 = model_.force(q);
        p = lu_.solve(p_half + sign_ * half * f1 + model_.noise * dW2);
    }

private:
    const LangevinModel& model_;
    double h_;
    double sign_;
    Vector inv_mass_;
    Matrix friction_velocity_;
    Eigen::FullPivLU<Matrix> lu_;
};

std::size_t recorded_length(const SimulationOptions& options)
{
    if (options.record_stride == 0) throw DimensionError("record_stride must be positive");
    return options.steps / options.record_stride + 1;
}

void check_options(const SimulationOptions& options)
{
    if (!(options.h > 0.0)) throw NumericalError("simulation step h must be positive");
    recorded_length(options);
}

template <typename Advance>
Trajectory run(int dim, const Vector& x0, const SimulationOptions& options, RngSpec rng, std::uint64_t replica,
               const std::string& scheme, GaussianStream& stream, Advance&& advance)
{
    check_options(options);
    require_dim(x0.size(), dim, "initial state");
    Trajectory traj;
    traj.dim = dim;
    traj.step = options.h * static_cast<double>(options.record_stride);
    traj.seed = rng.master_seed;
    traj.replica = replica;
    traj.scheme = scheme;
    traj.states.resize(dim, static_cast<Eigen::Index>(recorded_length(options)));

    Vector x = x0;
    const std::size_t burn = options.effective_burn_in();
    std::size_t global = 0;
    for (std::size_t i = 0; i < burn; ++i, ++global)
    {
        advance(x, stream);
        if (!x.allFinite()) throw BlowUpError(global + 1, replica);
    }
    traj.states.col(0) = x;
    for (std::size_t i = 1; i <= options.steps; ++i, ++global)
    {
        advance(x, stream);
        if (!x.allFinite()) throw BlowUpError(global + 1, replica);
        if (i % options.record_stride == 0)
            traj.states.col(static_cast<Eigen::Index>(i / options.record_stride)) = x;
    }
    return traj;
}

Trajectory simulate_with_stream(const SDEModel& model, const Vector& x0, const SimulationOptions& options,
                                RngSpec rng, std::uint64_t replica, GaussianStream& stream)
{
    model.check_state(x0);
    const double h = options.h;
    const int k = model.noise_dim();
    return run(model.dim(), x0, options, rng, replica, to_string(Scheme::euler_maruyama), stream,
               [&](Vector& x, GaussianStream& s) { x = euler_maruyama_step(model, x, h, s.draw(k, h)); });
}

Trajectory simulate_with_stream(const LangevinModel& model, Scheme scheme, const Vector& x0,
                                const SimulationOptions& options, RngSpec rng, std::uint64_t replica,
                                GaussianStream& stream)
{
    if (scheme == Scheme::euler_maruyama)
    {
        Trajectory t = simulate_with_stream(make_langevin_sde(model), x0, options, rng, replica, stream);
        return t;
    }
    const int dof = model.dof();
    require_dim(x0.size(), 2 * dof, "Langevin initial state");
    BbkStepper stepper(model, options.h, options.bbk_convention);
    const double half = 0.5 * options.h;
    Vector q(dof), p(dof);
    return run(2 * dof, x0, options, rng, replica, to_string(Scheme::bbk), stream,
               [&](Vector& x, GaussianStream& s) {
                   q = x.head(dof);
                   p = x.tail(dof);
                   const Vector dW1 = s.draw(dof, half);
                   const Vector dW2 = s.draw(dof, half);
                   stepper.step(q, p, dW1, dW2);
                   x.head(dof) = q;
                   x.tail(dof) = p;
               });
}

template <typename Simulate>
Ensemble parallel_replicas(std::size_t replicas, Simulate&& simulate)
{
    if (replicas == 0) throw DimensionError("ensemble needs at least one replica");
    Ensemble ens;
    ens.trajectories.resize(replicas);
    std::vector<std::exception_ptr> errors(replicas);
    const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(replicas));
    auto work = [&](unsigned w) {
        for (std::size_t r = w; r < replicas; r += workers)
        {
            try
            {
                ens.trajectories[r] = simulate(static_cast<std::uint64_t>(r));
            }
            catch (...)
            {
                errors[r] = std::current_exception();
            }
        }
    };
    if (workers <= 1)
    {
        work(0);
    }
    else
    {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return ens;
}

}  // namespace

std::pair<Vector, Vector> bbk_step(const LangevinModel& model, const Vector& q, const Vector& p, double h,
                                   const Vector& dW1, const Vector& dW2, BbkConvention convention)
{
    require_dim(q.size(), model.dof(), "bbk_step q");
    require_dim(p.size(), model.dof(), "bbk_step p");
    require_dim(dW1.size(), model.dof(), "bbk_step dW1");
    require_dim(dW2.size(), model.dof(), "bbk_step dW2");
    BbkStepper stepper(model, h, convention);
    Vector q1 = q, p1 = p;
    stepper.step(q1, p1, dW1, dW2);
    return {q1, p1};
}

Trajectory simulate_trajectory(const SDEModel& model, const Vector& x0, const SimulationOptions& options,
                               RngSpec rng, std::uint64_t replica)
{
    GaussianStream stream(rng, replica);
    return simulate_with_stream(model, x0, options, rng, replica, stream);
}

Trajectory simulate_trajectory(const LangevinModel& model, Scheme scheme, const Vector& x0,
                               const SimulationOptions& options, RngSpec rng, std::uint64_t replica)
{
    GaussianStream stream(rng, replica);
    return simulate_with_stream(model, scheme, x0, options, rng, replica, stream);
}

Ensemble simulate_ensemble(const SDEModel& model, const InitialSampler& x0_sampler,
                           const SimulationOptions& options, std::size_t replicas, RngSpec rng)
{
    check_options(options);
    return parallel_replicas(replicas, [&](std::uint64_t r) {
        GaussianStream stream(rng, r);
        const Vector x0 = x0_sampler(stream);
        return simulate_with_stream(model, x0, options, rng, r, stream);
    });
}

Ensemble simulate_ensemble(const LangevinModel& model, Scheme scheme, const InitialSampler& x0_sampler,
                           const SimulationOptions& options, std::size_t replicas, RngSpec rng)
{
    check_options(options);
    model.validate();
    return parallel_replicas(replicas, [&](std::uint64_t r) {
        GaussianStream stream(rng, r);
        const Vector x0 = x0_sampler(stream);
        return simulate_with_stream(model, scheme, x0, options, rng, r, stream);
    });
}

Matrix brownian_increments(int noise_dim, double h, std::size_t steps, GaussianStream& stream)
{
    Matrix dW(noise_dim, static_cast<Eigen::Index>(steps));
    const double scale = std::sqrt(h);
    for (Eigen::Index j = 0; j < dW.cols(); ++j)
        for (Eigen::Index i = 0; i < dW.rows(); ++i) dW(i, j) = scale * stream.next();
    return dW;
}

Matrix coarsen_increments(const Matrix& increments, int factor)
{
    if (factor <= 0 || increments.cols() % factor != 0)
        throw DimensionError("coarsen_increments: step count must be divisible by the factor");
    Matrix out(increments.rows(), increments.cols() / factor);
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        out.col(j) = increments.middleCols(j * factor, factor).rowwise().sum();
    return out;
}

Trajectory euler_maruyama_path(const SDEModel& model, const Vector& x0, double h, const Matrix& increments,
                               std::size_t record_stride)
{
    require_dim(increments.rows(), model.noise_dim(), "euler_maruyama_path increments");
    SimulationOptions options;
    options.h = h;
    options.steps = static_cast<std::size_t>(increments.cols());
    options.burn_in = 0;
    options.record_stride = record_stride;
    model.check_state(x0);
    GaussianStream unused(RngSpec{}, 0);
    Eigen::Index column = 0;
    return run(model.dim(), x0, options, RngSpec{}, 0, to_string(Scheme::euler_maruyama), unused,
               [&](Vector& x, GaussianStream&) {
                   x = euler_maruyama_step(model, x, h, increments.col(column));
                   ++column;
               });
}

unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PATHCG_THREADS"))
    {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

}  // namespace pathcg
