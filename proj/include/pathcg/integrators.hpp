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
#include "pathcg/model.hpp"
#include "pathcg/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pathcg
{
enum class Scheme
{
    euler_maruyama,
    bbk,
};

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);

/// Sign convention of the force half-kicks in the BBK splitting. `standard`
/// kicks with +F h/2 (consistent with dp = F dt - ...); `flipped_force`
/// flips the sign of both force half-kicks (-F h/2).
enum class BbkConvention
{
    standard,
    flipped_force,
};

/// Uniformly sampled path. Column i of `states` is the state at time i*step.
struct Trajectory
{
    int dim = 0;
    double step = 0.0;
    Matrix states;
    std::uint64_t seed = 0;
    std::uint64_t replica = 0;
    std::string scheme;

    Eigen::Index length() const { return states.cols(); }
    double time(Eigen::Index i) const { return static_cast<double>(i) * step; }
    double horizon() const { return static_cast<double>(length() - 1) * step; }

    void validate() const;
};

/// M replicas sharing dimension, step and length.
struct Ensemble
{
    std::vector<Trajectory> trajectories;

    std::size_t size() const { return trajectories.size(); }
    int dim() const;
    double step() const;
    Eigen::Index length() const;

    void validate() const;

    /// All states of all replicas as columns, replica-major.
    Matrix pooled_states() const;
};

/// Non-finite state produced during integration.
class BlowUpError : public NumericalError
{
public:
    BlowUpError(std::size_t step, std::uint64_t replica);

    std::size_t step() const { return step_; }
    std::uint64_t replica() const { return replica_; }

private:
    std::size_t step_;
    std::uint64_t replica_;
};

struct SimulationOptions
{
    double h = 1e-3;
    std::size_t steps = 1000;
    /// Steps discarded before recording; defaults to 10% of `steps`.
    std::optional<std::size_t> burn_in;
    /// Record every stride-th state; the trajectory step becomes h * stride.
    std::size_t record_stride = 1;
    BbkConvention bbk_convention = BbkConvention::standard;

    std::size_t effective_burn_in() const { return burn_in.value_or(steps / 10); }
};

/// Draws an initial condition from the replica's own stream.
using InitialSampler = std::function<Vector(GaussianStream&)>;

/// Sampler that ignores the stream and always returns x0.
InitialSampler fixed_initial(Vector x0);

/// x + b(x) h + sigma(x) dW, with dW ~ N(0, h I_k) supplied by the caller.
Vector euler_maruyama_step(const SDEModel& model, const Vector& x, double h, const Vector& dW);

/// One BBK step: explicit half kick with friction, drift, implicit half kick.
/// dW1, dW2 ~ N(0, h/2 I) are supplied by the caller.
std::pair<Vector, Vector> bbk_step(const LangevinModel& model, const Vector& q, const Vector& p, double h,
                                   const Vector& dW1, const Vector& dW2,
                                   BbkConvention convention = BbkConvention::standard);

/// Euler-Maruyama trajectory of a general SDE.
Trajectory simulate_trajectory(const SDEModel& model, const Vector& x0, const SimulationOptions& options,
                               RngSpec rng, std::uint64_t replica = 0);

/// Langevin trajectory on x = (q, p) with either scheme.
Trajectory simulate_trajectory(const LangevinModel& model, Scheme scheme, const Vector& x0,
                               const SimulationOptions& options, RngSpec rng, std::uint64_t replica = 0);

/// M independent replicas; replica r depends on (master_seed, r) only.
/// Replicas run on up to worker_count() threads.
Ensemble simulate_ensemble(const SDEModel& model, const InitialSampler& x0_sampler,
                           const SimulationOptions& options, std::size_t replicas, RngSpec rng);

Ensemble simulate_ensemble(const LangevinModel& model, Scheme scheme, const InitialSampler& x0_sampler,
                           const SimulationOptions& options, std::size_t replicas, RngSpec rng);

/// noise_dim x steps matrix of N(0, h) increments.
Matrix brownian_increments(int noise_dim, double h, std::size_t steps, GaussianStream& stream);

/// Sums consecutive groups of `factor` increments (same Brownian path, step factor*h).
Matrix coarsen_increments(const Matrix& increments, int factor);

/// Euler-Maruyama driven by prescribed increments; records every stride-th state.
Trajectory euler_maruyama_path(const SDEModel& model, const Vector& x0, double h, const Matrix& increments,
                               std::size_t record_stride = 1);

/// Worker threads for replica-parallel work, capped by PATHCG_THREADS.
unsigned worker_count();

}  // namespace pathcg
