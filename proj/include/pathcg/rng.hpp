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

#include <cstdint>
#include <random>

namespace pathcg
{
/// All randomness of a run flows from one master seed; replica r draws from
/// its own stream derived from (master_seed, r) and nothing else.
struct RngSpec
{
    std::uint64_t master_seed = 0;
};

/// Independent standard-normal stream for one replica.
class GaussianStream
{
public:
    GaussianStream(RngSpec spec, std::uint64_t stream);

    double next() { return normal_(engine_); }

    /// Vector of i.i.d. N(0, variance) draws.
    Vector draw(Eigen::Index n, double variance = 1.0);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace pathcg
