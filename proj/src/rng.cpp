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

#include "pathcg/rng.hpp"

#include <cmath>

namespace pathcg
{
GaussianStream::GaussianStream(RngSpec spec, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(spec.master_seed), static_cast<std::uint32_t>(spec.master_seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    engine_.seed(seq);
}

Vector GaussianStream::draw(Eigen::Index n, double variance)
{
    const double scale = std::sqrt(variance);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * normal_(engine_);
    return v;
}

}  // namespace pathcg
