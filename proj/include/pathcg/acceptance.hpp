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

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace pathcg
{
struct CriterionResult
{
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
};

struct AcceptanceOptions
{
    /// Perturbs the cached right inverse of the CG maps checked in criterion 8.
    bool inject_right_inverse_fault = false;
    /// Criteria to run; empty means all.
    std::set<int> only;
    std::uint64_t seed = 20260415;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// One line per criterion: `[PASS] 3 name (1.23 s): detail`.
std::string format_criterion(const CriterionResult& result);

}  // namespace pathcg
