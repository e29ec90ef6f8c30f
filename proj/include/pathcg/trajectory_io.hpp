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

#include "pathcg/integrators.hpp"

#include <iosfwd>
#include <string>

namespace pathcg
{
/// Shortest decimal form with 17 significant digits, round-trip exact.
std::string format_double(double value);

/// Strict parse of a full token; throws ConfigError on trailing garbage.
double parse_double(const std::string& token);

/// Ensemble as CSV: a `# dim=<n> step=<h> seed=<s> scheme=<name>` line, the
/// header `replica,step,t,x_1,...,x_n`, then one row per recorded state.
void write_ensemble_csv(std::ostream& out, const Ensemble& ensemble);
void write_ensemble_csv(const std::string& path, const Ensemble& ensemble);

Ensemble read_ensemble_csv(std::istream& in);
Ensemble read_ensemble_csv(const std::string& path);

/// Header `m,n,kind` followed by m comma-separated rows of the matrix.
void write_matrix_csv(std::ostream& out, const Matrix& matrix, const std::string& kind);
Matrix read_matrix_csv(std::istream& in, std::string* kind = nullptr);

}  // namespace pathcg
