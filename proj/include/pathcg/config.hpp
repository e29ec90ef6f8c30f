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
#include <map>
#include <string>
#include <vector>

namespace pathcg
{
/// Flat `key = value` run configuration with `#` comments and dotted keys.
/// Unknown keys are rejected; values are validated on parse.
class RunConfig
{
public:
    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::string& path);

    /// Keys in sorted order, one `key = value` line each.
    std::string serialize() const;

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value);

    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    /// Comma-separated numbers.
    std::vector<double> get_list(const std::string& key) const;
    /// Rows separated by ';', entries by ','. A single number is a 1x1 matrix.
    Matrix get_matrix(const std::string& key) const;
    /// ';'-separated groups of ','-separated 1-based indices, returned 0-based.
    std::vector<std::vector<int>> get_groups(const std::string& key) const;

    std::uint64_t seed() const;
    /// FNV-1a over serialize().
    std::uint64_t hash() const;

    const std::map<std::string, std::string>& values() const { return values_; }
    bool operator==(const RunConfig& other) const { return values_ == other.values_; }

    static const std::vector<std::string>& known_keys();

private:
    void validate() const;
    std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(const std::string& text);

}  // namespace pathcg
