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

#include "pathcg/config.hpp"

#include "pathcg/trajectory_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pathcg
{
namespace
{
std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_trim(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

long long parse_int(const std::string& key, const std::string& v)
{
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
    return out;
}

double parse_number(const std::string& key, const std::string& v)
{
    try
    {
        return parse_double(v);
    }
    catch (const ConfigError&)
    {
        throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
    }
}

bool one_of(const std::string& v, std::initializer_list<const char*> options)
{
    return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}
}  // namespace

const std::vector<std::string>& RunConfig::known_keys()
{
    static const std::vector<std::string> keys = {
        "model",         "model.a",      "model.sigma",  "model.particles", "model.space_dim", "model.mass",
        "model.spring",  "model.tether", "model.gamma",  "model.beta",      "model.force",     "model.drive",
        "scheme",        "h",            "steps",        "burn_in",         "stride",          "replicas",
        "seed",          "x0",           "cg.kind",      "cg.indices",      "cg.groups",       "basis",
        "friction",      "input",        "output",       "theta",           "bbk.convention",
    };
    return keys;
}

RunConfig RunConfig::parse(const std::string& text)
{
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (cfg.has(key)) throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.set(key, value);
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string RunConfig::serialize() const
{
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

void RunConfig::set(const std::string& key, const std::string& value)
{
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown config key '" + key + "'");
    if (value.empty()) throw ConfigError("config key '" + key + "' has an empty value");
    if (value.find('\n') != std::string::npos || value.find('#') != std::string::npos)
        throw ConfigError("config key '" + key + "': value may not contain newlines or '#'");
    values_[key] = value;
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_number(key, it->second);
}

long long RunConfig::get_int(const std::string& key, long long fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_int(key, it->second);
}

std::vector<double> RunConfig::get_list(const std::string& key) const
{
    std::vector<double> out;
    const auto it = values_.find(key);
    if (it == values_.end()) return out;
    for (const auto& item : split_trim(it->second, ',')) out.push_back(parse_number(key, item));
    return out;
}

Matrix RunConfig::get_matrix(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    std::vector<std::vector<double>> rows;
    for (const auto& row : split_trim(it->second, ';'))
    {
        std::vector<double> r;
        for (const auto& item : split_trim(row, ',')) r.push_back(parse_number(key, item));
        if (!rows.empty() && r.size() != rows.front().size())
            throw ConfigError("config key '" + key + "': ragged matrix");
        rows.push_back(std::move(r));
    }
    if (rows.empty() || rows.front().empty()) throw ConfigError("config key '" + key + "': empty matrix");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

std::vector<std::vector<int>> RunConfig::get_groups(const std::string& key) const
{
    std::vector<std::vector<int>> out;
    const auto it = values_.find(key);
    if (it == values_.end()) return out;
    for (const auto& group : split_trim(it->second, ';'))
    {
        std::vector<int> g;
        for (const auto& item : split_trim(group, ','))
        {
            const long long v = parse_int(key, item);
            if (v < 1) throw ConfigError("config key '" + key + "': indices are 1-based");
            g.push_back(static_cast<int>(v - 1));
        }
        out.push_back(std::move(g));
    }
    return out;
}

std::uint64_t RunConfig::seed() const
{
    const long long s = get_int("seed", 0);
    if (s < 0) throw ConfigError("seed must be non-negative");
    return static_cast<std::uint64_t>(s);
}

std::uint64_t RunConfig::hash() const { return fnv1a64(serialize()); }

void RunConfig::validate() const
{
    const std::string model = get("model", "ou");
    if (!one_of(model, {"ou", "harmonic_chain", "driven_langevin", "expression"}))
        throw ConfigError("model must be ou, harmonic_chain, driven_langevin or expression, got '" + model + "'");
    if (model == "expression" && !has("model.force")) throw ConfigError("model = expression requires model.force");
    if (!one_of(get("scheme", "euler_maruyama"), {"euler_maruyama", "euler", "bbk"}))
        throw ConfigError("scheme must be euler_maruyama or bbk");
    if (model == "ou" && get("scheme", "euler_maruyama") == "bbk")
        throw ConfigError("scheme = bbk requires a Langevin model");
    if (!(get_double("h", 1e-3) > 0.0)) throw ConfigError("h must be positive");
    if (get_int("steps", 1000) < 1) throw ConfigError("steps must be at least 1");
    if (get_int("burn_in", 0) < 0) throw ConfigError("burn_in must be non-negative");
    if (get_int("stride", 1) < 1) throw ConfigError("stride must be at least 1");
    if (get_int("replicas", 1) < 1) throw ConfigError("replicas must be at least 1");
    seed();
    if (!one_of(get("cg.kind", "identity"), {"identity", "projection", "center_of_mass", "com"}))
        throw ConfigError("cg.kind must be identity, projection or center_of_mass");
    if (!one_of(get("basis", "linear"),
                {"linear", "linear_matrix", "affine", "cubic", "constant", "pairwise_springs", "pairwise_distance"}))
        throw ConfigError("unknown basis '" + get("basis", "") + "'");
    if (!one_of(get("friction", "a"), {"a", "b"})) throw ConfigError("friction must be a or b");
    if (!one_of(get("bbk.convention", "standard"), {"standard", "flipped_force"}))
        throw ConfigError("bbk.convention must be standard or flipped_force");
    for (const char* k : {"model.mass", "model.gamma", "model.beta"})
        if (has(k) && !(get_double(k, 1.0) > 0.0)) throw ConfigError(std::string(k) + " must be positive");
    for (const char* k : {"model.particles", "model.space_dim"})
        if (has(k) && get_int(k, 1) < 1) throw ConfigError(std::string(k) + " must be at least 1");
    if (has("model.a")) get_matrix("model.a");
    if (has("model.sigma")) get_matrix("model.sigma");
    get_list("x0");
    get_list("theta");
    get_groups("cg.indices");
    get_groups("cg.groups");
}

std::uint64_t fnv1a64(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace pathcg
