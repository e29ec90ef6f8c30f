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

#include "pathcg/trajectory_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>

namespace pathcg
{
std::string format_double(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& token)
{
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    while (first < last && *first == ' ') ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) throw ConfigError("not a number: '" + token + "'");
    return value;
}

namespace
{
std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::uint64_t parse_u64(const std::string& token)
{
    std::uint64_t value = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw ConfigError("not a non-negative integer: '" + token + "'");
    return value;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return in;
}
}  // namespace

void write_ensemble_csv(std::ostream& out, const Ensemble& ensemble)
{
    ensemble.validate();
    const auto& first = ensemble.trajectories.front();
    out << "# dim=" << first.dim << " step=" << format_double(first.step) << " seed=" << first.seed
        << " scheme=" << (first.scheme.empty() ? "unknown" : first.scheme) << '\n';
    out << "replica,step,t";
    for (int i = 1; i <= first.dim; ++i) out << ",x_" << i;
    out << '\n';
    for (const auto& traj : ensemble.trajectories)
    {
        for (Eigen::Index j = 0; j < traj.length(); ++j)
        {
            out << traj.replica << ',' << j << ',' << format_double(traj.time(j));
            for (Eigen::Index i = 0; i < traj.dim; ++i) out << ',' << format_double(traj.states(i, j));
            out << '\n';
        }
    }
}

void write_ensemble_csv(const std::string& path, const Ensemble& ensemble)
{
    auto out = open_out(path);
    write_ensemble_csv(out, ensemble);
    if (!out) throw Error("write failed: '" + path + "'");
}

Ensemble read_ensemble_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw ConfigError("ensemble CSV: missing metadata line");
    std::map<std::string, std::string> meta;
    for (const auto& item : split(line.substr(2), ' '))
    {
        const auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        meta[item.substr(0, eq)] = item.substr(eq + 1);
    }
    for (const char* key : {"dim", "step", "seed", "scheme"})
        if (!meta.count(key)) throw ConfigError(std::string("ensemble CSV: metadata lacks ") + key);
    const int dim = static_cast<int>(parse_u64(meta["dim"]));
    const double step = parse_double(meta["step"]);
    const std::uint64_t seed = parse_u64(meta["seed"]);

    if (!std::getline(in, line)) throw ConfigError("ensemble CSV: missing header");
    if (static_cast<int>(split(line, ',').size()) != dim + 3) throw ConfigError("ensemble CSV: header width mismatch");

    std::map<std::uint64_t, std::vector<Vector>> rows;
    std::vector<std::uint64_t> order;
    while (std::getline(in, line))
    {
        if (line.empty() || line == "\r") continue;
        const auto fields = split(line, ',');
        if (static_cast<int>(fields.size()) != dim + 3) throw ConfigError("ensemble CSV: row width mismatch");
        const std::uint64_t replica = parse_u64(fields[0]);
        auto& states = rows[replica];
        if (states.empty()) order.push_back(replica);
        if (parse_u64(fields[1]) != states.size()) throw ConfigError("ensemble CSV: steps out of order");
        Vector x(dim);
        for (int i = 0; i < dim; ++i) x(i) = parse_double(fields[3 + i]);
        states.push_back(std::move(x));
    }
    Ensemble ens;
    for (auto r : order)
    {
        Trajectory t;
        t.dim = dim;
        t.step = step;
        t.seed = seed;
        t.replica = r;
        t.scheme = meta["scheme"];
        const auto& states = rows[r];
        t.states.resize(dim, static_cast<Eigen::Index>(states.size()));
        for (std::size_t j = 0; j < states.size(); ++j) t.states.col(static_cast<Eigen::Index>(j)) = states[j];
        ens.trajectories.push_back(std::move(t));
    }
    ens.validate();
    return ens;
}

Ensemble read_ensemble_csv(const std::string& path)
{
    auto in = open_in(path);
    return read_ensemble_csv(in);
}

void write_matrix_csv(std::ostream& out, const Matrix& matrix, const std::string& kind)
{
    out << matrix.rows() << ',' << matrix.cols() << ',' << kind << '\n';
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) out << (j ? "," : "") << format_double(matrix(i, j));
        out << '\n';
    }
}

Matrix read_matrix_csv(std::istream& in, std::string* kind)
{
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("matrix CSV: missing header");
    const auto head = split(line, ',');
    if (head.size() != 3) throw ConfigError("matrix CSV: header must be m,n,kind");
    const auto m = static_cast<Eigen::Index>(parse_u64(head[0]));
    const auto n = static_cast<Eigen::Index>(parse_u64(head[1]));
    if (kind) *kind = head[2];
    Matrix out(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
    {
        if (!std::getline(in, line)) throw ConfigError("matrix CSV: too few rows");
        const auto fields = split(line, ',');
        if (static_cast<Eigen::Index>(fields.size()) != n) throw ConfigError("matrix CSV: row width mismatch");
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = parse_double(fields[j]);
    }
    return out;
}

}  // namespace pathcg
