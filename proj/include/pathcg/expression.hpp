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

#include <span>
#include <string>
#include <vector>

namespace pathcg
{
/// Arithmetic expression over named variables: numbers, + - * / ^, unary
/// minus, parentheses and the functions sin cos tan exp log sqrt tanh abs.
/// Compiled once to a postfix program.
class Expression
{
public:
    /// Throws ConfigError with the offending position on malformed input.
    static Expression parse(const std::string& text, const std::vector<std::string>& variables);

    double eval(std::span<const double> values) const;

    const std::string& text() const { return text_; }

private:
    enum class Op : unsigned char
    {
        constant,
        variable,
        add,
        sub,
        mul,
        div,
        pow,
        neg,
        call,
    };
    struct Instr
    {
        Op op;
        double value = 0.0;
        int index = 0;
    };

    std::string text_;
    std::vector<Instr> program_;
    std::size_t n_vars_ = 0;
    std::size_t max_stack_ = 0;

    friend class ExpressionParser;
};

/// Force field from ';'-separated component expressions in q1..qn (and q when
/// n = 1).
VectorField parse_force_field(const std::string& text, int dof);

}  // namespace pathcg
