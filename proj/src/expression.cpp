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

#include "pathcg/expression.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <sstream>

namespace pathcg
{
namespace
{
using UnaryFn = double (*)(double);

struct NamedFn
{
    const char* name;
    UnaryFn fn;
};

const std::array<NamedFn, 8> kFunctions{{
    {"sin", [](double x) { return std::sin(x); }},
    {"cos", [](double x) { return std::cos(x); }},
    {"tan", [](double x) { return std::tan(x); }},
    {"exp", [](double x) { return std::exp(x); }},
    {"log", [](double x) { return std::log(x); }},
    {"sqrt", [](double x) { return std::sqrt(x); }},
    {"tanh", [](double x) { return std::tanh(x); }},
    {"abs", [](double x) { return std::abs(x); }},
}};
}  // namespace

/// Recursive descent: expr := term (('+'|'-') term)*, term := unary (('*'|'/') unary)*,
/// unary := '-' unary | power, power := atom ('^' unary)?.
class ExpressionParser
{
public:
    ExpressionParser(const std::string& text, const std::vector<std::string>& vars, Expression& out)
        : s_(text), vars_(vars), out_(out)
    {
    }

    void run()
    {
        expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
    }

private:
    using Op = Expression::Op;

    void emit(Op op, double value = 0.0, int index = 0)
    {
        out_.program_.push_back({op, value, index});
        if (op == Op::constant || op == Op::variable)
            ++depth_;
        else if (op != Op::neg && op != Op::call)
            --depth_;
        out_.max_stack_ = std::max(out_.max_stack_, depth_);
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        std::ostringstream m;
        m << "expression '" << s_ << "': " << what << " at position " << pos_;
        throw ConfigError(m.str());
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c)
        {
            ++pos_;
            return true;
        }
        return false;
    }

    void expr()
    {
        term();
        for (;;)
        {
            if (accept('+'))
            {
                term();
                emit(Op::add);
            }
            else if (accept('-'))
            {
                term();
                emit(Op::sub);
            }
            else
                return;
        }
    }

    void term()
    {
        unary();
        for (;;)
        {
            if (accept('*'))
            {
                unary();
                emit(Op::mul);
            }
            else if (accept('/'))
            {
                unary();
                emit(Op::div);
            }
            else
                return;
        }
    }

    void unary()
    {
        if (accept('-'))
        {
            unary();
            emit(Op::neg);
            return;
        }
        if (accept('+'))
        {
            unary();
            return;
        }
        power();
    }

    void power()
    {
        atom();
        if (accept('^'))
        {
            unary();
            emit(Op::pow);
        }
    }

    void atom()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (c == '(')
        {
            ++pos_;
            expr();
            if (!accept(')')) fail("missing ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
        {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            emit(Op::constant, v);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
        {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (accept('('))
            {
                for (std::size_t f = 0; f < kFunctions.size(); ++f)
                    if (name == kFunctions[f].name)
                    {
                        expr();
                        if (!accept(')')) fail("missing ')' after function argument");
                        emit(Op::call, 0.0, static_cast<int>(f));
                        return;
                    }
                fail("unknown function '" + name + "'");
            }
            if (name == "pi")
            {
                emit(Op::constant, std::numbers::pi);
                return;
            }
            for (std::size_t v = 0; v < vars_.size(); ++v)
                if (name == vars_[v])
                {
                    emit(Op::variable, 0.0, static_cast<int>(v));
                    return;
                }
            fail("unknown variable '" + name + "'");
        }
        fail(std::string("unexpected '") + c + "'");
    }

    const std::string& s_;
    const std::vector<std::string>& vars_;
    Expression& out_;
    std::size_t pos_ = 0;
    std::size_t depth_ = 0;
};

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables)
{
    Expression e;
    e.text_ = text;
    e.n_vars_ = variables.size();
    ExpressionParser(text, variables, e).run();
    return e;
}

double Expression::eval(std::span<const double> values) const
{
    if (values.size() < n_vars_) throw DimensionError("expression '" + text_ + "': too few variable values");
    double small[16] = {};
    std::unique_ptr<double[]> big;
    double* st = small;
    if (max_stack_ > 16)
    {
        big = std::make_unique<double[]>(max_stack_);
        st = big.get();
    }
    std::size_t top = 0;
    for (const auto& in : program_)
    {
        switch (in.op)
        {
            case Op::constant: st[top++] = in.value; break;
            case Op::variable: st[top++] = values[static_cast<std::size_t>(in.index)]; break;
            case Op::add: --top; st[top - 1] += st[top]; break;
            case Op::sub: --top; st[top - 1] -= st[top]; break;
            case Op::mul: --top; st[top - 1] *= st[top]; break;
            case Op::div: --top; st[top - 1] /= st[top]; break;
            case Op::pow: --top; st[top - 1] = std::pow(st[top - 1], st[top]); break;
            case Op::neg: st[top - 1] = -st[top - 1]; break;
            case Op::call: st[top - 1] = kFunctions[static_cast<std::size_t>(in.index)].fn(st[top - 1]); break;
        }
    }
    return st[0];
}

VectorField parse_force_field(const std::string& text, int dof)
{
    if (dof <= 0) throw ConfigError("force expression: dof must be positive");
    std::vector<std::string> vars;
    for (int i = 1; i <= dof; ++i) vars.push_back("q" + std::to_string(i));
    if (dof == 1) vars.emplace_back("q");
    std::vector<Expression> comps;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ';')) comps.push_back(Expression::parse(item, vars));
    if (static_cast<int>(comps.size()) != dof)
        throw ConfigError("force expression has " + std::to_string(comps.size()) + " components, expected " +
                          std::to_string(dof));
    return [comps, dof](const Vector& q) {
        require_dim(q.size(), dof, "force expression input");
        std::vector<double> vals(q.data(), q.data() + q.size());
        if (dof == 1) vals.push_back(q(0));
        Vector f(dof);
        for (int i = 0; i < dof; ++i) f(i) = comps[static_cast<std::size_t>(i)].eval(vals);
        return f;
    };
}

}  // namespace pathcg
