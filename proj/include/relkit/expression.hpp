#ifndef RELKIT_EXPRESSION_HPP
#define RELKIT_EXPRESSION_HPP

#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "relkit/interval.hpp"

namespace relkit {

using ParameterMap = std::map<std::string, double>;

/// Malformed or unevaluable relation/expression description.
class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public SpecError {
public:
    ParseError(const std::string& what, int column)
        : SpecError(what + " (column " + std::to_string(column) + ")"), column_(column) {}
    int column() const { return column_; }

private:
    int column_;
};

namespace detail {

template <class Scalar>
struct Arith {
    static Scalar constant(double v) { return Scalar(v); }
    static Scalar divide(const Scalar& a, const Scalar& b) {
        if (b == Scalar(0)) throw SpecError("division by zero");
        return a / b;
    }
    static Scalar power(const Scalar& a, int n) {
        Scalar r(1);
        for (int i = 0; i < n; ++i) r = r * a;
        return r;
    }
};

template <class S>
struct Arith<Interval<S>> {
    static Interval<S> constant(double v) { return Interval<S>::literal(static_cast<S>(v)); }
    static Interval<S> divide(const Interval<S>& a, const Interval<S>& b) {
        if (b.contains(S(0))) throw SpecError("divisor interval contains zero");
        return a / b;
    }
    static Interval<S> power(const Interval<S>& a, int n) { return pow(a, n); }
};

}  // namespace detail

/// Arithmetic expression in a vector variable x = (x1..xn) built from numeric
/// literals, named parameters, + - *, integer powers and division by a
/// constant subexpression. Immutable; copies share the tree.
class Expr {
public:
    enum class Kind { Literal, Parameter, Variable, Add, Sub, Mul, Div, Neg, Pow };

    struct Node {
        Kind kind = Kind::Literal;
        double value = 0.0;       // Literal
        std::string name;         // Parameter
        int index = 0;            // Variable component, or exponent for Pow
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };

    Expr() = default;
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    static Expr literal(double value);
    static Expr parameter(std::string name);
    static Expr variable(int component);

    /// Parses infix text. `x` is component 0; `x1`..`xn` are components 0..n-1;
    /// any other identifier is a parameter.
    static Expr parse(const std::string& text);

    const Node* root() const { return root_.get(); }
    bool valid() const { return static_cast<bool>(root_); }

    std::set<std::string> free_parameters() const;
    /// Largest variable component referenced, or -1 for a constant expression.
    int max_variable() const;

    /// Replaces bound parameters by literals; unbound ones stay symbolic.
    Expr bind(const ParameterMap& params) const;

    /// Value of a variable-free expression; throws SpecError if parameters remain.
    double constant_value() const;

    template <class Scalar>
    Scalar evaluate(std::span<const Scalar> x) const {
        if (!root_) throw SpecError("empty expression");
        return eval<Scalar>(*root_, x);
    }

    std::string to_string() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr pow(const Expr& a, int n);

private:
    template <class Scalar>
    static Scalar eval(const Node& node, std::span<const Scalar> x) {
        using A = detail::Arith<Scalar>;
        switch (node.kind) {
            case Kind::Literal: return A::constant(node.value);
            case Kind::Parameter: throw SpecError("unbound parameter '" + node.name + "'");
            case Kind::Variable:
                if (node.index >= static_cast<int>(x.size()))
                    throw SpecError("variable x" + std::to_string(node.index + 1) + " exceeds dimension " +
                                    std::to_string(x.size()));
                return x[static_cast<std::size_t>(node.index)];
            case Kind::Add: return eval<Scalar>(*node.lhs, x) + eval<Scalar>(*node.rhs, x);
            case Kind::Sub: return eval<Scalar>(*node.lhs, x) - eval<Scalar>(*node.rhs, x);
            case Kind::Mul: return eval<Scalar>(*node.lhs, x) * eval<Scalar>(*node.rhs, x);
            case Kind::Div: return A::divide(eval<Scalar>(*node.lhs, x), eval<Scalar>(*node.rhs, x));
            case Kind::Neg: return -eval<Scalar>(*node.lhs, x);
            case Kind::Pow: return A::power(eval<Scalar>(*node.lhs, x), node.index);
        }
        throw SpecError("unsupported expression node");
    }

    std::shared_ptr<const Node> root_;
};

}  // namespace relkit

#endif  // RELKIT_EXPRESSION_HPP
