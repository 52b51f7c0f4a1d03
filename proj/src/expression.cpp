#include "relkit/expression.hpp"

#include <cctype>
#include <cstdlib>

#include <fmt/format.h>

namespace relkit {

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Expr::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

int max_variable_of(const Node* n) {
    if (!n) return -1;
    if (n->kind == Expr::Kind::Variable) return n->index;
    return std::max(max_variable_of(n->lhs.get()), max_variable_of(n->rhs.get()));
}

NodePtr checked_div(NodePtr lhs, NodePtr rhs) {
    if (max_variable_of(rhs.get()) >= 0) throw SpecError("divisor must not depend on x");
    return make(Expr::Kind::Div, std::move(lhs), std::move(rhs));
}

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr parse() {
        NodePtr e = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, static_cast<int>(pos_) + 1); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Expr::Kind::Add, lhs, term());
            else if (accept('-')) lhs = make(Expr::Kind::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Expr::Kind::Mul, lhs, unary());
            } else if (accept('/')) {
                const std::size_t at = pos_;
                NodePtr rhs = unary();
                if (max_variable_of(rhs.get()) >= 0) {
                    pos_ = at;
                    fail("divisor must not depend on x");
                }
                lhs = make(Expr::Kind::Div, lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Expr::Kind::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (!accept('^')) return base;
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) fail("exponent must be a nonnegative integer literal");
        auto n = std::make_shared<Node>();
        n->kind = Expr::Kind::Pow;
        n->index = std::stoi(text_.substr(start, pos_ - start));
        n->lhs = std::move(base);
        return n;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expression();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        auto n = std::make_shared<Node>();
        n->kind = Expr::Kind::Literal;
        n->value = v;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        auto n = std::make_shared<Node>();
        if (name == "x") {
            n->kind = Expr::Kind::Variable;
            n->index = 0;
        } else if (name.size() > 1 && name[0] == 'x' &&
                   name.find_first_not_of("0123456789", 1) == std::string::npos) {
            const int k = std::stoi(name.substr(1));
            if (k < 1) {
                pos_ = start;
                fail("variable components are numbered from x1");
            }
            n->kind = Expr::Kind::Variable;
            n->index = k - 1;
        } else {
            n->kind = Expr::Kind::Parameter;
            n->name = name;
        }
        return n;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

void collect_parameters(const Node* n, std::set<std::string>& out) {
    if (!n) return;
    if (n->kind == Expr::Kind::Parameter) out.insert(n->name);
    collect_parameters(n->lhs.get(), out);
    collect_parameters(n->rhs.get(), out);
}

NodePtr bind_node(const NodePtr& n, const ParameterMap& params) {
    if (!n) return n;
    if (n->kind == Expr::Kind::Parameter) {
        auto it = params.find(n->name);
        if (it == params.end()) return n;
        auto lit = std::make_shared<Node>();
        lit->kind = Expr::Kind::Literal;
        lit->value = it->second;
        return lit;
    }
    NodePtr lhs = bind_node(n->lhs, params);
    NodePtr rhs = bind_node(n->rhs, params);
    if (lhs == n->lhs && rhs == n->rhs) return n;
    auto copy = std::make_shared<Node>(*n);
    copy->lhs = std::move(lhs);
    copy->rhs = std::move(rhs);
    return copy;
}

std::string render(const Node* n) {
    switch (n->kind) {
        case Expr::Kind::Literal: return fmt::format("{}", n->value);
        case Expr::Kind::Parameter: return n->name;
        case Expr::Kind::Variable: return fmt::format("x{}", n->index + 1);
        case Expr::Kind::Add: return "(" + render(n->lhs.get()) + " + " + render(n->rhs.get()) + ")";
        case Expr::Kind::Sub: return "(" + render(n->lhs.get()) + " - " + render(n->rhs.get()) + ")";
        case Expr::Kind::Mul: return "(" + render(n->lhs.get()) + " * " + render(n->rhs.get()) + ")";
        case Expr::Kind::Div: return "(" + render(n->lhs.get()) + " / " + render(n->rhs.get()) + ")";
        case Expr::Kind::Neg: return "(-" + render(n->lhs.get()) + ")";
        case Expr::Kind::Pow: return render(n->lhs.get()) + fmt::format("^{}", n->index);
    }
    return "?";
}

}  // namespace

Expr Expr::literal(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Literal;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::parameter(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Parameter;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr Expr::variable(int component) {
    if (component < 0) throw SpecError("negative variable component");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->index = component;
    return Expr(std::move(n));
}

Expr Expr::parse(const std::string& text) { return Expr(Parser(text).parse()); }

std::set<std::string> Expr::free_parameters() const {
    std::set<std::string> out;
    collect_parameters(root_.get(), out);
    return out;
}

int Expr::max_variable() const { return max_variable_of(root_.get()); }

Expr Expr::bind(const ParameterMap& params) const { return Expr(bind_node(root_, params)); }

double Expr::constant_value() const {
    if (max_variable() >= 0) throw SpecError("expression depends on x: " + to_string());
    return evaluate<double>(std::span<const double>{});
}

std::string Expr::to_string() const { return root_ ? render(root_.get()) : std::string{}; }

Expr operator+(const Expr& a, const Expr& b) { return Expr(make(Expr::Kind::Add, a.root_, b.root_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(make(Expr::Kind::Sub, a.root_, b.root_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(make(Expr::Kind::Mul, a.root_, b.root_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(checked_div(a.root_, b.root_)); }
Expr operator-(const Expr& a) { return Expr(make(Expr::Kind::Neg, a.root_)); }

Expr pow(const Expr& a, int n) {
    if (n < 0) throw SpecError("negative exponent");
    auto node = std::make_shared<Node>();
    node->kind = Expr::Kind::Pow;
    node->index = n;
    node->lhs = a.root_;
    return Expr(std::move(node));
}

}  // namespace relkit
