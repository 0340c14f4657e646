#include "nijhydro/expr.hpp"

#include <cctype>
#include <cmath>

namespace nijhydro {

namespace {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Exp, Log, Sin, Cos, Sqrt };

// Second-order multivariate forward AD value.
struct D2 {
    double v = 0.0;
    Vector g;
    Matrix H;

    static D2 constant(double c, int n) {
        D2 d;
        d.v = c;
        d.g = Vector::Zero(n);
        d.H = Matrix::Zero(n, n);
        return d;
    }
    static D2 variable(double x, int idx, int n) {
        D2 d = constant(x, n);
        d.g[idx] = 1.0;
        return d;
    }
};

D2 operator+(const D2& a, const D2& b) {
    D2 r = a;
    r.v += b.v;
    r.g += b.g;
    r.H += b.H;
    return r;
}
D2 operator-(const D2& a, const D2& b) {
    D2 r = a;
    r.v -= b.v;
    r.g -= b.g;
    r.H -= b.H;
    return r;
}
D2 operator-(const D2& a) {
    D2 r = a;
    r.v = -r.v;
    r.g = -r.g;
    r.H = -r.H;
    return r;
}
D2 operator*(const D2& a, const D2& b) {
    D2 r;
    r.v = a.v * b.v;
    r.g = a.g * b.v + b.g * a.v;
    r.H = a.H * b.v + b.H * a.v + a.g * b.g.transpose() + b.g * a.g.transpose();
    return r;
}
// chain rule for an outer scalar function with derivatives f, f', f''
D2 lift(const D2& a, double f, double fp, double fpp) {
    D2 r;
    r.v = f;
    r.g = fp * a.g;
    r.H = fp * a.H + fpp * a.g * a.g.transpose();
    return r;
}
D2 reciprocal(const D2& a) {
    if (a.v == 0.0) throw EvaluationError("division by zero in expression");
    return lift(a, 1.0 / a.v, -1.0 / (a.v * a.v), 2.0 / (a.v * a.v * a.v));
}
D2 operator/(const D2& a, const D2& b) { return a * reciprocal(b); }
D2 d2_pow(const D2& a, double p) {
    const bool integral = p == std::floor(p);
    if (!integral && a.v <= 0.0)
        throw EvaluationError("non-integer power of a non-positive base");
    if (integral && p < 0.0 && a.v == 0.0) throw EvaluationError("negative power of zero");
    const double f = std::pow(a.v, p);
    const double fp = p == 0.0 ? 0.0 : p * std::pow(a.v, p - 1);
    const double fpp = (p == 0.0 || p == 1.0) ? 0.0 : p * (p - 1) * std::pow(a.v, p - 2);
    return lift(a, f, fp, fpp);
}

}  // namespace

struct Expression::Node {
    Op op = Op::Const;
    double value = 0.0;      // Const / Pow exponent
    std::string name;        // Var
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct Parser {
    const std::string& s;
    size_t pos = 0;
    std::set<std::string>* vars;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw ConfigError("expression parse error at position " + std::to_string(pos) + ": " +
                          what + " in \"" + s + "\"");
    }

    NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
        auto n = std::make_shared<Expression::Node>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    NodePtr parse_expr() {
        NodePtr left = parse_term();
        while (true) {
            skip();
            if (eat('+'))
                left = make(Op::Add, left, parse_term());
            else if (eat('-'))
                left = make(Op::Sub, left, parse_term());
            else
                return left;
        }
    }
    NodePtr parse_term() {
        NodePtr left = parse_unary();
        while (true) {
            skip();
            if (eat('*'))
                left = make(Op::Mul, left, parse_unary());
            else if (eat('/'))
                left = make(Op::Div, left, parse_unary());
            else
                return left;
        }
    }
    // unary minus binds looser than '^': -s^2 = -(s^2)
    NodePtr parse_unary() {
        skip();
        if (eat('-')) return make(Op::Neg, parse_unary());
        return parse_power();
    }
    NodePtr parse_power() {
        NodePtr base = parse_primary();
        skip();
        if (eat('^')) {
            NodePtr exp = parse_unary();
            double c = 0.0;
            if (!fold_constant(exp, c)) fail("exponent must be a constant expression");
            auto n = std::make_shared<Expression::Node>();
            n->op = Op::Pow;
            n->value = c;
            n->a = base;
            return n;
        }
        return base;
    }
    NodePtr parse_primary() {
        skip();
        if (pos >= s.size()) fail("unexpected end of input");
        const char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s.substr(pos), &used);
            } catch (...) {
                fail("malformed number");
            }
            pos += used;
            auto n = std::make_shared<Expression::Node>();
            n->op = Op::Const;
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            std::string name = s.substr(start, pos - start);
            if (eat('(')) {
                Op op;
                if (name == "exp") op = Op::Exp;
                else if (name == "log") op = Op::Log;
                else if (name == "sin") op = Op::Sin;
                else if (name == "cos") op = Op::Cos;
                else if (name == "sqrt") op = Op::Sqrt;
                else fail("unknown function '" + name + "'");
                NodePtr arg = parse_expr();
                if (!eat(')')) fail("expected ')'");
                return make(op, arg);
            }
            vars->insert(name);
            auto n = std::make_shared<Expression::Node>();
            n->op = Op::Var;
            n->name = name;
            return n;
        }
        if (eat('(')) {
            NodePtr e = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    static bool fold_constant(const NodePtr& n, double& out) {
        switch (n->op) {
            case Op::Const: out = n->value; return true;
            case Op::Neg: {
                double a;
                if (!fold_constant(n->a, a)) return false;
                out = -a;
                return true;
            }
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div: {
                double a, b;
                if (!fold_constant(n->a, a) || !fold_constant(n->b, b)) return false;
                out = n->op == Op::Add ? a + b
                      : n->op == Op::Sub ? a - b
                      : n->op == Op::Mul ? a * b
                                         : a / b;
                return true;
            }
            default: return false;
        }
    }
};

template <typename T, typename VarFn>
T eval_node(const Expression::Node& n, const VarFn& var, int order_or_n) {
    switch (n.op) {
        case Op::Const:
            if constexpr (std::is_same_v<T, Jet>)
                return Jet::constant(n.value, order_or_n);
            else
                return D2::constant(n.value, order_or_n);
        case Op::Var: return var(n.name);
        case Op::Add: return eval_node<T>(*n.a, var, order_or_n) + eval_node<T>(*n.b, var, order_or_n);
        case Op::Sub: return eval_node<T>(*n.a, var, order_or_n) - eval_node<T>(*n.b, var, order_or_n);
        case Op::Mul: return eval_node<T>(*n.a, var, order_or_n) * eval_node<T>(*n.b, var, order_or_n);
        case Op::Div: return eval_node<T>(*n.a, var, order_or_n) / eval_node<T>(*n.b, var, order_or_n);
        case Op::Neg: return -eval_node<T>(*n.a, var, order_or_n);
        case Op::Pow: {
            T a = eval_node<T>(*n.a, var, order_or_n);
            if constexpr (std::is_same_v<T, Jet>)
                return jet_pow(a, n.value);
            else
                return d2_pow(a, n.value);
        }
        case Op::Exp: {
            T a = eval_node<T>(*n.a, var, order_or_n);
            if constexpr (std::is_same_v<T, Jet>)
                return jet_exp(a);
            else {
                const double e = std::exp(a.v);
                return lift(a, e, e, e);
            }
        }
        case Op::Log: {
            T a = eval_node<T>(*n.a, var, order_or_n);
            if constexpr (std::is_same_v<T, Jet>)
                return jet_log(a);
            else {
                if (a.v <= 0.0) throw EvaluationError("log of non-positive value");
                return lift(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
            }
        }
        case Op::Sin: {
            T a = eval_node<T>(*n.a, var, order_or_n);
            if constexpr (std::is_same_v<T, Jet>)
                return jet_sin(a);
            else
                return lift(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v));
        }
        case Op::Cos: {
            T a = eval_node<T>(*n.a, var, order_or_n);
            if constexpr (std::is_same_v<T, Jet>)
                return jet_cos(a);
            else
                return lift(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v));
        }
        case Op::Sqrt: {
            T a = eval_node<T>(*n.a, var, order_or_n);
            if constexpr (std::is_same_v<T, Jet>)
                return jet_sqrt(a);
            else {
                if (a.v <= 0.0) throw EvaluationError("sqrt of non-positive value");
                const double r = std::sqrt(a.v);
                return lift(a, r, 0.5 / r, -0.25 / (r * a.v));
            }
        }
    }
    throw EvaluationError("unreachable expression node");
}

}  // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    Parser p{text, 0, &e.vars_};
    e.root_ = p.parse_expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    return e;
}

Jet Expression::eval_jet(const std::string& var, double x, int order) const {
    for (const auto& v : vars_)
        if (v != var)
            throw ConfigError("expression uses variable '" + v + "' but only '" + var +
                              "' is available");
    return eval_node<Jet>(*root_, [&](const std::string&) { return Jet::variable(x, order); },
                          order);
}

Func1 Expression::as_func1(const std::string& var) const {
    Expression copy = *this;
    for (const auto& v : vars_)
        if (v != var)
            throw ConfigError("expression uses variable '" + v + "' but only '" + var +
                              "' is available");
    return [copy, var](double x, int order) { return copy.eval_jet(var, x, order); };
}

ScalarEval Expression::eval_multi(const Vector& u) const {
    const int n = static_cast<int>(u.size());
    for (const auto& v : vars_) {
        if (v.size() < 2 || v[0] != 'u')
            throw ConfigError("multivariate expressions use variables u1..un; got '" + v + "'");
        int idx = 0;
        try {
            idx = std::stoi(v.substr(1));
        } catch (...) {
            throw ConfigError("bad variable name '" + v + "'");
        }
        if (idx < 1 || idx > n)
            throw ConfigError("variable '" + v + "' out of range for dimension " +
                              std::to_string(n));
    }
    D2 r = eval_node<D2>(
        *root_,
        [&](const std::string& name) {
            const int idx = std::stoi(name.substr(1)) - 1;
            return D2::variable(u[idx], idx, n);
        },
        n);
    ScalarEval out;
    out.value = r.v;
    out.grad = r.g;
    out.hess = r.H;
    return out;
}

ScalarField Expression::as_scalar_field(int n) const {
    Expression copy = *this;
    return ScalarField(n, [copy](const Vector& u) { return copy.eval_multi(u); });
}

}  // namespace nijhydro
