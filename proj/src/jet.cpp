#include "nijhydro/jet.hpp"

#include <cmath>

namespace nijhydro {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

Jet Jet::from_derivatives(const std::vector<double>& d) {
    if (d.empty()) throw InsufficientJetOrder("need at least the value");
    Jet j(static_cast<int>(d.size()) - 1);
    double fact = 1.0;
    for (size_t k = 0; k < d.size(); ++k) {
        if (k > 1) fact *= static_cast<double>(k);
        j.c_[k] = d[k] / fact;
    }
    return j;
}

double Jet::deriv(int k) const {
    if (k > order())
        throw InsufficientJetOrder("derivative order " + std::to_string(k) +
                                   " exceeds jet order " + std::to_string(order()));
    return c_[static_cast<size_t>(k)] * factorial(k);
}

Jet Jet::truncated(int order) const {
    Jet r(order);
    int m = std::min(order, this->order());
    for (int k = 0; k <= m; ++k) r.c_[static_cast<size_t>(k)] = c_[static_cast<size_t>(k)];
    return r;
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    if (o.order() != order()) throw InsufficientJetOrder("jet order mismatch in +");
    for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    if (o.order() != order()) throw InsufficientJetOrder("jet order mismatch in -");
    for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (auto& c : c_) c *= s;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    if (a.order() != b.order()) throw InsufficientJetOrder("jet order mismatch in *");
    Jet r(a.order());
    for (int k = 0; k <= a.order(); ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += a.coeff(j) * b.coeff(k - j);
        r.c_[static_cast<size_t>(k)] = s;
    }
    return r;
}

Jet Jet::reciprocal() const {
    if (value() == 0.0) throw EvaluationError("jet reciprocal at zero value");
    Jet r(order());
    r.c_[0] = 1.0 / c_[0];
    for (int k = 1; k <= order(); ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += c_[static_cast<size_t>(j)] * r.c_[static_cast<size_t>(k - j)];
        r.c_[static_cast<size_t>(k)] = -s / c_[0];
    }
    return r;
}

Jet Jet::derivative() const {
    if (order() == 0) throw InsufficientJetOrder("cannot differentiate an order-0 jet");
    Jet r(order() - 1);
    for (int k = 0; k < order(); ++k)
        r.c_[static_cast<size_t>(k)] = c_[static_cast<size_t>(k) + 1] * (k + 1);
    return r;
}

Jet Jet::compose(const Jet& outer, const Jet& inner) {
    const int m = inner.order();
    if (outer.order() < m)
        throw InsufficientJetOrder("outer jet order too low for composition");
    // delta = inner with the constant part removed; Horner in the truncated algebra.
    Jet delta = inner;
    delta.c_[0] = 0.0;
    Jet r = Jet::constant(outer.coeff(m), m);
    for (int k = m - 1; k >= 0; --k) {
        r = r * delta;
        r.c_[0] += outer.coeff(k);
    }
    return r;
}

namespace {

// Jet of an elementary function at g.value(), then composed with g.
template <typename Fn>
Jet lift(const Jet& g, Fn&& derivatives_at) {
    std::vector<double> d(static_cast<size_t>(g.order()) + 1);
    derivatives_at(g.value(), d);
    return Jet::compose(Jet::from_derivatives(d), g);
}

}  // namespace

Jet jet_exp(const Jet& g) {
    return lift(g, [](double x, std::vector<double>& d) {
        double e = std::exp(x);
        for (auto& v : d) v = e;
    });
}

Jet jet_log(const Jet& g) {
    return lift(g, [](double x, std::vector<double>& d) {
        if (x <= 0.0) throw EvaluationError("log of non-positive value");
        d[0] = std::log(x);
        double p = 1.0 / x;   // d^k log = (-1)^{k-1} (k-1)! x^{-k}
        double fact = 1.0;
        for (size_t k = 1; k < d.size(); ++k) {
            d[k] = fact * p;
            fact *= -static_cast<double>(k);
            p /= x;
        }
    });
}

Jet jet_sin(const Jet& g) {
    return lift(g, [](double x, std::vector<double>& d) {
        double s = std::sin(x), c = std::cos(x);
        const double cycle[4] = {s, c, -s, -c};
        for (size_t k = 0; k < d.size(); ++k) d[k] = cycle[k % 4];
    });
}

Jet jet_cos(const Jet& g) {
    return lift(g, [](double x, std::vector<double>& d) {
        double s = std::sin(x), c = std::cos(x);
        const double cycle[4] = {c, -s, -c, s};
        for (size_t k = 0; k < d.size(); ++k) d[k] = cycle[k % 4];
    });
}

Jet jet_sqrt(const Jet& g) { return jet_pow(g, 0.5); }

Jet jet_pow(const Jet& g, double p) {
    // Integer powers of arbitrary sign bases by repeated multiplication.
    if (p == std::floor(p) && std::abs(p) <= 64.0) {
        int n = static_cast<int>(p);
        Jet r = Jet::constant(1.0, g.order());
        Jet base = n < 0 ? g.reciprocal() : g;
        for (int i = 0; i < std::abs(n); ++i) r = r * base;
        return r;
    }
    return lift(g, [p](double x, std::vector<double>& d) {
        if (x <= 0.0) throw EvaluationError("non-integer power of non-positive value");
        double coef = 1.0, e = p;
        d[0] = std::pow(x, p);
        for (size_t k = 1; k < d.size(); ++k) {
            coef *= e;
            e -= 1.0;
            d[k] = coef * std::pow(x, p - static_cast<double>(k));
        }
    });
}

Func1 func_constant(double v) {
    return [v](double, int order) { return Jet::constant(v, order); };
}

Func1 func_identity() {
    return [](double x, int order) { return Jet::variable(x, order); };
}

Func1 func_polynomial(std::vector<double> coeffs) {
    return [coeffs](double x, int order) {
        Jet s = Jet::variable(x, order);
        Jet r = Jet::constant(0.0, order);
        for (size_t k = coeffs.size(); k-- > 0;) {
            r = r * s;
            r += coeffs[k];
        }
        return r;
    };
}

}  // namespace nijhydro
