#pragma once

#include <functional>
#include <vector>

#include "nijhydro/errors.hpp"

namespace nijhydro {

/// Truncated Taylor data of a one-variable function at a point: the value and
/// derivatives d^0..d^m, stored as Taylor coefficients c_k = f^(k)/k!.
/// Arithmetic follows the truncated power-series rules (Leibniz products,
/// composition realizes Faa di Bruno).
class Jet {
public:
    explicit Jet(int order) : c_(static_cast<size_t>(order) + 1, 0.0) {
        if (order < 0) throw InsufficientJetOrder("jet order must be >= 0");
    }

    static Jet constant(double v, int order) {
        Jet j(order);
        j.c_[0] = v;
        return j;
    }

    /// The identity function s -> s around base.
    static Jet variable(double base, int order) {
        Jet j(order);
        j.c_[0] = base;
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    /// Build from derivative values f, f', f'', ...
    static Jet from_derivatives(const std::vector<double>& d);

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double value() const { return c_[0]; }
    double deriv(int k) const;
    double coeff(int k) const { return k <= order() ? c_[static_cast<size_t>(k)] : 0.0; }
    double& coeff_ref(int k) { return c_[static_cast<size_t>(k)]; }

    Jet truncated(int order) const;

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator+=(double s) { c_[0] += s; return *this; }
    Jet& operator-=(double s) { c_[0] -= s; return *this; }
    Jet& operator*=(double s);

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator+(Jet a, double s) { a += s; return a; }
    friend Jet operator+(double s, Jet a) { a += s; return a; }
    friend Jet operator-(Jet a, double s) { a -= s; return a; }
    friend Jet operator-(double s, const Jet& a) { Jet r = -a; r += s; return r; }
    friend Jet operator*(Jet a, double s) { a *= s; return a; }
    friend Jet operator*(double s, Jet a) { a *= s; return a; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b) { return a * b.reciprocal(); }
    friend Jet operator/(double s, const Jet& b) { return b.reciprocal() * s; }
    friend Jet operator/(Jet a, double s) { a *= 1.0 / s; return a; }

    Jet reciprocal() const;

    /// Jet of the derivative function (order drops by one).
    Jet derivative() const;

    /// Composition outer(inner): `outer` must be a jet at inner.value().
    static Jet compose(const Jet& outer, const Jet& inner);

private:
    std::vector<double> c_;
};

Jet jet_exp(const Jet& g);
Jet jet_log(const Jet& g);
Jet jet_sin(const Jet& g);
Jet jet_cos(const Jet& g);
Jet jet_sqrt(const Jet& g);
Jet jet_pow(const Jet& g, double p);

/// A one-variable differentiable function: yields its jet at any point of its
/// domain to any requested order (throws InsufficientJetOrder if it cannot).
using Func1 = std::function<Jet(double x, int order)>;

Func1 func_constant(double v);
Func1 func_identity();
/// Polynomial with coefficients a0 + a1 s + a2 s^2 + ...
Func1 func_polynomial(std::vector<double> coeffs);

}  // namespace nijhydro
