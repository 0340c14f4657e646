#pragma once

#include <vector>

#include "nijhydro/jet.hpp"

namespace nijhydro {

/// Natural cubic spline interpolant on strictly increasing knots.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double value(double s) const { return deriv(s, 0); }
    double deriv(double s, int k) const;  // k <= 3; piecewise beyond C^2
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    const std::vector<double>& knots() const { return x_; }

private:
    std::vector<double> x_, y_, m_;  // m_ = second derivatives at knots
    size_t segment(double s) const;
};

/// A one-variable function known through samples: value table plus derivative
/// tables built by cascaded spline differentiation. Produces jets of any order
/// up to the table depth; evaluation outside the sampled range throws
/// OutOfSampledRange.
class SampledFunction {
public:
    SampledFunction() = default;
    /// Samples (s_i, f(s_i)); s need not be sorted but must be strictly
    /// monotone. max_order = highest derivative the tables must support.
    SampledFunction(std::vector<double> s, std::vector<double> values, int max_order);

    Jet jet(double s, int order) const;
    double value(double s) const { return jet(s, 0).value(); }
    double s_min() const;
    double s_max() const;
    int max_order() const { return static_cast<int>(tables_.size()) - 1; }

    /// max |table_1 - d/ds spline(table_0)| at inter-knot midpoints: the
    /// derivative-table consistency diagnostic.
    double derivative_consistency() const;

    Func1 as_func1() const;

private:
    std::vector<CubicSpline> tables_;  // tables_[q] interpolates f^(q)
};

}  // namespace nijhydro
