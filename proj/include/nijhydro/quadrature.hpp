#pragma once

#include <functional>

#include "nijhydro/linalg.hpp"

namespace nijhydro {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    int max_depth = 14;  // interval bisection depth cap (2^0 .. 2^max_depth subintervals)
};

/// Adaptive Gauss–Kronrod 7/15 with absolute-tolerance acceptance per
/// subinterval. Throws QuadratureFailure when the depth cap is exceeded.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    const QuadratureOptions& opts = {});

/// Vector-valued variant; acceptance on the max-norm of the error estimate.
Vector integrate_gk(const std::function<Vector(double)>& f, int dim, double a, double b,
                    const QuadratureOptions& opts = {});

}  // namespace nijhydro
