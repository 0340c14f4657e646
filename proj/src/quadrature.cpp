#include "nijhydro/quadrature.hpp"

#include <cmath>

namespace nijhydro {

namespace {

// 15-point Kronrod nodes on [0,1] side (symmetric) with Kronrod weights and
// the embedded 7-point Gauss weights (zero where the node is Kronrod-only).
constexpr int kPoints = 8;  // non-negative nodes
constexpr double kNode[kPoints] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813,
};
constexpr double kWeightK[kPoints] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529,
};
constexpr double kWeightG[kPoints] = {
    0.417959183673469, 0.0, 0.381830050505119, 0.0,
    0.279705391489277, 0.0, 0.129484966168870, 0.0,
};

struct Interval {
    double a, b;
    int depth;
};

template <typename Value, typename Eval, typename Norm>
Value adapt(Eval&& eval15, Norm&& norm, Value zero, double a, double b,
            const QuadratureOptions& opts) {
    if (a == b) return zero;
    std::vector<Interval> stack{{a, b, 0}};
    Value total = zero;
    while (!stack.empty()) {
        Interval iv = stack.back();
        stack.pop_back();
        Value gauss = zero, kron = zero;
        eval15(iv.a, iv.b, gauss, kron);
        const double err = norm(gauss, kron);
        // Local tolerance proportional to the subinterval share of [a,b].
        const double local_tol = opts.abs_tol * std::abs(iv.b - iv.a) / std::abs(b - a);
        if (err <= std::max(local_tol, 1e-300) || err <= opts.abs_tol * 1e-2) {
            total += kron;
        } else {
            if (iv.depth >= opts.max_depth)
                throw QuadratureFailure("adaptive quadrature exceeded depth " +
                                        std::to_string(opts.max_depth) +
                                        "; last error estimate " + std::to_string(err));
            const double mid = 0.5 * (iv.a + iv.b);
            stack.push_back({iv.a, mid, iv.depth + 1});
            stack.push_back({mid, iv.b, iv.depth + 1});
        }
    }
    return total;
}

}  // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    const QuadratureOptions& opts) {
    auto eval15 = [&f](double lo, double hi, double& gauss, double& kron) {
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (int i = 0; i < kPoints; ++i) {
            const double fp = f(c + h * kNode[i]);
            const double fm = i == 0 ? fp : f(c - h * kNode[i]);
            const double s = i == 0 ? fp : fp + fm;
            gauss += kWeightG[i] * s * h;
            kron += kWeightK[i] * s * h;
        }
    };
    return adapt<double>(
        eval15, [](double g, double k) { return std::abs(g - k); }, 0.0, a, b, opts);
}

Vector integrate_gk(const std::function<Vector(double)>& f, int dim, double a, double b,
                    const QuadratureOptions& opts) {
    auto eval15 = [&f](double lo, double hi, Vector& gauss, Vector& kron) {
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (int i = 0; i < kPoints; ++i) {
            Vector s = f(c + h * kNode[i]);
            if (i != 0) s += f(c - h * kNode[i]);
            gauss += kWeightG[i] * h * s;
            kron += kWeightK[i] * h * s;
        }
    };
    return adapt<Vector>(
        eval15, [](const Vector& g, const Vector& k) { return max_abs(Vector(g - k)); },
        Vector::Zero(dim).eval(), a, b, opts);
}

}  // namespace nijhydro
