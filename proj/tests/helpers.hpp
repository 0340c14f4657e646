#pragma once

#include <functional>
#include <random>

#include "nijhydro/fields.hpp"

namespace nijhydro::testing {

inline std::vector<Vector> random_probes(const Box& box, int count, uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Vector> out;
    out.reserve(static_cast<size_t>(count));
    const int n = static_cast<int>(box.lo.size());
    for (int p = 0; p < count; ++p) {
        Vector u(n);
        for (int i = 0; i < n; ++i) u[i] = box.lo[i] + uni(rng) * (box.hi[i] - box.lo[i]);
        out.push_back(u);
    }
    return out;
}

/// Probe box keeping diagonal spectra disjoint and Jordan coordinates away
/// from zero: coordinate i ranges over [i+0.8, i+1.2].
inline Box staggered_box(int n) {
    Box b;
    b.lo.resize(n);
    b.hi.resize(n);
    for (int i = 0; i < n; ++i) {
        b.lo[i] = i + 0.8;
        b.hi[i] = i + 1.2;
    }
    return b;
}

inline Func1 func_sin(double amp = 1.0, double freq = 1.0, double shift = 0.0) {
    return [=](double x, int m) {
        return amp * jet_sin(freq * Jet::variable(x, m) + shift);
    };
}

inline Func1 func_exp(double scale = 1.0) {
    return [=](double x, int m) { return jet_exp(scale * Jet::variable(x, m)); };
}

inline ScalarField scalar_from_lambda(int n, std::function<double(const Vector&)> f,
                                      double h = 1e-5) {
    return ScalarField(n, [f, h, n](const Vector& u) {
        ScalarEval e;
        e.value = f(u);
        e.grad.resize(n);
        e.hess.resize(n, n);
        for (int k = 0; k < n; ++k) {
            Vector up = u, dn = u;
            up[k] += h;
            dn[k] -= h;
            e.grad[k] = (f(up) - f(dn)) / (2 * h);
        }
        for (int k = 0; k < n; ++k)
            for (int j = 0; j <= k; ++j) {
                Vector upp = u, upm = u, ump = u, umm = u;
                upp[k] += h; upp[j] += h;
                upm[k] += h; upm[j] -= h;
                ump[k] -= h; ump[j] += h;
                umm[k] -= h; umm[j] -= h;
                e.hess(k, j) = e.hess(j, k) =
                    (f(upp) - f(upm) - f(ump) + f(umm)) / (4 * h * h);
            }
        return e;
    });
}

}  // namespace nijhydro::testing
