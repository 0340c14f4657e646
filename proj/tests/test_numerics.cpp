#include <doctest.h>

#include <cmath>

#include "nijhydro/quadrature.hpp"
#include "nijhydro/spline.hpp"

using namespace nijhydro;

TEST_CASE("Gauss–Kronrod quadrature") {
    SUBCASE("polynomial exactness") {
        double v = integrate_gk([](double x) { return x * x; }, 0.0, 1.0);
        CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }
    SUBCASE("sin over [0, pi]") {
        double v = integrate_gk([](double x) { return std::sin(x); }, 0.0, M_PI);
        CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("reversed limits flip sign") {
        double v = integrate_gk([](double x) { return std::exp(x); }, 1.0, 0.0);
        CHECK(v == doctest::Approx(1.0 - std::exp(1.0)).epsilon(1e-12));
    }
    SUBCASE("adaptive refinement on a peaked integrand") {
        auto peaked = [](double x) { return 1.0 / (1e-4 + x * x); };
        double v = integrate_gk(peaked, -1.0, 1.0);
        const double exact = 2.0 / 1e-2 * std::atan(1.0 / 1e-2);
        CHECK(v == doctest::Approx(exact).epsilon(1e-9));
    }
    SUBCASE("vector variant matches scalar legs") {
        Vector v = integrate_gk(
            [](double x) {
                Vector r(2);
                r << std::cos(x), x * x * x;
                return r;
            },
            2, 0.0, 2.0);
        CHECK(v[0] == doctest::Approx(std::sin(2.0)).epsilon(1e-12));
        CHECK(v[1] == doctest::Approx(4.0).epsilon(1e-12));
    }
    SUBCASE("depth cap raises QuadratureFailure") {
        QuadratureOptions opts;
        opts.abs_tol = 1e-15;
        opts.max_depth = 2;
        auto nasty = [](double x) { return std::sqrt(std::abs(x)); };
        CHECK_THROWS_AS(integrate_gk(nasty, -1.0, 1.0, opts), QuadratureFailure);
    }
}

TEST_CASE("cubic spline") {
    SUBCASE("exact on cubics, including derivatives") {
        std::vector<double> x, y;
        for (int i = 0; i <= 20; ++i) {
            double s = -1.0 + 0.1 * i;
            x.push_back(s);
            y.push_back(s * s * s - 2 * s + 1);
        }
        CubicSpline sp(x, y);
        for (double s : {-0.95, -0.3, 0.0, 0.77, 0.99}) {
            CHECK(sp.value(s) == doctest::Approx(s * s * s - 2 * s + 1).epsilon(1e-12));
            CHECK(sp.deriv(s, 1) == doctest::Approx(3 * s * s - 2).epsilon(1e-10));
            CHECK(sp.deriv(s, 2) == doctest::Approx(6 * s).epsilon(1e-9));
            CHECK(sp.deriv(s, 3) == doctest::Approx(6.0).epsilon(1e-8));
        }
    }
    SUBCASE("near-quartic accuracy on analytic data") {
        std::vector<double> x, y;
        const int m = 64;
        for (int i = 0; i < m; ++i) {
            double s = 0.8 + 0.4 * i / (m - 1);
            x.push_back(s);
            y.push_back(std::sin(s));
        }
        CubicSpline sp(x, y);
        double worst_v = 0, worst_d = 0;
        for (int i = 0; i <= 200; ++i) {
            double s = 0.8 + 0.4 * i / 200.0;
            worst_v = std::max(worst_v, std::abs(sp.value(s) - std::sin(s)));
            worst_d = std::max(worst_d, std::abs(sp.deriv(s, 1) - std::cos(s)));
        }
        CHECK(worst_v < 1e-9);
        CHECK(worst_d < 1e-7);
    }
    SUBCASE("rejects non-monotone knots") {
        CHECK_THROWS_AS(CubicSpline({0.0, 1.0, 1.0, 2.0}, {0, 1, 1, 2}),
                        NonMonotoneEigenvalueCoordinate);
    }
}

TEST_CASE("sampled function tables") {
    std::vector<double> s, v;
    const int m = 128;
    for (int i = 0; i < m; ++i) {
        double t = 1.0 + 0.5 * i / (m - 1);
        s.push_back(t);
        v.push_back(std::exp(t));
    }
    SampledFunction f(s, v, 3);
    SUBCASE("jets reproduce derivatives of exp") {
        Jet j = f.jet(1.25, 3);
        for (int k = 0; k <= 3; ++k)
            CHECK(j.deriv(k) == doctest::Approx(std::exp(1.25)).epsilon(1e-5));
    }
    SUBCASE("derivative tables consistent with value tables") {
        CHECK(f.derivative_consistency() < 1e-7);
    }
    SUBCASE("range errors") {
        CHECK_THROWS_AS(f.jet(0.5, 1), OutOfSampledRange);
        CHECK_THROWS_AS(f.jet(1.25, 9), InsufficientJetOrder);
    }
    SUBCASE("descending samples are normalized") {
        std::vector<double> sd(s.rbegin(), s.rend()), vd(v.rbegin(), v.rend());
        SampledFunction g(sd, vd, 1);
        CHECK(g.value(1.3) == doctest::Approx(std::exp(1.3)).epsilon(1e-9));
    }
}
