#include <doctest.h>

#include <cmath>

#include "nijhydro/jet.hpp"

using namespace nijhydro;

TEST_CASE("jet derivative/coefficient round trip") {
    Jet j = Jet::from_derivatives({2.0, 3.0, -4.0, 12.0});
    CHECK(j.value() == doctest::Approx(2.0));
    CHECK(j.deriv(1) == doctest::Approx(3.0));
    CHECK(j.deriv(2) == doctest::Approx(-4.0));
    CHECK(j.deriv(3) == doctest::Approx(12.0));
    CHECK(j.coeff(3) == doctest::Approx(2.0));  // 12 / 3!
    CHECK_THROWS_AS(j.deriv(4), InsufficientJetOrder);
}

TEST_CASE("product obeys Leibniz: x^2 * sin(x)") {
    const double x0 = 0.7;
    Jet x = Jet::variable(x0, 4);
    Jet p = (x * x) * jet_sin(x);
    // closed form: f = x^2 sin x, f' = 2x sin + x^2 cos, f'' = 2 sin + 4x cos - x^2 sin
    const double s = std::sin(x0), c = std::cos(x0);
    CHECK(p.value() == doctest::Approx(x0 * x0 * s).epsilon(1e-12));
    CHECK(p.deriv(1) == doctest::Approx(2 * x0 * s + x0 * x0 * c).epsilon(1e-12));
    CHECK(p.deriv(2) == doctest::Approx(2 * s + 4 * x0 * c - x0 * x0 * s).epsilon(1e-12));
}

TEST_CASE("composition order 4 against analytic cases") {
    const double x0 = 0.7;
    SUBCASE("exp(2x+1): derivatives 2^k e^{2x0+1}") {
        Jet g = 2.0 * Jet::variable(x0, 4) + 1.0;
        Jet h = jet_exp(g);
        const double e = std::exp(2 * x0 + 1);
        for (int k = 0; k <= 4; ++k)
            CHECK(h.deriv(k) == doctest::Approx(std::pow(2.0, k) * e).epsilon(1e-9));
    }
    SUBCASE("sin(x^2): fourth derivative closed form") {
        Jet x = Jet::variable(x0, 4);
        Jet h = jet_sin(x * x);
        const double s = std::sin(x0 * x0), c = std::cos(x0 * x0);
        CHECK(h.deriv(1) == doctest::Approx(2 * x0 * c).epsilon(1e-12));
        CHECK(h.deriv(2) == doctest::Approx(2 * c - 4 * x0 * x0 * s).epsilon(1e-12));
        CHECK(h.deriv(3) == doctest::Approx(-12 * x0 * s - 8 * x0 * x0 * x0 * c).epsilon(1e-12));
        CHECK(h.deriv(4) ==
              doctest::Approx((16 * std::pow(x0, 4) - 12) * s - 48 * x0 * x0 * c).epsilon(1e-9));
    }
    SUBCASE("polynomial composition (x^2)^3 = x^6") {
        Jet x = Jet::variable(x0, 4);
        Jet g = x * x;
        Jet h = Jet::compose(jet_pow(Jet::variable(g.value(), 4), 3.0), g);
        for (int k = 0; k <= 4; ++k) {
            double expected = std::pow(x0, 6 - k);
            for (int j = 0; j < k; ++j) expected *= (6 - j);
            CHECK(h.deriv(k) == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("arithmetic validated against finite differences") {
    auto f = [](double x) { return std::exp(x) / (1.0 + x * x); };
    auto jet_f = [](double x, int m) {
        Jet v = Jet::variable(x, m);
        return jet_exp(v) / (1.0 + v * v);
    };
    const double x0 = 0.4, h = 1e-4;
    Jet j = jet_f(x0, 2);
    CHECK(j.value() == doctest::Approx(f(x0)).epsilon(1e-13));
    CHECK(j.deriv(1) == doctest::Approx((f(x0 + h) - f(x0 - h)) / (2 * h)).epsilon(1e-6));
    CHECK(j.deriv(2) ==
          doctest::Approx((f(x0 + h) - 2 * f(x0) + f(x0 - h)) / (h * h)).epsilon(1e-5));
}

TEST_CASE("reciprocal and division properties") {
    Jet a = jet_sin(Jet::variable(0.9, 5)) + 2.0;
    Jet r = a * a.reciprocal();
    CHECK(r.value() == doctest::Approx(1.0));
    for (int k = 1; k <= 5; ++k) CHECK(r.deriv(k) == doctest::Approx(0.0).epsilon(1e-12));

    Jet b = jet_exp(Jet::variable(0.9, 5));
    Jet q = (a / b) * b - a;
    for (int k = 0; k <= 5; ++k) CHECK(q.deriv(k) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(jet_log(Jet::constant(-1.0, 2)), EvaluationError);
    CHECK_THROWS_AS(Jet::constant(0.0, 2).reciprocal(), EvaluationError);
    CHECK_THROWS_AS(jet_pow(Jet::constant(-1.0, 2), 0.5), EvaluationError);
    // integer powers of negative bases are fine
    Jet p = jet_pow(Jet::variable(-2.0, 2), 3.0);
    CHECK(p.value() == doctest::Approx(-8.0));
    CHECK(p.deriv(1) == doctest::Approx(12.0));
}

TEST_CASE("polynomial helper") {
    Func1 f = func_polynomial({1.0, 0.0, 2.0});  // 1 + 2 s^2
    Jet j = f(3.0, 2);
    CHECK(j.value() == doctest::Approx(19.0));
    CHECK(j.deriv(1) == doctest::Approx(12.0));
    CHECK(j.deriv(2) == doctest::Approx(4.0));
}
