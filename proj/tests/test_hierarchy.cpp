#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nijhydro/hierarchy.hpp"
#include "nijhydro/jordan.hpp"
#include "nijhydro/selftest.hpp"
#include "nijhydro/tensor.hpp"

using namespace nijhydro;
using namespace nijhydro::testing;

TEST_CASE("pullback") {
    SUBCASE("identity leaves forms unchanged") {
        OperatorField Id = make_constant_operator(Matrix::Identity(2, 2));
        OneFormField w = constant_one_form((Vector(2) << 3, -1).finished());
        Vector u(2);
        u << 0.5, 0.7;
        CHECK(max_abs(Vector(pullback(Id, w).value(u) - w.value(u))) == 0.0);
    }
    SUBCASE("U* du1 = u2 du1 + u1 du2") {
        OperatorField U = make_toeplitz(2);
        OneFormField w = one_form_from_scalar(coordinate_field(2, 0));
        OneFormField Uw = pullback(U, w);
        Vector u(2);
        u << 0.4, 1.9;
        Vector v = Uw.value(u);
        CHECK(v[0] == doctest::Approx(u[1]));
        CHECK(v[1] == doctest::Approx(u[0]));
        CHECK(Uw.closedness_residual(u) < 1e-14);
    }
    SUBCASE("diagonal pullback of d(u1+u2)") {
        OperatorField L = make_diagonal({func_identity(), func_identity()});
        ScalarField s(2, [](const Vector& u) {
            ScalarEval e;
            e.value = u[0] + u[1];
            e.grad = Vector::Ones(2);
            e.hess = Matrix::Zero(2, 2);
            return e;
        });
        OneFormField Lw = pullback(L, one_form_from_scalar(s));
        Vector u(2);
        u << 1.2, 3.4;
        CHECK(Lw.value(u)[0] == doctest::Approx(u[0]));
        CHECK(Lw.value(u)[1] == doctest::Approx(u[1]));
    }
}

TEST_CASE("hierarchy_from_seed") {
    SUBCASE("diagonal operator with the sum seed reproduces the power sums up to constants") {
        BlockSpec spec;
        for (int i = 0; i < 4; ++i) spec.blocks.push_back(Block::diagonal(func_identity()));
        OperatorField L = make_operator(spec);
        ScalarField seed(4, [](const Vector& u) {
            ScalarEval e;
            e.value = u.sum();
            e.grad = Vector::Ones(4);
            e.hess = Matrix::Zero(4, 4);
            return e;
        });
        Vector base(4);
        base << 1, 2, 3, 4;
        Hierarchy H = hierarchy_from_seed(L, seed, base);
        Hierarchy S = standard_hierarchy(spec, base);
        for (const Vector& u : random_probes(staggered_box(4), 5)) {
            for (int i = 0; i < 4; ++i)
                CHECK(max_abs(Vector(H.omega[static_cast<size_t>(i)].value(u) -
                                     S.omega[static_cast<size_t>(i)].value(u))) < 1e-10);
            // potentials differ from the standard ones by constants only
            const double diff0 = H.potentials[2].value(u) - S.potentials[2].value(u);
            const double diff1 = H.potentials[2].value(base) - S.potentials[2].value(base);
            CHECK(diff0 == doctest::Approx(diff1).epsilon(1e-8));
            CHECK(H.potentials[2].value(base) == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
    SUBCASE("U(2) seeded by u1: omega2 = u2 du1 + u1 du2 with potential u1 u2") {
        OperatorField U = make_toeplitz(2);
        Vector base(2);
        base << 0.5, 1.0;
        Hierarchy H = hierarchy_from_seed(U, coordinate_field(2, 0), base);
        Vector u(2);
        u << 1.3, 1.8;
        Vector w2 = H.omega[1].value(u);
        CHECK(w2[0] == doctest::Approx(u[1]));
        CHECK(w2[1] == doctest::Approx(u[0]));
        CHECK(H.potentials[1].value(u) ==
              doctest::Approx(u[0] * u[1] - base[0] * base[1]).epsilon(1e-10));
    }
    SUBCASE("constant seed yields zero forms") {
        OperatorField U = make_toeplitz(2);
        Hierarchy H = hierarchy_from_seed(U, constant_field(2, 7.0), (Vector(2) << 1, 1).finished());
        Vector u(2);
        u << 1.4, 0.9;
        CHECK(max_abs(H.omega[0].value(u)) == 0.0);
        CHECK(max_abs(H.omega[1].value(u)) == 0.0);
    }
    SUBCASE("non-conservation-law seeds are rejected") {
        OperatorField U = make_toeplitz(2);
        ScalarField bad(2, [](const Vector& u) {
            ScalarEval e;
            e.value = 0.5 * u[0] * u[0];
            e.grad = Vector::Zero(2);
            e.grad[0] = u[0];
            e.hess = Matrix::Zero(2, 2);
            e.hess(0, 0) = 1.0;
            return e;
        });
        CHECK_THROWS_AS(hierarchy_from_seed(U, bad, (Vector(2) << 1, 1).finished()),
                        NotAConservationLaw);
    }
    SUBCASE("chain property at 30 probes") {
        OperatorField U = make_toeplitz(3);
        Hierarchy H = hierarchy_from_seed(U, coordinate_field(3, 0),
                                          (Vector(3) << 1, 1, 1).finished());
        for (const Vector& u : random_probes(staggered_box(3), 30)) {
            const double scale = 1.0 + max_abs(U.value(u));
            CHECK(hierarchy_chain_residual(U, H, u) < 1e-8 * scale);
        }
    }
}

TEST_CASE("staircase integration of closed forms") {
    SUBCASE("coordinate form") {
        OneFormField w = constant_one_form(Vector::Unit(2, 0));
        CHECK(integrate_closed_1form(w, Vector::Zero(2), (Vector(2) << 3, 5).finished()) ==
              doctest::Approx(3.0));
    }
    SUBCASE("exact potential u1 u2") {
        OneFormField w(2, [](const Vector& u) {
            OneFormEval e;
            e.omega.resize(2);
            e.omega << u[1], u[0];
            e.jac.resize(2, 2);
            e.jac << 0, 1, 1, 0;
            return e;
        });
        Vector u(2);
        u << 1.7, 2.3;
        CHECK(integrate_closed_1form(w, Vector::Zero(2), u) ==
              doctest::Approx(u[0] * u[1]).epsilon(1e-12));
    }
    SUBCASE("constant-coefficient worked form integrates to the linear potential") {
        Vector coeffs(4);
        coeffs << 1, 2, 1, -2;
        OneFormField w = constant_one_form(coeffs);
        Vector p(4), u(4);
        p << 1, 0, 1, 1;
        u << 1.3, 0.4, 0.8, 1.5;
        const double expected = coeffs.dot(u - p);
        CHECK(integrate_closed_1form(w, p, u) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("path independence under reversed leg order") {
        OperatorField U = make_toeplitz(3);
        Hierarchy H = hierarchy_from_seed(U, coordinate_field(3, 0),
                                          (Vector(3) << 1, 1, 1).finished());
        Vector p(3), u(3);
        p << 1, 1, 1;
        u << 1.6, 0.7, 1.9;
        IntegrateOptions fwd, rev;
        rev.leg_order = {2, 1, 0};
        const double a = integrate_closed_1form(H.omega[2], p, u, fwd);
        const double b = integrate_closed_1form(H.omega[2], p, u, rev);
        CHECK(std::abs(a - b) < 10 * fwd.quadrature.abs_tol);
    }
    SUBCASE("non-closed forms are rejected by the lattice pre-check") {
        OneFormField w(2, [](const Vector& u) {
            OneFormEval e;
            e.omega.resize(2);
            e.omega << u[1], 0.0;
            e.jac.resize(2, 2);
            e.jac << 0, 1, 0, 0;
            return e;
        });
        CHECK_THROWS_AS(
            integrate_closed_1form(w, Vector::Zero(2), (Vector(2) << 1, 1).finished()),
            NotClosed);
    }
    SUBCASE("potential fields carry the form as gradient") {
        OperatorField U = make_toeplitz(2);
        Hierarchy H = hierarchy_from_seed(U, coordinate_field(2, 0),
                                          (Vector(2) << 1, 1).finished());
        ScalarField g = potential_of(H.omega[1], (Vector(2) << 1, 1).finished());
        for (const Vector& u : random_probes(staggered_box(2), 5))
            CHECK(scalar_fd_consistency(g, u) < 1e-6);
    }
}

TEST_CASE("every conservation law serves all symmetries of a gl-regular operator") {
    OperatorField U = make_toeplitz(2);
    OperatorField M = h_of_U_field(
        [](double s, int m) { return jet_exp(0.5 * Jet::variable(s, m)); }, 2);
    ScalarField f = coordinate_field(2, 0);
    for (const Vector& u : random_probes(staggered_box(2), 20)) {
        CHECK(conservation_law_residual(U, f, u) < 1e-12);
        CHECK(conservation_law_residual(M, f, u) < 1e-7);
        CHECK(pullback(M, one_form_from_scalar(f)).closedness_residual(u) < 1e-7);
    }
}

TEST_CASE("any conservation law is M* df of the regular seed (Jordan block)") {
    // h generated from block functions fs has dh = Mtilde* du1 where Mtilde is
    // the block symmetry built from the derivative functions.
    BlockSpec spec;
    spec.blocks.push_back(Block::jordan(2));
    std::vector<Func1> fs{func_sin(0.6, 1.1), func_polynomial({0.4, 1.0, 0.5})};
    ScalarField h = compose_conservation_law(spec, {fs});
    std::vector<Func1> dfs;
    for (const Func1& f : fs)
        dfs.push_back([f](double s, int m) { return f(s, m + 1).derivative(); });
    OperatorField Mt = compose_symmetry(spec, {dfs});
    OneFormField lhs = one_form_from_scalar(h);
    OneFormField rhs = pullback(Mt, one_form_from_scalar(coordinate_field(2, 0)));
    for (const Vector& u : random_probes(staggered_box(2), 20))
        CHECK(max_abs(Vector(lhs.value(u) - rhs.value(u))) < 1e-7);
}

TEST_CASE("companion correspondences") {
    SUBCASE("coordinate symmetry of the shift gives the first companion layout") {
        Matrix N3 = Matrix::Zero(3, 3);
        N3(0, 1) = N3(1, 2) = 1.0;
        OperatorField N = make_constant_operator(N3);
        OperatorField M = make_toeplitz(3);  // u1 N^2 + u2 N + u3 Id
        Vector p(3);
        p << 0.3, 0.7, 1.1;
        CompanionReport rep = companion_correspondence_first(N, M, p);
        CHECK(rep.deviation < 1e-8);
        CHECK(rep.transformed(0, 1) == doctest::Approx(1.0));
        CHECK(rep.transformed(2, 1) == doctest::Approx(0.0));
    }
    SUBCASE("hierarchy of the diagonal operator gives the second companion layout") {
        OperatorField L = make_diagonal({func_identity(), func_identity()});
        ScalarField seed(2, [](const Vector& u) {
            ScalarEval e;
            e.value = u[0] + u[1];
            e.grad = Vector::Ones(2);
            e.hess = Matrix::Zero(2, 2);
            return e;
        });
        Vector p(2);
        p << 1.0, 2.0;
        Hierarchy H = hierarchy_from_seed(L, seed, p);
        CompanionReport rep = companion_correspondence_second(L, H, p);
        CHECK(rep.deviation < 1e-6);
        // L~ = [[0, 1], [-u1 u2, u1 + u2]] at p
        CHECK(rep.transformed(1, 0) == doctest::Approx(-p[0] * p[1]).epsilon(1e-9));
        CHECK(rep.transformed(1, 1) == doctest::Approx(p[0] + p[1]).epsilon(1e-9));
    }
    SUBCASE("non-regular inputs are rejected") {
        OperatorField U = make_toeplitz(2);
        Vector p(2);
        p << 1.0, 1.5;
        // U is a symmetry of itself but its coefficients (1, 0) are constant.
        CHECK_THROWS_AS(companion_correspondence_first(U, U, p), NotRegular);
    }
}
