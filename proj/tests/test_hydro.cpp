#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nijhydro/hydro.hpp"
#include "nijhydro/jordan.hpp"
#include "nijhydro/selftest.hpp"
#include "nijhydro/tensor.hpp"

using namespace nijhydro;
using namespace nijhydro::testing;

namespace {

BlockSpec diag_spec(int n) {
    BlockSpec s;
    for (int i = 0; i < n; ++i) s.blocks.push_back(Block::diagonal(func_identity()));
    return s;
}

BlockSpec jordan22_spec() {
    BlockSpec s;
    s.blocks.push_back(Block::jordan(2));
    s.blocks.push_back(Block::jordan(2));
    return s;
}

}  // namespace

TEST_CASE("a_fields") {
    SUBCASE("diag(u1,u2): A_1 = diag(-u2, -u1)") {
        OperatorField L = make_operator(diag_spec(2));
        std::vector<OperatorField> A = a_fields(L);
        REQUIRE(A.size() == 1);
        Vector u(2);
        u << 0.7, 1.9;
        Matrix A1 = A[0].value(u);
        CHECK(A1(0, 0) == doctest::Approx(-u[1]));
        CHECK(A1(1, 1) == doctest::Approx(-u[0]));
        CHECK(std::abs(A1(0, 1)) + std::abs(A1(1, 0)) < 1e-14);
    }
    SUBCASE("second companion form: A_i e_n = e_{n-i} exactly") {
        const int n = 3;
        std::vector<ScalarField> sigma;
        for (int i = 0; i < n; ++i) sigma.push_back(coordinate_field(n, i));
        OperatorField L = make_companion_second(sigma);
        std::vector<OperatorField> A = a_fields(L);
        for (const Vector& u : random_probes(staggered_box(n), 5))
            for (int i = 1; i < n; ++i)
                CHECK(max_abs(Vector(A[static_cast<size_t>(i) - 1].value(u) * Vector::Unit(n, n - 1) -
                                     Vector::Unit(n, n - 1 - i))) < 1e-12);
    }
    SUBCASE("pair operator: exact partials and Cayley–Hamilton closure") {
        OperatorField L = make_operator(jordan22_spec());
        std::vector<OperatorField> A = a_fields(L);
        for (const Vector& u : random_probes(staggered_box(4), 10)) {
            for (const auto& Ai : A) CHECK(operator_fd_consistency(Ai, u) < 1e-6);
            AdjugateSequence seq = a_sequence(L.value(u));
            CHECK(max_abs(Matrix(L.value(u) * seq.A[3] -
                                 seq.sigma[4] * Matrix::Identity(4, 4))) < 1e-10);
        }
    }
    SUBCASE("A-fields commute with polynomial symmetries of L") {
        OperatorField L = make_operator(diag_spec(3));
        std::vector<OperatorField> A = a_fields(L);
        for (const Vector& u : random_probes(staggered_box(3), 10)) {
            Matrix B = L.value(u) * L.value(u);
            for (const auto& Ai : A) {
                Matrix Av = Ai.value(u);
                CHECK(max_abs(Matrix(Av * B - B * Av)) < 1e-12);
            }
        }
    }
}

TEST_CASE("hydro_residual") {
    OperatorField L = make_operator(diag_spec(2));
    // With u2 = c constant, u_t = A_1 u_x decouples to linear advection
    // u1_t = -c u1_x, solved by u1 = phi(x - c t).
    const double c = 1.5;
    auto phi = [](double s) { return std::sin(s); };
    auto fill = [&](int nx, int nt) {
        SolutionGrid g;
        g.n = 2;
        for (int i = 0; i < nx; ++i) g.x_nodes.push_back(0.0 + 0.4 * i / (nx - 1));
        g.t_axes.resize(1);
        for (int j = 0; j < nt; ++j) g.t_axes[0].push_back(0.0 + 0.2 * j / (nt - 1));
        g.values.assign(g.node_count(), Vector::Zero(2));
        g.converged.assign(g.node_count(), 1);
        for (int j = 0; j < nt; ++j)
            for (int i = 0; i < nx; ++i) {
                Vector u(2);
                u << phi(g.x_nodes[static_cast<size_t>(i)] - c * g.t_axes[0][static_cast<size_t>(j)]), c;
                g.values[g.index({j}, i)] = u;
            }
        return g;
    };
    SUBCASE("exact solution has O(h^2) residual with ratio ~4 under refinement") {
        HydroResidual coarse = hydro_residual(fill(9, 9), L);
        HydroResidual fine = hydro_residual(fill(17, 17), L);
        CHECK(coarse.per_equation[0] < 1e-3);
        CHECK(coarse.per_equation[0] > 1e-6);
        const double ratio = coarse.per_equation[0] / fine.per_equation[0];
        CHECK(ratio > 3.0);
        CHECK(ratio < 5.0);
    }
    SUBCASE("a non-solution is flagged by a large residual") {
        SolutionGrid g = fill(9, 9);
        for (int j = 0; j < 9; ++j)
            for (int i = 0; i < 9; ++i) {
                Vector u(2);
                u << phi(g.x_nodes[static_cast<size_t>(i)]), c;  // frozen in t
                g.values[g.index({j}, i)] = u;
            }
        CHECK(hydro_residual(g, L).per_equation[0] > 0.1);
    }
    SUBCASE("too few nodes raise GridTooCoarse") {
        CHECK_THROWS_AS(hydro_residual(fill(2, 9), L), GridTooCoarse);
        CHECK_THROWS_AS(hydro_residual(fill(9, 2), L), GridTooCoarse);
    }
}

TEST_CASE("common_symmetry_B") {
    SUBCASE("trivial hierarchy gives B = Id") {
        const int n = 3;
        OperatorField L = make_operator(diag_spec(n));
        Hierarchy H;
        H.base = (Vector(n) << 1, 2, 3).finished();
        for (int i = 0; i < n; ++i) {
            H.potentials.push_back(constant_field(n, i == n - 1 ? 1.0 : 0.0));
            H.omega.push_back(one_form_from_scalar(H.potentials.back()));
        }
        std::vector<Vector> probes = random_probes(staggered_box(n), 5);
        OperatorField B = common_symmetry_B(H, L, probes);
        for (const Vector& u : probes) {
            CHECK(max_abs(Matrix(B.value(u) - Matrix::Identity(n, n))) < 1e-14);
            CHECK(symmetry_residual(L, B, u) < 1e-12);
        }
    }
    SUBCASE("standard hierarchy of the 3D diagonal operator") {
        BlockSpec spec = diag_spec(3);
        OperatorField L = make_operator(spec);
        Hierarchy H = standard_hierarchy(spec, (Vector(3) << 1, 2, 3).finished());
        std::vector<Vector> probes = random_probes(staggered_box(3), 20);
        OperatorField B = common_symmetry_B(H, L, probes);
        std::vector<OperatorField> A = a_fields(L);
        for (const Vector& u : probes) {
            for (const auto& Ai : A) {
                const double scale = residual_scale(Ai, B, u);
                CHECK(symmetry_residual(Ai, B, u) < 1e-7 * scale);
                Matrix Av = Ai.value(u), Bv = B.value(u);
                CHECK(max_abs(Matrix(Av * Bv - Bv * Av)) < 1e-10 * scale);
            }
        }
    }
    SUBCASE("a broken chain is rejected") {
        const int n = 2;
        OperatorField L = make_operator(diag_spec(n));
        Hierarchy H = standard_hierarchy(diag_spec(n), (Vector(2) << 1, 2).finished());
        H.omega[1] = one_form_from_scalar(coordinate_field(2, 0));  // not L* omega_1
        std::vector<Vector> probes = random_probes(staggered_box(2), 5);
        CHECK_THROWS_AS(common_symmetry_B(H, L, probes), NotAHierarchy);
    }
}

TEST_CASE("common_cl_from_symmetry") {
    SUBCASE("coordinate symmetry of the shift gives g1 = u1 with the du2 chain") {
        Matrix N3 = Matrix::Zero(3, 3);
        N3(0, 1) = N3(1, 2) = 1.0;
        OperatorField N = make_constant_operator(N3);
        OperatorField M = make_toeplitz(3);
        std::vector<Vector> probes = random_probes(staggered_box(3), 10);
        CommonConservationLaw r = common_cl_from_symmetry(M, N, probes);
        CHECK(r.chain_residual < 1e-10);
        for (const Vector& u : probes) {
            ScalarEval e = r.g1.eval(u);
            CHECK(e.value == doctest::Approx(u[0]).epsilon(1e-10));
            CHECK(max_abs(Vector(e.grad - Vector::Unit(3, 0))) < 1e-10);
        }
    }
    SUBCASE("M = Id gives the constant chain") {
        OperatorField L = make_operator(diag_spec(2));
        OperatorField Id = make_constant_operator(Matrix::Identity(2, 2));
        std::vector<Vector> probes = random_probes(staggered_box(2), 5);
        CommonConservationLaw r = common_cl_from_symmetry(Id, L, probes);
        CHECK(r.chain_residual < 1e-12);
        for (const Vector& u : probes) CHECK(std::abs(r.g1.value(u)) < 1e-12);
    }
    SUBCASE("worked 4D constants") {
        BlockSpec spec = jordan22_spec();
        OperatorField L = make_operator(spec);
        OperatorField M = compose_symmetry(
            spec, {{func_constant(2.0), func_constant(1.0)},
                   {func_constant(-2.0), func_constant(1.0)}});
        std::vector<Vector> probes = random_probes(staggered_box(4), 10);
        CommonConservationLaw r = common_cl_from_symmetry(M, L, probes);
        CHECK(r.chain_residual < 1e-7);
    }
    SUBCASE("non-symmetries are rejected") {
        OperatorField U = make_toeplitz(2);
        OperatorField M(2,
                        [](const Vector& p) { return Matrix(p[0] * Matrix::Identity(2, 2)); },
                        [](const Vector& p) {
                            OperatorEval e;
                            e.value = p[0] * Matrix::Identity(2, 2);
                            e.partial.assign(2, Matrix::Zero(2, 2));
                            e.partial[0] = Matrix::Identity(2, 2);
                            return e;
                        });
        CHECK_THROWS_AS(common_cl_from_symmetry(M, U, random_probes(staggered_box(2), 3)),
                        NotASymmetry);
    }
}
