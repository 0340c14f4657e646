#include "nijhydro/selftest.hpp"

#include <cmath>
#include <random>

#include "nijhydro/hierarchy.hpp"
#include "nijhydro/hydro.hpp"
#include "nijhydro/jordan.hpp"
#include "nijhydro/tensor.hpp"

namespace nijhydro {

OperatorField counterexample1_operator() {
    Matrix L = Matrix::Zero(3, 3);
    L(0, 1) = 1.0;
    return make_constant_operator(L);
}

OperatorField counterexample2_operator() {
    auto value = [](const Vector& u) {
        Matrix L = u[2] * Matrix::Identity(3, 3);
        L(1, 2) += 1.0;
        return L;
    };
    auto eval = [value](const Vector& u) {
        OperatorEval e;
        e.value = value(u);
        e.partial.assign(3, Matrix::Zero(3, 3));
        e.partial[2] = Matrix::Identity(3, 3);
        return e;
    };
    return OperatorField(3, value, eval);
}

OperatorField counterexample1_symmetry(ScalarField f, ScalarField g, ScalarField a,
                                       ScalarField b, ScalarField c) {
    auto eval = [f, g, a, b, c](const Vector& u) {
        ScalarEval fe = f.eval(u), ge = g.eval(u), ae = a.eval(u), be = b.eval(u),
                   ce = c.eval(u);
        const double x = u[0];
        OperatorEval e;
        e.value = Matrix::Zero(3, 3);
        e.value(0, 0) = fe.value;
        e.value(0, 1) = x * fe.grad[1] + ge.value;
        e.value(0, 2) = x * fe.grad[2] + ae.value;
        e.value(1, 1) = fe.value;
        e.value(2, 1) = be.value;
        e.value(2, 2) = ce.value;
        e.partial.assign(3, Matrix::Zero(3, 3));
        for (int k = 0; k < 3; ++k) {
            Matrix& D = e.partial[static_cast<size_t>(k)];
            D(0, 0) = fe.grad[k];
            D(0, 1) = (k == 0 ? fe.grad[1] : 0.0) + x * fe.hess(1, k) + ge.grad[k];
            D(0, 2) = (k == 0 ? fe.grad[2] : 0.0) + x * fe.hess(2, k) + ae.grad[k];
            D(1, 1) = fe.grad[k];
            D(2, 1) = be.grad[k];
            D(2, 2) = ce.grad[k];
        }
        return e;
    };
    auto value = [eval](const Vector& u) { return eval(u).value; };
    return OperatorField(3, value, eval);
}

OperatorField counterexample2_symmetry(ScalarField f, ScalarField g, ScalarField a,
                                       ScalarField b, ScalarField c) {
    auto eval = [f, g, a, b, c](const Vector& u) {
        ScalarEval fe = f.eval(u), ge = g.eval(u), ae = a.eval(u), be = b.eval(u),
                   ce = c.eval(u);
        const double E = std::exp(-u[1]);
        OperatorEval e;
        e.value = Matrix::Zero(3, 3);
        e.value(0, 0) = fe.value + ae.value * E;
        e.value(0, 2) = be.value * E;
        e.value(1, 0) = fe.grad[0] + ce.value * E;
        e.value(1, 1) = fe.value;
        e.value(1, 2) = fe.grad[2] + ge.value * E;
        e.value(2, 2) = fe.value;
        e.partial.assign(3, Matrix::Zero(3, 3));
        for (int k = 0; k < 3; ++k) {
            const double dE = (k == 1) ? -E : 0.0;
            Matrix& D = e.partial[static_cast<size_t>(k)];
            D(0, 0) = fe.grad[k] + ae.grad[k] * E + ae.value * dE;
            D(0, 2) = be.grad[k] * E + be.value * dE;
            D(1, 0) = fe.hess(0, k) + ce.grad[k] * E + ce.value * dE;
            D(1, 1) = fe.grad[k];
            D(1, 2) = fe.hess(2, k) + ge.grad[k] * E + ge.value * dE;
            D(2, 2) = fe.grad[k];
        }
        return e;
    };
    auto value = [eval](const Vector& u) { return eval(u).value; };
    return OperatorField(3, value, eval);
}

ScalarField ce1_conservation_law(Func1 u_of_y, ScalarField v) {
    return ScalarField(3, [u_of_y, v](const Vector& p) {
        Jet uj = u_of_y(p[1], 2);
        ScalarEval ve = v.eval(p);
        const double x = p[0];
        ScalarEval e;
        e.value = x * uj.value() + ve.value;
        e.grad = ve.grad;
        e.grad[0] += uj.value();
        e.grad[1] += x * uj.deriv(1);
        e.hess = ve.hess;
        e.hess(0, 1) += uj.deriv(1);
        e.hess(1, 0) += uj.deriv(1);
        e.hess(1, 1) += x * uj.deriv(2);
        return e;
    });
}

ScalarField ce2_conservation_law(ScalarField a, Func1 b_of_z) {
    return ScalarField(3, [a, b_of_z](const Vector& p) {
        ScalarEval ae = a.eval(p);
        Jet bj = b_of_z(p[2], 2);
        const double E = std::exp(p[1]);
        ScalarEval e;
        e.value = ae.value * E + bj.value();
        e.grad.resize(3);
        e.grad[0] = ae.grad[0] * E;
        e.grad[1] = ae.value * E;
        e.grad[2] = ae.grad[2] * E + bj.deriv(1);
        e.hess.resize(3, 3);
        e.hess(0, 0) = ae.hess(0, 0) * E;
        e.hess(0, 1) = e.hess(1, 0) = ae.grad[0] * E;
        e.hess(0, 2) = e.hess(2, 0) = ae.hess(0, 2) * E;
        e.hess(1, 1) = ae.value * E;
        e.hess(1, 2) = e.hess(2, 1) = ae.grad[2] * E;
        e.hess(2, 2) = ae.hess(2, 2) * E + bj.deriv(2);
        return e;
    });
}

ScalarField constant_field(int n, double c) {
    return ScalarField(n, [n, c](const Vector&) {
        ScalarEval e;
        e.value = c;
        e.grad = Vector::Zero(n);
        e.hess = Matrix::Zero(n, n);
        return e;
    });
}

ScalarField coordinate_field(int n, int index) {
    return ScalarField(n, [n, index](const Vector& u) {
        ScalarEval e;
        e.value = u[index];
        e.grad = Vector::Unit(n, index);
        e.hess = Matrix::Zero(n, n);
        return e;
    });
}

ScalarField zero_field(int n) { return constant_field(n, 0.0); }

namespace {

void push(SelftestReport& rep, const std::string& name, double value, double threshold,
          bool expect_below) {
    SelftestItem item;
    item.name = name;
    item.value = value;
    item.threshold = threshold;
    item.expect_below = expect_below;
    item.pass = expect_below ? value < threshold : value > threshold;
    rep.all_pass = rep.all_pass && item.pass;
    rep.items.push_back(item);
}

ScalarField yz_field() {
    return ScalarField(3, [](const Vector& u) {
        ScalarEval e;
        e.value = u[1] * u[2];
        e.grad = Vector::Zero(3);
        e.grad[1] = u[2];
        e.grad[2] = u[1];
        e.hess = Matrix::Zero(3, 3);
        e.hess(1, 2) = e.hess(2, 1) = 1.0;
        return e;
    });
}

ScalarField xy_field() {
    return ScalarField(3, [](const Vector& u) {
        ScalarEval e;
        e.value = u[0] * u[1];
        e.grad = Vector::Zero(3);
        e.grad[0] = u[1];
        e.grad[1] = u[0];
        e.hess = Matrix::Zero(3, 3);
        e.hess(0, 1) = e.hess(1, 0) = 1.0;
        return e;
    });
}

std::vector<Vector> box_probes(int n, double lo, double hi, int count, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(lo, hi);
    std::vector<Vector> out;
    for (int p = 0; p < count; ++p) {
        Vector u(n);
        for (int i = 0; i < n; ++i) u[i] = uni(rng);
        out.push_back(u);
    }
    return out;
}

}  // namespace

SelftestReport run_selftest() {
    SelftestReport rep;
    const Vector w = (Vector(3) << 1.0, 1.0, 1.0).finished();  // pinned witness probe

    {
        OperatorField L = counterexample1_operator();
        OperatorField M = counterexample1_symmetry(
            yz_field(), coordinate_field(3, 1), coordinate_field(3, 2), yz_field(),
            ScalarField(3, [](const Vector& u) {
                ScalarEval e;
                e.value = u[1] + u[2];
                e.grad = Vector::Zero(3);
                e.grad[1] = e.grad[2] = 1.0;
                e.hess = Matrix::Zero(3, 3);
                return e;
            }));
        double worst = 0.0;
        for (const Vector& u : box_probes(3, 0.4, 1.6, 20, 100))
            worst = std::max(worst, symmetry_residual(L, M, u) / residual_scale(L, M, u));
        push(rep, "ce1 displayed family is a symmetry", worst, 1e-9, true);

        OperatorField Mz = counterexample1_symmetry(coordinate_field(3, 2), zero_field(3),
                                                    zero_field(3), zero_field(3), zero_field(3));
        push(rep, "ce1 witness: f = z member is not a strong symmetry",
             strong_symmetry_residual(L, Mz, w), 0.1, false);
        push(rep, "ce1 witness: the square of a symmetry fails the symmetry test",
             symmetry_residual(L, operator_product(Mz, Mz), w), 0.01, false);

        OperatorField Mb = counterexample1_symmetry(zero_field(3), zero_field(3), zero_field(3),
                                                    coordinate_field(3, 2), zero_field(3));
        ScalarField cl = ce1_conservation_law(func_constant(0.0), yz_field());
        push(rep, "ce1 conservation law d(yz)", conservation_law_residual(L, cl, w), 1e-9, true);
        push(rep, "ce1 witness: M* df of a conservation law is not closed",
             pullback(Mb, one_form_from_scalar(cl)).closedness_residual(w), 0.01, false);
    }

    {
        OperatorField L = counterexample2_operator();
        OperatorField M = counterexample2_symmetry(
            ScalarField(3, [](const Vector& u) {  // f = x z
                ScalarEval e;
                e.value = u[0] * u[2];
                e.grad = Vector::Zero(3);
                e.grad[0] = u[2];
                e.grad[2] = u[0];
                e.hess = Matrix::Zero(3, 3);
                e.hess(0, 2) = e.hess(2, 0) = 1.0;
                return e;
            }),
            coordinate_field(3, 0), coordinate_field(3, 2), constant_field(3, 2.0),
            coordinate_field(3, 0));
        double worst = 0.0;
        for (const Vector& u : box_probes(3, 0.4, 1.6, 20, 200))
            worst = std::max(worst, symmetry_residual(L, M, u) / residual_scale(L, M, u));
        push(rep, "ce2 displayed family is a symmetry", worst, 1e-9, true);

        OperatorField Ma = counterexample2_symmetry(zero_field(3), zero_field(3),
                                                    constant_field(3, 1.0), zero_field(3),
                                                    zero_field(3));
        push(rep, "ce2 witness: a = 1 member is not a strong symmetry",
             strong_symmetry_residual(L, Ma, w), 0.1, false);
        push(rep, "ce2 witness: the square of a symmetry fails the symmetry test",
             symmetry_residual(L, operator_product(Ma, Ma), w), 0.01, false);

        OperatorField Mg = counterexample2_symmetry(zero_field(3), constant_field(3, 1.0),
                                                    zero_field(3), zero_field(3), zero_field(3));
        ScalarField cl = ce2_conservation_law(coordinate_field(3, 0), func_constant(0.0));
        push(rep, "ce2 conservation law d(x e^y)", conservation_law_residual(L, cl, w), 1e-9,
             true);
        push(rep, "ce2 non-conservation-law d(xy)", conservation_law_residual(L, xy_field(), w),
             0.1, false);
        push(rep, "ce2 witness: M* df of a conservation law is not closed",
             pullback(Mg, one_form_from_scalar(cl)).closedness_residual(w), 0.01, false);
    }

    {
        Matrix N3 = Matrix::Zero(3, 3);
        N3(0, 1) = N3(1, 2) = 1.0;
        OperatorField N = make_constant_operator(N3);
        BlockSpec spec;
        spec.blocks.push_back(Block::jordan(3));
        OperatorField M = compose_symmetry(
            spec, {{[](double s, int m) { return jet_sin(Jet::variable(s, m)); },
                    [](double s, int m) { return jet_exp(0.5 * Jet::variable(s, m)); },
                    func_polynomial({0.0, 1.0, 0.25})}});
        double worst = 0.0;
        for (const Vector& u : box_probes(3, 0.4, 1.2, 10, 300))
            worst = std::max(worst, system_s1_residual(N, M, u));
        push(rep, "jordan symmetry solves the nilpotent chain system", worst, 1e-6, true);

        OperatorField U = make_toeplitz(3);
        double worst_u = 0.0;
        for (const Vector& u : box_probes(3, 0.4, 1.2, 10, 301))
            worst_u = std::max(worst_u, symmetry_residual(U, M, u) / residual_scale(U, M, u));
        push(rep, "block symmetries serve U and N alike", std::max(worst, worst_u), 1e-6, true);
    }

    {
        const int n = 4;
        std::vector<ScalarField> sigma;
        for (int i = 0; i < n; ++i) sigma.push_back(coordinate_field(n, i));
        OperatorField L = make_companion_second(sigma);
        double worst = 0.0;
        for (const Vector& u : box_probes(n, 0.2, 1.0, 5, 400)) {
            AdjugateSequence seq = a_sequence(L.value(u));
            for (int i = 1; i < n; ++i)
                worst = std::max(
                    worst, max_abs(Vector(seq.A[static_cast<size_t>(i)] * Vector::Unit(n, n - 1) -
                                          Vector::Unit(n, n - 1 - i))));
        }
        push(rep, "companion-form identity A_i e_n = e_{n-i}", worst, 1e-12, true);
    }

    {
        OperatorField U = make_toeplitz(4);
        double worst = 0.0;
        for (const Vector& u : box_probes(4, 0.4, 1.6, 10, 500)) {
            AdjugateSequence seq = a_sequence(U.value(u));
            worst = std::max(worst, max_abs(Matrix(U.value(u) * seq.A[3] -
                                                   seq.sigma[4] * Matrix::Identity(4, 4))));
        }
        push(rep, "cayley-hamilton closure on Toeplitz probes", worst, 1e-10, true);
    }

    {
        BlockSpec diag4;
        for (int i = 0; i < 4; ++i) diag4.blocks.push_back(Block::diagonal(func_identity()));
        OperatorField L4 = make_operator(diag4);
        Hierarchy H4 = standard_hierarchy(diag4, (Vector(4) << 1, 2, 3, 4).finished());

        BlockSpec jordan22;
        jordan22.blocks.push_back(Block::jordan(2));
        jordan22.blocks.push_back(Block::jordan(2));
        OperatorField L22 = make_operator(jordan22);
        Hierarchy H22 = standard_hierarchy(jordan22, (Vector(4) << 1, 0, 1, 1).finished());

        double worst = 0.0;
        std::mt19937_64 rng(600);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int p = 0; p < 10; ++p) {
            Vector u(4);
            for (int i = 0; i < 4; ++i) u[i] = 0.5 + i + 0.4 * uni(rng);
            worst = std::max(worst, hierarchy_chain_residual(L4, H4, u));
            worst = std::max(worst, hierarchy_chain_residual(L22, H22, u));
        }
        push(rep, "standard hierarchy chains", worst, 1e-8, true);
    }

    return rep;
}

}  // namespace nijhydro
