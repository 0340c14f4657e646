#include "nijhydro/hydro.hpp"

#include <cmath>

#include "nijhydro/tensor.hpp"

namespace nijhydro {

HydroResidual hydro_residual(const SolutionGrid& grid, const OperatorField& L, int x_stride,
                             int t_stride) {
    const int neq = static_cast<int>(grid.t_axes.size());
    if (static_cast<int>(grid.x_nodes.size()) < 3)
        throw GridTooCoarse("x axis needs at least 3 nodes");
    for (const auto& ax : grid.t_axes)
        if (ax.size() < 3) throw GridTooCoarse("every t axis needs at least 3 nodes");

    HydroResidual out;
    out.per_equation.assign(static_cast<size_t>(neq), 0.0);
    out.hx = grid.x_nodes[1] - grid.x_nodes[0];
    for (const auto& ax : grid.t_axes) out.ht.push_back(ax[1] - ax[0]);

    std::vector<int> it(static_cast<size_t>(neq), 0);
    while (true) {
        bool on_stride = true;
        for (int e = 0; e < neq; ++e)
            if (it[static_cast<size_t>(e)] % t_stride != 0) on_stride = false;
        if (!on_stride) {
            int axis0 = 0;
            while (axis0 < neq && ++it[static_cast<size_t>(axis0)] ==
                                      static_cast<int>(grid.t_axes[static_cast<size_t>(axis0)].size())) {
                it[static_cast<size_t>(axis0)] = 0;
                ++axis0;
            }
            if (axis0 == neq) break;
            continue;
        }
        for (int ix = 1; ix + 1 < static_cast<int>(grid.x_nodes.size()); ++ix) {
            if (ix % x_stride != 0) continue;
            bool any_interior = false;
            for (int e = 0; e < neq; ++e)
                if (it[static_cast<size_t>(e)] > 0 &&
                    it[static_cast<size_t>(e)] + 1 < static_cast<int>(grid.t_axes[static_cast<size_t>(e)].size()))
                    any_interior = true;
            if (!any_interior) continue;

            const Vector& u = grid.values[grid.index(it, ix)];
            const double dx2 = grid.x_nodes[ix + 1] - grid.x_nodes[ix - 1];
            Vector ux = (grid.values[grid.index(it, ix + 1)] - grid.values[grid.index(it, ix - 1)]) / dx2;
            AdjugateSequence seq = a_sequence(L.value(u));

            for (int e = 0; e < neq; ++e) {
                const auto& ax = grid.t_axes[static_cast<size_t>(e)];
                if (it[static_cast<size_t>(e)] == 0 ||
                    it[static_cast<size_t>(e)] + 1 >= static_cast<int>(ax.size()))
                    continue;
                std::vector<int> up = it, dn = it;
                ++up[static_cast<size_t>(e)];
                --dn[static_cast<size_t>(e)];
                const double dt2 = ax[static_cast<size_t>(it[static_cast<size_t>(e)]) + 1] -
                                   ax[static_cast<size_t>(it[static_cast<size_t>(e)]) - 1];
                Vector utd = (grid.values[grid.index(up, ix)] - grid.values[grid.index(dn, ix)]) / dt2;
                Vector res = utd - seq.A[static_cast<size_t>(e) + 1] * ux;
                out.per_equation[static_cast<size_t>(e)] =
                    std::max(out.per_equation[static_cast<size_t>(e)], max_abs(res));
            }
        }
        int axis = 0;
        while (axis < neq && ++it[static_cast<size_t>(axis)] ==
                                 static_cast<int>(grid.t_axes[static_cast<size_t>(axis)].size())) {
            it[static_cast<size_t>(axis)] = 0;
            ++axis;
        }
        if (axis == neq) break;
    }
    return out;
}

std::vector<OperatorField> a_fields(const OperatorField& L) {
    const int n = L.dim();
    std::vector<OperatorField> out;
    for (int i = 1; i < n; ++i) {
        auto eval = [L, i, n](const Vector& u) {
            OperatorEval Le = L.eval(u);
            AdjugateSequence seq = a_sequence(Le.value);
            OperatorEval e;
            e.value = seq.A[static_cast<size_t>(i)];
            e.partial.reserve(static_cast<size_t>(n));
            for (int k = 0; k < n; ++k) {
                AdjugateDerivative d =
                    a_sequence_derivative(Le.value, seq, Le.partial[static_cast<size_t>(k)]);
                e.partial.push_back(d.dA[static_cast<size_t>(i)]);
            }
            return e;
        };
        auto value = [L, i](const Vector& u) { return a_sequence(L.value(u)).A[static_cast<size_t>(i)]; };
        out.push_back(OperatorField(n, value, eval));
    }
    return out;
}

OperatorField common_symmetry_B(const Hierarchy& H, const OperatorField& L,
                                const std::vector<Vector>& probes, double chain_tol) {
    const int n = L.dim();
    if (!H.has_potentials())
        throw NotAHierarchy("common_symmetry_B needs a hierarchy with potentials");
    for (const Vector& u : probes) {
        const double r = hierarchy_chain_residual(L, H, u);
        const double scale = (1.0 + max_abs(L.value(u)));
        if (r > chain_tol * scale)
            throw NotAHierarchy("hierarchy chain residual " + std::to_string(r) + " at a probe");
    }
    auto potentials = H.potentials;
    auto eval = [L, potentials, n](const Vector& u) {
        OperatorEval Le = L.eval(u);
        AdjugateSequence seq = a_sequence(Le.value);
        std::vector<AdjugateDerivative> dseq;
        dseq.reserve(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k)
            dseq.push_back(a_sequence_derivative(Le.value, seq, Le.partial[static_cast<size_t>(k)]));

        OperatorEval e;
        e.value = Matrix::Zero(n, n);
        e.partial.assign(static_cast<size_t>(n), Matrix::Zero(n, n));
        for (int i = 1; i <= n; ++i) {
            ScalarEval fe = potentials[static_cast<size_t>(i) - 1].eval(u);
            const Matrix& Ani = seq.A[static_cast<size_t>(n - i)];
            e.value += fe.value * Ani;
            for (int k = 0; k < n; ++k)
                e.partial[static_cast<size_t>(k)] +=
                    fe.grad[k] * Ani + fe.value * dseq[static_cast<size_t>(k)].dA[static_cast<size_t>(n - i)];
        }
        return e;
    };
    auto value = [eval](const Vector& u) { return eval(u).value; };
    return OperatorField(n, value, eval);
}

CommonConservationLaw common_cl_from_symmetry(const OperatorField& M, const OperatorField& L,
                                              const std::vector<Vector>& probes, double sym_tol) {
    const int n = L.dim();
    CommonConservationLaw out;
    for (const Vector& u : probes) {
        const double scale = residual_scale(L, M, u);
        const double r = symmetry_residual(L, M, u);
        if (r > sym_tol * scale)
            throw NotASymmetry("common_cl_from_symmetry: symmetry residual " + std::to_string(r));
        CommutantFieldEval ce = commutant_field_eval(L, M, u);
        AdjugateSequence seq = a_sequence(L.value(u));
        for (int i = 1; i < n; ++i) {
            Vector lhs = seq.A[static_cast<size_t>(i)].transpose() * Vector(ce.jac.row(0).transpose());
            Vector rhs = ce.jac.row(i).transpose();
            out.chain_residual = std::max(out.chain_residual, max_abs(Vector(lhs - rhs)));
        }
    }
    out.g1 = ScalarField(n, [L, M, n](const Vector& u) {
        CommutantFieldEval ce = commutant_field_eval(L, M, u);
        ScalarEval e;
        e.value = ce.g[0];
        e.grad = ce.jac.row(0).transpose();
        e.hess.resize(n, n);
        for (int k = 0; k < n; ++k) {
            const double step = 1e-6 * (1.0 + std::abs(u[k]));
            Vector up = u, dn = u;
            up[k] += step;
            dn[k] -= step;
            Vector gp = commutant_field_eval(L, M, up).jac.row(0).transpose();
            Vector gm = commutant_field_eval(L, M, dn).jac.row(0).transpose();
            e.hess.col(k) = (gp - gm) / (2.0 * step);
        }
        e.hess = 0.5 * (e.hess + e.hess.transpose()).eval();
        return e;
    });
    return out;
}

}  // namespace nijhydro
