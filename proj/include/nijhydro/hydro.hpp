#pragma once

#include <cstdint>

#include "nijhydro/hierarchy.hpp"

namespace nijhydro {

/// Discrete solution values u(x, t_1..t_{n-1}) on a tensor grid. Node layout
/// is row-major over (t_1, ..., t_{n-1}) with x fastest.
struct SolutionGrid {
    int n = 0;
    std::vector<double> x_nodes;
    std::vector<std::vector<double>> t_axes;
    std::vector<Vector> values;
    std::vector<uint8_t> converged;

    size_t node_count() const {
        size_t c = x_nodes.size();
        for (const auto& ax : t_axes) c *= ax.size();
        return c;
    }
    size_t index(const std::vector<int>& it, int ix) const {
        size_t idx = 0;
        for (size_t a = 0; a < t_axes.size(); ++a)
            idx = idx * t_axes[a].size() + static_cast<size_t>(it[a]);
        return idx * x_nodes.size() + static_cast<size_t>(ix);
    }
    bool all_converged() const {
        for (uint8_t c : converged)
            if (!c) return false;
        return true;
    }
};

struct HydroResidual {
    std::vector<double> per_equation;  // residual of u_{t_i} = A_i u_x, i = 1..n-1
    double hx = 0.0;
    std::vector<double> ht;
};

/// Sup-norm residuals of u_{t_i} = A_i(u) u_x over interior nodes, using
/// central differences. Throws GridTooCoarse when an axis has < 3 nodes.
/// The strides restrict the evaluation to nodes whose indices are stride
/// multiples (refinement-ratio checks compare residuals on the shared
/// physical nodes of an h and an h/2 grid via strides 1 and 2).
HydroResidual hydro_residual(const SolutionGrid& grid, const OperatorField& L,
                             int x_stride = 1, int t_stride = 1);

/// The operator fields A_1..A_{n-1} (A_0 = Id) lifted from the pointwise
/// recursion A_i = L A_{i-1} - sigma_i Id, with exact partials propagated
/// through the recursion.
std::vector<OperatorField> a_fields(const OperatorField& L);

/// B = f_1 A_{n-1} + ... + f_n A_0 (with A_0 = Id); a common symmetry of all
/// A_i when f_i form a hierarchy of L. The chain property is verified at the
/// probes; throws NotAHierarchy.
OperatorField common_symmetry_B(const Hierarchy& H, const OperatorField& L,
                                const std::vector<Vector>& probes, double chain_tol = 1e-6);

struct CommonConservationLaw {
    ScalarField g1;
    double chain_residual = 0.0;  // max over probes of ||A_i* dg_1 - dg_{i+1}||
};

/// From a symmetry M = sum g_i L^{n-i}: dg_1 is a common conservation law of
/// the A_i with A_i* dg_1 = dg_{i+1}. Verifies M at the probes
/// (NotASymmetry) and reports the chain residual.
CommonConservationLaw common_cl_from_symmetry(const OperatorField& M, const OperatorField& L,
                                              const std::vector<Vector>& probes,
                                              double sym_tol = 1e-6);

}  // namespace nijhydro
