#pragma once

#include "nijhydro/fields.hpp"

namespace nijhydro {

/// A (1,2)-tensor at a point: components T^k_{ij}.
struct Tensor12 {
    int n = 0;
    std::vector<double> t;

    explicit Tensor12(int dim) : n(dim), t(static_cast<size_t>(dim) * dim * dim, 0.0) {}
    double& at(int k, int i, int j) {
        return t[(static_cast<size_t>(k) * n + i) * n + j];
    }
    double at(int k, int i, int j) const {
        return t[(static_cast<size_t>(k) * n + i) * n + j];
    }
    double max_abs() const;
    /// max_k,i,j |T^k_ij + T^k_ji| / 2
    double max_symmetric_part() const;
    /// max_k,i,j |T^k_ij - T^k_ji| / 2
    double max_antisymmetric_part() const;
};

/// Residual scale (1+||L||)(1+||M||)(1+max||dL||+max||dM||); "vanishes" claims
/// are tested against tol * scale.
double residual_scale(const OperatorEval& L, const OperatorEval& M);
double residual_scale(const OperatorField& L, const OperatorField& M, const Vector& u);

/// <L,M>(d_i,d_j)^k = -M^k_s dL^s_i/du^j + L^k_s dM^s_j/du^i
///                    - L^r_i dM^k_j/du^r + M^r_j dL^k_i/du^r.
/// Requires LM = ML at u within 1e-8 * scale; throws DoesNotCommute.
Tensor12 bracket(const OperatorField& L, const OperatorField& M, const Vector& u);
Tensor12 bracket(const OperatorEval& L, const OperatorEval& M);

/// Nijenhuis torsion N_L; antisymmetric in the lower indices by construction
/// and equal to -<L,L>.
Tensor12 torsion(const OperatorField& L, const Vector& u);
Tensor12 torsion(const OperatorEval& L);

/// max residual of the symmetric part of <L,M> (zero iff M is a symmetry).
double symmetry_residual(const OperatorField& L, const OperatorField& M, const Vector& u);

/// max |<M,L>| = max |<L,M>| via <M,L>(xi,eta) = -<L,M>(eta,xi)
/// (zero iff M is a strong symmetry).
double strong_symmetry_residual(const OperatorField& L, const OperatorField& M, const Vector& u);

/// Closedness residual of L* df: max_{i,j} |d_i (L^s_j f_s) - d_j (L^s_i f_s)|.
double conservation_law_residual(const OperatorField& L, const ScalarField& f, const Vector& u);

/// T_M = sum_i dg_i (x) L^{n-i} for the commutant expansion of a symmetry M,
/// and its symmetry defect max |T_M(L xi, eta) - T_M(xi, L eta)| over basis pairs.
struct TmResult {
    Tensor12 T;
    double defect = 0.0;
    std::vector<double> g;
};
TmResult t_m_tensor(const OperatorField& L, const OperatorField& M, const Vector& u,
                    double symmetry_tol = 1e-6);

/// System s1 residual: max_i || L* dg_i - sigma_i dg_1 - dg_{i+1} || with
/// dg_{n+1} := 0 and the last row L* dg_n - sigma_n dg_1 (M = sum g_i L^{n-i}
/// is a symmetry iff this vanishes).
double system_s1_residual(const OperatorField& L, const OperatorField& M, const Vector& u);

}  // namespace nijhydro
