#include "nijhydro/tensor.hpp"

#include <cmath>

namespace nijhydro {

double Tensor12::max_abs() const {
    double m = 0.0;
    for (double v : t) m = std::max(m, std::abs(v));
    return m;
}

double Tensor12::max_symmetric_part() const {
    double m = 0.0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                m = std::max(m, std::abs(at(k, i, j) + at(k, j, i)) / 2.0);
    return m;
}

double Tensor12::max_antisymmetric_part() const {
    double m = 0.0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                m = std::max(m, std::abs(at(k, i, j) - at(k, j, i)) / 2.0);
    return m;
}

double residual_scale(const OperatorEval& L, const OperatorEval& M) {
    double dmax = 0.0;
    double dL = 0.0, dM = 0.0;
    for (const auto& p : L.partial) dL = std::max(dL, max_abs(p));
    for (const auto& p : M.partial) dM = std::max(dM, max_abs(p));
    dmax = dL + dM;
    return (1.0 + max_abs(L.value)) * (1.0 + max_abs(M.value)) * (1.0 + dmax);
}

double residual_scale(const OperatorField& L, const OperatorField& M, const Vector& u) {
    return residual_scale(L.eval(u), M.eval(u));
}

Tensor12 bracket(const OperatorEval& Le, const OperatorEval& Me) {
    const int n = static_cast<int>(Le.value.rows());
    const double commute = max_abs(Matrix(Le.value * Me.value - Me.value * Le.value));
    if (commute > 1e-8 * residual_scale(Le, Me))
        throw DoesNotCommute("bracket requires commuting operators; ||LM-ML|| = " +
                             std::to_string(commute));

    Tensor12 T(n);
    const Matrix& L = Le.value;
    const Matrix& M = Me.value;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int r = 0; r < n; ++r) {
                    s -= M(k, r) * Le.partial[static_cast<size_t>(j)](r, i);
                    s += L(k, r) * Me.partial[static_cast<size_t>(i)](r, j);
                    s -= L(r, i) * Me.partial[static_cast<size_t>(r)](k, j);
                    s += M(r, j) * Le.partial[static_cast<size_t>(r)](k, i);
                }
                T.at(k, i, j) = s;
            }
    return T;
}

Tensor12 bracket(const OperatorField& L, const OperatorField& M, const Vector& u) {
    return bracket(L.eval(u), M.eval(u));
}

Tensor12 torsion(const OperatorEval& Le) {
    const int n = static_cast<int>(Le.value.rows());
    Tensor12 T(n);
    const Matrix& L = Le.value;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double s = 0.0;
                for (int r = 0; r < n; ++r) {
                    s += L(r, i) * Le.partial[static_cast<size_t>(r)](k, j);
                    s -= L(r, j) * Le.partial[static_cast<size_t>(r)](k, i);
                    s -= L(k, r) * (Le.partial[static_cast<size_t>(i)](r, j) -
                                    Le.partial[static_cast<size_t>(j)](r, i));
                }
                T.at(k, i, j) = s;
                T.at(k, j, i) = -s;
            }
    return T;
}

Tensor12 torsion(const OperatorField& L, const Vector& u) { return torsion(L.eval(u)); }

double symmetry_residual(const OperatorField& L, const OperatorField& M, const Vector& u) {
    return bracket(L, M, u).max_symmetric_part();
}

double strong_symmetry_residual(const OperatorField& L, const OperatorField& M, const Vector& u) {
    return bracket(L, M, u).max_abs();
}

double conservation_law_residual(const OperatorField& L, const ScalarField& f, const Vector& u) {
    OperatorEval Le = L.eval(u);
    ScalarEval fe = f.eval(u);
    const int n = L.dim();
    // d_i (L* df)_j = (dL^s_j/du^i) f_s + L^s_j H_{s i}
    Matrix D(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int r = 0; r < n; ++r)
                s += Le.partial[static_cast<size_t>(i)](r, j) * fe.grad[r] +
                     Le.value(r, j) * fe.hess(r, i);
            D(i, j) = s;
        }
    return max_abs(Matrix(D - D.transpose()));
}

TmResult t_m_tensor(const OperatorField& L, const OperatorField& M, const Vector& u,
                    double symmetry_tol) {
    const int n = L.dim();
    const double scale = residual_scale(L, M, u);
    const double sym = symmetry_residual(L, M, u);
    if (sym > symmetry_tol * scale)
        throw NotASymmetry("t_m_tensor requires a symmetry; residual = " + std::to_string(sym));

    CommutantFieldEval ce = commutant_field_eval(L, M, u);
    const Matrix Lv = L.value(u);
    std::vector<Matrix> Lpow(static_cast<size_t>(n));
    Lpow[0] = Matrix::Identity(n, n);
    for (int p = 1; p < n; ++p) Lpow[static_cast<size_t>(p)] = Lpow[static_cast<size_t>(p) - 1] * Lv;

    TmResult out{Tensor12(n), 0.0, ce.g};
    // T^k_{ij} = sum_m dg_m/du^i * (L^{n-m})^k_j
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int m = 1; m <= n; ++m)
                    s += ce.jac(m - 1, i) * Lpow[static_cast<size_t>(n - m)](k, j);
                out.T.at(k, i, j) = s;
            }
    // defect = max |L^r_i T^k_{rj} - L^r_j T^k_{ir}|
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double a = 0.0, b = 0.0;
                for (int r = 0; r < n; ++r) {
                    a += Lv(r, i) * out.T.at(k, r, j);
                    b += Lv(r, j) * out.T.at(k, i, r);
                }
                out.defect = std::max(out.defect, std::abs(a - b));
            }
    return out;
}

double system_s1_residual(const OperatorField& L, const OperatorField& M, const Vector& u) {
    const int n = L.dim();
    CommutantFieldEval ce = commutant_field_eval(L, M, u);
    OperatorEval Le = L.eval(u);
    AdjugateSequence seq = a_sequence(Le.value);

    // Gradients of sigma_i via exact derivative propagation.
    Matrix dsigma(n, n);  // dsigma(i,k) = dsigma_{i+1}/du^{k+1}
    for (int k = 0; k < n; ++k) {
        AdjugateDerivative d = a_sequence_derivative(Le.value, seq, Le.partial[static_cast<size_t>(k)]);
        for (int i = 0; i < n; ++i) dsigma(i, k) = d.dsigma[static_cast<size_t>(i)];
    }

    double worst = 0.0;
    for (int i = 1; i <= n; ++i) {
        // L* dg_i - sigma_i dg_1 - dg_{i+1}  (dg_{n+1} := 0)
        Vector row = Le.value.transpose() * Vector(ce.jac.row(i - 1).transpose());
        row -= seq.sigma[i] * Vector(ce.jac.row(0).transpose());
        if (i < n) row -= Vector(ce.jac.row(i).transpose());
        worst = std::max(worst, max_abs(row));
    }
    return worst;
}

}  // namespace nijhydro
