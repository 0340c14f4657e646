#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "nijhydro/errors.hpp"

namespace nijhydro {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// Coefficients of det(lambda Id - A) = lambda^n - s[0] lambda^{n-1} - ... - s[n-1]
/// (note the minus signs: sigma_i is stored at index i-1).
struct SigmaCoefficients {
    std::vector<double> sigma;
    double operator[](int i) const { return sigma[static_cast<size_t>(i) - 1]; }  // 1-based
    int n() const { return static_cast<int>(sigma.size()); }
};

/// Coefficients g_i of M = sum_i g_i L^{n-i} (g[0] multiplies L^{n-1}).
struct CommutantCoefficients {
    std::vector<double> g;
    double operator[](int i) const { return g[static_cast<size_t>(i) - 1]; }  // 1-based
    int n() const { return static_cast<int>(g.size()); }
};

/// Output of the Faddeev–LeVerrier recursion: sigma together with the adjugate
/// coefficients A_0 = Id, A_i = L A_{i-1} - sigma_i Id, which satisfy
/// det(lambda Id - L)(lambda Id - L)^{-1} = sum_i lambda^{n-1-i} A_i.
struct AdjugateSequence {
    SigmaCoefficients sigma;
    std::vector<Matrix> A;  // A[0] = Id ... A[n-1]
};

SigmaCoefficients char_poly_sigma(const Matrix& L);

/// Runs the recursion and verifies the Cayley–Hamilton closure
/// ||L A_{n-1} - sigma_n Id|| <= 1e-9 * scale; throws CayleyHamiltonViolated.
AdjugateSequence a_sequence(const Matrix& L);

/// Same recursion with exact directional derivatives: given dL = dL/dt (for
/// any parameter t), propagates dsigma_i and dA_i through the recursion.
struct AdjugateDerivative {
    std::vector<double> dsigma;
    std::vector<Matrix> dA;
};
AdjugateDerivative a_sequence_derivative(const Matrix& L, const AdjugateSequence& seq,
                                         const Matrix& dL);

/// Columns [v, Av, ..., A^{n-1} v].
Matrix krylov(const Matrix& A, const Vector& v);

/// Scale-invariant cyclicity test: |det krylov| > rank_tol * (max column norm)^n.
bool is_cyclic(const Matrix& A, const Vector& v, double rank_tol = 1e-10);

struct GlRegularity {
    bool regular = false;
    Vector witness;        // a cyclic vector when regular
    std::string diagnostic;
};

/// Randomized probe (k pseudo-random unit vectors from a fixed seed) followed
/// by a deterministic sweep of the standard basis vectors and their prefix
/// sums. Non-gl-regular matrices have no cyclic vector, so a found witness is
/// conclusive; a failed search is reported as "not gl-regular".
GlRegularity is_gl_regular(const Matrix& A, int random_probes = 8, double rank_tol = 1e-10);

/// Expands M in powers of a gl-regular L by solving the Krylov system at a
/// cyclic vector; verifies the entrywise reconstruction residual.
/// Throws NotGlRegular / DoesNotCommute.
CommutantCoefficients commutant_coeffs(const Matrix& L, const Matrix& M,
                                       double commute_tol_scale = 1e-8);

/// sum_i g_i L^{n-i} for 1-based coefficients g.
Matrix commutant_combination(const Matrix& L, const std::vector<double>& g);

/// Matrix polynomial sum_k c[k] L^k.
Matrix matrix_power_combination(const Matrix& L, const std::vector<double>& c);

}  // namespace nijhydro
