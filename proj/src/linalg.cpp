#include "nijhydro/linalg.hpp"

#include <cmath>
#include <random>

namespace nijhydro {

namespace {

void check_square(const Matrix& L) {
    if (L.rows() != L.cols()) throw DimensionMismatch("matrix is not square");
    if (!L.allFinite()) throw EvaluationError("matrix has non-finite entries");
}

AdjugateSequence faddeev_leverrier(const Matrix& L) {
    check_square(L);
    const int n = static_cast<int>(L.rows());
    AdjugateSequence out;
    out.sigma.sigma.resize(static_cast<size_t>(n));
    out.A.reserve(static_cast<size_t>(n));
    out.A.push_back(Matrix::Identity(n, n));
    Matrix LA = L;
    for (int i = 1; i <= n; ++i) {
        const double sigma_i = LA.trace() / static_cast<double>(i);
        out.sigma.sigma[static_cast<size_t>(i) - 1] = sigma_i;
        if (i < n) {
            out.A.push_back(LA - sigma_i * Matrix::Identity(n, n));
            LA = L * out.A.back();
        }
    }
    return out;
}

}  // namespace

SigmaCoefficients char_poly_sigma(const Matrix& L) { return faddeev_leverrier(L).sigma; }

AdjugateSequence a_sequence(const Matrix& L) {
    AdjugateSequence seq = faddeev_leverrier(L);
    const int n = static_cast<int>(L.rows());
    const double sn = seq.sigma.sigma.back();
    const Matrix closure = L * seq.A.back() - sn * Matrix::Identity(n, n);
    const double scale = 1.0 + max_abs(L) * max_abs(seq.A.back()) + std::abs(sn);
    if (max_abs(closure) > 1e-9 * scale)
        throw CayleyHamiltonViolated("Cayley–Hamilton closure residual " +
                                     std::to_string(max_abs(closure)) + " exceeds 1e-9*scale");
    return seq;
}

AdjugateDerivative a_sequence_derivative(const Matrix& L, const AdjugateSequence& seq,
                                         const Matrix& dL) {
    const int n = static_cast<int>(L.rows());
    AdjugateDerivative d;
    d.dsigma.resize(static_cast<size_t>(n));
    d.dA.reserve(static_cast<size_t>(n));
    d.dA.push_back(Matrix::Zero(n, n));
    for (int i = 1; i <= n; ++i) {
        const Matrix dLA = dL * seq.A[static_cast<size_t>(i) - 1] + L * d.dA.back();
        d.dsigma[static_cast<size_t>(i) - 1] = dLA.trace() / static_cast<double>(i);
        if (i < n)
            d.dA.push_back(dLA - d.dsigma[static_cast<size_t>(i) - 1] * Matrix::Identity(n, n));
    }
    return d;
}

Matrix krylov(const Matrix& A, const Vector& v) {
    check_square(A);
    const int n = static_cast<int>(A.rows());
    if (v.size() != n) throw DimensionMismatch("vector size does not match matrix");
    Matrix K(n, n);
    Vector w = v;
    for (int k = 0; k < n; ++k) {
        K.col(k) = w;
        if (k + 1 < n) w = A * w;
    }
    return K;
}

bool is_cyclic(const Matrix& A, const Vector& v, double rank_tol) {
    const Matrix K = krylov(A, v);
    double maxcol = 0.0;
    for (int k = 0; k < K.cols(); ++k) maxcol = std::max(maxcol, K.col(k).norm());
    if (maxcol == 0.0) return false;
    const double threshold = rank_tol * std::pow(maxcol, static_cast<double>(K.cols()));
    return std::abs(K.determinant()) > threshold;
}

GlRegularity is_gl_regular(const Matrix& A, int random_probes, double rank_tol) {
    check_square(A);
    const int n = static_cast<int>(A.rows());
    GlRegularity r;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int p = 0; p < random_probes; ++p) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = gauss(rng);
        v.normalize();
        if (is_cyclic(A, v, rank_tol)) {
            r.regular = true;
            r.witness = v;
            return r;
        }
    }
    // Deterministic fallback: standard basis vectors, then their prefix sums.
    for (int i = 0; i < n; ++i) {
        Vector v = Vector::Unit(n, i);
        if (is_cyclic(A, v, rank_tol)) {
            r.regular = true;
            r.witness = v;
            return r;
        }
    }
    Vector s = Vector::Unit(n, 0);
    for (int i = 1; i < n; ++i) {
        s += Vector::Unit(n, i);
        Vector v = s.normalized();
        if (is_cyclic(A, v, rank_tol)) {
            r.regular = true;
            r.witness = v;
            return r;
        }
    }
    r.diagnostic = "no cyclic vector found by randomized probes or deterministic sweep";
    return r;
}

CommutantCoefficients commutant_coeffs(const Matrix& L, const Matrix& M,
                                       double commute_tol_scale) {
    check_square(L);
    const int n = static_cast<int>(L.rows());
    if (M.rows() != n || M.cols() != n) throw DimensionMismatch("L and M sizes differ");

    const double commute_scale = (1.0 + max_abs(L)) * (1.0 + max_abs(M));
    const double commute_residual = max_abs(Matrix(L * M - M * L));
    if (commute_residual > commute_tol_scale * commute_scale)
        throw DoesNotCommute("||LM - ML|| = " + std::to_string(commute_residual));

    GlRegularity reg = is_gl_regular(L);
    if (!reg.regular) throw NotGlRegular("commutant expansion requires a gl-regular operator");
    const Vector v = reg.witness;

    // Columns L^{n-1} v ... L v, v so that column i multiplies g_{i+1}.
    Matrix K(n, n);
    Vector w = v;
    for (int k = 0; k < n; ++k) {
        K.col(n - 1 - k) = w;
        if (k + 1 < n) w = L * w;
    }
    const Vector rhs = M * v;
    CommutantCoefficients out;
    Vector g = K.partialPivLu().solve(rhs);
    out.g.assign(g.data(), g.data() + n);

    const Matrix recon = commutant_combination(L, out.g);
    double comb_scale = 1.0 + max_abs(M);
    double Lp = 1.0;
    for (int i = n; i >= 1; --i) {
        comb_scale += std::abs(out.g[static_cast<size_t>(i) - 1]) * Lp;
        Lp *= std::max(1.0, max_abs(L));
    }
    const double residual = max_abs(Matrix(recon - M));
    if (residual > 1e-8 * comb_scale)
        throw NotGlRegular("commutant reconstruction residual " + std::to_string(residual) +
                           " exceeds 1e-8*scale; L is too close to non-gl-regular");
    return out;
}

Matrix commutant_combination(const Matrix& L, const std::vector<double>& g) {
    const int n = static_cast<int>(L.rows());
    if (static_cast<int>(g.size()) != n) throw DimensionMismatch("coefficient count != n");
    // Horner: ((g1 L + g2 Id) L + g3 Id) L + ...
    Matrix R = g[0] * Matrix::Identity(n, n);
    for (int i = 1; i < n; ++i) R = R * L + g[static_cast<size_t>(i)] * Matrix::Identity(n, n);
    return R;
}

Matrix matrix_power_combination(const Matrix& L, const std::vector<double>& c) {
    const int n = static_cast<int>(L.rows());
    Matrix R = Matrix::Zero(n, n);
    for (size_t k = c.size(); k-- > 0;) {
        R = R * L;
        R += c[k] * Matrix::Identity(n, n);
    }
    return R;
}

}  // namespace nijhydro
