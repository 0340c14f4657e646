#include "nijhydro/jordan.hpp"

#include <cmath>

namespace nijhydro {

namespace {

// x^p with 0 * x^{negative} treated as 0 by the callers; p >= 0 here.
double ipow(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

Matrix toeplitz_from_coeffs(const Jet& coeffs, int k) {
    Matrix M = Matrix::Zero(k, k);
    for (int r = 0; r < k; ++r)
        for (int c = r; c < k; ++c) M(r, c) = coeffs.coeff(c - r);
    return M;
}

}  // namespace

Jet toeplitz_expansion(const Func1& f, const Vector& ub, int order) {
    const int k = static_cast<int>(ub.size());
    Jet P(order);
    for (int d = 0; d <= order && d < k; ++d) P.coeff_ref(d) = ub[k - 1 - d];
    Jet fj = f(ub[k - 1], order);
    if (fj.order() < order) throw InsufficientJetOrder("block function jet order too low");
    return Jet::compose(fj.truncated(order), P);
}

Matrix h_of_U(const Func1& h, const Vector& ub) {
    const int k = static_cast<int>(ub.size());
    return toeplitz_from_coeffs(toeplitz_expansion(h, ub, k - 1), k);
}

OperatorEval h_of_U_with_partials(const Func1& h, const Vector& ub) {
    const int k = static_cast<int>(ub.size());
    OperatorEval e;
    e.value = h_of_U(h, ub);
    e.partial.assign(static_cast<size_t>(k), Matrix::Zero(k, k));
    // d h(U)/du^i = N^{k-i} h'(U): shift the h' expansion by k-i superdiagonals.
    Jet hp = h(ub[k - 1], k).derivative();
    Jet hpP = Jet::compose(hp.truncated(k - 1), [&] {
        Jet P(k - 1);
        for (int d = 0; d < k; ++d)
            if (d <= k - 1) P.coeff_ref(d) = ub[k - 1 - d];
        return P;
    }());
    for (int i = 1; i <= k; ++i) {
        const int shift = k - i;
        Matrix& D = e.partial[static_cast<size_t>(i) - 1];
        for (int r = 0; r < k; ++r)
            for (int c = r + shift; c < k; ++c) D(r, c) = hpP.coeff(c - r - shift);
    }
    return e;
}

OperatorField h_of_U_field(Func1 h, int k) {
    auto eval = [h](const Vector& u) { return h_of_U_with_partials(h, u); };
    auto value = [h](const Vector& u) { return h_of_U(h, u); };
    return OperatorField(k, value, eval);
}

Matrix jordan_symmetry(const std::vector<Func1>& fs, const Vector& ub) {
    const int k = static_cast<int>(ub.size());
    if (static_cast<int>(fs.size()) != k)
        throw DimensionMismatch("Jordan block of size k needs k functions");
    Jet m(k - 1);  // Toeplitz coefficient vector of M
    for (int i = 1; i <= k; ++i) {
        Jet comp = toeplitz_expansion(fs[static_cast<size_t>(i) - 1], ub, i - 1);
        for (int j = 0; j <= i - 1; ++j) m.coeff_ref((k - i) + j) += comp.coeff(j);
    }
    return toeplitz_from_coeffs(m, k);
}

OperatorEval jordan_symmetry_with_partials(const std::vector<Func1>& fs, const Vector& ub) {
    const int k = static_cast<int>(ub.size());
    OperatorEval e;
    e.value = jordan_symmetry(fs, ub);
    e.partial.assign(static_cast<size_t>(k), Matrix::Zero(k, k));
    // dM/du^l = sum_i N^{k-l} f_i'(U) N^{k-i}.
    for (int i = 1; i <= k; ++i) {
        Jet fp = fs[static_cast<size_t>(i) - 1](ub[k - 1], i).derivative();
        Jet comp = Jet::compose(fp.truncated(i - 1), [&] {
            Jet P(i - 1);
            for (int d = 0; d <= i - 1 && d < k; ++d) P.coeff_ref(d) = ub[k - 1 - d];
            return P;
        }());
        for (int l = 1; l <= k; ++l)
            for (int j = 0; j <= i - 1; ++j) {
                const int d = (k - l) + (k - i) + j;
                if (d > k - 1) continue;
                for (int r = 0; r + d < k; ++r)
                    e.partial[static_cast<size_t>(l) - 1](r, r + d) += comp.coeff(j);
            }
    }
    return e;
}

ScalarEval jordan_conservation_law(const std::vector<Func1>& fs, const Vector& ub) {
    const int k = static_cast<int>(ub.size());
    if (static_cast<int>(fs.size()) != k)
        throw DimensionMismatch("Jordan block of size k needs k functions");
    ScalarEval out;
    out.grad = Vector::Zero(k);
    out.hess = Matrix::Zero(k, k);
    for (int i = 1; i <= k; ++i) {
        Jet fj = fs[static_cast<size_t>(i) - 1](ub[k - 1], i + 1);
        Jet comp = toeplitz_expansion([&fj](double, int order) { return fj.truncated(order); },
                                      ub, i - 1);
        out.value += comp.coeff(i - 1);
        Jet compd = Jet::compose(fj.derivative().truncated(i - 1), [&] {
            Jet P(i - 1);
            for (int d = 0; d <= i - 1 && d < k; ++d) P.coeff_ref(d) = ub[k - 1 - d];
            return P;
        }());
        for (int j = 1; j <= k; ++j) {
            const int idx = i + j - k - 1;
            if (idx >= 0 && idx <= i - 1) out.grad[j - 1] += compd.coeff(idx);
        }
        Jet compdd = Jet::compose(fj.derivative().derivative().truncated(i - 1), [&] {
            Jet P(i - 1);
            for (int d = 0; d <= i - 1 && d < k; ++d) P.coeff_ref(d) = ub[k - 1 - d];
            return P;
        }());
        for (int j = 1; j <= k; ++j)
            for (int l = 1; l <= k; ++l) {
                const int idx = i + j + l - 2 * k - 1;
                if (idx >= 0 && idx <= i - 1) out.hess(j - 1, l - 1) += compdd.coeff(idx);
            }
    }
    return out;
}

OperatorField compose_symmetry(const BlockSpec& spec,
                               std::vector<std::vector<Func1>> per_block) {
    if (per_block.size() != spec.blocks.size())
        throw DimensionMismatch("per-block function count != block count");
    for (size_t b = 0; b < spec.blocks.size(); ++b) {
        const int want = spec.blocks[b].kind == Block::Kind::Diagonal1 ? 1 : spec.blocks[b].size;
        if (static_cast<int>(per_block[b].size()) != want)
            throw DimensionMismatch("wrong function count for a block");
    }
    const int n = spec.dimension();
    auto eval = [spec, per_block, n](const Vector& u) {
        OperatorEval e;
        e.value = Matrix::Zero(n, n);
        e.partial.assign(static_cast<size_t>(n), Matrix::Zero(n, n));
        for (size_t b = 0; b < spec.blocks.size(); ++b) {
            const int o = spec.offset(b), k = spec.blocks[b].size;
            if (spec.blocks[b].kind == Block::Kind::Diagonal1) {
                Jet F = per_block[b][0](u[o], 1);
                e.value(o, o) = F.value();
                e.partial[static_cast<size_t>(o)](o, o) = F.deriv(1);
            } else {
                OperatorEval be = jordan_symmetry_with_partials(per_block[b], u.segment(o, k));
                e.value.block(o, o, k, k) = be.value;
                for (int j = 0; j < k; ++j)
                    e.partial[static_cast<size_t>(o + j)].block(o, o, k, k) =
                        be.partial[static_cast<size_t>(j)];
            }
        }
        return e;
    };
    auto value = [eval](const Vector& u) { return eval(u).value; };
    return OperatorField(n, value, eval);
}

ScalarField compose_conservation_law(const BlockSpec& spec,
                                     std::vector<std::vector<Func1>> per_block) {
    const int n = spec.dimension();
    return ScalarField(n, [spec, per_block, n](const Vector& u) {
        ScalarEval out;
        out.grad = Vector::Zero(n);
        out.hess = Matrix::Zero(n, n);
        for (size_t b = 0; b < spec.blocks.size(); ++b) {
            const int o = spec.offset(b), k = spec.blocks[b].size;
            if (spec.blocks[b].kind == Block::Kind::Diagonal1) {
                Jet F = per_block[b][0](u[o], 2);
                out.value += F.value();
                out.grad[o] += F.deriv(1);
                out.hess(o, o) += F.deriv(2);
            } else {
                ScalarEval be = jordan_conservation_law(per_block[b], u.segment(o, k));
                out.value += be.value;
                out.grad.segment(o, k) += be.grad;
                out.hess.block(o, o, k, k) += be.hess;
            }
        }
        return out;
    });
}

Hierarchy standard_hierarchy(const BlockSpec& spec, const Vector& base) {
    const int n = spec.dimension();
    for (const auto& b : spec.blocks)
        if (b.kind == Block::Kind::JordanToeplitz && b.size > 2)
            throw UnsupportedBlockSize(
                "closed-form standard hierarchy covers Jordan blocks of size <= 2; "
                "use hierarchy_from_seed for larger blocks");

    Hierarchy H;
    H.base = base;
    for (int i = 1; i <= n; ++i) {
        auto eval = [spec, i, n](const Vector& u) {
            ScalarEval out;
            out.grad = Vector::Zero(n);
            out.hess = Matrix::Zero(n, n);
            for (size_t b = 0; b < spec.blocks.size(); ++b) {
                const int o = spec.offset(b);
                if (spec.blocks[b].kind == Block::Kind::Diagonal1) {
                    Jet lam = spec.blocks[b].lambda(u[o], 2);
                    const double L0 = lam.value(), L1 = lam.deriv(1), L2 = lam.deriv(2);
                    out.value += ipow(L0, i) / i;
                    out.grad[o] += ipow(L0, i - 1) * L1;
                    out.hess(o, o) += (i - 1 > 0 ? (i - 1) * ipow(L0, i - 2) * L1 * L1 : 0.0) +
                                      ipow(L0, i - 1) * L2;
                } else {
                    const int ai = o, bi = o + 1;
                    const double a = u[ai], bb = u[bi];
                    out.value += ipow(bb, i - 1) * a;
                    out.grad[ai] += ipow(bb, i - 1);
                    if (i >= 2) {
                        out.grad[bi] += (i - 1) * ipow(bb, i - 2) * a;
                        out.hess(ai, bi) += (i - 1) * ipow(bb, i - 2);
                        out.hess(bi, ai) += (i - 1) * ipow(bb, i - 2);
                        if (i >= 3) out.hess(bi, bi) += (i - 1) * (i - 2) * ipow(bb, i - 3) * a;
                    }
                }
            }
            return out;
        };
        H.potentials.push_back(ScalarField(n, eval));
        H.omega.push_back(one_form_from_scalar(H.potentials.back()));
    }
    return H;
}

}  // namespace nijhydro
