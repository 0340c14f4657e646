#include "nijhydro/fields.hpp"

#include <cmath>

namespace nijhydro {

namespace {

void check_domain(const std::optional<Box>& domain, const Vector& u) {
    if (domain && !domain->contains(u))
        throw EvaluationError("evaluation point outside the field's domain box");
}

}  // namespace

ScalarEval ScalarField::eval(const Vector& u) const {
    if (!eval_) throw EvaluationError("empty ScalarField");
    if (u.size() != n_) throw DimensionMismatch("point dimension != field dimension");
    check_domain(domain_, u);
    return eval_(u);
}

Matrix OperatorField::value(const Vector& u) const {
    if (!value_) throw EvaluationError("empty OperatorField");
    if (u.size() != n_) throw DimensionMismatch("point dimension != field dimension");
    check_domain(domain_, u);
    return value_(u);
}

OperatorEval OperatorField::eval(const Vector& u) const {
    if (!eval_) throw EvaluationError("empty OperatorField");
    if (u.size() != n_) throw DimensionMismatch("point dimension != field dimension");
    check_domain(domain_, u);
    return eval_(u);
}

OneFormEval OneFormField::eval(const Vector& u) const {
    if (!eval_) throw EvaluationError("empty OneFormField");
    if (u.size() != n_) throw DimensionMismatch("point dimension != field dimension");
    return eval_(u);
}

Curve::Curve(std::vector<Func1> components, double a, double b, int order)
    : components_(std::move(components)), a_(a), b_(b), order_(order) {}

Vector Curve::derivative(double x, int k) const {
    if (k > order_) throw InsufficientJetOrder("curve derivative order exceeds declared order");
    if (x < a_ - 1e-12 || x > b_ + 1e-12)
        throw EvaluationError("curve parameter outside the domain interval");
    Vector v(dim());
    for (int i = 0; i < dim(); ++i) v[i] = components_[static_cast<size_t>(i)](x, k).deriv(k);
    return v;
}

OperatorField make_diagonal(std::vector<Func1> lambdas, std::optional<Box> domain) {
    const int n = static_cast<int>(lambdas.size());
    auto value = [lambdas, n](const Vector& u) {
        Matrix L = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) L(i, i) = lambdas[static_cast<size_t>(i)](u[i], 0).value();
        return L;
    };
    auto eval = [lambdas, n](const Vector& u) {
        OperatorEval e;
        e.value = Matrix::Zero(n, n);
        e.partial.assign(static_cast<size_t>(n), Matrix::Zero(n, n));
        for (int i = 0; i < n; ++i) {
            Jet j = lambdas[static_cast<size_t>(i)](u[i], 1);
            e.value(i, i) = j.value();
            e.partial[static_cast<size_t>(i)](i, i) = j.deriv(1);
        }
        return e;
    };
    return OperatorField(n, value, eval, std::move(domain));
}

OperatorField make_toeplitz(int k) {
    if (k < 1) throw DimensionMismatch("Toeplitz block size must be >= 1");
    auto value = [k](const Vector& u) {
        Matrix U = Matrix::Zero(k, k);
        for (int r = 0; r < k; ++r)
            for (int c = r; c < k; ++c) U(r, c) = u[k - 1 - (c - r)];
        return U;
    };
    auto eval = [k, value](const Vector& u) {
        OperatorEval e;
        e.value = value(u);
        e.partial.assign(static_cast<size_t>(k), Matrix::Zero(k, k));
        // dU/du^{i} has ones on superdiagonal k-i (1-based i).
        for (int i = 0; i < k; ++i) {
            const int d = k - 1 - i;
            for (int r = 0; r + d < k; ++r) e.partial[static_cast<size_t>(i)](r, r + d) = 1.0;
        }
        return e;
    };
    return OperatorField(k, value, eval);
}

OperatorField make_block_diagonal(const BlockSpec& spec, std::vector<OperatorField> fields) {
    if (spec.blocks.size() != fields.size())
        throw DimensionMismatch("block count != field count");
    const int n = spec.dimension();
    for (size_t b = 0; b < fields.size(); ++b)
        if (fields[b].dim() != spec.blocks[b].size)
            throw DimensionMismatch("block field dimension != block size");

    std::vector<int> offsets(fields.size());
    for (size_t b = 0; b < fields.size(); ++b) offsets[b] = spec.offset(b);

    auto value = [fields, offsets, n](const Vector& u) {
        Matrix L = Matrix::Zero(n, n);
        for (size_t b = 0; b < fields.size(); ++b) {
            const int o = offsets[b], k = fields[b].dim();
            L.block(o, o, k, k) = fields[b].value(u.segment(o, k));
        }
        return L;
    };
    auto eval = [fields, offsets, n](const Vector& u) {
        OperatorEval e;
        e.value = Matrix::Zero(n, n);
        e.partial.assign(static_cast<size_t>(n), Matrix::Zero(n, n));
        for (size_t b = 0; b < fields.size(); ++b) {
            const int o = offsets[b], k = fields[b].dim();
            OperatorEval be = fields[b].eval(u.segment(o, k));
            e.value.block(o, o, k, k) = be.value;
            for (int j = 0; j < k; ++j)
                e.partial[static_cast<size_t>(o + j)].block(o, o, k, k) =
                    be.partial[static_cast<size_t>(j)];
        }
        return e;
    };
    return OperatorField(n, value, eval);
}

OperatorField make_operator(const BlockSpec& spec, std::optional<Box> domain) {
    std::vector<OperatorField> fields;
    fields.reserve(spec.blocks.size());
    for (const auto& b : spec.blocks) {
        if (b.kind == Block::Kind::Diagonal1)
            fields.push_back(make_diagonal({b.lambda}));
        else
            fields.push_back(make_toeplitz(b.size));
    }
    OperatorField L = make_block_diagonal(spec, std::move(fields));
    if (!domain) return L;
    return OperatorField(
        L.dim(), [L](const Vector& u) { return L.value(u); },
        [L](const Vector& u) { return L.eval(u); }, std::move(domain));
}

namespace {

OperatorField make_companion(std::vector<ScalarField> sigma, bool first_form) {
    const int n = static_cast<int>(sigma.size());
    auto layout = [n, first_form](const std::vector<double>& s) {
        Matrix L = Matrix::Zero(n, n);
        for (int i = 0; i + 1 < n; ++i) L(i, i + 1) = 1.0;
        if (first_form)
            for (int i = 0; i < n; ++i) L(i, 0) = s[static_cast<size_t>(i)];
        else
            for (int j = 0; j < n; ++j) L(n - 1, j) = s[static_cast<size_t>(n - 1 - j)];
        return L;
    };
    auto value = [sigma, layout, n](const Vector& u) {
        std::vector<double> s(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) s[static_cast<size_t>(i)] = sigma[static_cast<size_t>(i)].value(u);
        return layout(s);
    };
    auto eval = [sigma, n, first_form, value](const Vector& u) {
        OperatorEval e;
        e.value = value(u);
        e.partial.assign(static_cast<size_t>(n), Matrix::Zero(n, n));
        for (int i = 0; i < n; ++i) {
            Vector grad = sigma[static_cast<size_t>(i)].eval(u).grad;
            for (int k = 0; k < n; ++k) {
                if (first_form)
                    e.partial[static_cast<size_t>(k)](i, 0) = grad[k];
                else
                    e.partial[static_cast<size_t>(k)](n - 1, n - 1 - i) = grad[k];
            }
        }
        return e;
    };
    return OperatorField(n, value, eval);
}

}  // namespace

OperatorField make_companion_first(std::vector<ScalarField> sigma) {
    return make_companion(std::move(sigma), true);
}

OperatorField make_companion_second(std::vector<ScalarField> sigma) {
    return make_companion(std::move(sigma), false);
}

OperatorField make_constant_operator(const Matrix& L0) {
    const int n = static_cast<int>(L0.rows());
    auto value = [L0](const Vector&) { return L0; };
    auto eval = [L0, n](const Vector&) {
        OperatorEval e;
        e.value = L0;
        e.partial.assign(static_cast<size_t>(n), Matrix::Zero(n, n));
        return e;
    };
    return OperatorField(n, value, eval);
}

OperatorField operator_product(const OperatorField& A, const OperatorField& B) {
    if (A.dim() != B.dim()) throw DimensionMismatch("product of fields of different dimension");
    const int n = A.dim();
    auto eval = [A, B, n](const Vector& u) {
        OperatorEval ae = A.eval(u), be = B.eval(u);
        OperatorEval e;
        e.value = ae.value * be.value;
        e.partial.reserve(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k)
            e.partial.push_back(ae.partial[static_cast<size_t>(k)] * be.value +
                                ae.value * be.partial[static_cast<size_t>(k)]);
        return e;
    };
    auto value = [A, B](const Vector& u) { return Matrix(A.value(u) * B.value(u)); };
    return OperatorField(n, value, eval);
}

OperatorField wrap_finite_difference(int n, std::function<Matrix(const Vector&)> raw, double h) {
    auto eval = [raw, n, h](const Vector& u) {
        OperatorEval e;
        e.value = raw(u);
        e.partial.reserve(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) {
            const double step = h * (1.0 + std::abs(u[k]));
            Vector up = u, um = u;
            up[k] += step;
            um[k] -= step;
            e.partial.push_back((raw(up) - raw(um)) / (2.0 * step));
        }
        return e;
    };
    return OperatorField(n, raw, eval);
}

OneFormField one_form_from_scalar(const ScalarField& f) {
    return OneFormField(f.dim(), [f](const Vector& u) {
        ScalarEval se = f.eval(u);
        OneFormEval e;
        e.omega = se.grad;
        e.jac = se.hess;
        return e;
    });
}

OneFormField constant_one_form(const Vector& w) {
    const int n = static_cast<int>(w.size());
    return OneFormField(n, [w, n](const Vector&) {
        OneFormEval e;
        e.omega = w;
        e.jac = Matrix::Zero(n, n);
        return e;
    });
}

CommutantFieldEval commutant_field_eval(const OperatorField& Lf, const OperatorField& Mf,
                                        const Vector& u) {
    const int n = Lf.dim();
    OperatorEval Le = Lf.eval(u);
    OperatorEval Me = Mf.eval(u);

    GlRegularity reg = is_gl_regular(Le.value);
    if (!reg.regular) throw NotGlRegular("commutant field evaluation at a non-gl-regular point");
    const Vector v = reg.witness;

    // Krylov powers w_p = L^p v.
    std::vector<Vector> w(static_cast<size_t>(n));
    w[0] = v;
    for (int p = 1; p < n; ++p) w[static_cast<size_t>(p)] = Le.value * w[static_cast<size_t>(p) - 1];

    Matrix V(n, n);  // column i (0-based) multiplies g_{i+1}: L^{n-1-i} v
    for (int i = 0; i < n; ++i) V.col(i) = w[static_cast<size_t>(n - 1 - i)];
    Eigen::PartialPivLU<Matrix> lu(V);

    CommutantFieldEval out;
    Vector g = lu.solve(Me.value * v);
    out.g.assign(g.data(), g.data() + n);

    // Implicit differentiation: V dg = dM v - dV g, with
    // d(L^p) v = L d(L^{p-1}) v + dL L^{p-1} v.
    out.jac.resize(n, n);
    for (int k = 0; k < n; ++k) {
        const Matrix& dL = Le.partial[static_cast<size_t>(k)];
        std::vector<Vector> dw(static_cast<size_t>(n));
        dw[0] = Vector::Zero(n);
        for (int p = 1; p < n; ++p)
            dw[static_cast<size_t>(p)] =
                Le.value * dw[static_cast<size_t>(p) - 1] + dL * w[static_cast<size_t>(p) - 1];
        Vector rhs = Me.partial[static_cast<size_t>(k)] * v;
        for (int i = 0; i < n; ++i) rhs -= g[i] * dw[static_cast<size_t>(n - 1 - i)];
        out.jac.col(k) = lu.solve(rhs);  // jac(i,k) = dg_{i+1}/du^{k+1}
    }
    return out;
}

double operator_fd_consistency(const OperatorField& L, const Vector& u, double h) {
    OperatorEval e = L.eval(u);
    double worst = 0.0;
    for (int k = 0; k < L.dim(); ++k) {
        const double step = h * (1.0 + std::abs(u[k]));
        Vector up = u, um = u;
        up[k] += step;
        um[k] -= step;
        Matrix fd = (L.value(up) - L.value(um)) / (2.0 * step);
        worst = std::max(worst, max_abs(Matrix(fd - e.partial[static_cast<size_t>(k)])));
    }
    return worst;
}

double scalar_fd_consistency(const ScalarField& f, const Vector& u, double h) {
    ScalarEval e = f.eval(u);
    double worst = 0.0;
    for (int k = 0; k < f.dim(); ++k) {
        const double step = h * (1.0 + std::abs(u[k]));
        Vector up = u, um = u;
        up[k] += step;
        um[k] -= step;
        const double fd = (f.value(up) - f.value(um)) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - e.grad[k]));
        Vector gd = (f.eval(up).grad - f.eval(um).grad) / (2.0 * step);
        for (int j = 0; j < f.dim(); ++j)
            worst = std::max(worst, std::abs(gd[j] - e.hess(j, k)));
    }
    return worst;
}

}  // namespace nijhydro
