#include "nijhydro/hierarchy.hpp"

#include <cmath>
#include <random>

#include "nijhydro/tensor.hpp"

namespace nijhydro {

OneFormField pullback(const OperatorField& L, const OneFormField& w) {
    const int n = L.dim();
    if (w.dim() != n) throw DimensionMismatch("pullback dimension mismatch");
    return OneFormField(n, [L, w](const Vector& u) {
        OperatorEval Le = L.eval(u);
        OneFormEval we = w.eval(u);
        OneFormEval out;
        out.omega = Le.value.transpose() * we.omega;
        out.jac = Le.value.transpose() * we.jac;
        for (int k = 0; k < Le.value.rows(); ++k)
            out.jac.col(k) += Le.partial[static_cast<size_t>(k)].transpose() * we.omega;
        return out;
    });
}

Hierarchy hierarchy_from_seed(const OperatorField& L, const ScalarField& f, const Vector& base,
                              std::vector<Vector> probes, double cl_tol) {
    const int n = L.dim();
    if (probes.empty()) {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        const double radius = 0.05 * (1.0 + base.cwiseAbs().maxCoeff());
        probes.push_back(base);
        for (int p = 0; p < 10; ++p) {
            Vector d(n);
            for (int i = 0; i < n; ++i) d[i] = uni(rng) * radius;
            probes.push_back(base + d);
        }
    }
    for (const Vector& u : probes) {
        const double r = conservation_law_residual(L, f, u);
        const double scale = (1.0 + max_abs(L.value(u))) * (1.0 + max_abs(f.eval(u).grad));
        if (r > cl_tol * scale)
            throw NotAConservationLaw("seed conservation-law residual " + std::to_string(r) +
                                      " at a probe point");
    }

    Hierarchy H;
    H.base = base;
    H.omega.push_back(one_form_from_scalar(f));
    for (int i = 1; i < n; ++i) H.omega.push_back(pullback(L, H.omega.back()));

    const double f0 = f.value(base);
    H.potentials.push_back(ScalarField(n, [f, f0](const Vector& u) {
        ScalarEval e = f.eval(u);
        e.value -= f0;
        return e;
    }));
    IntegrateOptions opts;
    opts.check_closedness = false;  // chain closedness follows from the seed check
    for (int i = 1; i < n; ++i) H.potentials.push_back(potential_of(H.omega[static_cast<size_t>(i)], base, opts));
    return H;
}

bool is_regular_hierarchy(const Hierarchy& H, const Vector& u, double rank_tol) {
    const int n = H.n();
    Matrix W(n, n);
    for (int i = 0; i < n; ++i) W.row(i) = H.omega[static_cast<size_t>(i)].value(u).transpose();
    double maxrow = 0.0;
    for (int i = 0; i < n; ++i) maxrow = std::max(maxrow, W.row(i).norm());
    if (maxrow == 0.0) return false;
    return std::abs(W.determinant()) > rank_tol * std::pow(maxrow, n);
}

double hierarchy_chain_residual(const OperatorField& L, const Hierarchy& H, const Vector& u) {
    const Matrix Lt = L.value(u).transpose();
    double worst = 0.0;
    for (int i = 0; i + 1 < H.n(); ++i)
        worst = std::max(worst, max_abs(Vector(Lt * H.omega[static_cast<size_t>(i)].value(u) -
                                               H.omega[static_cast<size_t>(i) + 1].value(u))));
    return worst;
}

namespace {

void closedness_precheck(const std::vector<OneFormField>& ws, const Vector& p, const Vector& u,
                         double tol) {
    const int n = static_cast<int>(p.size());
    int per_axis = 5;
    double total = std::pow(5.0, n);
    if (total > 1e5) per_axis = std::max(2, static_cast<int>(std::floor(std::pow(1e5, 1.0 / n))));
    std::vector<int> idx(static_cast<size_t>(n), 0);
    Vector lo = p.cwiseMin(u), hi = p.cwiseMax(u);
    while (true) {
        Vector q(n);
        for (int i = 0; i < n; ++i) {
            const double t = per_axis == 1 ? 0.5 : static_cast<double>(idx[static_cast<size_t>(i)]) / (per_axis - 1);
            q[i] = lo[i] + t * (hi[i] - lo[i]);
        }
        for (const auto& w : ws) {
            OneFormEval e = w.eval(q);
            const double r = max_abs(Matrix(e.jac - e.jac.transpose()));
            if (r > tol * (1.0 + max_abs(e.jac)))
                throw NotClosed("1-form closedness residual " + std::to_string(r) +
                                " on the integration bounding box");
        }
        int axis = 0;
        while (axis < n && ++idx[static_cast<size_t>(axis)] == per_axis) {
            idx[static_cast<size_t>(axis)] = 0;
            ++axis;
        }
        if (axis == n) break;
    }
}

}  // namespace

Vector integrate_closed_1forms(const std::vector<OneFormField>& ws, const Vector& p,
                               const Vector& u, const IntegrateOptions& opts) {
    const int n = static_cast<int>(p.size());
    const int m = static_cast<int>(ws.size());
    if (u.size() != n) throw DimensionMismatch("integration endpoints of different dimension");
    if (opts.check_closedness) closedness_precheck(ws, p, u, opts.closedness_tol);

    std::vector<int> order(static_cast<size_t>(n));
    if (opts.leg_order.empty())
        for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    else
        order = opts.leg_order;

    Vector total = Vector::Zero(m);
    Vector q = p;
    for (int leg = 0; leg < n; ++leg) {
        const int axis = order[static_cast<size_t>(leg)];
        const double from = p[axis], to = u[axis];
        if (from != to) {
            auto integrand = [&](double s) {
                Vector point = q;
                point[axis] = s;
                Vector vals(m);
                for (int i = 0; i < m; ++i) vals[i] = ws[static_cast<size_t>(i)].value(point)[axis];
                return vals;
            };
            total += integrate_gk(integrand, m, from, to, opts.quadrature);
        }
        q[axis] = to;
    }
    return total;
}

double integrate_closed_1form(const OneFormField& w, const Vector& p, const Vector& u,
                              const IntegrateOptions& opts) {
    return integrate_closed_1forms({w}, p, u, opts)[0];
}

ScalarField potential_of(const OneFormField& w, const Vector& p, const IntegrateOptions& opts) {
    return ScalarField(w.dim(), [w, p, opts](const Vector& u) {
        ScalarEval out;
        out.value = integrate_closed_1form(w, p, u, opts);
        OneFormEval we = w.eval(u);
        out.grad = we.omega;
        out.hess = 0.5 * (we.jac + we.jac.transpose());
        return out;
    });
}

namespace {

std::vector<Vector> companion_probes(const Vector& p) {
    std::vector<Vector> probes{p};
    const double h = 0.02 * (1.0 + p.cwiseAbs().maxCoeff());
    for (int k = 0; k < p.size(); ++k) {
        probes.push_back(p + h * Vector::Unit(p.size(), k));
        probes.push_back(p - h * Vector::Unit(p.size(), k));
    }
    return probes;
}

double companion_layout_deviation(const Matrix& Lt, bool first_form) {
    const int n = static_cast<int>(Lt.rows());
    double dev = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (first_form && j == 0) continue;            // free column sigma_i
            if (!first_form && i == n - 1) continue;       // free row sigma_{n-j}
            const double want = (j == i + 1) ? 1.0 : 0.0;
            dev = std::max(dev, std::abs(Lt(i, j) - want));
        }
    return dev;
}

CompanionReport companion_check_impl(const OperatorField& L, bool first_form,
                                     const std::function<Matrix(const Vector&)>& jacobian_at,
                                     const Vector& p) {
    CompanionReport report;
    const int n = L.dim();
    for (const Vector& w : companion_probes(p)) {
        Matrix J = jacobian_at(w);
        double maxrow = 0.0;
        for (int i = 0; i < n; ++i) maxrow = std::max(maxrow, J.row(i).norm());
        if (maxrow == 0.0 || std::abs(J.determinant()) <= 1e-10 * std::pow(maxrow, n))
            throw NotRegular("coefficient differentials are not independent at a probe");
        Matrix Lt = J * L.value(w) * J.partialPivLu().inverse();
        report.deviation = std::max(report.deviation, companion_layout_deviation(Lt, first_form));
        if ((w - p).norm() == 0.0) report.transformed = Lt;
    }
    return report;
}

}  // namespace

CompanionReport companion_correspondence_first(const OperatorField& L, const OperatorField& M,
                                               const Vector& p) {
    return companion_check_impl(
        L, true,
        [&](const Vector& w) { return commutant_field_eval(L, M, w).jac; }, p);
}

CompanionReport companion_correspondence_second(const OperatorField& L, const Hierarchy& H,
                                                const Vector& p) {
    return companion_check_impl(
        L, false,
        [&](const Vector& w) {
            Matrix J(H.n(), H.n());
            for (int i = 0; i < H.n(); ++i) J.row(i) = H.omega[static_cast<size_t>(i)].value(w).transpose();
            return J;
        },
        p);
}

}  // namespace nijhydro
