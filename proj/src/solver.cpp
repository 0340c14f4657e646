#include "nijhydro/solver.hpp"

#include <algorithm>
#include <limits>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "nijhydro/tensor.hpp"

namespace nijhydro {

Vector xi_on_curve(const Hierarchy& H, const Curve& gamma, double x, double* cond) {
    const int n = H.n();
    const Vector p = gamma.point(x);
    Matrix W(n, n);
    for (int i = 0; i < n; ++i) W.row(i) = H.omega[static_cast<size_t>(i)].value(p).transpose();
    double maxrow = 0.0;
    for (int i = 0; i < n; ++i) maxrow = std::max(maxrow, W.row(i).norm());
    if (maxrow == 0.0 || std::abs(W.determinant()) <= 1e-10 * std::pow(maxrow, n))
        throw SingularHierarchyMatrix("hierarchy matrix singular at x = " + std::to_string(x));
    if (cond) {
        Eigen::JacobiSVD<Matrix> svd(W);
        *cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
    }
    return W.partialPivLu().solve(Vector::Unit(n, n - 1));
}

CurveFrame mhat_on_curve(const OperatorField& L, const Hierarchy& H, const Curve& gamma,
                         double x) {
    CurveFrame f;
    f.x = x;
    f.gamma = gamma.point(x);
    f.gamma_prime = gamma.derivative(x, 1);
    f.xi = xi_on_curve(H, gamma, x, &f.cond);
    const Matrix Lx = L.value(f.gamma);
    if (!is_cyclic(Lx, f.gamma_prime))
        throw NotCyclicVelocity("curve velocity is not cyclic at x = " + std::to_string(x), x);
    const Matrix K = krylov(Lx, f.gamma_prime);
    Vector c = K.partialPivLu().solve(f.xi);
    f.c.assign(c.data(), c.data() + c.size());
    return f;
}

Matrix mhat_matrix(const OperatorField& L, const CurveFrame& frame) {
    return matrix_power_combination(L.value(frame.gamma), frame.c);
}

CurveFrame frame_from_xi(const OperatorField& L, const Curve& gamma, double x,
                         const Vector& xi) {
    CurveFrame f;
    f.x = x;
    f.gamma = gamma.point(x);
    f.gamma_prime = gamma.derivative(x, 1);
    f.xi = xi;
    const Matrix Lx = L.value(f.gamma);
    if (!is_cyclic(Lx, f.gamma_prime))
        throw NotCyclicVelocity("curve velocity is not cyclic at x = " + std::to_string(x), x);
    Vector c = krylov(Lx, f.gamma_prime).partialPivLu().solve(xi);
    f.c.assign(c.data(), c.data() + c.size());
    return f;
}

namespace {

struct BlockSamples {
    std::vector<double> s;                   // eigenvalue coordinate along the curve
    std::vector<std::vector<double>> rows;   // Toeplitz coefficient samples m_d, d = 0..k-1
};

void check_monotone(const std::vector<double>& s) {
    const double d0 = s[1] - s[0];
    for (size_t j = 1; j < s.size(); ++j) {
        const double d = s[j] - s[j - 1];
        if (d == 0.0 || (d > 0) != (d0 > 0))
            throw NonMonotoneEigenvalueCoordinate(
                "block eigenvalue coordinate is not strictly monotone along the curve");
    }
}

ExtractedBlock extract_one_block(const Block& blk, int offset, const std::vector<CurveFrame>& frames,
                                 const std::vector<Matrix>& mhats, int max_order) {
    const int k = blk.size;
    const int ec = offset + k - 1;
    const size_t m = frames.size();

    BlockSamples bs;
    bs.s.resize(m);
    bs.rows.assign(static_cast<size_t>(k), std::vector<double>(m));
    for (size_t j = 0; j < m; ++j) {
        bs.s[j] = frames[j].gamma[ec];
        for (int d = 0; d < k; ++d) bs.rows[static_cast<size_t>(d)][j] = mhats[j](offset, offset + d);
    }
    check_monotone(bs.s);

    ExtractedBlock out;
    out.kind = blk.kind;
    out.offset = offset;
    out.size = k;

    if (blk.kind == Block::Kind::Diagonal1) {
        out.fs.emplace_back(bs.s, bs.rows[0], max_order);
        return out;
    }

    // Triangular extraction: f_k from the diagonal, then down to f_1 removing
    // the contributions of already-extracted functions.
    std::vector<SampledFunction> fs(static_cast<size_t>(k));
    for (int d = 0; d < k; ++d) {
        std::vector<double> vals(m);
        for (size_t j = 0; j < m; ++j) {
            double rem = bs.rows[static_cast<size_t>(d)][j];
            const Vector ub = frames[j].gamma.segment(offset, k);
            for (int i = k - d + 1; i <= k; ++i) {
                // lambda^{d-k+i} coefficient of f_i(u^k + lambda u^{k-1} + ...)
                const int idx = d - k + i;
                Jet comp = toeplitz_expansion(fs[static_cast<size_t>(i) - 1].as_func1(), ub, idx);
                rem -= comp.coeff(idx);
            }
            vals[j] = rem;
        }
        fs[static_cast<size_t>(k - d) - 1] = SampledFunction(bs.s, vals, max_order);
    }
    out.fs = std::move(fs);
    return out;
}

std::vector<CurveFrame> sample_frames(const OperatorField& L, const Hierarchy& H,
                                      const Curve& gamma, int count, double frame_tol) {
    std::vector<CurveFrame> frames;
    frames.reserve(static_cast<size_t>(count));
    for (int j = 0; j < count; ++j) {
        const double x = gamma.a() + (gamma.b() - gamma.a()) * j / (count - 1);
        CurveFrame f = mhat_on_curve(L, H, gamma, x);
        const Matrix Mh = mhat_matrix(L, f);
        const double res = max_abs(Vector(Mh * f.gamma_prime - f.xi));
        const double scale = (1.0 + max_abs(Mh)) * (1.0 + f.gamma_prime.norm());
        if (res > frame_tol * scale)
            throw Error("Mhat gamma' = xi inconsistent at x = " + std::to_string(x) +
                        " (residual " + std::to_string(res) + ")");
        frames.push_back(std::move(f));
    }
    return frames;
}

}  // namespace

ExtractedSymmetryData extract_from_frames(const BlockSpec& spec, const OperatorField& L,
                                          std::vector<CurveFrame> frames, int curve_order) {
    ExtractedSymmetryData data;
    data.samples_used = static_cast<int>(frames.size());
    data.frames = std::move(frames);
    std::vector<Matrix> mhats;
    mhats.reserve(data.frames.size());
    for (const auto& f : data.frames) mhats.push_back(mhat_matrix(L, f));
    for (size_t b = 0; b < spec.blocks.size(); ++b) {
        if (curve_order < spec.blocks[b].size)
            throw SmoothnessDeficit("curve smoothness order below block size");
        data.blocks.push_back(extract_one_block(spec.blocks[b], spec.offset(b), data.frames,
                                                mhats, spec.blocks[b].size + 1));
    }
    return data;
}

namespace {

ExtractedSymmetryData extract_with_samples(const BlockSpec& spec, const OperatorField& L,
                                           const Hierarchy& H, const Curve& gamma, int count,
                                           const Tolerances& tol) {
    return extract_from_frames(spec, L, sample_frames(L, H, gamma, count, tol.frame_consistency),
                               gamma.order());
}

double extraction_difference(const ExtractedSymmetryData& coarse,
                             const ExtractedSymmetryData& fine) {
    double worst = 0.0;
    for (size_t b = 0; b < coarse.blocks.size(); ++b) {
        const auto& cb = coarse.blocks[b];
        const auto& fb = fine.blocks[b];
        for (size_t q = 0; q < cb.fs.size(); ++q) {
            const double lo = std::max(cb.fs[q].s_min(), fb.fs[q].s_min());
            const double hi = std::min(cb.fs[q].s_max(), fb.fs[q].s_max());
            const int deriv_order = cb.size;  // tables carry block size + 1 orders
            for (int j = 0; j <= 64; ++j) {
                const double s = lo + (hi - lo) * j / 64.0;
                for (int d = 0; d <= deriv_order; ++d)
                    worst = std::max(worst, std::abs(cb.fs[q].jet(s, d).deriv(d) -
                                                     fb.fs[q].jet(s, d).deriv(d)));
            }
        }
    }
    return worst;
}

}  // namespace

ExtractedSymmetryData extract_block_functions(const BlockSpec& spec, const OperatorField& L,
                                              const Hierarchy& H, const Curve& gamma,
                                              const Tolerances& tol) {
    int count = tol.min_curve_samples;
    ExtractedSymmetryData coarse = extract_with_samples(spec, L, H, gamma, count, tol);
    while (true) {
        const int next = count * 2;
        if (next > tol.max_curve_samples)
            throw SmoothnessDeficit("spline self-consistency not reached within " +
                                    std::to_string(tol.max_curve_samples) + " curve samples");
        ExtractedSymmetryData fine = extract_with_samples(spec, L, H, gamma, next, tol);
        if (extraction_difference(coarse, fine) < tol.spline_consistency) return fine;
        coarse = std::move(fine);
        count = next;
    }
}

OperatorField extend_symmetry(const ExtractedSymmetryData& data, const BlockSpec& spec) {
    std::vector<std::vector<Func1>> per_block;
    per_block.reserve(data.blocks.size());
    for (const auto& blk : data.blocks) {
        std::vector<Func1> fs;
        fs.reserve(blk.fs.size());
        for (const auto& f : blk.fs) fs.push_back(f.as_func1());
        per_block.push_back(std::move(fs));
    }
    return compose_symmetry(spec, std::move(per_block));
}

double extend_oncurve_residual(const OperatorField& M, const std::vector<CurveFrame>& frames) {
    double worst = 0.0;
    for (const auto& f : frames)
        worst = std::max(worst, max_abs(Vector(M.value(f.gamma) * f.gamma_prime - f.xi)));
    return worst;
}

Vector GHierarchy::values(const Vector& u) const {
    const int dim = static_cast<int>(base.size());
    const int m = n();
    Vector total = Vector::Zero(m);
    Vector q = base;
    for (int axis = 0; axis < dim; ++axis) {
        const double from = base[axis], to = u[axis];
        if (from != to) {
            auto integrand = [&](double s) {
                Vector point = q;
                point[axis] = s;
                const Matrix Mv = M.value(point);
                Vector vals(m);
                for (int i = 0; i < m; ++i)
                    // (M* omega_i)_axis = sum_s M^s_axis (omega_i)_s
                    vals[i] = Mv.col(axis).dot(source[static_cast<size_t>(i)].value(point));
                return vals;
            };
            total += integrate_gk(integrand, m, from, to, quad);
        }
        q[axis] = to;
    }
    return total;
}

Matrix GHierarchy::jacobian(const Vector& u) const {
    const int m = n();
    Matrix J(m, static_cast<int>(u.size()));
    for (int i = 0; i < m; ++i) J.row(i) = forms[static_cast<size_t>(i)].value(u).transpose();
    return J;
}

GHierarchy build_g_hierarchy(const OperatorField& M, const OperatorField& L, const Hierarchy& H,
                             const Vector& base, const std::vector<Vector>& probes,
                             const Tolerances& tol) {
    GHierarchy gh;
    gh.M = M;
    gh.base = base;
    gh.quad.abs_tol = tol.quadrature_abs;
    gh.quad.max_depth = tol.quadrature_max_depth;
    gh.source = H.omega;
    for (int i = 0; i < H.n(); ++i) gh.forms.push_back(pullback(M, H.omega[static_cast<size_t>(i)]));

    for (const Vector& u : probes) {
        const double scale = residual_scale(L, M, u);
        const double sym = symmetry_residual(L, M, u);
        if (sym > tol.symmetry_tol * scale)
            throw NotASymmetry("extended M fails the symmetry test at a probe (residual " +
                               std::to_string(sym) + ")");
        for (const auto& w : gh.forms) {
            const double closed = w.closedness_residual(u);
            if (closed > tol.closedness_tol * (1.0 + max_abs(w.eval(u).jac)))
                throw NotClosed("M* omega_i not closed at a probe (residual " +
                                std::to_string(closed) + ")");
        }
    }

    IntegrateOptions iopts;
    iopts.quadrature = gh.quad;
    iopts.check_closedness = false;
    for (int i = 0; i < H.n(); ++i)
        gh.g.push_back(potential_of(gh.forms[static_cast<size_t>(i)], base, iopts));
    return gh;
}

OnCurveReport oncurve_normalization(const GHierarchy& gh, const Curve& gamma, int samples) {
    OnCurveReport rep;
    const int n = gh.n();
    for (int j = 0; j < samples; ++j) {
        const double x = gamma.a() + (gamma.b() - gamma.a()) * j / (samples - 1);
        const Vector p = gamma.point(x);
        const Vector gp = gamma.derivative(x, 1);
        Vector vals = gh.values(p);
        Matrix J = gh.jacobian(p);
        for (int i = 0; i < n; ++i) {
            const double want = (i == n - 1) ? x : 0.0;
            rep.g_dev = std::max(rep.g_dev, std::abs(vals[i] - want));
            const double dwant = (i == n - 1) ? 1.0 : 0.0;
            rep.deriv_dev = std::max(rep.deriv_dev, std::abs(J.row(i).dot(gp) - dwant));
        }
    }
    return rep;
}

Vector solve_point(const GHierarchy& gh, const Vector& t, double x, const Vector& guess,
                   const Tolerances& tol) {
    const int n = gh.n();
    if (t.size() != n - 1) throw DimensionMismatch("expected n-1 time values");
    Vector target(n);
    for (int i = 1; i <= n - 1; ++i) target[i - 1] = t[n - 1 - i];
    target[n - 1] = x;

    Vector u = guess;
    // Evaluation failures (an iterate escaping the sampled eigenvalue range)
    // count as divergence, never as silent garbage.
    auto residual_at = [&](const Vector& p, Vector& G) {
        try {
            G = gh.values(p) - target;
            return max_abs(G);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    Vector G(n);
    double res = residual_at(u, G);
    if (!std::isfinite(res))
        throw NewtonDiverged("initial guess is outside the evaluable domain",
                             std::vector<double>(u.data(), u.data() + n), res);
    for (int iter = 0; iter < tol.newton_max_iter; ++iter) {
        if (res < tol.newton_tol) return u;
        Matrix J;
        try {
            J = gh.jacobian(u);
        } catch (const Error&) {
            throw NewtonDiverged("Jacobian not evaluable at the current iterate",
                                 std::vector<double>(u.data(), u.data() + n), res);
        }
        Vector step = J.partialPivLu().solve(-G);
        if (!step.allFinite())
            throw NewtonDiverged("singular Jacobian in Newton iteration",
                                 std::vector<double>(u.data(), u.data() + n), res);
        double alpha = 1.0;
        Vector u_next = u + step;
        Vector G_next(n);
        double res_next = residual_at(u_next, G_next);
        int backtracks = 0;
        while (res_next > res && backtracks < tol.newton_max_backtrack) {
            alpha *= 0.5;
            u_next = u + alpha * step;
            res_next = residual_at(u_next, G_next);
            ++backtracks;
        }
        if (res_next > res)
            throw NewtonDiverged("Newton backtracking failed to reduce the residual",
                                 std::vector<double>(u.data(), u.data() + n), res);
        u = u_next;
        G = G_next;
        res = res_next;
    }
    if (res < tol.newton_tol) return u;
    throw NewtonDiverged("Newton did not converge in " + std::to_string(tol.newton_max_iter) +
                             " iterations",
                         std::vector<double>(u.data(), u.data() + n), res);
}

SolutionGrid solve_grid(const GHierarchy& gh, const Curve& gamma,
                        const std::vector<double>& x_nodes,
                        const std::vector<std::vector<double>>& t_axes, const Tolerances& tol,
                        int threads) {
    const int n = gh.n();
    const int neq = static_cast<int>(t_axes.size());
    if (neq != n - 1) throw DimensionMismatch("need n-1 t axes");

    SolutionGrid grid;
    grid.n = n;
    grid.x_nodes = x_nodes;
    grid.t_axes = t_axes;
    grid.values.assign(grid.node_count(), Vector::Zero(n));
    grid.converged.assign(grid.node_count(), 0);

    // Continuation order over the t-lattice: ascending index-distance from the
    // node closest to t = 0; guess = the neighbor one step toward the center.
    std::vector<int> center(static_cast<size_t>(neq));
    for (int a = 0; a < neq; ++a) {
        int best = 0;
        for (int j = 1; j < static_cast<int>(t_axes[static_cast<size_t>(a)].size()); ++j)
            if (std::abs(t_axes[static_cast<size_t>(a)][static_cast<size_t>(j)]) <
                std::abs(t_axes[static_cast<size_t>(a)][static_cast<size_t>(best)]))
                best = j;
        center[static_cast<size_t>(a)] = best;
    }

    std::vector<std::vector<int>> order;
    {
        std::vector<int> it(static_cast<size_t>(neq), 0);
        while (true) {
            order.push_back(it);
            int axis = 0;
            while (axis < neq && ++it[static_cast<size_t>(axis)] ==
                                     static_cast<int>(t_axes[static_cast<size_t>(axis)].size())) {
                it[static_cast<size_t>(axis)] = 0;
                ++axis;
            }
            if (axis == neq) break;
        }
        auto dist = [&](const std::vector<int>& it_) {
            int d = 0;
            for (int a = 0; a < neq; ++a) d += std::abs(it_[static_cast<size_t>(a)] - center[static_cast<size_t>(a)]);
            return d;
        };
        std::stable_sort(order.begin(), order.end(),
                         [&](const std::vector<int>& a, const std::vector<int>& b) {
                             return dist(a) < dist(b);
                         });
    }

    auto solve_line = [&](int ix) {
        const double x = x_nodes[static_cast<size_t>(ix)];
        const Vector gamma_x = gamma.point(x);
        for (const auto& it : order) {
            Vector t(neq);
            for (int a = 0; a < neq; ++a)
                t[a] = t_axes[static_cast<size_t>(a)][static_cast<size_t>(it[static_cast<size_t>(a)])];
            // Guess: neighbor one step toward the center on the first axis off
            // center (already solved by the ordering), else gamma(x).
            Vector guess = gamma_x;
            for (int a = 0; a < neq; ++a) {
                if (it[static_cast<size_t>(a)] != center[static_cast<size_t>(a)]) {
                    std::vector<int> prev = it;
                    prev[static_cast<size_t>(a)] +=
                        it[static_cast<size_t>(a)] < center[static_cast<size_t>(a)] ? 1 : -1;
                    const size_t pidx = grid.index(prev, ix);
                    if (grid.converged[pidx]) guess = grid.values[pidx];
                    break;
                }
            }
            const size_t idx = grid.index(it, ix);
            try {
                grid.values[idx] = solve_point(gh, t, x, guess, tol);
                grid.converged[idx] = 1;
            } catch (const NewtonDiverged& e) {
                grid.values[idx] =
                    Eigen::Map<const Vector>(e.last_iterate.data(),
                                             static_cast<int>(e.last_iterate.size()));
                grid.converged[idx] = 0;
            }
        }
    };

    const int nx = static_cast<int>(x_nodes.size());
    threads = std::max(1, std::min(threads, nx));
    if (threads == 1) {
        for (int ix = 0; ix < nx; ++ix) solve_line(ix);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (int ix = next.fetch_add(1); ix < nx; ix = next.fetch_add(1)) solve_line(ix);
            });
        for (auto& th : pool) th.join();
    }
    return grid;
}

Pipeline run_pipeline(const BlockSpec& spec, const OperatorField& L, const Hierarchy& H,
                      const Curve& gamma, const std::vector<double>& x_nodes,
                      const std::vector<std::vector<double>>& t_axes, const Tolerances& tol,
                      int threads) {
    Pipeline p;
    p.L = L;
    p.H = H;
    p.data = extract_block_functions(spec, L, H, gamma, tol);
    p.M = extend_symmetry(p.data, spec);
    p.report.samples_used = p.data.samples_used;
    for (const auto& f : p.data.frames)
        p.report.max_frame_cond = std::max(p.report.max_frame_cond, f.cond);
    p.report.extend_residual = extend_oncurve_residual(p.M, p.data.frames);
    if (p.report.extend_residual > tol.extend_tol)
        throw NotASymmetry("extended symmetry misses xi on the curve (residual " +
                           std::to_string(p.report.extend_residual) + ")");

    // Probes for the symmetry/closedness assertions: curve points.
    std::vector<Vector> probes;
    for (size_t j = 0; j < p.data.frames.size(); j += std::max<size_t>(1, p.data.frames.size() / 8))
        probes.push_back(p.data.frames[j].gamma);
    double sym = 0.0;
    for (const Vector& u : probes)
        sym = std::max(sym, symmetry_residual(L, p.M, u) / residual_scale(L, p.M, u));
    p.report.symmetry_residual = sym;

    const Vector base = gamma.point(0.0);
    p.g = build_g_hierarchy(p.M, L, H, base, probes, tol);
    p.report.oncurve = oncurve_normalization(p.g, gamma);
    if (p.report.oncurve.deriv_dev > tol.oncurve_tol || p.report.oncurve.g_dev > 100 * tol.oncurve_tol)
        throw Error("on-curve normalization of the g-hierarchy failed (dev " +
                    std::to_string(p.report.oncurve.g_dev) + ", " +
                    std::to_string(p.report.oncurve.deriv_dev) + ")");

    const auto t0 = std::chrono::steady_clock::now();
    p.grid = solve_grid(p.g, gamma, x_nodes, t_axes, tol, threads);
    p.report.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool residual_defined = x_nodes.size() >= 3;
    for (const auto& ax : t_axes) residual_defined = residual_defined && ax.size() >= 3;
    if (residual_defined) p.report.residual = hydro_residual(p.grid, L);
    return p;
}

}  // namespace nijhydro
