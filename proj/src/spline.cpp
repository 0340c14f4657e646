#include "nijhydro/spline.hpp"

#include <algorithm>
#include <cmath>

#include "nijhydro/errors.hpp"

namespace nijhydro {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 3) throw SmoothnessDeficit("cubic spline needs at least 3 samples");
    if (y_.size() != n) throw DimensionMismatch("spline sample count mismatch");
    for (size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw NonMonotoneEigenvalueCoordinate("spline knots must be strictly increasing");

    m_.assign(n, 0.0);
    auto h = [&](size_t i) { return x_[i + 1] - x_[i]; };
    auto slope = [&](size_t i) { return (y_[i + 1] - y_[i]) / h(i); };

    if (n == 3) {
        // Too few knots for not-a-knot; natural conditions.
        m_[1] = 6.0 * (slope(1) - slope(0)) / (2.0 * (h(0) + h(1)));
        return;
    }

    // Not-a-knot boundary conditions (s''' continuous across the second and
    // second-to-last knots): the endpoint second derivatives are
    //   m_0     = (1 + h0/h1) m_1 - (h0/h1) m_2,
    //   m_{n-1} = (1 + h_{n-2}/h_{n-3}) m_{n-2} - (h_{n-2}/h_{n-3}) m_{n-3},
    // eliminated into a tridiagonal system for m_1 .. m_{n-2}.
    const size_t K = n - 2;
    std::vector<double> lower(K, 0.0), diag(K, 0.0), upper(K, 0.0), rhs(K, 0.0);
    for (size_t j = 0; j < K; ++j) {
        const size_t i = j + 1;  // interior knot index
        lower[j] = h(i - 1);
        diag[j] = 2.0 * (h(i - 1) + h(i));
        upper[j] = h(i);
        rhs[j] = 6.0 * (slope(i) - slope(i - 1));
    }
    diag[0] += h(0) * (1.0 + h(0) / h(1));
    upper[0] -= h(0) * h(0) / h(1);
    diag[K - 1] += h(n - 2) * (1.0 + h(n - 2) / h(n - 3));
    lower[K - 1] -= h(n - 2) * h(n - 2) / h(n - 3);

    std::vector<double> cp(K, 0.0), dp(K, 0.0);
    cp[0] = upper[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (size_t j = 1; j < K; ++j) {
        const double denom = diag[j] - lower[j] * cp[j - 1];
        cp[j] = upper[j] / denom;
        dp[j] = (rhs[j] - lower[j] * dp[j - 1]) / denom;
    }
    for (size_t j = K; j-- > 0;)
        m_[j + 1] = dp[j] - (j + 1 < K ? cp[j] * m_[j + 2] : 0.0);
    m_[0] = (1.0 + h(0) / h(1)) * m_[1] - (h(0) / h(1)) * m_[2];
    m_[n - 1] = (1.0 + h(n - 2) / h(n - 3)) * m_[n - 2] - (h(n - 2) / h(n - 3)) * m_[n - 3];
}

size_t CubicSpline::segment(double s) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), s);
    size_t i = static_cast<size_t>(std::distance(x_.begin(), it));
    if (i == 0) i = 1;
    if (i >= x_.size()) i = x_.size() - 1;
    return i - 1;
}

double CubicSpline::deriv(double s, int k) const {
    if (s < x_.front() - 1e-12 || s > x_.back() + 1e-12)
        throw OutOfSampledRange("spline evaluation outside the sampled range");
    const size_t i = segment(s);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - s) / h, b = (s - x_[i]) / h;
    switch (k) {
        case 0:
            return a * y_[i] + b * y_[i + 1] +
                   ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
        case 1:
            return (y_[i + 1] - y_[i]) / h +
                   h / 6.0 * ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]);
        case 2:
            return a * m_[i] + b * m_[i + 1];
        case 3:
            return (m_[i + 1] - m_[i]) / h;
        default:
            throw InsufficientJetOrder("cubic spline derivatives available up to order 3");
    }
}

SampledFunction::SampledFunction(std::vector<double> s, std::vector<double> values,
                                 int max_order) {
    if (s.size() != values.size()) throw DimensionMismatch("sample count mismatch");
    if (s.size() >= 2 && s.front() > s.back()) {
        std::reverse(s.begin(), s.end());
        std::reverse(values.begin(), values.end());
    }
    tables_.emplace_back(s, values);
    for (int q = 1; q <= max_order; ++q) {
        std::vector<double> d(s.size());
        for (size_t i = 0; i < s.size(); ++i) d[i] = tables_.back().deriv(s[i], 1);
        tables_.emplace_back(s, d);
    }
}

Jet SampledFunction::jet(double s, int order) const {
    if (order > max_order())
        throw InsufficientJetOrder("sampled function tables support order " +
                                   std::to_string(max_order()));
    std::vector<double> d(static_cast<size_t>(order) + 1);
    for (int q = 0; q <= order; ++q) d[static_cast<size_t>(q)] = tables_[static_cast<size_t>(q)].value(s);
    return Jet::from_derivatives(d);
}

double SampledFunction::s_min() const { return tables_.front().x_min(); }
double SampledFunction::s_max() const { return tables_.front().x_max(); }

double SampledFunction::derivative_consistency() const {
    if (tables_.size() < 2) return 0.0;
    const auto& knots = tables_.front().knots();
    double worst = 0.0;
    for (size_t i = 0; i + 1 < knots.size(); ++i) {
        const double mid = 0.5 * (knots[i] + knots[i + 1]);
        worst = std::max(worst,
                         std::abs(tables_[1].value(mid) - tables_[0].deriv(mid, 1)));
    }
    return worst;
}

Func1 SampledFunction::as_func1() const {
    SampledFunction copy = *this;
    return [copy](double s, int order) { return copy.jet(s, order); };
}

}  // namespace nijhydro
