#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace plap {

// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson
// slopes).  Monotone data produce a monotone interpolant; general data are
// interpolated without overshoot.  Evaluation outside the abscissa range
// extends the boundary cubics.
class PchipInterpolant {
public:
    PchipInterpolant() = default;

    PchipInterpolant(std::span<const double> x, std::span<const double> y)
        : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("pchip: need >= 2 matching samples");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1]))
                throw std::invalid_argument("pchip: abscissae must increase strictly");
        m_.resize(n);
        if (n == 2) {
            m_[0] = m_[1] = slope(0);
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double d0 = slope(i - 1), d1 = slope(i);
            if (d0 * d1 <= 0.0) {
                m_[i] = 0.0;
            } else {
                const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
                const double w0 = 2.0 * h1 + h0, w1 = h1 + 2.0 * h0;
                m_[i] = (w0 + w1) / (w0 / d0 + w1 / d1);
            }
        }
        m_[0] = end_slope(x_[1] - x_[0], x_[2] - x_[1], slope(0), slope(1));
        m_[n - 1] = end_slope(x_[n - 2] - x_[n - 3], x_[n - 1] - x_[n - 2],
                              slope(n - 3), slope(n - 2), true);
    }

    double operator()(double x) const { return eval(x).first; }
    double derivative(double x) const { return eval(x).second; }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }
    std::size_t size() const { return x_.size(); }

    // Exact integral of the interpolant over [a, b] (clamped to the range).
    double integral(double a, double b) const {
        double sign = 1.0;
        if (a > b) { std::swap(a, b); sign = -1.0; }
        a = std::clamp(a, x_front(), x_back());
        b = std::clamp(b, x_front(), x_back());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
            const double lo = std::max(a, x_[i]), hi = std::min(b, x_[i + 1]);
            if (lo < hi) acc += cell_integral(i, lo, hi);
        }
        return sign * acc;
    }

private:
    double slope(std::size_t i) const { return (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]); }

    static double end_slope(double h0, double h1, double d0, double d1, bool right = false) {
        // Three-point end slope, clamped to preserve shape near the boundary.
        const double d_end = right ? d1 : d0;
        const double d_in = right ? d0 : d1;
        const double he = right ? h1 : h0;
        const double hi = right ? h0 : h1;
        double m = ((2.0 * he + hi) * d_end - he * d_in) / (he + hi);
        if (m * d_end <= 0.0) m = 0.0;
        else if (d_end * d_in < 0.0 && std::fabs(m) > 3.0 * std::fabs(d_end)) m = 3.0 * d_end;
        return m;
    }

    std::size_t cell_of(double x) const {
        if (x <= x_.front()) return 0;
        if (x >= x_.back()) return x_.size() - 2;
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        return static_cast<std::size_t>(it - x_.begin()) - 1;
    }

    std::pair<double, double> eval(double x) const {
        const std::size_t i = cell_of(x);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        const double v = h00 * y_[i] + h * h10 * m_[i] + h01 * y_[i + 1] + h * h11 * m_[i + 1];
        const double d00 = (6 * t2 - 6 * t) / h, d10 = 3 * t2 - 4 * t + 1;
        const double d01 = (-6 * t2 + 6 * t) / h, d11 = 3 * t2 - 2 * t;
        const double d = d00 * y_[i] + d10 * m_[i] + d01 * y_[i + 1] + d11 * m_[i + 1];
        return {v, d};
    }

    double cell_integral(std::size_t i, double lo, double hi) const {
        // Two-point Gauss is exact for the cubic on each subinterval.
        static constexpr double g = 0.5773502691896257645091488;
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        return h * (eval(c - h * g).first + eval(c + h * g).first);
    }

    std::vector<double> x_, y_, m_;
};

// Piecewise-linear interpolation of y against x (x strictly increasing),
// linear extension outside the range.
inline double lerp_at(std::span<const double> x, std::span<const double> y, double xq) {
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("lerp_at: need >= 2 samples");
    std::size_t i;
    if (xq <= x[0]) i = 0;
    else if (xq >= x[n - 1]) i = n - 2;
    else i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), xq) - x.begin()) - 1;
    const double t = (xq - x[i]) / (x[i + 1] - x[i]);
    return y[i] + t * (y[i + 1] - y[i]);
}

// Interpolation of strictly positive samples, linear in (log x, log y); exact
// for pure power laws, which is what profile weights look like near r = 0.
inline double loglog_at(std::span<const double> x, std::span<const double> y, double xq) {
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("loglog_at: need >= 2 samples");
    std::size_t i;
    if (xq <= x[0]) i = 0;
    else if (xq >= x[n - 1]) i = n - 2;
    else i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), xq) - x.begin()) - 1;
    const double t = (std::log(xq) - std::log(x[i])) / (std::log(x[i + 1]) - std::log(x[i]));
    return std::exp(std::log(y[i]) + t * (std::log(y[i + 1]) - std::log(y[i])));
}

}  // namespace plap
