#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "plap/errors.hpp"
#include "plap/profile.hpp"
#include "plap/quadrature.hpp"

namespace plap {

// Per-node samples of the right-hand side along a profile: g(u(r_i)) and,
// when available, g'(u(r_i)).
struct RhsAlongProfile {
    std::vector<double> g;
    std::vector<double> gprime;  // may be empty

    static RhsAlongProfile from_problem(const RadialProfile& pr) {
        if (!pr.lambda || !pr.f)
            throw std::invalid_argument("RhsAlongProfile: profile carries no nonlinearity");
        RhsAlongProfile rhs;
        rhs.g.resize(pr.size());
        rhs.gprime.resize(pr.size());
        for (std::size_t i = 0; i < pr.size(); ++i) {
            rhs.g[i] = *pr.lambda * pr.f->value(pr.u[i]);
            rhs.gprime[i] = *pr.lambda * pr.f->deriv(pr.u[i]);
        }
        return rhs;
    }

    static RhsAlongProfile from_callables(const RadialProfile& pr,
                                          const std::function<double(double)>& g,
                                          const std::function<double(double)>* gp = nullptr) {
        RhsAlongProfile rhs;
        rhs.g.resize(pr.size());
        if (gp) rhs.gprime.resize(pr.size());
        for (std::size_t i = 0; i < pr.size(); ++i) {
            rhs.g[i] = g(pr.u[i]);
            if (gp) rhs.gprime[i] = (*gp)(pr.u[i]);
        }
        return rhs;
    }

    // g from the stored flux derivative, g' by differencing g against u.
    static RhsAlongProfile from_flux(const RadialProfile& pr) {
        RhsAlongProfile rhs;
        const std::size_t n = pr.size();
        rhs.g.resize(n);
        if (pr.has_wprime()) {
            for (std::size_t i = 0; i < n; ++i)
                rhs.g[i] = -pr.w_prime[i] / std::pow(pr.grid[i], pr.N - 1);
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t a = (i == 0) ? 0 : i - 1;
                const std::size_t b = (i + 1 == n) ? i : i + 1;
                const double dw = (pr.w[b] - pr.w[a]) / (pr.grid[b] - pr.grid[a]);
                rhs.g[i] = -dw / std::pow(pr.grid[i], pr.N - 1);
            }
        }
        rhs.gprime.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = (i == 0) ? 0 : i - 1;
            const std::size_t b = (i + 1 == n) ? i : i + 1;
            const double du = pr.u[b] - pr.u[a];
            rhs.gprime[i] = (std::fabs(du) > 0.0) ? (rhs.g[b] - rhs.g[a]) / du : 0.0;
        }
        return rhs;
    }
};

// Fill u_rr (and u_rrr when g' is supplied) from the exact ODE identities:
//   u_rr  = -1/(p-1) [ g(u)/|u_r|^{p-2} + (N-1)/r u_r ]
//   u_rrr = -1/(p-1) [ g'(u) u_r/|u_r|^{p-2} - (p-2) u_r u_rr g(u)/|u_r|^p
//                      - (N-1)/r^2 u_r + (N-1)/r u_rr ]
inline void derivatives_from_ode(RadialProfile& pr, const RhsAlongProfile& rhs) {
    const std::size_t n = pr.size();
    if (rhs.g.size() != n)
        throw std::invalid_argument("derivatives_from_ode: rhs length mismatch");
    pr.u_rr.assign(n, 0.0);
    const bool third = rhs.gprime.size() == n;
    if (third) pr.u_rrr.assign(n, 0.0);
    const double p = pr.p;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = pr.grid[i];
        const double ur = pr.u_r[i];
        if (!(ur < 0.0))
            throw DegenerateWeightError("derivatives_from_ode: u_r vanishes at node " +
                                        std::to_string(i) + " (r = " + std::to_string(r) + ")");
        const double au = -ur;
        const double apm2 = std::pow(au, p - 2.0);
        pr.u_rr[i] = -(rhs.g[i] / apm2 + (pr.N - 1.0) / r * ur) / (p - 1.0);
        if (third) {
            const double urr = pr.u_rr[i];
            pr.u_rrr[i] = -(rhs.gprime[i] * ur / apm2 -
                            (p - 2.0) * ur * urr * rhs.g[i] / std::pow(au, p) -
                            (pr.N - 1.0) / (r * r) * ur + (pr.N - 1.0) / r * urr) /
                          (p - 1.0);
        }
    }
}

// Sup-norm of the discrete flux defect |w' + r^{N-1} g(u)| over interior
// nodes.  Across each window [r_{i-1}, r_{i+1}] the increment of w is
// compared with the quadrature of r^{N-1} g(u) through a five-node local
// polynomial, which keeps the defect at quadrature order O(h^5) even on
// geometrically graded grids.
inline double residual(const RadialProfile& pr, const RhsAlongProfile& rhs) {
    const std::size_t n = pr.size();
    if (rhs.g.size() != n) throw std::invalid_argument("residual: rhs length mismatch");
    if (n < 5) throw std::invalid_argument("residual: need >= 5 nodes");
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::pow(pr.grid[i], pr.N - 1) * rhs.g[i];

    static constexpr double gx = 0.7745966692414833770358531;
    static constexpr double gw0 = 8.0 / 9.0, gw1 = 5.0 / 9.0;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const std::size_t s = std::min(std::max<std::size_t>(i, 2) - 2, n - 5);
        const double* xs = pr.grid.nodes().data() + s;
        const double* fs = f.data() + s;
        auto quartic = [&](double t) {
            double acc = 0.0;
            for (int a = 0; a < 5; ++a) {
                double l = 1.0;
                for (int b = 0; b < 5; ++b)
                    if (b != a) l *= (t - xs[b]) / (xs[a] - xs[b]);
                acc += l * fs[a];
            }
            return acc;
        };
        double q = 0.0;
        for (std::size_t c = i - 1; c <= i; ++c) {
            const double a = pr.grid[c], b = pr.grid[c + 1];
            const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
            q += hw * (gw0 * quartic(mid) +
                       gw1 * (quartic(mid - hw * gx) + quartic(mid + hw * gx)));
        }
        const double defect = (pr.w[i + 1] - pr.w[i - 1] + q) / (pr.grid[i + 1] - pr.grid[i - 1]);
        worst = std::max(worst, std::fabs(defect));
    }
    return worst;
}

inline double residual(const RadialProfile& pr) {
    return residual(pr, RhsAlongProfile::from_flux(pr));
}

}  // namespace plap
