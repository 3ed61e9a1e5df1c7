#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "plap/errors.hpp"
#include "plap/exponents.hpp"
#include "plap/interpolation.hpp"
#include "plap/profile.hpp"
#include "plap/quadrature.hpp"
#include "plap/test_function.hpp"

namespace plap {

enum class StabilityVerdict { SemiStable, Marginal, Unstable };
enum class StabilityRoute { Eigenvalue, WeightedPoincare, HardyPointwise };

inline const char* verdict_name(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::SemiStable: return "semi-stable";
        case StabilityVerdict::Marginal: return "marginal";
        case StabilityVerdict::Unstable: return "unstable";
    }
    return "?";
}

struct StabilityReport {
    double min_eigenvalue = 0.0;
    double cut_radius = 0.0;
    int mesh_count = 0;
    StabilityVerdict verdict = StabilityVerdict::Marginal;
    StabilityRoute route = StabilityRoute::Eigenvalue;
    double tol = 0.0;
};

struct StabilityOptions {
    double cut_radius = 1e-4;
    int mesh_count = 2000;
    double tol_factor = 1e-6;
    double weight_scale = 1.0;  // common factor on stiffness and potential
};

namespace detail {

// Log-log interpolator of |u_r| along the profile; exact on power laws.
struct ProfileWeights {
    const RadialProfile* pr;
    std::span<const double> gprime;  // g'(u(r_i)) samples, may be empty

    ProfileWeights(const RadialProfile* pr_, std::span<const double> gprime_)
        : pr(pr_), gprime(gprime_) {}

    double abs_ur(double r) const {
        std::vector<double>& buf = cache();
        return loglog_at(pr->grid.nodes(), buf, r);
    }

    double gp(double r) const {
        if (gprime.empty()) return 0.0;
        // interpolate in log r; general sign
        const auto& x = pr->grid.nodes();
        const std::size_t n = x.size();
        std::size_t i;
        if (r <= x[0]) i = 0;
        else if (r >= x[n - 1]) i = n - 2;
        else i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), r) - x.begin()) - 1;
        const double t = (std::log(r) - std::log(x[i])) / (std::log(x[i + 1]) - std::log(x[i]));
        // log-space interpolation when the bracketing samples are positive
        if (gprime[i] > 0.0 && gprime[i + 1] > 0.0)
            return std::exp(std::log(gprime[i]) +
                            t * (std::log(gprime[i + 1]) - std::log(gprime[i])));
        return gprime[i] + t * (gprime[i + 1] - gprime[i]);
    }

    double stiffness(double r) const {
        return (pr->p - 1.0) * std::pow(abs_ur(r), pr->p - 2.0) * std::pow(r, pr->N - 1);
    }
    double potential(double r) const {  // enters with a minus sign
        return gp(r) * std::pow(r, pr->N - 1);
    }
    double mass(double r) const {
        return (pr->p - 1.0) * std::pow(abs_ur(r), pr->p - 2.0) * std::pow(r, pr->N - 3);
    }

private:
    std::vector<double>& cache() const {
        if (aur_.empty()) {
            aur_.resize(pr->size());
            for (std::size_t i = 0; i < pr->size(); ++i)
                aur_[i] = std::max(std::fabs(pr->u_r[i]), 1e-300);
        }
        return aur_;
    }
    mutable std::vector<double> aur_;
};

struct Tridiag {
    std::vector<double> diag, off;  // off[i] couples dof i and i+1
};

struct Pencil {
    Tridiag T;  // stiffness + potential
    Tridiag B;  // mass
    double tol_scale = 1.0;
};

// Linear-element assembly on a log-spaced mesh over (cut, 1), Dirichlet ends.
inline Pencil assemble_pencil(const RadialProfile& pr, std::span<const double> gprime,
                              const StabilityOptions& opt) {
    if (!(opt.cut_radius > 0.0 && opt.cut_radius < 1.0))
        throw std::domain_error("stability: cut_radius must lie in (0, 1)");
    if (opt.mesh_count < 100) throw std::domain_error("stability: mesh_count >= 100");
    for (std::size_t i = 0; i < pr.size(); ++i)
        if (pr.grid[i] >= opt.cut_radius && pr.grid[i] < 1.0 && !(pr.u_r[i] < 0.0))
            throw DegenerateWeightError("stability: u_r vanishes inside the cut domain at r = " +
                                        std::to_string(pr.grid[i]));

    ProfileWeights wts{&pr, gprime};
    const int m = opt.mesh_count;
    std::vector<double> mesh(m + 1);
    const double lc = std::log(opt.cut_radius);
    for (int i = 0; i <= m; ++i) mesh[i] = std::exp(lc * (1.0 - static_cast<double>(i) / m));
    mesh[m] = 1.0;

    const int ndof = m - 1;
    Pencil pen;
    pen.T.diag.assign(ndof, 0.0);
    pen.T.off.assign(ndof - 1, 0.0);
    pen.B.diag.assign(ndof, 0.0);
    pen.B.off.assign(ndof - 1, 0.0);

    static constexpr double g2 = 0.5773502691896257645091488;
    double scale = 1.0;
    for (int e = 0; e < m; ++e) {
        const double a = mesh[e], b = mesh[e + 1], h = b - a;
        const double c = 0.5 * (a + b), hw = 0.5 * h;
        const double x1 = c - hw * g2, x2 = c + hw * g2;
        double s_e = 0.0, v11 = 0.0, v12 = 0.0, v22 = 0.0, b11 = 0.0, b12 = 0.0, b22 = 0.0;
        for (double x : {x1, x2}) {
            const double ws = opt.weight_scale * wts.stiffness(x);
            const double wv = opt.weight_scale * wts.potential(x);
            const double wb = wts.mass(x);
            const double pa = (b - x) / h, pb = (x - a) / h;
            s_e += hw * ws;
            v11 += hw * wv * pa * pa;
            v12 += hw * wv * pa * pb;
            v22 += hw * wv * pb * pb;
            b11 += hw * wb * pa * pa;
            b12 += hw * wb * pa * pb;
            b22 += hw * wb * pb * pb;
            if (!std::isfinite(ws) || !std::isfinite(wv) || !std::isfinite(wb))
                throw DegenerateWeightError(
                    "stability: non-finite pencil weight; consider a larger cut_radius");
            scale = std::max(scale, (ws / (x * x) + std::fabs(wv)) / std::max(wb, 1e-300));
        }
        const double k = s_e / (h * h);
        const int ia = e - 1, ib = e;  // dof indices of element ends
        if (ia >= 0) {
            pen.T.diag[ia] += k - v11;
            pen.B.diag[ia] += b11;
        }
        if (ib < ndof) {
            pen.T.diag[ib] += k - v22;
            pen.B.diag[ib] += b22;
        }
        if (ia >= 0 && ib < ndof) {
            pen.T.off[ia] += -k - v12;
            pen.B.off[ia] += b12;
        }
    }
    pen.tol_scale = scale;
    return pen;
}

// Number of eigenvalues of (T, B) strictly below sigma, by the inertia of the
// LDL^T factorization of T - sigma B.
inline int sturm_count(const Pencil& pen, double sigma) {
    const std::size_t n = pen.T.diag.size();
    int count = 0;
    double d_prev = 1.0;
    double carry = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = pen.T.diag[i] - sigma * pen.B.diag[i] - carry;
        if (d == 0.0) d = -1e-300;
        if (d < 0.0) ++count;
        if (i + 1 < n) {
            const double off = pen.T.off[i] - sigma * pen.B.off[i];
            carry = off * off / d;
        }
        d_prev = d;
        (void)d_prev;
    }
    return count;
}

inline double smallest_eigenvalue(const Pencil& pen) {
    const std::size_t n = pen.T.diag.size();
    // Rayleigh-quotient bound from row sums
    double bound = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double toff = (i > 0 ? std::fabs(pen.T.off[i - 1]) : 0.0) +
                            (i + 1 < n ? std::fabs(pen.T.off[i]) : 0.0);
        const double boff = (i > 0 ? std::fabs(pen.B.off[i - 1]) : 0.0) +
                            (i + 1 < n ? std::fabs(pen.B.off[i]) : 0.0);
        const double denom = pen.B.diag[i] - boff;  // mass is diagonally dominant
        if (denom > 0.0)
            bound = std::max(bound, (std::fabs(pen.T.diag[i]) + toff) / denom);
    }
    double lo = -bound, hi = bound;
    for (int guard = 0; sturm_count(pen, lo) > 0 && guard < 200; ++guard) lo *= 2.0;
    for (int guard = 0; sturm_count(pen, hi) < 1 && guard < 200; ++guard) hi *= 2.0;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (sturm_count(pen, mid) >= 1)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-14 * std::max(1.0, std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Smallest eigenvalue of the discrete stability pencil
//   [ (p-1)|u_r|^{p-2} r^{N-1} xi'  xi' ] - [ g'(u) r^{N-1} xi xi ]
//     = mu [ (p-1)|u_r|^{p-2} r^{N-3} xi xi ]
// on (cut_radius, 1) with linear elements.  The mass carries the stiffness
// weight divided by r^2, so mu is measured in Hardy units: the critical
// closed forms read as mu -> 0+ under cut refinement for every p.
inline StabilityReport min_eigenvalue(const RadialProfile& pr, std::span<const double> gprime,
                                      const StabilityOptions& opt = {}) {
    const auto pen = detail::assemble_pencil(pr, gprime, opt);
    StabilityReport rep;
    rep.min_eigenvalue = detail::smallest_eigenvalue(pen);
    rep.cut_radius = opt.cut_radius;
    rep.mesh_count = opt.mesh_count;
    rep.route = StabilityRoute::Eigenvalue;
    rep.tol = opt.tol_factor * pen.tol_scale;
    if (std::fabs(rep.min_eigenvalue) < rep.tol)
        rep.verdict = StabilityVerdict::Marginal;
    else if (rep.min_eigenvalue > 0.0)
        rep.verdict = StabilityVerdict::SemiStable;
    else
        rep.verdict = StabilityVerdict::Unstable;
    return rep;
}

// Direct quadrature of the second-variation form
//   Q(xi) = omega_N int [ (p-1)|u_r|^{p-2} xi'^2 - g'(u) xi^2 ] r^{N-1} dr
// over (cut, 1) intersected with the support of xi.
inline double quadratic_form(const RadialProfile& pr, std::span<const double> gprime,
                             const TestFunction& xi, double cut = 1e-6) {
    detail::ProfileWeights wts{&pr, gprime};
    const double lo = std::max({cut, xi.support_lo, pr.grid.r_min()});
    const double hi = std::min(1.0, xi.support_hi);
    if (!(lo < hi)) return 0.0;
    for (std::size_t i = 0; i < pr.size(); ++i)
        if (pr.grid[i] >= lo && pr.grid[i] < 1.0 && !(pr.u_r[i] < 0.0))
            throw DegenerateWeightError("quadratic_form: u_r vanishes on the support");
    auto integrand = [&](double r) {
        const double xv = xi.value(r), xd = xi.deriv(r);
        return wts.stiffness(r) * xd * xd - wts.potential(r) * xv * xv;
    };
    return sphere_area(pr.N) * integrate_cells_gauss2(pr.grid.nodes(), integrand, lo, hi);
}

// Mass norm ||xi||_B^2 matching the eigenvalue pencil.
inline double b_norm2(const RadialProfile& pr, const TestFunction& xi, double cut = 1e-6) {
    detail::ProfileWeights wts{&pr, {}};
    const double lo = std::max({cut, xi.support_lo, pr.grid.r_min()});
    const double hi = std::min(1.0, xi.support_hi);
    if (!(lo < hi)) return 0.0;
    auto integrand = [&](double r) {
        const double xv = xi.value(r);
        return wts.mass(r) * xv * xv;
    };
    return sphere_area(pr.N) * integrate_cells_gauss2(pr.grid.nodes(), integrand, lo, hi);
}

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// Weighted Poincare inequality satisfied by semi-stable profiles:
//   (N-1) int |u_r|^p eta^2  <=  (p-1) int |u_r|^p ((r eta)')^2.
inline InequalityCheck check_weighted_poincare(const RadialProfile& pr, const TestFunction& eta,
                                               double tol = 1e-6) {
    std::vector<double> aur(pr.size());
    for (std::size_t i = 0; i < pr.size(); ++i) aur[i] = std::max(std::fabs(pr.u_r[i]), 1e-300);
    auto absur = [&](double r) { return loglog_at(pr.grid.nodes(), aur, r); };
    const double lo = std::max(pr.grid.r_min(), eta.support_lo);
    const double hi = std::min(1.0, eta.support_hi);
    InequalityCheck out;
    if (!(lo < hi)) {
        out.holds = true;
        return out;
    }
    const double om = sphere_area(pr.N);
    auto weight = [&](double r) { return std::pow(absur(r), pr.p) * std::pow(r, pr.N - 1); };
    out.lhs = (pr.N - 1.0) * om *
              integrate_cells_gauss2(pr.grid.nodes(),
                                     [&](double r) {
                                         const double e = eta.value(r);
                                         return weight(r) * e * e;
                                     },
                                     lo, hi);
    out.rhs = (pr.p - 1.0) * om *
              integrate_cells_gauss2(pr.grid.nodes(),
                                     [&](double r) {
                                         const double d = eta.value(r) + r * eta.deriv(r);
                                         return weight(r) * d * d;
                                     },
                                     lo, hi);
    out.holds = out.lhs <= out.rhs + tol * (1.0 + std::fabs(out.rhs));
    return out;
}

// Generalized Hardy inequality for increasing Phi on (0, 1):
//   int 4 Phi^2 / Phi'  xi'^2  >=  int Phi' xi^2.
inline InequalityCheck hardy_check(const std::function<double(double)>& phi,
                                   const std::function<double(double)>& phi_prime,
                                   const TestFunction& xi, std::span<const double> grid,
                                   double tol = 1e-6) {
    const double lo = std::max(grid.front(), xi.support_lo);
    const double hi = std::min(1.0, xi.support_hi);
    InequalityCheck out;
    if (!(lo < hi)) {
        out.holds = true;
        return out;
    }
    auto guard = [&](double r) {
        const double d = phi_prime(r);
        if (!(d > 0.0)) throw std::domain_error("hardy_check: Phi' must be positive");
        return d;
    };
    out.lhs = integrate_cells_gauss2(grid,
                                     [&](double r) {
                                         const double d = guard(r);
                                         const double f = phi(r), xd = xi.deriv(r);
                                         return 4.0 * f * f / d * xd * xd;
                                     },
                                     lo, hi);
    out.rhs = integrate_cells_gauss2(grid,
                                     [&](double r) {
                                         const double xv = xi.value(r);
                                         return guard(r) * xv * xv;
                                     },
                                     lo, hi);
    out.holds = out.lhs >= out.rhs - tol * (1.0 + std::fabs(out.lhs));
    return out;
}

}  // namespace plap
