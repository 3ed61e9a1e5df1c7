#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "plap/exponents.hpp"
#include "plap/grid.hpp"
#include "plap/profile.hpp"

namespace plap {

enum class ClosedFormKind { ExponentialCritical, PowerSupercritical };

struct ClosedForm {
    RadialProfile profile;
    double lambda_star = 0.0;
    std::optional<double> m;  // power-shift exponent, power case only
};

// u(r) = -p log r with f(t) = e^t at the critical dimension; the parameter
// threshold is 4 p^p / (p-1).
inline ClosedForm exponential_critical(int N, double p, const RadialGrid& grid) {
    require_Np(N, p);
    if (std::fabs(N - critical_dimension(p)) >= 1e-12)
        throw std::domain_error("exponential_critical: N must equal p + 4p/(p-1) exactly");
    ClosedForm cf;
    cf.lambda_star = 4.0 * std::pow(p, p) / (p - 1.0);
    RadialProfile& pr = cf.profile;
    pr.grid = grid;
    pr.N = N;
    pr.p = p;
    pr.lambda = cf.lambda_star;
    pr.f = NonlinearitySpec::exponential();
    const std::size_t n = grid.size();
    pr.u.resize(n);
    pr.u_r.resize(n);
    pr.w.resize(n);
    pr.u_rr.resize(n);
    pr.u_rrr.resize(n);
    pr.w_prime.resize(n);
    const double c = std::pow(p, p - 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid[i];
        pr.u[i] = -p * std::log(r);
        pr.u_r[i] = -p / r;
        pr.u_rr[i] = p / (r * r);
        pr.u_rrr[i] = -2.0 * p / (r * r * r);
        pr.w[i] = -c * std::pow(r, N - p);
        pr.w_prime[i] = -c * (N - p) * std::pow(r, N - p - 1.0);
    }
    return cf;
}

// u(r) = r^{-alpha} - 1 with f(t) = (1+t)^m above the critical dimension.
inline ClosedForm power_supercritical(int N, double p, const RadialGrid& grid) {
    require_Np(N, p);
    const ExponentSet ex = exponent_set(N, p);
    if (!(N > ex.N_c))
        throw std::domain_error("power_supercritical: requires N > p + 4p/(p-1)");
    const double al = ex.alpha;
    const double m = ((al + 1.0) * (p - 1.0) + 1.0) / al;
    ClosedForm cf;
    cf.m = m;
    cf.lambda_star = std::pow(al, p - 1.0) * (N - m * al);
    RadialProfile& pr = cf.profile;
    pr.grid = grid;
    pr.N = N;
    pr.p = p;
    pr.lambda = cf.lambda_star;
    pr.f = NonlinearitySpec::power_shift(m);
    const std::size_t n = grid.size();
    pr.u.resize(n);
    pr.u_r.resize(n);
    pr.w.resize(n);
    pr.u_rr.resize(n);
    pr.u_rrr.resize(n);
    pr.w_prime.resize(n);
    const double cw = std::pow(al, p - 1.0);
    const double we = N - 1.0 - (al + 1.0) * (p - 1.0);  // w ~ -cw r^we
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid[i];
        pr.u[i] = std::pow(r, -al) - 1.0;
        pr.u_r[i] = -al * std::pow(r, -al - 1.0);
        pr.u_rr[i] = al * (al + 1.0) * std::pow(r, -al - 2.0);
        pr.u_rrr[i] = -al * (al + 1.0) * (al + 2.0) * std::pow(r, -al - 3.0);
        pr.w[i] = -cw * std::pow(r, we);
        pr.w_prime[i] = -cw * we * std::pow(r, we - 1.0);
    }
    return cf;
}

inline ClosedForm exact_extremal(ClosedFormKind kind, int N, double p,
                                 const RadialGrid& grid) {
    switch (kind) {
        case ClosedFormKind::ExponentialCritical: return exponential_critical(N, p, grid);
        case ClosedFormKind::PowerSupercritical: return power_supercritical(N, p, grid);
    }
    throw std::domain_error("exact_extremal: unknown kind");
}

}  // namespace plap
