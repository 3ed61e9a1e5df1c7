#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "plap/errors.hpp"
#include "plap/grid.hpp"
#include "plap/problem.hpp"
#include "plap/profile.hpp"

namespace plap {

struct IvpOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double r_start = 1e-6;
    double h_max = 5e-3;
    double u_floor_margin = 0.1;  // stop at domain_floor + margin for floored f
    int max_steps = 2'000'000;
};

namespace detail {

// Flux system  u' = -(|w| / r^{N-1})^{1/(p-1)},  w' = -lambda r^{N-1} f(u).
struct FluxSystem {
    int N;
    double p;
    double lambda;
    const NonlinearitySpec* f;

    std::array<double, 2> rhs(double r, const std::array<double, 2>& y) const {
        const double rp = std::pow(r, N - 1);
        const double au = std::pow(std::max(0.0, -y[1]) / rp, 1.0 / (p - 1.0));
        return {-au, -lambda * rp * f->value(y[0])};
    }
};

struct Rk45Result {
    std::array<double, 2> y;
    double err;
};

// One Dormand-Prince 5(4) step.
inline Rk45Result dopri5_step(const FluxSystem& sys, double r,
                              const std::array<double, 2>& y, double h) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    std::array<double, 2> t;
    const auto k1 = sys.rhs(r, y);
    for (int j = 0; j < 2; ++j) t[j] = y[j] + h * a21 * k1[j];
    const auto k2 = sys.rhs(r + h * 0.2, t);
    for (int j = 0; j < 2; ++j) t[j] = y[j] + h * (a31 * k1[j] + a32 * k2[j]);
    const auto k3 = sys.rhs(r + h * 0.3, t);
    for (int j = 0; j < 2; ++j) t[j] = y[j] + h * (a41 * k1[j] + a42 * k2[j] + a43 * k3[j]);
    const auto k4 = sys.rhs(r + h * 0.8, t);
    for (int j = 0; j < 2; ++j)
        t[j] = y[j] + h * (a51 * k1[j] + a52 * k2[j] + a53 * k3[j] + a54 * k4[j]);
    const auto k5 = sys.rhs(r + h * 8.0 / 9.0, t);
    for (int j = 0; j < 2; ++j)
        t[j] = y[j] + h * (a61 * k1[j] + a62 * k2[j] + a63 * k3[j] + a64 * k4[j] + a65 * k5[j]);
    const auto k6 = sys.rhs(r + h, t);
    std::array<double, 2> y5;
    for (int j = 0; j < 2; ++j)
        y5[j] = y[j] + h * (b1 * k1[j] + b3 * k3[j] + b4 * k4[j] + b5 * k5[j] + b6 * k6[j]);
    const auto k7 = sys.rhs(r + h, y5);
    double err = 0.0;
    for (int j = 0; j < 2; ++j) {
        const double ej = h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] +
                               e6 * k6[j] + e7 * k7[j]);
        err = std::max(err, std::fabs(ej));
    }
    return {y5, err};
}

inline void record_node(RadialProfile& pr, std::size_t i, double r,
                        const std::array<double, 2>& y, const FluxSystem& sys) {
    pr.u[i] = y[0];
    pr.w[i] = y[1];
    const double rp = std::pow(r, sys.N - 1);
    pr.u_r[i] = -std::pow(std::max(0.0, -y[1]) / rp, 1.0 / (sys.p - 1.0));
    pr.w_prime[i] = -sys.lambda * rp * sys.f->value(y[0]);
}

}  // namespace detail

struct IvpOutcome {
    RadialProfile profile;     // filled only when a grid was supplied
    double u_end = 0.0;        // u(1), or a sign-preserving continuation if floored
    double w_end = 0.0;
    bool floored = false;      // f left its domain before r = 1
    double floor_radius = 1.0;
};

// Leading-order start values at radius r from the regular origin expansion:
// u = a - (lambda f(a)/N)^{1/(p-1)} (p-1)/p r^{p/(p-1)},  w = -lambda f(a) r^N / N.
inline std::array<double, 2> origin_start(const ProblemSpec& spec, double a, double r) {
    const double lf = spec.lambda * spec.f.value(a);
    const double cu = std::pow(lf / spec.N, 1.0 / (spec.p - 1.0)) * (spec.p - 1.0) / spec.p;
    return {a - cu * std::pow(r, spec.p / (spec.p - 1.0)), -lf * std::pow(r, spec.N) / spec.N};
}

// Start radius at which the origin expansion is trustworthy: the quadratic
// cap correction must stay below a fixed small drop, which matters once
// lambda f(a) is large (steep caps hug the origin).
inline double origin_start_radius(const ProblemSpec& spec, double a, double r_cap) {
    const double lf = spec.lambda * spec.f.value(a);
    if (!(lf > 0.0)) return r_cap;
    const double pm1 = spec.p - 1.0;
    const double drop = 1e-6 * std::max(1.0, a);
    const double r = std::pow(drop * spec.p / pm1 * std::pow(spec.N / lf, 1.0 / pm1),
                              pm1 / spec.p);
    return std::clamp(r, 1e-280, r_cap);
}

// Integrate the flux system from (r0, y0) to r = 1 with adaptive error
// control.  When a grid is supplied the integrator steps exactly onto every
// node, so nodal values carry integrator-level accuracy (no dense-output
// interpolation error).  origin_amplitude, when given, fills grid nodes at or
// below r0 from the regular origin expansion.
inline IvpOutcome integrate_flux_from(const ProblemSpec& spec, double r0,
                                      std::array<double, 2> y, const RadialGrid* fill_grid,
                                      const IvpOptions& opt = {},
                                      const double* origin_amplitude = nullptr) {
    detail::FluxSystem sys{spec.N, spec.p, spec.lambda, &spec.f};
    const double floor_u = spec.f.domain_floor();
    const double stop_u = std::isfinite(floor_u) ? floor_u + opt.u_floor_margin : -1e12;

    IvpOutcome out;
    std::vector<double> targets;
    std::size_t next_target = 0;
    if (fill_grid) {
        out.profile.grid = *fill_grid;
        out.profile.N = spec.N;
        out.profile.p = spec.p;
        out.profile.lambda = spec.lambda;
        out.profile.f = spec.f;
        const std::size_t n = fill_grid->size();
        out.profile.u.assign(n, 0.0);
        out.profile.u_r.assign(n, 0.0);
        out.profile.w.assign(n, 0.0);
        out.profile.w_prime.assign(n, 0.0);
        targets = fill_grid->nodes();
        while (next_target < targets.size() && targets[next_target] < r0 * (1.0 - 1e-14)) {
            if (!origin_amplitude)
                throw std::domain_error("integrate_flux: grid nodes below the start radius");
            const auto ys = origin_start(spec, *origin_amplitude, targets[next_target]);
            detail::record_node(out.profile, next_target, targets[next_target], ys, sys);
            ++next_target;
        }
    }

    double r = r0;
    auto record_if_target = [&]() {
        while (next_target < targets.size() &&
               targets[next_target] <= r * (1.0 + 1e-14)) {
            detail::record_node(out.profile, next_target, targets[next_target], y, sys);
            ++next_target;
        }
    };
    if (fill_grid) record_if_target();

    double h = std::min(opt.h_max, std::max(1e-8, 0.05 * r0));
    int steps = 0;
    while (r < 1.0) {
        if (++steps > opt.max_steps)
            throw std::runtime_error("integrate_flux: step budget exhausted");
        bool to_target = false;
        double h_try = std::min(h, opt.h_max);
        if (1.0 - r <= h_try) {
            h_try = 1.0 - r;
            to_target = true;
        }
        double target = 1.0;
        if (next_target < targets.size() && targets[next_target] - r <= h_try) {
            target = targets[next_target];
            h_try = target - r;
            to_target = true;
        } else if (to_target) {
            target = 1.0;
        }
        h_try = std::max(h_try, 1e-17);

        const auto res = detail::dopri5_step(sys, r, y, h_try);
        const double scale = opt.abs_tol +
                             opt.rel_tol * std::max({std::fabs(y[0]), std::fabs(res.y[0]),
                                                     std::fabs(y[1]), std::fabs(res.y[1]), 1.0});
        const double q = res.err / scale;
        if (q <= 1.0) {
            r = to_target ? target : r + h_try;
            y = res.y;
            if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
                throw IntegrationBlowUp(r, "integrate_flux: non-finite state at r = " +
                                               std::to_string(r));
            if (fill_grid) record_if_target();
            if (y[0] < stop_u) {
                out.floored = true;
                out.floor_radius = r;
                const auto d = sys.rhs(r, y);
                out.u_end = y[0] + d[0] * (1.0 - r);
                out.w_end = y[1];
                if (fill_grid)
                    throw IntegrationBlowUp(r, "integrate_flux: f(u) left its domain at r = " +
                                                   std::to_string(r));
                return out;
            }
            // aim the controller at a tenth of the tolerance so the global
            // error tracks the nominal tolerance rather than trailing it
            if (!to_target)
                h = h_try * std::clamp(0.9 * std::pow(std::max(q, 1e-12) / 0.1, -0.2), 0.2, 5.0);
            else
                h = std::min(opt.h_max, h * 1.5);
        } else {
            h = h_try * std::clamp(0.9 * std::pow(q / 0.1, -0.25), 0.05, 1.0);
        }
    }
    out.u_end = y[0];
    out.w_end = y[1];
    return out;
}

// Solve the IVP from central amplitude a onto the reporting grid.
inline RadialProfile integrate_ivp(const ProblemSpec& spec, double a,
                                   const RadialGrid& grid, const IvpOptions& opt = {}) {
    if (!(a > 0.0)) throw std::domain_error("integrate_ivp: amplitude must be positive");
    if (spec.lambda == 0.0) {
        RadialProfile pr;
        pr.grid = grid;
        pr.N = spec.N;
        pr.p = spec.p;
        pr.lambda = 0.0;
        pr.f = spec.f;
        pr.u.assign(grid.size(), a);
        pr.u_r.assign(grid.size(), 0.0);
        pr.w.assign(grid.size(), 0.0);
        pr.w_prime.assign(grid.size(), 0.0);
        return pr;
    }
    const double r0 = origin_start_radius(spec, a, std::min(opt.r_start, grid.r_min()));
    const auto y0 = origin_start(spec, a, r0);
    auto out = integrate_flux_from(spec, r0, y0, &grid, opt, &a);
    return std::move(out.profile);
}

// u(1) only, no grid fill; the fast path for shooting.
inline IvpOutcome integrate_endpoint(const ProblemSpec& spec, double a,
                                     const IvpOptions& opt = {}) {
    if (spec.lambda == 0.0) return {.u_end = a, .w_end = 0.0};
    const double r0 = origin_start_radius(spec, a, opt.r_start);
    const auto y0 = origin_start(spec, a, r0);
    return integrate_flux_from(spec, r0, y0, nullptr, opt);
}

}  // namespace plap
