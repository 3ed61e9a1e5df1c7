#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "plap/errors.hpp"
#include "plap/ivp.hpp"

namespace plap {

struct ShootOptions {
    IvpOptions ivp;
    double lambda_seed = 1e-6;
    double lambda_max_search = 1e6;
    double shoot_tol = 1e-9;   // |u(1)| acceptance
    int max_iters = 200;
};

struct ShootResult {
    double lambda = 0.0;
    RadialProfile profile;
};

inline ShootResult polish(int N, double p, const NonlinearitySpec& f, double a,
                          const RadialGrid& grid, double lo, double hi, double flo, double fhi,
                          const ShootOptions& opt);

// lambda(a): the smallest parameter for which the amplitude-a profile lands
// on u(1) = 0.  Bracketing by doubling from lambda_seed (u(1) > 0 for small
// lambda since u(1) -> a), then a secant/bisection hybrid on the bracket.
inline ShootResult shoot_lambda(int N, double p, const NonlinearitySpec& f, double a,
                                const RadialGrid& grid, const ShootOptions& opt = {}) {
    if (!(a > 0.0)) throw std::domain_error("shoot_lambda: amplitude must be positive");

    auto endpoint = [&](double lambda) {
        ProblemSpec spec(N, p, lambda, f);
        return integrate_endpoint(spec, a, opt.ivp).u_end;
    };

    double lo = opt.lambda_seed;
    double flo = endpoint(lo);
    if (flo <= 0.0) {
        // the seed already overshoots; shrink toward zero to recover a bracket
        double lo2 = lo;
        while (flo <= 0.0 && lo2 > 1e-300) {
            lo2 *= 0.25;
            flo = endpoint(lo2);
        }
        if (flo <= 0.0) throw NoMatchError("shoot_lambda: no positive-u(1) side found");
        const double hi0 = lo2 * 4.0;
        lo = lo2;
        return polish(N, p, f, a, grid, lo, hi0, flo, endpoint(hi0), opt);
    }
    double hi = lo;
    double fhi = flo;
    while (fhi > 0.0) {
        hi *= 2.0;
        if (hi > opt.lambda_max_search)
            throw NoMatchError("shoot_lambda: no sign change of u(1) below lambda_max_search");
        fhi = endpoint(hi);
    }
    return polish(N, p, f, a, grid, hi / 2.0, hi, flo, fhi, opt);
}

inline ShootResult polish(int N, double p, const NonlinearitySpec& f, double a,
                          const RadialGrid& grid, double lo, double hi, double flo, double fhi,
                          const ShootOptions& opt) {
    auto endpoint = [&](double lambda) {
        ProblemSpec spec(N, p, lambda, f);
        return integrate_endpoint(spec, a, opt.ivp).u_end;
    };
    const double tol = opt.shoot_tol * std::max(1.0, a);
    double lambda = hi;
    bool resolved = false;
    for (int it = 0; it < opt.max_iters; ++it) {
        // secant step alternating with bisection, so the bracket halves at
        // least every other iteration even when the endpoint map is steep
        double cand = 0.5 * (lo + hi);
        if (it % 2 == 1) {
            const double sec = lo - flo * (hi - lo) / (fhi - flo);
            if (sec > lo && sec < hi) cand = sec;
        }
        const double fc = endpoint(cand);
        lambda = cand;
        if (std::fabs(fc) < tol) {
            resolved = true;
            break;
        }
        if (fc > 0.0) {
            lo = cand;
            flo = fc;
        } else {
            hi = cand;
            fhi = fc;
        }
        // the bracket can collapse to machine resolution before |u(1)| meets
        // the tolerance when the endpoint map is steep; lambda is then
        // resolved to ulp, which is as good as it gets
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            resolved = true;
            break;
        }
    }
    if (!resolved) throw NoMatchError("shoot_lambda: bracket failed to converge");
    ProblemSpec spec(N, p, lambda, f);
    ShootResult res;
    res.lambda = lambda;
    res.profile = integrate_ivp(spec, a, grid, opt.ivp);
    return res;
}

struct Branch {
    struct Point {
        double amplitude = 0.0;
        double lambda = 0.0;
    };
    std::vector<Point> points;
    std::vector<RadialProfile> profiles;  // aligned with points
    double lambda_star_estimate = 0.0;
    double lambda_star_uncertainty = 0.0;
    bool complete = true;            // false when some amplitudes failed to match
    bool monotone_verified = false;  // pointwise ordering on the minimal segment
};

// Trace lambda(a) on a log-spaced amplitude ladder.
inline Branch trace_branch(int N, double p, const NonlinearitySpec& f, double a_min,
                           double a_max, int steps, const RadialGrid& grid,
                           const ShootOptions& opt = {}) {
    if (!(0.0 < a_min && a_min < a_max)) throw std::domain_error("trace_branch: bad ladder");
    if (steps < 2) throw std::domain_error("trace_branch: need >= 2 steps");
    Branch br;
    for (int k = 0; k < steps; ++k) {
        const double a = a_min * std::pow(a_max / a_min, static_cast<double>(k) / (steps - 1));
        try {
            auto res = shoot_lambda(N, p, f, a, grid, opt);
            br.points.push_back({a, res.lambda});
            br.profiles.push_back(std::move(res.profile));
        } catch (const NoMatchError&) {
            br.complete = false;
        }
    }
    // pointwise monotone increase of u along the lambda-increasing prefix
    br.monotone_verified = true;
    for (std::size_t k = 0; k + 1 < br.points.size(); ++k) {
        if (br.points[k + 1].lambda <= br.points[k].lambda) break;
        const auto& u0 = br.profiles[k].u;
        const auto& u1 = br.profiles[k + 1].u;
        for (std::size_t i = 0; i < u0.size(); ++i)
            if (u1[i] < u0[i] - 1e-8 * (1.0 + std::fabs(u0[i]))) {
                br.monotone_verified = false;
                break;
            }
        if (!br.monotone_verified) break;
    }
    return br;
}

struct LambdaStarEstimate {
    double lambda_star = 0.0;
    double uncertainty = 0.0;
    bool fold = false;  // true: parabolic fit at a fold; false: saturating tail
};

// Estimate the end of the minimal branch.  Below the critical dimension the
// branch folds: fit a parabola in log-amplitude through the three largest
// lambdas.  At or above it lambda(a) saturates: Aitken extrapolation of the
// tail (exact for geometrically converging sequences, which a power-law tail
// on a log-spaced ladder is).
inline LambdaStarEstimate estimate_lambda_star(const Branch& br, int N, double p) {
    if (br.points.size() < 5)
        throw std::domain_error("estimate_lambda_star: need >= 5 branch points");
    const bool saturating = N >= critical_dimension(p) - 1e-12;
    LambdaStarEstimate est;
    const auto& pts = br.points;
    if (!saturating) {
        est.fold = true;
        std::size_t imax = 0;
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (pts[i].lambda > pts[imax].lambda) imax = i;
        if (imax == 0 || imax + 1 == pts.size())
            throw std::domain_error("estimate_lambda_star: fold not bracketed by the ladder");
        const double x0 = std::log(pts[imax - 1].amplitude), y0 = pts[imax - 1].lambda;
        const double x1 = std::log(pts[imax].amplitude), y1 = pts[imax].lambda;
        const double x2 = std::log(pts[imax + 1].amplitude), y2 = pts[imax + 1].lambda;
        // vertex of the interpolating parabola
        const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
        const double c2 = (d12 - d01) / (x2 - x0);
        if (c2 >= 0.0) {
            est.lambda_star = y1;
            est.uncertainty = std::max(y1 - y0, y1 - y2);
            return est;
        }
        const double xv = 0.5 * (x0 + x1) - d01 / (2.0 * c2);
        est.lambda_star = y0 + d01 * (xv - x0) + c2 * (xv - x0) * (xv - x1);
        est.lambda_star = std::max(est.lambda_star, y1);
        est.uncertainty = est.lambda_star - y1;
        return est;
    }
    const std::size_t n = pts.size();
    const double l1 = pts[n - 3].lambda, l2 = pts[n - 2].lambda, l3 = pts[n - 1].lambda;
    const double d2 = (l3 - l2) - (l2 - l1);
    double extrap = l3;
    if (std::fabs(d2) > 1e-300) extrap = l3 - (l3 - l2) * (l3 - l2) / d2;
    est.lambda_star = std::max(extrap, l3);
    est.uncertainty = std::fabs(est.lambda_star - l3);
    return est;
}

// Amplitude solving u(1) = 0 at fixed lambda: the minimal-solution root of
// a -> u(1; a, lambda), taken as the smallest bracketed crossing.
inline ShootResult solve_amplitude(const ProblemSpec& spec, const RadialGrid& grid,
                                   const ShootOptions& opt = {}) {
    auto endpoint = [&](double a) { return integrate_endpoint(spec, a, opt.ivp).u_end; };
    double lo = 1e-8;
    double flo = endpoint(lo);
    if (flo > 0.0) throw NoMatchError("solve_amplitude: u(1) > 0 already at a -> 0");
    double hi = std::max(2e-8, 1e-4);
    double fhi = endpoint(hi);
    while (fhi <= 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        if (hi > 1e8) throw NoMatchError("solve_amplitude: no crossing of u(1) = 0 found");
        fhi = endpoint(hi);
    }
    const double tol = opt.shoot_tol;
    double a = hi;
    bool resolved = false;
    for (int it = 0; it < opt.max_iters; ++it) {
        double cand = 0.5 * (lo + hi);
        if (it % 2 == 1) {
            const double sec = lo - flo * (hi - lo) / (fhi - flo);
            if (sec > lo && sec < hi) cand = sec;
        }
        const double fc = endpoint(cand);
        a = cand;
        if (std::fabs(fc) < tol) {
            resolved = true;
            break;
        }
        if (fc <= 0.0) {
            lo = cand;
            flo = fc;
        } else {
            hi = cand;
            fhi = fc;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            resolved = true;
            break;
        }
    }
    if (!resolved) throw NoMatchError("solve_amplitude: root polish failed");
    ShootResult res;
    res.lambda = spec.lambda;
    res.profile = integrate_ivp(spec, a, grid, opt.ivp);
    return res;
}

}  // namespace plap
