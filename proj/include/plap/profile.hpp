#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plap/grid.hpp"
#include "plap/interpolation.hpp"
#include "plap/problem.hpp"

namespace plap {

// A radial profile sampled on a grid.  u_r <= 0 everywhere; w is the flux
// r^{N-1}|u_r|^{p-2}u_r, the variable that integrates cleanly through the
// p-Laplacian degeneracy.  Optional second/third derivatives are filled by
// the ODE identities or closed forms, never by differencing.
struct RadialProfile {
    RadialGrid grid;
    int N = 0;
    double p = 0.0;
    std::vector<double> u;
    std::vector<double> u_r;
    std::vector<double> w;
    std::vector<double> u_rr;    // empty when absent
    std::vector<double> u_rrr;   // empty when absent
    std::vector<double> w_prime; // analytic flux derivative when known

    std::optional<double> lambda;
    std::optional<NonlinearitySpec> f;

    std::size_t size() const { return grid.size(); }
    bool has_second() const { return u_rr.size() == size(); }
    bool has_third() const { return u_rrr.size() == size(); }
    bool has_wprime() const { return w_prime.size() == size(); }

    double flux_from_ur(std::size_t i) const {
        const double r = grid[i];
        const double a = std::fabs(u_r[i]);
        return std::pow(r, N - 1) * std::pow(a, p - 1.0) * (u_r[i] <= 0.0 ? -1.0 : 1.0);
    }

    // |w| = r^{N-1}|u_r|^{p-1} must hold at every node.
    double max_flux_inconsistency() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            const double expect = std::pow(grid[i], N - 1) * std::pow(std::fabs(u_r[i]), p - 1.0);
            const double got = std::fabs(w[i]);
            worst = std::max(worst, std::fabs(got - expect) / (1.0 + expect));
        }
        return worst;
    }

    void check_consistency(double tol = 1e-10) const {
        if (u.size() != size() || u_r.size() != size() || w.size() != size())
            throw std::invalid_argument("profile: field lengths disagree with grid");
        const double err = max_flux_inconsistency();
        if (err > tol)
            throw std::invalid_argument("profile: flux/|u_r| inconsistency " + std::to_string(err));
    }

    // Interpolated value of u at radius r (monotone cubic in log r).
    double u_at(double r) const {
        ensure_interp();
        return (*u_interp_)(std::log(r));
    }

    double ur_at(double r) const {
        // u_r < 0 with power-law behaviour: interpolate |u_r| log-log.
        return -loglog_interp(r);
    }

    double min_abs_ur_on(double lo, double hi) const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < size(); ++i)
            if (grid[i] >= lo && grid[i] <= hi) best = std::min(best, std::fabs(u_r[i]));
        if (!std::isfinite(best)) throw std::domain_error("profile: no nodes in window");
        return best;
    }

private:
    void ensure_interp() const {
        if (u_interp_) return;
        std::vector<double> lr(size());
        for (std::size_t i = 0; i < size(); ++i) lr[i] = std::log(grid[i]);
        u_interp_ = std::make_shared<PchipInterpolant>(lr, u);
    }

    double loglog_interp(double r) const {
        std::vector<double> a(size());
        for (std::size_t i = 0; i < size(); ++i) a[i] = std::max(std::fabs(u_r[i]), 1e-300);
        return loglog_at(grid.nodes(), a, r);
    }

    mutable std::shared_ptr<const PchipInterpolant> u_interp_;
};

}  // namespace plap
