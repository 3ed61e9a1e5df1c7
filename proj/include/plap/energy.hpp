#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "plap/exponents.hpp"
#include "plap/profile.hpp"
#include "plap/quadrature.hpp"

namespace plap {

// Right-hand side g(s) for energy evaluation: either lambda * f(s) from a
// problem spec, or an arbitrary sampled/analytic callable.
struct EnergyRhs {
    std::function<double(double)> g;          // g(s)
    std::function<double(double)> antideriv;  // G(s) with arbitrary reference

    static EnergyRhs from_problem(double lambda, const NonlinearitySpec& f) {
        EnergyRhs r;
        r.g = [lambda, f](double s) { return lambda * f.value(s); };
        r.antideriv = [lambda, f](double s) { return lambda * f.antideriv(s); };
        return r;
    }

    static EnergyRhs from_sampled(const PchipInterpolant& table) {
        EnergyRhs r;
        auto shared = std::make_shared<PchipInterpolant>(table);
        r.g = [shared](double s) { return (*shared)(s); };
        r.antideriv = [shared](double s) { return shared->integral(0.0, s); };
        return r;
    }
};

// E = omega_N * integral over (r_lo, r_hi) of [ |u_r|^p / p - G(u) ] r^{N-1},
// with the antiderivative G shifted so that G(u(ref_radius)) = 0.  The
// reference defaults to the outer annulus edge; fixing one reference across
// several annuli makes the values additive.
inline double energy(const RadialProfile& pr, const EnergyRhs& rhs,
                     double r_lo, double r_hi,
                     std::optional<double> ref_radius = std::nullopt) {
    if (!(r_lo > 0.0) || !(r_lo < r_hi))
        throw std::domain_error("energy: need 0 < r_lo < r_hi");
    const auto& r = pr.grid.nodes();
    if (r_lo < r.front() - 1e-15 || r_hi > r.back() + 1e-15)
        throw std::domain_error("energy: grid does not cover the annulus");
    const double Gref = rhs.antideriv(pr.u_at(ref_radius.value_or(r_hi)));
    std::vector<double> integrand(pr.size());
    for (std::size_t i = 0; i < pr.size(); ++i) {
        const double gr = std::pow(std::fabs(pr.u_r[i]), pr.p) / pr.p;
        const double pot = rhs.antideriv(pr.u[i]) - Gref;
        integrand[i] = (gr - pot) * std::pow(r[i], pr.N - 1);
    }
    return sphere_area(pr.N) * integrate_nodal_window(r, integrand, r_lo, r_hi);
}

}  // namespace plap
