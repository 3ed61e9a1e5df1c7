#pragma once

#include <stdexcept>

#include "plap/exponents.hpp"
#include "plap/nonlinearity.hpp"

namespace plap {

// One PDE instance: the radial quasilinear problem with parameter lambda and
// nonlinearity f on the unit ball in dimension N.
struct ProblemSpec {
    int N = 3;
    double p = 2.0;
    double lambda = 1.0;
    NonlinearitySpec f = NonlinearitySpec::exponential();

    ProblemSpec() = default;

    ProblemSpec(int N_, double p_, double lambda_, NonlinearitySpec f_)
        : N(N_), p(p_), lambda(lambda_), f(std::move(f_)) {
        if (N < kMinDimension || N > kMaxDimension)
            throw std::domain_error("ProblemSpec: N must lie in [2, 50]");
        if (!(p > kMinExponentP && p < kMaxExponentP))
            throw std::domain_error("ProblemSpec: p must lie in (1.05, 10)");
        if (!(lambda >= 0.0)) throw std::domain_error("ProblemSpec: lambda must be >= 0");
        if (!f.admissible_for_branch())
            throw std::domain_error("ProblemSpec: f must be increasing with f(0) > 0");
    }

    ExponentSet exponents() const { return exponent_set(N, p); }

    // g(s) = lambda * f(s) and its derivative: the right-hand side actually
    // driving the flux equation.
    double g(double s) const { return lambda * f.value(s); }
    double gprime(double s) const { return lambda * f.deriv(s); }
};

}  // namespace plap
