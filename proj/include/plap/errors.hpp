#pragma once

#include <stdexcept>
#include <string>

namespace plap {

// Thrown when the IVP state leaves the admissible region before reaching r = 1
// (e.g. the nonlinearity is driven out of its domain by an oversized lambda).
class IntegrationBlowUp : public std::runtime_error {
public:
    IntegrationBlowUp(double radius, const std::string& what)
        : std::runtime_error(what), radius_(radius) {}
    double radius() const { return radius_; }

private:
    double radius_;
};

// Thrown when no lambda bracket with a sign change of u(1) exists in the
// search interval.
class NoMatchError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a weight of the stability pencil (or an ODE-derived quantity)
// degenerates because u_r vanishes on the evaluation set.
class DegenerateWeightError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace plap
