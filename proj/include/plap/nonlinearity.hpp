#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "plap/interpolation.hpp"

namespace plap {

enum class NonlinearityKind { Exponential, PowerShift, Sampled };

// Right-hand-side nonlinearity f together with its first two derivatives and
// antiderivative.  Three representations:
//   Exponential    f(t) = e^t
//   PowerShift(m)  f(t) = (1+t)^m, defined for t > -1
//   Sampled        shape-preserving cubic through (s, f(s)) samples
class NonlinearitySpec {
public:
    static NonlinearitySpec exponential() {
        NonlinearitySpec f;
        f.kind_ = NonlinearityKind::Exponential;
        return f;
    }

    static NonlinearitySpec power_shift(double m) {
        if (!(m > 0.0)) throw std::domain_error("power_shift: m must be positive");
        NonlinearitySpec f;
        f.kind_ = NonlinearityKind::PowerShift;
        f.m_ = m;
        return f;
    }

    static NonlinearitySpec sampled(std::span<const double> s, std::span<const double> g) {
        NonlinearitySpec f;
        f.kind_ = NonlinearityKind::Sampled;
        f.table_ = std::make_shared<PchipInterpolant>(s, g);
        return f;
    }

    NonlinearityKind kind() const { return kind_; }
    double power() const { return m_; }

    double value(double t) const {
        switch (kind_) {
            case NonlinearityKind::Exponential: return std::exp(t);
            case NonlinearityKind::PowerShift: return std::pow(1.0 + t, m_);
            case NonlinearityKind::Sampled: return (*table_)(t);
        }
        return 0.0;
    }

    double deriv(double t) const {
        switch (kind_) {
            case NonlinearityKind::Exponential: return std::exp(t);
            case NonlinearityKind::PowerShift: return m_ * std::pow(1.0 + t, m_ - 1.0);
            case NonlinearityKind::Sampled: return table_->derivative(t);
        }
        return 0.0;
    }

    double second_deriv(double t) const {
        switch (kind_) {
            case NonlinearityKind::Exponential: return std::exp(t);
            case NonlinearityKind::PowerShift:
                return m_ * (m_ - 1.0) * std::pow(1.0 + t, m_ - 2.0);
            case NonlinearityKind::Sampled: {
                // The cubic's second derivative is discontinuous at knots; a
                // symmetric difference of the C^1 derivative is adequate for
                // hypothesis screening.
                const double h = 1e-6 * std::max(1.0, std::fabs(t));
                return (table_->derivative(t + h) - table_->derivative(t - h)) / (2.0 * h);
            }
        }
        return 0.0;
    }

    // Antiderivative with F(0) = 0.
    double antideriv(double t) const {
        switch (kind_) {
            case NonlinearityKind::Exponential: return std::exp(t) - 1.0;
            case NonlinearityKind::PowerShift:
                return (std::pow(1.0 + t, m_ + 1.0) - 1.0) / (m_ + 1.0);
            case NonlinearityKind::Sampled: return table_->integral(0.0, t);
        }
        return 0.0;
    }

    // Lower edge of the domain (PowerShift is undefined at t <= -1).
    double domain_floor() const {
        return kind_ == NonlinearityKind::PowerShift ? -1.0
                                                     : -std::numeric_limits<double>::infinity();
    }

    // Minimal-branch solving requires f increasing with f(0) > 0.
    bool admissible_for_branch() const {
        if (!(value(0.0) > 0.0)) return false;
        switch (kind_) {
            case NonlinearityKind::Exponential: return true;
            case NonlinearityKind::PowerShift: return m_ > 0.0;
            case NonlinearityKind::Sampled: {
                const double lo = table_->x_front(), hi = table_->x_back();
                const int n = 64;
                double prev = value(lo);
                for (int i = 1; i <= n; ++i) {
                    const double v = value(lo + (hi - lo) * i / n);
                    if (v < prev) return false;
                    prev = v;
                }
                return true;
            }
        }
        return false;
    }

private:
    NonlinearityKind kind_ = NonlinearityKind::Exponential;
    double m_ = 0.0;
    std::shared_ptr<const PchipInterpolant> table_;
};

}  // namespace plap
