#pragma once

#include <cmath>
#include <stdexcept>

namespace plap {

// Bounds inside which all exponent arithmetic is well conditioned.
inline constexpr int    kMinDimension = 2;
inline constexpr int    kMaxDimension = 50;
inline constexpr double kMinExponentP = 1.05;
inline constexpr double kMaxExponentP = 10.0;

inline void require_p(double p) {
    if (!(p > 1.0)) throw std::domain_error("exponent p must satisfy p > 1");
}

inline void require_Np(int N, double p) {
    require_p(p);
    if (N < kMinDimension) throw std::domain_error("dimension N must be >= 2");
}

// Dimension threshold separating bounded from unbounded limit profiles:
// N_c(p) = p + 4p/(p-1).  Minimal over p at p = 2, where N_c = 10.
inline double critical_dimension(double p) {
    require_p(p);
    return p + 4.0 * p / (p - 1.0);
}

// sqrt((N-1)/(p-1)), the root that recurs in every sharp exponent.
inline double char_root(int N, double p) {
    require_Np(N, p);
    return std::sqrt((N - 1.0) / (p - 1.0));
}

enum class Regime { Subcritical, Critical, Supercritical };

// The exponents governing sharp growth rates of a profile and its radial
// derivatives.  alpha is the amplitude exponent; |d^k u| grows like
// r^-(alpha + k) in the supercritical regime.
struct ExponentSet {
    int N = 0;
    double p = 0.0;
    double N_c = 0.0;
    double alpha = 0.0;

    double deriv_exponent(int k) const {
        if (k < 1 || k > 3) throw std::domain_error("deriv_exponent: k in {1,2,3}");
        return alpha + k;
    }

    Regime regime() const {
        // N_c is exactly representable for the integer-critical pairs, so an
        // absolute tie tolerance keeps the dispatch total and unambiguous.
        if (std::fabs(N - N_c) < 1e-12) return Regime::Critical;
        return N < N_c ? Regime::Subcritical : Regime::Supercritical;
    }
};

inline ExponentSet exponent_set(int N, double p) {
    require_Np(N, p);
    ExponentSet e;
    e.N = N;
    e.p = p;
    e.N_c = critical_dimension(p);
    e.alpha = (N - 2.0 * char_root(N, p) - p - 2.0) / p;
    return e;
}

inline Regime regime_of(int N, double p) { return exponent_set(N, p).regime(); }

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "subcritical";
        case Regime::Critical: return "critical";
        case Regime::Supercritical: return "supercritical";
    }
    return "?";
}

// Surface area of the unit sphere S^{N-1}.
inline double sphere_area(int N) {
    return 2.0 * std::pow(std::acos(-1.0), 0.5 * N) / std::tgamma(0.5 * N);
}

}  // namespace plap
