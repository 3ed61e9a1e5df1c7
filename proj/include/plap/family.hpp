#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "plap/derivatives.hpp"
#include "plap/estimates.hpp"
#include "plap/exponents.hpp"
#include "plap/grid.hpp"
#include "plap/interpolation.hpp"
#include "plap/profile.hpp"
#include "plap/quadrature.hpp"
#include "plap/stability.hpp"

namespace plap {

namespace mother {

// C-infinity bump b(x) = exp(1 - 1/(1-x^2)) on (-1, 1), b(0) = 1.
inline double b(double x) {
    const double d = 1.0 - x * x;
    if (d <= 0.0) return 0.0;
    const double e = 1.0 - 1.0 / d;
    if (e < -700.0) return 0.0;
    return std::exp(e);
}

inline double b1(double x) {
    const double d = 1.0 - x * x;
    if (d <= 0.0) return 0.0;
    return b(x) * (-2.0 * x / (d * d));
}

inline double b2(double x) {
    const double d = 1.0 - x * x;
    if (d <= 0.0) return 0.0;
    const double d2 = d * d;
    return b(x) * (4.0 * x * x / (d2 * d2) - 2.0 / d2 - 8.0 * x * x / (d2 * d));
}

// Cumulative tables B(x) = int_{-1}^x b and BB(x) = int_{-1}^x B, built once
// on a fine uniform mesh with Hermite queries (exact endpoint slopes).
struct Tables {
    static constexpr int kCells = 4096;
    std::array<double, kCells + 1> B{}, BB{};

    Tables() {
        double accB = 0.0, accBB = 0.0;
        B[0] = 0.0;
        BB[0] = 0.0;
        for (int i = 0; i < kCells; ++i) {
            const double a = x_of(i), c = x_of(i + 1);
            accB += gauss8([](double t) { return b(t); }, a, c);
            B[i + 1] = accB;
            accBB += gauss8([this, a](double t) { return interp_partial(t, a); }, a, c);
            BB[i + 1] = accBB;
        }
    }

    static double x_of(int i) { return -1.0 + 2.0 * i / kCells; }

    double eval_B(double x) const {
        if (x <= -1.0) return 0.0;
        if (x >= 1.0) return B[kCells];
        return hermite(x, B, [](double t) { return b(t); });
    }

    double eval_BB(double x) const {
        if (x <= -1.0) return 0.0;
        if (x >= 1.0) return BB[kCells];
        return hermite(x, BB, [this](double t) { return eval_B(t); });
    }

    double Ib() const { return B[kCells]; }

private:
    // B over a partial cell during table construction: gauss over [a, t]
    double interp_partial(double t, double a) const {
        const int i = static_cast<int>((a + 1.0) * kCells / 2.0 + 0.5);
        return B[i] + gauss8([](double s) { return b(s); }, a, t);
    }

    template <typename Slope>
    double hermite(double x, const std::array<double, kCells + 1>& tab, Slope&& slope) const {
        const double pos = (x + 1.0) * kCells / 2.0;
        int i = std::clamp(static_cast<int>(pos), 0, kCells - 1);
        const double x0 = x_of(i), x1 = x_of(i + 1), h = x1 - x0;
        const double t = (x - x0) / h, t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * tab[i] + h * (t3 - 2 * t2 + t) * slope(x0) +
               (-2 * t3 + 3 * t2) * tab[i + 1] + h * (t3 - t2) * slope(x1);
    }
};

inline const Tables& tables() {
    static const Tables t;
    return t;
}

inline double Ib() { return tables().Ib(); }
inline double S(double x) { return tables().eval_B(x) / Ib(); }       // step 0 -> 1
inline double T(double x) { return tables().eval_BB(x) / Ib(); }      // int of S

}  // namespace mother

struct GeneratorFlags {
    bool nonnegative = true;
    bool integrable = true;
    bool increasing = false;
    bool bounded_by_one = false;
    bool cap_class = false;  // h(0) = 0, 0 <= h' <= eps, h'' <= 0
    double eps = 0.0;        // slope budget when cap_class
};

// Generator h of the solution family: C^2, nonnegative, integrable on (0, 1].
// Built from smooth bumps (prescribed values), smoothed steps (prescribed
// slopes), or concave caps (prescribed second derivatives); or from C^2
// samples.
class GeneratorH {
public:
    struct Bump {
        double center, width, height;
    };
    struct Step {
        double center, width, rise;
    };
    struct Cap {
        double center, width, curvature;
    };

    static GeneratorH zero() { return GeneratorH{}; }

    static GeneratorH constant(double c) {
        if (!(c >= 0.0)) throw std::domain_error("GeneratorH: constant must be >= 0");
        GeneratorH h;
        h.constant_ = c;
        h.flags_.increasing = c == 0.0;
        h.flags_.bounded_by_one = c <= 1.0;
        return h;
    }

    static GeneratorH bumps(std::vector<Bump> bs) {
        GeneratorH h;
        for (const auto& b : bs)
            if (!(b.height >= 0.0) || !(b.width > 0.0))
                throw std::domain_error("GeneratorH: bump height/width must be positive");
        h.bumps_ = std::move(bs);
        return h;
    }

    static GeneratorH steps(std::vector<Step> ss) {
        GeneratorH h;
        double total = 0.0;
        for (const auto& s : ss) {
            if (!(s.rise >= 0.0) || !(s.width > 0.0))
                throw std::domain_error("GeneratorH: step rise/width must be positive");
            total += s.rise;
        }
        h.steps_ = std::move(ss);
        h.flags_.increasing = true;
        h.flags_.bounded_by_one = total <= 1.0;
        return h;
    }

    static GeneratorH caps(std::vector<Cap> cs, double eps) {
        GeneratorH h;
        for (const auto& c : cs)
            if (!(c.curvature >= 0.0) || !(c.width > 0.0))
                throw std::domain_error("GeneratorH: cap curvature/width must be positive");
        h.caps_ = std::move(cs);
        h.flags_.increasing = true;
        h.flags_.cap_class = true;
        h.flags_.eps = eps;
        return h;
    }

    static GeneratorH sampled(std::span<const double> r, std::span<const double> v,
                              std::span<const double> v1, std::span<const double> v2) {
        GeneratorH h;
        h.sampled_ = SampledRep{PchipInterpolant(r, v), std::vector<double>(r.begin(), r.end()),
                                std::vector<double>(v1.begin(), v1.end()),
                                std::vector<double>(v2.begin(), v2.end())};
        return h;
    }

    const GeneratorFlags& flags() const { return flags_; }

    double value(double r) const {
        double acc = constant_;
        for (const auto& b : bumps_) acc += b.height * mother::b((r - b.center) / b.width);
        for (const auto& s : steps_) acc += s.rise * mother::S((r - s.center) / s.width);
        for (const auto& c : caps_) acc += cap_value(c, r);
        if (sampled_) acc += (*sampled_).interp(r);
        return acc;
    }

    double deriv(double r) const {
        double acc = 0.0;
        for (const auto& b : bumps_)
            acc += b.height * mother::b1((r - b.center) / b.width) / b.width;
        for (const auto& s : steps_)
            acc += s.rise * mother::b((r - s.center) / s.width) / (mother::Ib() * s.width);
        for (const auto& c : caps_) {
            const double x = (r - c.center) / c.width;
            acc += c.curvature * c.width * mother::Ib() * (1.0 - mother::S(x));
        }
        if (sampled_) acc += lerp_at((*sampled_).r, (*sampled_).d1, r);
        return acc;
    }

    double second_deriv(double r) const {
        double acc = 0.0;
        for (const auto& b : bumps_)
            acc += b.height * mother::b2((r - b.center) / b.width) / (b.width * b.width);
        for (const auto& s : steps_)
            acc += s.rise * mother::b1((r - s.center) / s.width) /
                   (mother::Ib() * s.width * s.width);
        for (const auto& c : caps_)
            acc -= c.curvature * mother::b((r - c.center) / c.width);
        if (sampled_) acc += lerp_at((*sampled_).r, (*sampled_).d2, r);
        return acc;
    }

    // radii where the grid should be refined to resolve the features
    std::vector<double> breakpoints() const {
        std::vector<double> out;
        auto add_feature = [&out](double c, double w) {
            for (int k = 0; k <= 64; ++k) out.push_back(c - w + 2.0 * w * k / 64.0);
        };
        for (const auto& b : bumps_) add_feature(b.center, b.width);
        for (const auto& s : steps_) add_feature(s.center, s.width);
        for (const auto& c : caps_) add_feature(c.center, c.width);
        if (sampled_)
            out.insert(out.end(), (*sampled_).r.begin(), (*sampled_).r.end());
        return out;
    }

    bool is_zero() const {
        return constant_ == 0.0 && bumps_.empty() && steps_.empty() && caps_.empty() && !sampled_;
    }

private:
    static double cap_value(const Cap& c, double r) {
        // k'' = -curv * b(x); k' = curv*width*Ib*(1 - S(x)); k(0) = 0
        const double slope = c.curvature * c.width * mother::Ib();
        const double lo = c.center - c.width;
        if (r <= lo) return slope * std::max(0.0, r);
        const double base = slope * lo;
        const double x = std::min((r - c.center) / c.width, 1.0);
        const double inner =
            c.curvature * c.width * c.width * mother::Ib() * ((x + 1.0) - mother::T(x));
        if (r <= c.center + c.width) return base + inner;
        return base + c.curvature * c.width * c.width * mother::Ib() * (2.0 - mother::T(1.0));
    }

    struct SampledRep {
        PchipInterpolant interp;
        std::vector<double> r, d1, d2;
    };

    double constant_ = 0.0;
    std::vector<Bump> bumps_;
    std::vector<Step> steps_;
    std::vector<Cap> caps_;
    std::optional<SampledRep> sampled_;
    GeneratorFlags flags_;
};

// Pointwise evaluation of the family solution generated by h:
//   Phi(r)  = r^{2s} (1 + int_0^r h),   s = sqrt((N-1)/(p-1))
//   Phi'(r) = (N-1) r^{N-3} |u_r|^p     (defining identity)
// Everything downstream (u_r, u_rr, u_rrr, w, g along the solution) follows
// analytically from h, h', h'' and the cumulative integral H.
class FamilyEvaluator {
public:
    FamilyEvaluator(GeneratorH h, int N, double p, const RadialGrid& base_grid)
        : h_(std::move(h)), N_(N), p_(p), s_(char_root(N, p)) {
        grid_ = base_grid.refined_with(h_.breakpoints());
        const auto& r = grid_.nodes();
        Hn_.resize(r.size());
        hn_.resize(r.size());
        hn_[0] = h_.value(r[0]);
        // mass below the first node: h is continuous at 0 with finite value
        Hn_[0] = 0.5 * (h_.value(0.0) + hn_[0]) * r[0];
        for (std::size_t i = 1; i < r.size(); ++i) {
            hn_[i] = h_.value(r[i]);
            Hn_[i] = Hn_[i - 1] +
                     gauss8([this](double t) { return h_.value(t); }, r[i - 1], r[i]);
        }
        if (h_.value(0.0) < -1e-14) throw std::domain_error("family: h must be nonnegative");
    }

    const RadialGrid& grid() const { return grid_; }
    const GeneratorH& generator() const { return h_; }
    int N() const { return N_; }
    double p() const { return p_; }
    double root() const { return s_; }

    double cumulative(double r) const {  // H(r) = int_0^r h
        const auto& x = grid_.nodes();
        if (r <= x.front()) return Hn_.front() * r / x.front();
        if (r >= x.back()) return Hn_.back();
        const std::size_t i =
            static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), r) - x.begin()) - 1;
        const double h = x[i + 1] - x[i], t = (r - x[i]) / h, t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * Hn_[i] + h * (t3 - 2 * t2 + t) * hn_[i] +
               (-2 * t3 + 3 * t2) * Hn_[i + 1] + h * (t3 - t2) * hn_[i + 1];
    }

    struct Point {
        double r, phi, phi_p, phi_pp, phi_ppp;
        double F, F_p, F_pp;  // F = |u_r|^p
        double u_r, u_rr, u_rrr, w, w_p;
        double g, gprime;  // g(u(r)) and g'(u(r))
    };

    Point at(double r) const {
        Point pt{};
        pt.r = r;
        const double ts = 2.0 * s_;
        const double H = cumulative(r), hv = h_.value(r), h1 = h_.deriv(r),
                     h2 = h_.second_deriv(r);
        const double rts = std::pow(r, ts);
        const double one = 1.0 + H;
        pt.phi = rts * one;
        pt.phi_p = ts * rts / r * one + rts * hv;
        pt.phi_pp = ts * (ts - 1.0) * rts / (r * r) * one + 2.0 * ts * rts / r * hv + rts * h1;
        pt.phi_ppp = ts * (ts - 1.0) * (ts - 2.0) * rts / (r * r * r) * one +
                     3.0 * ts * (ts - 1.0) * rts / (r * r) * hv + 3.0 * ts * rts / r * h1 +
                     rts * h2;
        const double D = (N_ - 1.0) * std::pow(r, N_ - 3.0);
        const double m = N_ - 3.0;
        pt.F = pt.phi_p / D;
        pt.F_p = pt.phi_pp / D - m * pt.F / r;
        pt.F_pp = pt.phi_ppp / D - m * pt.phi_pp / (r * D) - m * pt.F_p / r + m * pt.F / (r * r);
        const double ip = 1.0 / p_;
        pt.u_r = -std::pow(pt.F, ip);
        pt.u_rr = -ip * std::pow(pt.F, ip - 1.0) * pt.F_p;
        pt.u_rrr = -ip * ((ip - 1.0) * std::pow(pt.F, ip - 2.0) * pt.F_p * pt.F_p +
                          std::pow(pt.F, ip - 1.0) * pt.F_pp);
        const double q = (p_ - 1.0) / p_;
        pt.w = -std::pow(r, N_ - 1.0) * std::pow(pt.F, q);
        pt.w_p = -(N_ - 1.0) * std::pow(r, N_ - 2.0) * std::pow(pt.F, q) -
                 std::pow(r, N_ - 1.0) * q * std::pow(pt.F, -ip) * pt.F_p;
        pt.g = -pt.w_p / std::pow(r, N_ - 1.0);
        const double dg = (N_ - 1.0) * (q * std::pow(pt.F, -ip) * pt.F_p / r -
                                        std::pow(pt.F, q) / (r * r)) +
                          q * (-ip * std::pow(pt.F, -ip - 1.0) * pt.F_p * pt.F_p +
                               std::pow(pt.F, -ip) * pt.F_pp);
        pt.gprime = dg / pt.u_r;
        return pt;
    }

private:
    GeneratorH h_;
    int N_;
    double p_;
    double s_;
    RadialGrid grid_;
    std::vector<double> Hn_, hn_;
};

struct FamilyCertificates {
    bool w1p_finite = false;
    bool unbounded_growth = false;
    bool hardy_semistable = false;
    bool eigen_semistable = false;
    bool g_nonneg = false;
    bool g_monotone = false;

    bool all_core() const {
        return w1p_finite && unbounded_growth && hardy_semistable && eigen_semistable;
    }
};

struct FamilySolution {
    GeneratorH h;
    int N = 0;
    double p = 0.0;
    std::vector<double> phi, phi_prime;
    RadialProfile profile;
    std::vector<double> g_samples;       // g(u(r_i))
    std::vector<double> gprime_samples;  // g'(u(r_i))
    FamilyCertificates certs;

    NonlinearitySpec recovered_nonlinearity() const {
        // samples ordered by increasing s = u
        std::vector<double> s(g_samples.size()), g(g_samples.size());
        const std::size_t n = g_samples.size();
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = profile.u[n - 1 - i];
            g[i] = g_samples[n - 1 - i];
        }
        return NonlinearitySpec::sampled(s, g);
    }
};

struct FamilyOptions {
    double r_min = 1e-8;
    int grid_count = 8192;
    StabilityOptions eigen;
    bool run_eigen = true;
};

inline std::pair<std::vector<double>, std::vector<double>> build_phi(
    const GeneratorH& h, int N, double p, const RadialGrid& grid) {
    FamilyEvaluator ev(h, N, p, grid);
    const auto& nodes = ev.grid().nodes();
    std::vector<double> phi(nodes.size()), phip(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto pt = ev.at(nodes[i]);
        phi[i] = pt.phi;
        phip[i] = pt.phi_p;
    }
    return {phi, phip};
}

// Assemble the full family solution on the evaluation grid.
inline FamilySolution family_profile(const GeneratorH& h, int N, double p,
                                     const FamilyOptions& opt = {}) {
    const FamilyEvaluator ev(h, N, p, RadialGrid::logspaced(opt.r_min, opt.grid_count));
    const auto& r = ev.grid().nodes();
    const std::size_t n = r.size();

    FamilySolution sol;
    sol.h = ev.generator();
    sol.N = N;
    sol.p = p;
    sol.phi.resize(n);
    sol.phi_prime.resize(n);
    sol.g_samples.resize(n);
    sol.gprime_samples.resize(n);

    RadialProfile& pr = sol.profile;
    pr.grid = ev.grid();
    pr.N = N;
    pr.p = p;
    pr.u.assign(n, 0.0);
    pr.u_r.resize(n);
    pr.w.resize(n);
    pr.u_rr.resize(n);
    pr.u_rrr.resize(n);
    pr.w_prime.resize(n);

    std::vector<FamilyEvaluator::Point> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = ev.at(r[i]);
        sol.phi[i] = pts[i].phi;
        sol.phi_prime[i] = pts[i].phi_p;
        pr.u_r[i] = pts[i].u_r;
        pr.w[i] = pts[i].w;
        pr.u_rr[i] = pts[i].u_rr;
        pr.u_rrr[i] = pts[i].u_rrr;
        pr.w_prime[i] = pts[i].w_p;
        sol.g_samples[i] = pts[i].g;
        sol.gprime_samples[i] = pts[i].gprime;
    }
    // u(1) = 0; integrate |u_r| inward per cell
    for (std::size_t i = n - 1; i-- > 0;) {
        const double inc =
            gauss8([&](double t) { return -ev.at(t).u_r; }, r[i], r[i + 1]);
        pr.u[i] = pr.u[i + 1] + inc;
    }
    return sol;
}

// Recovered nonlinearity samples g(s_i) = -w'(r_i)/r_i^{N-1} evaluated from
// the analytic flux derivative, with the nonnegativity flag from flux
// monotonicity.
inline std::vector<double> recover_g(const FamilySolution& sol) { return sol.g_samples; }

struct FamilyVerifyOptions {
    StabilityOptions eigen;
    bool run_eigen = true;
    std::array<double, 3> ladder{1e-4, 1e-6, 1e-8};
};

inline FamilyCertificates verify_family(FamilySolution& sol,
                                        const FamilyVerifyOptions& opt = {}) {
    const RadialProfile& pr = sol.profile;
    const std::size_t n = pr.size();
    FamilyCertificates c;

    // W^{1,p} finiteness: r^{N-1}|u_r|^p = r^2 Phi'/(N-1) must be integrable;
    // check the inner power-law exponent and the quadrature value.
    {
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i)
            f[i] = std::pow(pr.grid[i], pr.N - 1) * std::pow(std::fabs(pr.u_r[i]), pr.p);
        const double total = integrate_nodal(pr.grid.nodes(), f);
        const double beta = std::log(f[1] / f[0]) / std::log(pr.grid[1] / pr.grid[0]);
        c.w1p_finite = std::isfinite(total) && beta > -1.0 + 1e-9;
    }

    // Unbounded growth: |u_r| must fail to be integrable at 0, i.e. the
    // log-log slope of |u_r| over the innermost decades is <= -1.
    {
        const double r0 = pr.grid.r_min();
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < n && pr.grid[i] <= 100.0 * r0; ++i) {
            xs.push_back(std::log(pr.grid[i]));
            ys.push_back(std::log(std::max(std::fabs(pr.u_r[i]), 1e-300)));
        }
        double slope = 0.0;
        if (xs.size() >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                sx += xs[i];
                sy += ys[i];
                sxx += xs[i] * xs[i];
                sxy += xs[i] * ys[i];
            }
            const double m = static_cast<double>(xs.size());
            slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        }
        bool increments_positive = true;
        double prev = pr.u_at(opt.ladder[0]);
        for (std::size_t k = 1; k < opt.ladder.size(); ++k) {
            if (opt.ladder[k] < pr.grid.r_min()) break;
            const double cur = pr.u_at(opt.ladder[k]);
            if (!(cur > prev)) increments_positive = false;
            prev = cur;
        }
        c.unbounded_growth = slope <= -1.0 + 1e-6 && increments_positive;
    }

    // Hardy route: r Phi' >= 2 s Phi pointwise (equality exactly where h = 0).
    {
        const double ts = 2.0 * char_root(pr.N, pr.p);
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i)
            if (pr.grid[i] * sol.phi_prime[i] < ts * sol.phi[i] * (1.0 - 1e-12)) {
                ok = false;
                break;
            }
        c.hardy_semistable = ok;
    }

    // Eigenvalue route on the recovered linearization.
    if (opt.run_eigen) {
        const auto rep = min_eigenvalue(pr, sol.gprime_samples, opt.eigen);
        c.eigen_semistable = rep.verdict != StabilityVerdict::Unstable;
    } else {
        c.eigen_semistable = c.hardy_semistable;
    }

    // Sign and monotonicity of the recovered nonlinearity.
    {
        bool nonneg = true, mono = true;
        double gscale = 0.0, gpscale = 0.0;
        for (double g : sol.g_samples) gscale = std::max(gscale, std::fabs(g));
        for (double g : sol.gprime_samples) gpscale = std::max(gpscale, std::fabs(g));
        for (std::size_t i = 0; i < n; ++i) {
            if (sol.g_samples[i] < -1e-11 * gscale) nonneg = false;
            if (sol.gprime_samples[i] < -1e-9 * gpscale) mono = false;
        }
        c.g_nonneg = nonneg;
        c.g_monotone = mono;
    }

    sol.certs = c;
    return c;
}

enum class PrescriptionMode { Values, Slopes, Concavity };

// Disjoint-support widths around strictly decreasing centers.
inline std::vector<double> feature_widths(std::span<const double> rn) {
    const std::size_t k = rn.size();
    std::vector<double> w(k);
    for (std::size_t i = 0; i < k; ++i) {
        double gap = rn[i];  // distance to the origin
        if (i > 0) gap = std::min(gap, rn[i - 1] - rn[i]);
        if (i + 1 < k) gap = std::min(gap, rn[i] - rn[i + 1]);
        gap = std::min(gap, 1.0 - rn[i] > 0.0 ? (1.0 - rn[i]) : rn[i]);
        if (!(gap > 0.0))
            throw std::domain_error("construct_h: prescribed radii leave no room for supports");
        w[i] = 0.45 * gap;
    }
    return w;
}

// Build a generator meeting one of the three prescriptions at the radii rn:
//   Values:    h(r_n) = y_n            (smooth disjoint bumps)
//   Slopes:    h'(r_n) = y_n, h increasing with 0 <= h <= 1
//   Concavity: h''(r_n) = -y_n, class {h(0)=0, 0<=h'<=eps, h''<=0}
inline GeneratorH construct_h(PrescriptionMode mode, std::span<const double> rn,
                              std::span<const double> yn, double eps = 0.0) {
    const std::size_t k = rn.size();
    if (yn.size() != k) throw std::domain_error("construct_h: length mismatch");
    if (k > 64) throw std::domain_error("construct_h: at most 64 prescription points");
    for (std::size_t i = 0; i < k; ++i) {
        if (!(rn[i] > 0.0 && rn[i] <= 1.0)) throw std::domain_error("construct_h: radii in (0,1]");
        if (i > 0 && !(rn[i] < rn[i - 1]))
            throw std::domain_error("construct_h: radii must decrease strictly");
        if (!(yn[i] > 0.0)) throw std::domain_error("construct_h: prescriptions must be positive");
    }
    if (k == 0) return GeneratorH::zero();
    const auto widths = feature_widths(rn);
    switch (mode) {
        case PrescriptionMode::Values: {
            std::vector<GeneratorH::Bump> bs(k);
            for (std::size_t i = 0; i < k; ++i) bs[i] = {rn[i], widths[i], yn[i]};
            return GeneratorH::bumps(std::move(bs));
        }
        case PrescriptionMode::Slopes: {
            const double rise_cap = 0.5 / static_cast<double>(k);
            std::vector<GeneratorH::Step> ss(k);
            for (std::size_t i = 0; i < k; ++i) {
                const double w = std::min(widths[i], rise_cap / (yn[i] * mother::Ib()));
                ss[i] = {rn[i], w, yn[i] * mother::Ib() * w};
            }
            return GeneratorH::steps(std::move(ss));
        }
        case PrescriptionMode::Concavity: {
            if (!(eps > 0.0)) throw std::domain_error("construct_h: concavity mode needs eps > 0");
            const double budget = eps / static_cast<double>(k);
            std::vector<GeneratorH::Cap> cs(k);
            for (std::size_t i = 0; i < k; ++i) {
                const double w = std::min(widths[i], budget / (yn[i] * mother::Ib()));
                cs[i] = {rn[i], w, yn[i]};
            }
            return GeneratorH::caps(std::move(cs), eps);
        }
    }
    throw std::domain_error("construct_h: unknown mode");
}

struct BlowupResult {
    FamilySolution solution;
    std::vector<bool> achieved;
    std::vector<double> attained;  // |d^k u (r_n)|
    double eps_used = 0.0;
};

// Prescribed derivative blow-up at radii r_n:
//   k = 1: bump heights straight from the closed formula
//   k = 2: slope prescription, doubled until |u_rr(r_n)| clears the target
//   k = 3: concave caps; eps shrunk until g' >= 0, then curvature doubled
// Hypothesis certificates are re-verified after every amplification.
inline BlowupResult demonstrate_blowup(int order, std::span<const double> rn,
                                       std::span<const double> Mn, int N, double p,
                                       const FamilyOptions& fopt = {}) {
    if (order < 1 || order > 3) throw std::domain_error("demonstrate_blowup: order in {1,2,3}");
    const std::size_t k = rn.size();
    if (Mn.size() != k || k == 0) throw std::domain_error("demonstrate_blowup: bad sequences");
    const double s = char_root(N, p);

    BlowupResult out;
    out.achieved.assign(k, false);
    out.attained.assign(k, 0.0);

    auto attained_at = [&](const GeneratorH& h, double r, int ord) {
        FamilyEvaluator ev(h, N, p, RadialGrid::logspaced(std::min(rn.back() * 0.3, 1e-4), 512));
        const auto pt = ev.at(r);
        return ord == 1 ? std::fabs(pt.u_r) : (ord == 2 ? std::fabs(pt.u_rr) : std::fabs(pt.u_rrr));
    };

    GeneratorH h = GeneratorH::zero();
    if (order == 1) {
        std::vector<double> yn(k);
        for (std::size_t i = 0; i < k; ++i)
            yn[i] = (N - 1.0) * std::pow(Mn[i], p) * std::pow(rn[i], N - 2.0 * s - 3.0);
        h = construct_h(PrescriptionMode::Values, rn, yn);
    } else if (order == 2) {
        std::vector<double> yn(k, 1.0);
        for (int iter = 0; iter < 46; ++iter) {
            h = construct_h(PrescriptionMode::Slopes, rn, yn);
            bool all = true;
            for (std::size_t i = 0; i < k; ++i) {
                if (attained_at(h, rn[i], 2) >= Mn[i]) continue;
                yn[i] *= 2.0;
                all = false;
            }
            if (all) break;
        }
    } else {
        double eps = 0.5;
        std::vector<double> yn(k, 1.0);
        auto gprime_ok = [&](const GeneratorH& hh) {
            FamilyEvaluator ev(hh, N, p, RadialGrid::logspaced(fopt.r_min, 1024));
            double scale = 0.0;
            std::vector<double> gp(ev.grid().size());
            for (std::size_t i = 0; i < ev.grid().size(); ++i) {
                gp[i] = ev.at(ev.grid()[i]).gprime;
                scale = std::max(scale, std::fabs(gp[i]));
            }
            for (double v : gp)
                if (v < -1e-10 * scale) return false;
            return true;
        };
        for (int shrink = 0; shrink < 40; ++shrink) {
            h = construct_h(PrescriptionMode::Concavity, rn, yn, eps);
            if (gprime_ok(h)) break;
            eps *= 0.5;
        }
        for (int iter = 0; iter < 46; ++iter) {
            h = construct_h(PrescriptionMode::Concavity, rn, yn, eps);
            if (!gprime_ok(h)) {
                eps *= 0.5;
                continue;
            }
            bool all = true;
            for (std::size_t i = 0; i < k; ++i) {
                if (attained_at(h, rn[i], 3) >= Mn[i]) continue;
                yn[i] *= 2.0;
                all = false;
            }
            if (all) break;
        }
        out.eps_used = eps;
    }

    FamilyOptions fo = fopt;
    out.solution = family_profile(h, N, p, fo);
    FamilyVerifyOptions vo;
    vo.eigen = fo.eigen;
    vo.run_eigen = fo.run_eigen;
    verify_family(out.solution, vo);
    {
        FamilyEvaluator ev(h, N, p, RadialGrid::logspaced(fo.r_min, 2048));
        for (std::size_t i = 0; i < k; ++i) {
            const auto pt = ev.at(rn[i]);
            out.attained[i] =
                order == 1 ? std::fabs(pt.u_r) : (order == 2 ? std::fabs(pt.u_rr)
                                                             : std::fabs(pt.u_rrr));
            out.achieved[i] = out.attained[i] >= Mn[i] * (1.0 - 1e-9);
        }
    }
    return out;
}

}  // namespace plap
