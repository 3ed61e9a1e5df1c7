#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "plap/closed_forms.hpp"
#include "plap/derivatives.hpp"
#include "plap/estimates.hpp"
#include "plap/shooting.hpp"
#include "reference_values.hpp"

using namespace plap;

namespace {

const RadialProfile& critical_profile() {
    static const RadialProfile pr =
        exponential_critical(10, 2.0, RadialGrid::standard()).profile;
    return pr;
}

const RadialProfile& power_profile() {
    static const RadialProfile pr =
        power_supercritical(11, 2.0, RadialGrid::standard()).profile;
    return pr;
}

const RadialProfile& subcritical_profile() {
    static const RadialProfile pr = [] {
        ProblemSpec spec(3, 2.0, 0.5 * 3.3211, NonlinearitySpec::exponential());
        auto sol = solve_amplitude(spec, RadialGrid::standard());
        derivatives_from_ode(sol.profile, RhsAlongProfile::from_problem(sol.profile));
        return sol.profile;
    }();
    return pr;
}

}  // namespace

TEST_CASE("cumulative gradient bound (lemma 2.1)") {
    SECTION("critical closed form: the ratio is constant in r") {
        const auto rep = check_lemma21(critical_profile());
        REQUIRE(rep.applicable);
        // |u_r|^p t^{N-1} = 4 t^7, integral = t^8/2, bound exponent 8:
        // fitted K = (1/2) / ||grad u||^p, up to the cumulative-trapezoid bias
        const double gp = std::pow(grad_norm_annulus(critical_profile()), 2.0);
        CHECK(rep.fitted_constant == Catch::Approx(0.5 / gp).epsilon(1e-3));
    }
    SECTION("constant profile fits K = 0") {
        RadialProfile pr;
        pr.grid = RadialGrid::standard();
        pr.N = 10;
        pr.p = 2.0;
        pr.u.assign(pr.grid.size(), 1.0);
        pr.u_r.assign(pr.grid.size(), 0.0);
        pr.w.assign(pr.grid.size(), 0.0);
        const auto rep = check_lemma21(pr);
        CHECK(rep.fitted_constant == 0.0);
    }
    SECTION("power closed form: mesh-stable fit") {
        const auto c1 = power_supercritical(11, 2.0, RadialGrid::logspaced(1e-6, 4096));
        const auto c2 = power_supercritical(11, 2.0, RadialGrid::logspaced(1e-6, 8192));
        const double k1 = check_lemma21(c1.profile).fitted_constant;
        const double k2 = check_lemma21(c2.profile).fitted_constant;
        CHECK(std::fabs(k1 - k2) < 0.02 * k1);
    }
    SECTION("N < p is a regime error") {
        const auto cfg = RadialGrid::standard();
        RadialProfile pr = critical_profile();
        pr.N = 2;
        pr.p = 3.0;
        const auto rep = check_lemma21(pr);
        CHECK_FALSE(rep.applicable);
    }
}

TEST_CASE("dyadic oscillation bound (prop 2.2)") {
    SECTION("critical: |u(r) - u(r/2)| = 2 log 2 with a flat bound") {
        const auto rep = check_prop22(critical_profile());
        const double g = grad_norm_annulus(critical_profile());
        CHECK(rep.fitted_constant == Catch::Approx(2.0 * std::log(2.0) / g).epsilon(1e-6));
    }
    SECTION("power form: constant ratio") {
        const auto rep = check_prop22(power_profile());
        const double al = exponent_set(11, 2.0).alpha;
        const double g = grad_norm_annulus(power_profile());
        // |u(r)-u(r/2)| = r^-al (2^al - 1), bound g r^-al
        CHECK(rep.fitted_constant ==
              Catch::Approx((std::pow(2.0, al) - 1.0) / g).epsilon(1e-5));
    }
    SECTION("bounded subcritical profile attains the fit at interior r") {
        const auto rep = check_prop22(subcritical_profile());
        CHECK(rep.fitted_constant > 0.0);
        CHECK(rep.max_ratio_location > 2.1 * subcritical_profile().grid.r_min());
        CHECK(rep.max_ratio_location < 1.0);
    }
}

TEST_CASE("amplitude bound dispatch (thm 1.4)") {
    SECTION("critical regime: ratio tends to p near the origin") {
        const auto rep = check_theorem14(critical_profile());
        REQUIRE(rep.applicable);
        CHECK(rep.regime == Regime::Critical);
        const double norm = w1p_norm_annulus(critical_profile());
        // u/(|log r|+1) = p L/(L+1) at the innermost node, L = |log r_min|
        const double L = -std::log(critical_profile().grid.r_min());
        CHECK(rep.fitted_constant == Catch::Approx(2.0 * L / (L + 1.0) / norm).epsilon(1e-3));
        CHECK(rep.max_ratio_location == Catch::Approx(critical_profile().grid.r_min()));
        CHECK(rep.sharp.value());
    }
    SECTION("supercritical: constant ratio, sharp") {
        const auto rep = check_theorem14(power_profile());
        CHECK(rep.regime == Regime::Supercritical);
        CHECK(rep.sharp.value());
    }
    SECTION("subcritical: finite fitted constant") {
        const auto rep = check_theorem14(subcritical_profile());
        CHECK(rep.regime == Regime::Subcritical);
        CHECK(rep.fitted_constant > 0.0);
        CHECK(std::isfinite(rep.fitted_constant));
    }
}

TEST_CASE("derivative bounds (thm 1.5)") {
    SECTION("critical closed form attains item one") {
        const auto rhs = RhsAlongProfile::from_problem(critical_profile());
        const auto reps = check_theorem15(critical_profile(), rhs);
        REQUIRE(reps[0].applicable);
        const double g = grad_norm_annulus(critical_profile());
        // |u_r| = 2/r against r^{-(alpha+1)} = r^-1: ratio = 2/norm
        CHECK(reps[0].fitted_constant == Catch::Approx(2.0 / g).epsilon(1e-8));
        REQUIRE(reps[1].applicable);
        REQUIRE(reps[2].applicable);
        CHECK(reps[0].sharp.value());
    }
    SECTION("power closed form: u_rr ratio constant") {
        const auto rhs = RhsAlongProfile::from_problem(power_profile());
        const auto reps = check_theorem15(power_profile(), rhs);
        REQUIRE(reps[1].applicable);
        const double al = exponent_set(11, 2.0).alpha;
        const double g = grad_norm_annulus(power_profile());
        CHECK(reps[1].fitted_constant == Catch::Approx(al * (al + 1.0) / g).epsilon(1e-8));
    }
    SECTION("subcritical profiles are skipped with a regime reason") {
        const auto rhs = RhsAlongProfile::from_problem(subcritical_profile());
        const auto reps = check_theorem15(subcritical_profile(), rhs);
        for (const auto& r : reps) {
            CHECK_FALSE(r.applicable);
            CHECK_FALSE(r.skip_reason.empty());
        }
    }
}

TEST_CASE("pointwise nonlinearity bounds (lemma 2.3)") {
    const auto rhs = RhsAlongProfile::from_problem(critical_profile());
    auto l23 = check_lemma23(critical_profile(), rhs);
    SECTION("g-bound holds with ratio 4/5") {
        REQUIRE(l23.g_bound.applicable);
        CHECK(l23.g_bound.holds);
        // g(u(r)) = 16/r^2 vs N |u_r|^{p-1}/r = 20/r^2
        CHECK(l23.g_bound.fitted_constant == Catch::Approx(0.8).epsilon(1e-10));
    }
    SECTION("u_rr bound holds with ratio 1/19") {
        REQUIRE(l23.urr_bound.applicable);
        CHECK(l23.urr_bound.holds);
        CHECK(l23.urr_bound.fitted_constant == Catch::Approx(1.0 / 19.0).epsilon(1e-10));
    }
    SECTION("fitted M equals the exact ratio 16") {
        REQUIRE(l23.gprime_bound.applicable);
        CHECK(l23.gprime_bound.fitted_constant == Catch::Approx(16.0).epsilon(1e-10));
    }
    SECTION("the flux transform is nonnegative, nondecreasing, concave") {
        REQUIRE(l23.psi_shape.applicable);
        CHECK(l23.psi_shape.holds);
    }
    SECTION("zero g is trivially admissible") {
        RadialProfile pr = critical_profile();
        RhsAlongProfile zero;
        zero.g.assign(pr.size(), 0.0);
        zero.gprime.assign(pr.size(), 0.0);
        const auto reps = check_lemma23(pr, zero);
        CHECK(reps.g_bound.holds);
        CHECK(reps.g_bound.fitted_constant == 0.0);
    }
    SECTION("also on the subcritical minimal solution") {
        const auto srhs = RhsAlongProfile::from_problem(subcritical_profile());
        const auto reps = check_lemma23(subcritical_profile(), srhs);
        CHECK(reps.g_bound.holds);
        CHECK(reps.urr_bound.holds);
        CHECK(reps.psi_shape.holds);
    }
}

TEST_CASE("flux monotonicity catalog (lemma 2.4)") {
    SECTION("critical closed form") {
        const auto reps = check_lemma24(critical_profile());
        CHECK(reps.flux_monotone.holds);
        CHECK(reps.ratio_monotone.holds);
        CHECK(reps.annulus_spread.holds);
        // max/min = 2 against the cap 2^{N/(p-1)} = 1024, up to the grid
        // granularity around r = 1/2
        CHECK(reps.annulus_spread.fitted_constant ==
              Catch::Approx(2.0 / 1024.0).epsilon(5e-3));
        CHECK(reps.grad_vs_min.fitted_constant > 0.0);
    }
    SECTION("constant profile holds at equality") {
        RadialProfile pr;
        pr.grid = RadialGrid::standard();
        pr.N = 5;
        pr.p = 2.0;
        pr.u.assign(pr.grid.size(), 2.0);
        pr.u_r.assign(pr.grid.size(), 0.0);
        pr.w.assign(pr.grid.size(), 0.0);
        const auto reps = check_lemma24(pr);
        CHECK(reps.flux_monotone.holds);
        CHECK(reps.ratio_monotone.holds);
    }
    SECTION("an injected flux dent is caught") {
        RadialProfile pr = critical_profile();
        pr.w[pr.size() / 2] *= 0.5;  // |w| dips, breaking monotonicity
        pr.u_r[pr.size() / 2] *= 0.5;
        const auto reps = check_lemma24(pr);
        CHECK_FALSE(reps.flux_monotone.holds);
        CHECK(reps.flux_monotone.max_ratio_location > 0.0);
    }
}

TEST_CASE("extremal bounds (thm 1.2)") {
    SECTION("critical closed form: item ii fitted constant is 1") {
        const auto reps = check_theorem12(critical_profile());
        REQUIRE(reps.size() == 6);
        CHECK_FALSE(reps[0].applicable);  // subcritical item
        REQUIRE(reps[1].applicable);      // critical log bound
        CHECK(reps[1].fitted_constant == Catch::Approx(1.0).epsilon(1e-9));
        CHECK(reps[1].sharp.value());
        CHECK_FALSE(reps[2].applicable);
        REQUIRE(reps[3].applicable);  // first derivative
        CHECK(reps[3].fitted_constant == Catch::Approx(1.0).epsilon(1e-9));
        REQUIRE(reps[4].applicable);
        CHECK(reps[4].fitted_constant == Catch::Approx(1.0).epsilon(1e-9));
        REQUIRE(reps[5].applicable);
        CHECK(reps[5].fitted_constant == Catch::Approx(2.0).epsilon(1e-9));
    }
    SECTION("power closed form: item iii ratio is exactly one") {
        const auto reps = check_theorem12(power_profile());
        REQUIRE(reps[2].applicable);
        const double al = exponent_set(11, 2.0).alpha;
        // min |u_r| on [1/2,1] = alpha (attained at r = 1)
        CHECK(reps[2].fitted_constant == Catch::Approx(1.0 / al).epsilon(1e-9));
        CHECK(reps[2].sharp.value());
    }
    SECTION("subcritical branch-limit stand-in: item i bounded") {
        const auto reps = check_theorem12(subcritical_profile());
        REQUIRE(reps[0].applicable);
        CHECK(reps[0].fitted_constant > 0.0);
        CHECK(std::isfinite(reps[0].fitted_constant));
        CHECK_FALSE(reps[1].applicable);
        CHECK_FALSE(reps[3].applicable);
    }
}

TEST_CASE("regime dispatch is total on the parameter box") {
    for (int N = 2; N <= 50; N += 3)
        for (double p : {1.06, 1.5, 2.0, 3.0, 5.0, 9.9}) {
            const auto reg = regime_of(N, p);
            const bool one = reg == Regime::Subcritical || reg == Regime::Critical ||
                             reg == Regime::Supercritical;
            CHECK(one);
        }
    CHECK(regime_of(10, 2.0) == Regime::Critical);
    CHECK(regime_of(9, 3.0) == Regime::Critical);
    CHECK(regime_of(9, 2.0) == Regime::Subcritical);
    CHECK(regime_of(11, 2.0) == Regime::Supercritical);
}

TEST_CASE("log-log exponent fits") {
    SECTION("|u_r| of the critical form is an exact power law") {
        const auto fit = fit_exponent(critical_profile(), ProfileField::Ur, 1e-4, 1e-2);
        CHECK(fit.slope == Catch::Approx(-1.0).margin(1e-6));
        CHECK(fit.residual < 1e-10);
    }
    SECTION("u_r of the power form is an exact power law") {
        const auto fit = fit_exponent(power_profile(), ProfileField::Ur, 1e-4, 1e-2);
        const double al = exponent_set(11, 2.0).alpha;
        CHECK(fit.slope == Catch::Approx(-(al + 1.0)).margin(1e-6));
        CHECK(fit.residual < 1e-10);
    }
    SECTION("u of the power form approaches its amplitude exponent") {
        // u = r^-alpha - 1 is a power law only asymptotically (the -1 offset)
        const auto fit = fit_exponent(power_profile(), ProfileField::U, 1e-6, 1e-4);
        const double al = exponent_set(11, 2.0).alpha;
        CHECK(fit.slope == Catch::Approx(-al).margin(0.02));
    }
    SECTION("the log profile is flagged as non-power-law") {
        const auto fit = fit_exponent(critical_profile(), ProfileField::U, 1e-4, 1e-2);
        CHECK(fit.residual > 1e-3);
    }
    SECTION("narrow windows are rejected") {
        CHECK_THROWS_AS(fit_exponent(critical_profile(), ProfileField::U, 1e-4, 1.0001e-4),
                        std::domain_error);
    }
}

TEST_CASE("sharpness of the closed forms across the estimate catalog") {
    // ratio bound-side/solution-side within [0.5, 2] after normalization on
    // (1e-6, 1/2)
    SECTION("critical") {
        const auto& pr = critical_profile();
        const double mn = pr.min_abs_ur_on(0.5, 1.0);
        const auto reps = check_theorem12(pr);
        const double C = reps[1].fitted_constant;
        for (std::size_t i = 0; i < pr.size(); i += 61) {
            const double r = pr.grid[i];
            if (r >= 0.5 || r < 1e-6) continue;
            const double ratio = pr.u[i] / (C * mn * std::fabs(std::log(r)));
            CHECK(ratio >= 0.5);
            CHECK(ratio <= 2.0);
        }
    }
    SECTION("power") {
        const auto& pr = power_profile();
        const double mn = pr.min_abs_ur_on(0.5, 1.0);
        const auto reps = check_theorem12(pr);
        const double C = reps[2].fitted_constant;
        const double al = exponent_set(11, 2.0).alpha;
        for (std::size_t i = 0; i < pr.size(); i += 61) {
            const double r = pr.grid[i];
            if (r >= 0.5 || r < 1e-6) continue;
            const double ratio = pr.u[i] / (C * mn * (std::pow(r, -al) - 1.0));
            CHECK(ratio >= 0.5);
            CHECK(ratio <= 2.0);
        }
    }
}

TEST_CASE("fitted constants are grid-stable") {
    const auto c1 = exponential_critical(10, 2.0, RadialGrid::logspaced(1e-6, 4096));
    const auto c2 = exponential_critical(10, 2.0, RadialGrid::logspaced(1e-6, 8192));
    auto close = [](double a, double b) { return std::fabs(a - b) <= 0.02 * std::fabs(a); };
    CHECK(close(check_lemma21(c1.profile).fitted_constant,
                check_lemma21(c2.profile).fitted_constant));
    CHECK(close(check_prop22(c1.profile).fitted_constant,
                check_prop22(c2.profile).fitted_constant));
    CHECK(close(check_theorem14(c1.profile).fitted_constant,
                check_theorem14(c2.profile).fitted_constant));
    const auto r1 = RhsAlongProfile::from_problem(c1.profile);
    const auto r2 = RhsAlongProfile::from_problem(c2.profile);
    CHECK(close(check_theorem15(c1.profile, r1)[0].fitted_constant,
                check_theorem15(c2.profile, r2)[0].fitted_constant));
    CHECK(close(check_lemma24(c1.profile).grad_vs_min.fitted_constant,
                check_lemma24(c2.profile).grad_vs_min.fitted_constant));
}
