#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "plap/closed_forms.hpp"
#include "plap/derivatives.hpp"
#include "plap/ivp.hpp"
#include "plap/shooting.hpp"
#include "reference_values.hpp"

using namespace plap;

namespace {

// Independent fixed-step classical RK4 on the flux system; the oracle for the
// adaptive integrator.
std::array<double, 2> rk4_flux(const ProblemSpec& spec, double a, double r0, int steps) {
    auto rhs = [&](double r, const std::array<double, 2>& y) -> std::array<double, 2> {
        const double rp = std::pow(r, spec.N - 1);
        return {-std::pow(std::max(0.0, -y[1]) / rp, 1.0 / (spec.p - 1.0)),
                -spec.lambda * rp * spec.f.value(y[0])};
    };
    auto y = origin_start(spec, a, r0);
    double r = r0;
    const double h = (1.0 - r0) / steps;
    for (int i = 0; i < steps; ++i) {
        const auto k1 = rhs(r, y);
        const auto k2 = rhs(r + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
        const auto k3 = rhs(r + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
        const auto k4 = rhs(r + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
        y[0] += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
        y[1] += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
        r += h;
    }
    return y;
}

}  // namespace

TEST_CASE("lambda = 0 gives the constant profile") {
    ProblemSpec spec(10, 2.0, 0.0, NonlinearitySpec::exponential());
    const auto pr = integrate_ivp(spec, 3.25, RadialGrid::standard());
    for (std::size_t i = 0; i < pr.size(); ++i) {
        CHECK(pr.u[i] == 3.25);
        CHECK(pr.w[i] == 0.0);
    }
    // derivative extraction degenerates by design
    RadialProfile copy = pr;
    CHECK_THROWS_AS(derivatives_from_ode(copy, RhsAlongProfile::from_problem(copy)),
                    DegenerateWeightError);
}

TEST_CASE("ivp output agrees with the fixed-step RK4 oracle") {
    ProblemSpec spec(3, 2.0, 1.0, NonlinearitySpec::exponential());
    const auto got = integrate_endpoint(spec, 1.0);
    const auto coarse = rk4_flux(spec, 1.0, 1e-6, 200000);
    const auto fine = rk4_flux(spec, 1.0, 1e-6, 400000);
    // oracle self-convergence confirms its own accuracy
    CHECK(std::fabs(fine[0] - coarse[0]) < 1e-9);
    CHECK(got.u_end == Catch::Approx(fine[0]).margin(1e-8));
}

TEST_CASE("integrating from the singular closed form stays on it") {
    ProblemSpec spec(10, 2.0, 16.0, NonlinearitySpec::exponential());
    const auto grid = RadialGrid::standard();
    const double r0 = grid.r_min();
    const std::array<double, 2> y0 = {-2.0 * std::log(r0), -2.0 * std::pow(r0, 8.0)};
    const auto out = integrate_flux_from(spec, r0, y0, &grid);
    CHECK(std::fabs(out.u_end) < 1e-7);
    CHECK(residual(out.profile, RhsAlongProfile::from_problem(out.profile)) < 1e-8);
}

TEST_CASE("ivp self-residual is at quadrature level") {
    ProblemSpec spec(3, 2.0, 1.0, NonlinearitySpec::exponential());
    const auto pr = integrate_ivp(spec, 1.0, RadialGrid::standard());
    CHECK(pr.max_flux_inconsistency() < 1e-12);
    const auto rhs = RhsAlongProfile::from_problem(pr);
    double scale = 0.0;
    for (std::size_t i = 0; i < pr.size(); ++i)
        scale = std::max(scale, std::pow(pr.grid[i], pr.N - 1) * std::fabs(rhs.g[i]));
    CHECK(residual(pr, rhs) < 1e-6 * scale);
}

TEST_CASE("residual of a non-solution reports the defect scale") {
    const auto grid = RadialGrid::standard();
    RadialProfile pr;
    pr.grid = grid;
    pr.N = 4;
    pr.p = 2.0;
    pr.u.assign(grid.size(), 0.0);
    pr.u_r.assign(grid.size(), 0.0);
    pr.w.assign(grid.size(), 0.0);
    RhsAlongProfile rhs;
    const double lf0 = 2.5;  // lambda f(0)
    rhs.g.assign(grid.size(), lf0);
    CHECK(residual(pr, rhs) == Catch::Approx(lf0).epsilon(0.02));
}

TEST_CASE("mesh convergence under tolerance halving") {
    // the error control is relative to the state scale (here the amplitude)
    ProblemSpec spec(9, 3.0, 2.0, NonlinearitySpec::exponential());
    IvpOptions loose;
    loose.rel_tol = 1e-8;
    loose.abs_tol = 1e-10;
    IvpOptions tight;
    tight.rel_tol = 5e-9;
    tight.abs_tol = 5e-11;
    const double a = 2.0;
    const double ul = integrate_endpoint(spec, a, loose).u_end;
    const double ut = integrate_endpoint(spec, a, tight).u_end;
    CHECK(std::fabs(ul - ut) < loose.rel_tol * a);
}

TEST_CASE("shooting reproduces the critical thresholds along the ladder") {
    const auto grid = RadialGrid::standard();
    SECTION("exp critical p=2: lambda(a) approaches 16") {
        const auto res = shoot_lambda(10, 2.0, NonlinearitySpec::exponential(), 25.0, grid);
        CHECK(res.lambda == Catch::Approx(16.0).epsilon(1e-5));
        CHECK(std::fabs(res.profile.u.back()) < 1e-6);
    }
    SECTION("power supercritical matches the closed-form threshold") {
        const double al = exponent_set(11, 2.0).alpha;
        const auto f = NonlinearitySpec::power_shift(refvals::kPowerM_11_2);
        const double a = std::pow(1e-3, -al) - 1.0;
        const auto res = shoot_lambda(11, 2.0, f, a, grid);
        CHECK(res.lambda == Catch::Approx(refvals::kPowerLambdaStar_11_2).epsilon(1e-4));
    }
    SECTION("small amplitudes: lambda -> 0 monotonically") {
        // for small a the branch is nearly linear: u = lambda (1-r^2)/6 at
        // N = 3, p = 2, so lambda(a) tracks 6a
        double prev = 0.0;
        for (double a : {0.01, 0.02, 0.04, 0.08}) {
            const auto res = shoot_lambda(3, 2.0, NonlinearitySpec::exponential(), a, grid);
            CHECK(res.lambda > prev);
            prev = res.lambda;
            if (a == 0.01) CHECK(res.lambda == Catch::Approx(0.06).epsilon(0.1));
        }
    }
}

TEST_CASE("branch tracing and lambda* estimation") {
    const auto grid = RadialGrid::standard();
    SECTION("saturating branch at the critical pair (10, 2)") {
        const auto br =
            trace_branch(10, 2.0, NonlinearitySpec::exponential(), 0.1, 30.0, 16, grid);
        REQUIRE(br.complete);
        CHECK(br.monotone_verified);
        const auto est = estimate_lambda_star(br, 10, 2.0);
        CHECK(est.lambda_star == Catch::Approx(16.0).epsilon(0.01));
        CHECK(est.lambda_star >= br.points.back().lambda);
        // flux monotonicity on every traced profile
        for (const auto& pr : br.profiles)
            for (std::size_t i = 0; i + 1 < pr.size(); ++i)
                CHECK(std::fabs(pr.w[i + 1]) >=
                      std::fabs(pr.w[i]) * (1.0 - 1e-10) - 1e-300);
    }
    SECTION("fold at (3, 2) with a ladder-stable estimate") {
        const auto br =
            trace_branch(3, 2.0, NonlinearitySpec::exponential(), 0.1, 30.0, 20, grid);
        const auto est = estimate_lambda_star(br, 3, 2.0);
        CHECK(est.fold);
        const auto br2 =
            trace_branch(3, 2.0, NonlinearitySpec::exponential(), 0.1, 30.0, 40, grid);
        const auto est2 = estimate_lambda_star(br2, 3, 2.0);
        CHECK(est.lambda_star == Catch::Approx(est2.lambda_star).epsilon(0.01));
        // max lambda itself sits below the estimate
        double mx = 0.0;
        for (const auto& pt : br.points) mx = std::max(mx, pt.lambda);
        CHECK(est.lambda_star >= mx);
    }
    SECTION("minimal-branch ordering in lambda") {
        const auto br =
            trace_branch(3, 2.0, NonlinearitySpec::exponential(), 0.05, 2.0, 8, grid);
        for (std::size_t k = 0; k + 1 < br.points.size(); ++k) {
            if (br.points[k + 1].lambda <= br.points[k].lambda) break;
            for (std::size_t i = 0; i < br.profiles[k].size(); i += 97)
                CHECK(br.profiles[k + 1].u[i] >= br.profiles[k].u[i] - 1e-8);
        }
    }
    SECTION("too-short branch is rejected") {
        Branch tiny;
        tiny.points = {{1.0, 1.0}, {2.0, 2.0}};
        CHECK_THROWS_AS(estimate_lambda_star(tiny, 3, 2.0), std::domain_error);
    }
}

TEST_CASE("derivatives from the ODE identities reproduce closed forms") {
    const auto grid = RadialGrid::standard();
    SECTION("critical exponential") {
        auto cf = exponential_critical(10, 2.0, grid);
        RadialProfile pr = cf.profile;
        pr.u_rr.clear();
        pr.u_rrr.clear();
        derivatives_from_ode(pr, RhsAlongProfile::from_problem(pr));
        for (std::size_t i = 0; i < pr.size(); i += 53) {
            const double r = pr.grid[i];
            CHECK(pr.u_rr[i] == Catch::Approx(2.0 / (r * r)).epsilon(1e-12));
            CHECK(pr.u_rrr[i] == Catch::Approx(-4.0 / (r * r * r)).epsilon(1e-12));
        }
    }
    SECTION("power closed form") {
        auto cf = power_supercritical(11, 2.0, grid);
        RadialProfile pr = cf.profile;
        pr.u_rr.clear();
        pr.u_rrr.clear();
        derivatives_from_ode(pr, RhsAlongProfile::from_problem(pr));
        const double al = exponent_set(11, 2.0).alpha;
        for (std::size_t i = 0; i < pr.size(); i += 53) {
            const double r = pr.grid[i];
            CHECK(pr.u_rr[i] ==
                  Catch::Approx(al * (al + 1.0) * std::pow(r, -al - 2.0)).epsilon(1e-10));
        }
    }
}

TEST_CASE("power-shift overshoot respects the nonlinearity domain") {
    // (1+u)^m degenerates as u -> -1, so the forcing dies out and u(1) can
    // undershoot but never leave the domain
    for (double lam : {50.0, 500.0, 5000.0}) {
        ProblemSpec spec(11, 2.0, lam, NonlinearitySpec::power_shift(7.0));
        const auto out = integrate_endpoint(spec, 0.5);
        CHECK(out.u_end > -1.0);
        CHECK(out.u_end < 0.0);
    }
}

TEST_CASE("runaway forcing is reported as blow-up with its radius") {
    ProblemSpec spec(10, 2.0, 1e300, NonlinearitySpec::exponential());
    CHECK_THROWS_AS(integrate_ivp(spec, 1.0, RadialGrid::standard()), IntegrationBlowUp);
    try {
        integrate_ivp(spec, 1.0, RadialGrid::standard());
    } catch (const IntegrationBlowUp& e) {
        CHECK(e.radius() > 0.0);
        CHECK(e.radius() <= 1.0);
    }
}

TEST_CASE("no-match when the search cap cuts the bracket") {
    ShootOptions opt;
    opt.lambda_max_search = 1e-7;  // below any sign change
    CHECK_THROWS_AS(
        shoot_lambda(3, 2.0, NonlinearitySpec::exponential(), 1.0, RadialGrid::standard(), opt),
        NoMatchError);
}
