#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "plap/closed_forms.hpp"
#include "plap/derivatives.hpp"
#include "plap/family.hpp"
#include "plap/stability.hpp"
#include "reference_values.hpp"

using namespace plap;

TEST_CASE("phi from the zero and constant generators") {
    const auto grid = RadialGrid::logspaced(1e-8, 2048);
    SECTION("h = 0") {
        const auto [phi, phip] = build_phi(GeneratorH::zero(), 10, 2.0, grid);
        const double s = char_root(10, 2.0);
        FamilyEvaluator ev(GeneratorH::zero(), 10, 2.0, grid);
        for (double r : {1e-7, 1e-3, 0.37, 1.0}) {
            const auto pt = ev.at(r);
            CHECK(pt.phi == Catch::Approx(std::pow(r, 2.0 * s)).epsilon(1e-13));
            CHECK(pt.phi_p ==
                  Catch::Approx(2.0 * s * std::pow(r, 2.0 * s - 1.0)).epsilon(1e-13));
        }
    }
    SECTION("h = 1: the cumulative integral is r") {
        FamilyEvaluator ev(GeneratorH::constant(1.0), 10, 2.0, grid);
        const double s = char_root(10, 2.0);
        for (double r : {1e-4, 0.2, 0.9}) {
            CHECK(ev.cumulative(r) == Catch::Approx(r).epsilon(1e-12));
            CHECK(ev.at(r).phi ==
                  Catch::Approx(std::pow(r, 2.0 * s) * (1.0 + r)).epsilon(1e-12));
        }
    }
    SECTION("negative h is rejected") {
        CHECK_THROWS_AS(GeneratorH::constant(-1.0), std::domain_error);
    }
}

TEST_CASE("bump generator: exact value and oracle integral") {
    GeneratorH h = GeneratorH::bumps({{0.5, 0.1, 3.0}});
    CHECK(h.value(0.5) == Catch::Approx(3.0).epsilon(1e-14));
    CHECK(h.value(0.39) == 0.0);
    CHECK(h.value(0.61) == 0.0);
    FamilyEvaluator ev(h, 10, 2.0, RadialGrid::logspaced(1e-8, 2048));
    // int h = height * width * (mother bump integral)
    const double want = 3.0 * 0.1 * refvals::kMotherBumpIntegral;
    CHECK(ev.cumulative(1.0) == Catch::Approx(want).epsilon(1e-10));
    CHECK(ev.cumulative(0.61) == Catch::Approx(want).epsilon(1e-10));
    CHECK(ev.cumulative(0.39) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("family profile from h = 0 at the critical pair") {
    auto sol = family_profile(GeneratorH::zero(), 10, 2.0);
    const auto& pr = sol.profile;
    SECTION("|u_r| equals sqrt(2/3)/r to 1e-10") {
        for (std::size_t i = 0; i < pr.size(); i += 37) {
            const double want = refvals::kSqrtTwoThirds / pr.grid[i];
            CHECK(std::fabs(-pr.u_r[i] - want) <= 1e-10 * want);
        }
    }
    SECTION("u is the matching logarithm") {
        for (std::size_t i = 0; i < pr.size(); i += 37)
            CHECK(pr.u[i] == Catch::Approx(refvals::kSqrtTwoThirds *
                                           std::fabs(std::log(pr.grid[i])))
                                 .margin(1e-9));
    }
    SECTION("all certificates pass") {
        const auto certs = verify_family(sol);
        CHECK(certs.w1p_finite);
        CHECK(certs.unbounded_growth);
        CHECK(certs.hardy_semistable);
        CHECK(certs.eigen_semistable);
        CHECK(certs.g_nonneg);
        CHECK(certs.g_monotone);
    }
    SECTION("key inequality holds with equality for h = 0") {
        const double ts = 2.0 * char_root(10, 2.0);
        for (std::size_t i = 0; i < pr.size(); i += 37) {
            const double lhs = pr.grid[i] * sol.phi_prime[i];
            const double rhs = ts * sol.phi[i];
            CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
        }
    }
    SECTION("recovered linearization is the marginal Hardy potential") {
        for (std::size_t i = 0; i < pr.size(); i += 97) {
            const double r = pr.grid[i];
            CHECK(sol.gprime_samples[i] == Catch::Approx(16.0 / (r * r)).epsilon(1e-12));
        }
    }
}

TEST_CASE("defining identity holds for every constructed solution") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<GeneratorH::Bump> bumps;
        const int k = 1 + static_cast<int>(ur(rng) * 3);
        double c = 0.6;
        for (int j = 0; j < k; ++j) {
            const double w = c * (0.05 + 0.2 * ur(rng));
            bumps.push_back({c, w, 0.2 + 5.0 * ur(rng)});
            c *= 0.25;
        }
        FamilyOptions fo;
        fo.grid_count = 2048;
        auto sol = family_profile(GeneratorH::bumps(bumps), 10, 2.0, fo);
        const double s = char_root(10, 2.0);
        double worst = 0.0;
        for (std::size_t i = 0; i < sol.profile.size(); ++i) {
            const double r = sol.profile.grid[i];
            const double lhs = sol.phi_prime[i];
            const double rhs = 9.0 * std::pow(r, 7.0) *
                               std::pow(std::fabs(sol.profile.u_r[i]), 2.0);
            worst = std::max(worst, std::fabs(lhs - rhs) / std::fabs(lhs));
        }
        CHECK(worst < 1e-10);
        // key pointwise inequality r Phi' >= 2 s Phi, equality iff h(r) = 0
        for (std::size_t i = 0; i < sol.profile.size(); i += 41) {
            const double r = sol.profile.grid[i];
            const double gap =
                r * sol.phi_prime[i] - 2.0 * s * sol.phi[i];
            CHECK(gap >= -1e-12 * sol.phi[i]);
            const double hval = sol.h.value(r);
            if (hval > 1e-12)
                CHECK(gap > 0.0);
        }
    }
}

TEST_CASE("unboundedness fails below the critical dimension") {
    auto sol = family_profile(GeneratorH::zero(), 5, 2.0);
    const auto certs = verify_family(sol);
    CHECK(certs.w1p_finite);
    CHECK_FALSE(certs.unbounded_growth);
}

TEST_CASE("recovered g reproduces the power closed form through the pipeline") {
    const auto cf = power_supercritical(11, 2.0, RadialGrid::standard());
    const auto rhs = RhsAlongProfile::from_flux(cf.profile);  // analytic flux derivative
    for (std::size_t i = 0; i < cf.profile.size(); i += 101) {
        const double s = cf.profile.u[i];
        const double want = cf.lambda_star * std::pow(1.0 + s, *cf.m);
        CHECK(rhs.g[i] == Catch::Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("increasing generators give nonnegative recovered g") {
    std::vector<double> rn = {0.5, 0.1}, yn = {2.0, 8.0};
    auto h = construct_h(PrescriptionMode::Slopes, rn, yn);
    auto sol = family_profile(h, 10, 2.0);
    auto certs = verify_family(sol);
    CHECK(certs.g_nonneg);
    CHECK(certs.hardy_semistable);
    CHECK(certs.eigen_semistable);
    // round trip through the solver residual
    RhsAlongProfile rhs;
    rhs.g = sol.g_samples;
    rhs.gprime = sol.gprime_samples;
    CHECK(residual(sol.profile, rhs) < 1e-8);
}

TEST_CASE("generator construction meets its prescriptions") {
    SECTION("values: h(r_n) = y_n exactly") {
        std::vector<double> rn = {0.5}, yn = {3.0};
        auto h = construct_h(PrescriptionMode::Values, rn, yn);
        CHECK(h.value(0.5) == Catch::Approx(3.0).epsilon(1e-14));
        FamilyEvaluator ev(h, 10, 2.0, RadialGrid::logspaced(1e-8, 1024));
        CHECK(ev.cumulative(1.0) <= 3.0 * 2.0 * 0.45 * 0.5);
    }
    SECTION("empty prescriptions give h = 0") {
        auto h = construct_h(PrescriptionMode::Values, {}, {});
        CHECK(h.is_zero());
    }
    SECTION("slopes: h'(r_n) = y_n, increasing, bounded by one") {
        std::vector<double> rn = {0.25, 0.125}, yn = {10.0, 100.0};
        auto h = construct_h(PrescriptionMode::Slopes, rn, yn);
        CHECK(h.deriv(0.25) == Catch::Approx(10.0).epsilon(1e-8));
        CHECK(h.deriv(0.125) == Catch::Approx(100.0).epsilon(1e-8));
        CHECK(h.value(1.0) <= 1.0);
        double prev = 0.0;
        for (double r = 1e-3; r <= 1.0; r += 1e-3) {
            const double cur = h.value(r);
            CHECK(cur >= prev - 1e-13);
            prev = cur;
        }
        CHECK(h.flags().increasing);
        CHECK(h.flags().bounded_by_one);
    }
    SECTION("concavity: h''(r_n) = -y_n with the slope budget") {
        std::vector<double> rn = {0.25, 0.0625}, yn = {5.0, 50.0};
        const double eps = 0.25;
        auto h = construct_h(PrescriptionMode::Concavity, rn, yn, eps);
        CHECK(h.second_deriv(0.25) == Catch::Approx(-5.0).epsilon(1e-8));
        CHECK(h.second_deriv(0.0625) == Catch::Approx(-50.0).epsilon(1e-8));
        CHECK(h.value(1e-12) <= 1e-10);  // h(0) = 0
        double worst_slope = 0.0;
        for (double r = 1e-4; r <= 1.0; r += 1e-4) {
            worst_slope = std::max(worst_slope, h.deriv(r));
            CHECK(h.second_deriv(r) <= 1e-12);
        }
        CHECK(worst_slope <= eps * (1.0 + 1e-9));
    }
    SECTION("bad prescriptions are rejected") {
        std::vector<double> inc = {0.1, 0.2}, y = {1.0, 1.0};
        CHECK_THROWS_AS(construct_h(PrescriptionMode::Values, inc, y), std::domain_error);
        std::vector<double> rn = {0.5}, bad = {-1.0};
        CHECK_THROWS_AS(construct_h(PrescriptionMode::Values, rn, bad), std::domain_error);
    }
}

TEST_CASE("prescribed blow-up") {
    std::vector<double> rn = {0.25, 0.0625, 0.015625, 0.00390625};
    SECTION("first derivative via the exact height formula") {
        std::vector<double> Mn = {1.0, 4.0, 9.0, 16.0};
        const auto res = demonstrate_blowup(1, rn, Mn, 10, 2.0);
        for (std::size_t i = 0; i < rn.size(); ++i) {
            CHECK(res.achieved[i]);
            CHECK(res.attained[i] >= Mn[i]);
        }
        CHECK(res.solution.certs.hardy_semistable);
    }
    SECTION("targets below the baseline are trivially achieved") {
        std::vector<double> Mn = {1e-3, 1e-3, 1e-3, 1e-3};
        const auto res = demonstrate_blowup(1, rn, Mn, 10, 2.0);
        for (bool a : res.achieved) CHECK(a);
    }
    SECTION("second derivative via certified amplification") {
        std::vector<double> rn2 = {0.25, 0.0625}, Mn = {1e3, 1e6};
        const auto res = demonstrate_blowup(2, rn2, Mn, 10, 2.0);
        CHECK(res.achieved[0]);
        CHECK(res.achieved[1]);
        CHECK(res.solution.certs.g_nonneg);
        CHECK(res.solution.certs.hardy_semistable);
        CHECK(res.solution.certs.eigen_semistable);
    }
    SECTION("third derivative with both hypothesis certificates") {
        std::vector<double> rn3 = {0.25, 0.0625}, Mn = {1e2, 1e4};
        const auto res = demonstrate_blowup(3, rn3, Mn, 10, 2.0);
        CHECK(res.achieved[0]);
        CHECK(res.achieved[1]);
        CHECK(res.solution.certs.g_nonneg);
        CHECK(res.solution.certs.g_monotone);
    }
}

TEST_CASE("both semi-stability routes agree on random admissible generators") {
    std::mt19937_64 rng(20240802);
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    FamilyOptions fo;
    fo.grid_count = 2048;
    FamilyVerifyOptions vo;
    vo.eigen.mesh_count = 600;
    for (int trial = 0; trial < 25; ++trial) {
        GeneratorH h = GeneratorH::zero();
        const int kind = trial % 3;
        if (kind == 0) {
            std::vector<GeneratorH::Bump> bumps;
            double c = 0.5;
            const int k = 1 + static_cast<int>(ur(rng) * 3);
            for (int j = 0; j < k; ++j) {
                bumps.push_back({c, c * (0.05 + 0.3 * ur(rng)), 0.1 + 4.0 * ur(rng)});
                c *= 0.2 + 0.2 * ur(rng);
            }
            h = GeneratorH::bumps(bumps);
        } else if (kind == 1) {
            std::vector<double> rn = {0.3 + 0.2 * ur(rng), 0.05 + 0.02 * ur(rng)};
            std::vector<double> yn = {0.5 + 3.0 * ur(rng), 1.0 + 30.0 * ur(rng)};
            h = construct_h(PrescriptionMode::Slopes, rn, yn);
        } else {
            h = GeneratorH::constant(2.0 * ur(rng));
        }
        auto sol = family_profile(h, 10, 2.0, fo);
        const auto certs = verify_family(sol, vo);
        CHECK(certs.hardy_semistable);
        CHECK(certs.eigen_semistable);
        CHECK(certs.w1p_finite);
    }
}
