// Command-line surface for the radial p-Laplace laboratory: solve and trace
// minimal branches, construct closed forms and generator families, certify
// semi-stability, and verify the pointwise estimate catalog on profiles.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plap/plap.hpp"

namespace fs = std::filesystem;
using namespace plap;

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

fs::path output_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("PLAP_OUTPUT_DIR")) return env;
    return ".";
}

struct ProblemFlags {
    int N = 10;
    double p = 2.0;
    std::string f_kind = "exp";
    double m = 0.0;
    double lambda = 1.0;

    NonlinearitySpec nonlinearity() const {
        if (f_kind == "exp") return NonlinearitySpec::exponential();
        if (f_kind == "power") {
            if (!(m > 0.0)) throw CLI::ValidationError("--m must be positive for --f power");
            return NonlinearitySpec::power_shift(m);
        }
        throw CLI::ValidationError("--f must be exp or power");
    }

    void attach(CLI::App* cmd, bool with_lambda = true) {
        cmd->add_option("--N", N, "ball dimension")->check(CLI::Range(2, 50));
        cmd->add_option("--p", p, "p-Laplacian exponent")->check(CLI::Range(1.05, 10.0));
        cmd->add_option("--f", f_kind, "nonlinearity kind: exp | power");
        cmd->add_option("--m", m, "power-shift exponent (with --f power)");
        if (with_lambda) cmd->add_option("--lambda", lambda, "parameter value");
    }

    void echo(ReportDocument& doc) const {
        doc.config("N", N);
        doc.config("p", p);
        doc.config("f", f_kind);
        if (f_kind == "power") doc.config("m", m);
    }
};

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

void add_estimate_record(ReportDocument& doc, const EstimateReport& rep) {
    if (!rep.applicable) {
        doc.add_record(rep.statement_id, true, 0.0, 0.0, rep.tolerance,
                       "skipped: " + rep.skip_reason);
        return;
    }
    std::string note = rep.hard ? "hard" : "fitted";
    if (rep.sharp) note += rep.sharp.value() ? "; sharp" : "; not sharp";
    doc.add_record(rep.statement_id, rep.holds, rep.fitted_constant, rep.max_ratio_location,
                   rep.tolerance, note);
}

void add_profile_invariants(ReportDocument& doc, const RadialProfile& pr) {
    bool sign_ok = true, mono_ok = true;
    double sign_at = 0.0, mono_at = 0.0;
    for (std::size_t i = 0; i < pr.size(); ++i) {
        if (pr.u_r[i] > 0.0 && sign_ok) {
            sign_ok = false;
            sign_at = pr.grid[i];
        }
        if (i > 0 && pr.u[i] > pr.u[i - 1] + 1e-12 * (1.0 + std::fabs(pr.u[i])) && mono_ok) {
            mono_ok = false;
            mono_at = pr.grid[i];
        }
    }
    const double flux_err = pr.max_flux_inconsistency();
    doc.add_record("profile.ur_sign", sign_ok, 0.0, sign_at, 0.0, "u_r <= 0 at every node");
    doc.add_record("profile.u_monotone", mono_ok, 0.0, mono_at, 1e-12,
                   "u nonincreasing in r");
    doc.add_record("profile.flux_consistency", flux_err <= 1e-8, flux_err, 0.0, 1e-8,
                   "|w| = r^{N-1}|u_r|^{p-1}");
}

void run_estimate_suite(ReportDocument& doc, const std::string& suite, RadialProfile& pr,
                        const std::optional<RhsAlongProfile>& rhs_opt) {
    const bool all = suite == "all";
    add_profile_invariants(doc, pr);
    RhsAlongProfile rhs = rhs_opt ? *rhs_opt : RhsAlongProfile::from_flux(pr);
    if (all || suite == "lemma21") add_estimate_record(doc, check_lemma21(pr));
    if (all || suite == "prop22") add_estimate_record(doc, check_prop22(pr));
    if (all || suite == "thm14") add_estimate_record(doc, check_theorem14(pr));
    if (all || suite == "thm15") {
        if (!pr.has_second()) {
            RadialProfile tmp = pr;
            try {
                derivatives_from_ode(tmp, rhs);
                pr = tmp;
            } catch (const DegenerateWeightError&) {
            }
        }
        for (const auto& rep : check_theorem15(pr, rhs)) add_estimate_record(doc, rep);
    }
    if (all || suite == "lemma23") {
        if (!pr.has_second()) {
            RadialProfile tmp = pr;
            try {
                derivatives_from_ode(tmp, rhs);
                pr = tmp;
            } catch (const DegenerateWeightError&) {
            }
        }
        const auto reps = check_lemma23(pr, rhs);
        add_estimate_record(doc, reps.g_bound);
        add_estimate_record(doc, reps.urr_bound);
        add_estimate_record(doc, reps.gprime_bound);
        add_estimate_record(doc, reps.psi_shape);
    }
    if (all || suite == "lemma24") {
        const auto reps = check_lemma24(pr);
        add_estimate_record(doc, reps.flux_monotone);
        add_estimate_record(doc, reps.ratio_monotone);
        add_estimate_record(doc, reps.annulus_spread);
        add_estimate_record(doc, reps.grad_vs_min);
    }
    if (all || suite == "thm12") {
        for (const auto& rep : check_theorem12(pr)) add_estimate_record(doc, rep);
    }
}

int finish(ReportDocument& doc, const fs::path& json_path, bool quiet = false) {
    doc.set_timestamp(iso_timestamp());
    doc.save(json_path);
    if (!quiet) std::cout << "report: " << json_path.string() << "\n";
    if (!doc.all_hold()) {
        std::cerr << "violated:";
        for (const auto& id : doc.violations()) std::cerr << ' ' << id;
        std::cerr << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial p-Laplace laboratory"};
    app.set_config("--config", "", "key = value config file mirroring the flags");
    app.require_subcommand(1);
    std::string out_flag;
    app.add_option("--out-dir", out_flag, "output directory (default $PLAP_OUTPUT_DIR or .)");

    // ---- solve ----------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "solve one profile at fixed lambda");
    ProblemFlags spf;
    spf.attach(solve);
    double amplitude = 1.0;
    bool amplitude_search = false;
    int grid_count = 4096;
    double r_min = 1e-6;
    std::string csv_out = "profile.csv", json_out = "solve.json";
    solve->add_option("--amplitude", amplitude, "central amplitude u(0)");
    solve->add_flag("--amplitude-search", amplitude_search,
                    "find the minimal-solution amplitude with u(1) = 0");
    solve->add_option("--grid-count", grid_count, "reporting grid nodes");
    solve->add_option("--r-min", r_min, "innermost grid radius");
    solve->add_option("--csv-out", csv_out, "profile CSV filename");
    solve->add_option("--json-out", json_out, "report JSON filename");

    // ---- branch ---------------------------------------------------------
    auto* branch = app.add_subcommand("branch", "trace lambda(a) along the minimal branch");
    ProblemFlags bpf;
    bpf.attach(branch, false);
    double a_min = 0.1, a_max = 30.0;
    int steps = 24;
    std::string br_json = "branch.json";
    branch->add_option("--a-min", a_min, "smallest amplitude");
    branch->add_option("--a-max", a_max, "largest amplitude");
    branch->add_option("--steps", steps, "ladder size");
    branch->add_option("--json-out", br_json, "report JSON filename");

    // ---- extremal -------------------------------------------------------
    auto* extremal = app.add_subcommand("extremal",
                                        "extremal profile: closed form when available, "
                                        "branch limit otherwise");
    ProblemFlags epf;
    epf.attach(extremal, false);
    std::string ex_csv = "extremal.csv", ex_json = "extremal.json";
    extremal->add_option("--csv-out", ex_csv, "profile CSV filename");
    extremal->add_option("--json-out", ex_json, "report JSON filename");

    // ---- stability ------------------------------------------------------
    auto* stability = app.add_subcommand("stability", "discrete semi-stability certificate");
    ProblemFlags stf;
    stf.attach(stability);
    std::string st_profile;
    double cut_radius = 1e-4;
    int mesh_count = 2000;
    std::string st_json = "stability.json";
    stability->add_option("--profile", st_profile, "profile CSV to load (else solve with --amplitude)");
    double st_amplitude = 1.0;
    stability->add_option("--amplitude", st_amplitude, "amplitude when solving in-process");
    stability->add_option("--cut", cut_radius, "inner cut radius of the test space");
    stability->add_option("--mesh", mesh_count, "finite-element count");
    stability->add_option("--json-out", st_json, "report JSON filename");

    // ---- verify ---------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "run an estimate suite on a stored profile");
    ProblemFlags vpf;
    vpf.attach(verify);
    std::string v_profile, v_suite = "all", v_json = "verify.json";
    bool v_have_rhs = false;
    verify->add_option("--profile", v_profile, "profile CSV")->required();
    verify->add_option("--suite", v_suite,
                       "lemma21 | prop22 | lemma23 | lemma24 | thm12 | thm14 | thm15 | all");
    verify->add_flag("--with-rhs", v_have_rhs,
                     "evaluate g from --f/--lambda instead of the stored flux");
    verify->add_option("--json-out", v_json, "report JSON filename");

    // ---- family ---------------------------------------------------------
    auto* family = app.add_subcommand("family", "build and certify a generator-family solution");
    int fN = 10;
    double fp = 2.0;
    std::string h_kind = "zero", h_points;
    double h_const = 1.0, f_rmin = 1e-8;
    int f_count = 8192;
    std::string fa_csv = "family.csv", fa_json = "family.json";
    family->add_option("--N", fN, "ball dimension")->check(CLI::Range(2, 50));
    family->add_option("--p", fp, "p-Laplacian exponent")->check(CLI::Range(1.05, 10.0));
    family->add_option("--generator", h_kind, "generator: zero | constant | bumps | steps | caps");
    family->add_option("--h-const", h_const, "constant value (with --generator constant)");
    family->add_option("--points", h_points,
                       "prescriptions r:y,r:y,... (radii strictly decreasing)");
    double f_eps = 0.5;
    family->add_option("--eps", f_eps, "slope budget (with --generator caps)");
    family->add_option("--r-min", f_rmin, "innermost grid radius");
    family->add_option("--grid-count", f_count, "grid nodes");
    family->add_option("--csv-out", fa_csv, "profile CSV filename");
    family->add_option("--json-out", fa_json, "report JSON filename");

    // ---- demo-blowup ----------------------------------------------------
    auto* demo = app.add_subcommand("demo-blowup", "prescribed derivative blow-up demonstration");
    int d_order = 1, dN = 10;
    double dp = 2.0;
    std::string d_rn = "0.25,0.0625,0.015625,0.00390625", d_Mn = "1,4,9,16";
    std::string d_json = "blowup.json";
    demo->add_option("--order", d_order, "derivative order k in {1,2,3}")->check(CLI::Range(1, 3));
    demo->add_option("--N", dN, "ball dimension")->check(CLI::Range(2, 50));
    demo->add_option("--p", dp, "p-Laplacian exponent")->check(CLI::Range(1.05, 10.0));
    demo->add_option("--rn", d_rn, "radii, comma separated, strictly decreasing");
    demo->add_option("--Mn", d_Mn, "targets, comma separated");
    demo->add_option("--json-out", d_json, "report JSON filename");

    // ---- report ---------------------------------------------------------
    auto* report = app.add_subcommand("report", "aggregate prior JSON reports into one table");
    std::vector<std::string> rep_inputs;
    std::string rep_out = "summary.json";
    report->add_option("--inputs", rep_inputs, "input report JSON files")->required();
    report->add_option("-o,--output", rep_out, "aggregated output filename");

    CLI11_PARSE(app, argc, argv);
    const fs::path dir = output_dir(out_flag);

    try {
        if (*solve) {
            ReportDocument doc("solve");
            spf.echo(doc);
            doc.config("lambda", spf.lambda);
            doc.config("grid_count", grid_count);
            doc.config("r_min", r_min);
            const auto grid = RadialGrid::logspaced(r_min, grid_count);
            ProblemSpec spec(spf.N, spf.p, spf.lambda, spf.nonlinearity());
            RadialProfile pr;
            if (amplitude_search) {
                auto sol = solve_amplitude(spec, grid);
                pr = std::move(sol.profile);
            } else {
                doc.config("amplitude", amplitude);
                pr = integrate_ivp(spec, amplitude, grid);
            }
            auto rhs = RhsAlongProfile::from_problem(pr);
            derivatives_from_ode(pr, rhs);
            save_profile(dir / csv_out, pr);
            doc.add_profile_reference(csv_out);
            doc.add_value("solver.residual", residual(pr, rhs), 1e-6);
            doc.add_value("solver.u1", pr.u.back(), 0.0);
            doc.add_record("profile.monotone", check_lemma24(pr).flux_monotone.holds, 0, 0, 1e-10);
            return finish(doc, dir / json_out);
        }

        if (*branch) {
            ReportDocument doc("branch");
            bpf.echo(doc);
            doc.config("a_min", a_min);
            doc.config("a_max", a_max);
            doc.config("steps", steps);
            const auto grid = RadialGrid::standard();
            auto br = trace_branch(bpf.N, bpf.p, bpf.nonlinearity(), a_min, a_max, steps, grid);
            auto est = estimate_lambda_star(br, bpf.N, bpf.p);
            auto& arr = doc.json()["records"];
            for (const auto& pt : br.points) {
                nlohmann::ordered_json rec;
                rec["statement_id"] = "branch.point";
                rec["amplitude"] = pt.amplitude;
                rec["lambda"] = pt.lambda;
                arr.push_back(rec);
            }
            doc.add_value("branch.lambda_star", est.lambda_star, est.uncertainty,
                          est.fold ? "fold extrapolation" : "saturating-tail extrapolation");
            doc.add_record("branch.monotone", br.monotone_verified, 0, 0, 1e-8);
            doc.add_record("branch.complete", br.complete, 0, 0, 0);
            return finish(doc, dir / br_json);
        }

        if (*extremal) {
            ReportDocument doc("extremal");
            epf.echo(doc);
            const auto grid = RadialGrid::standard();
            const auto ex = exponent_set(epf.N, epf.p);
            RadialProfile pr;
            double lam_star = 0.0, lam_unc = 0.0;
            EstimateOptions eopt;
            if (epf.f_kind == "exp" && ex.regime() == Regime::Critical) {
                auto cf = exponential_critical(epf.N, epf.p, grid);
                pr = std::move(cf.profile);
                lam_star = cf.lambda_star;
                doc.add_value("extremal.closed_form", 1.0, 0.0, "u = -p log r");
            } else if (epf.f_kind == "power" && ex.regime() == Regime::Supercritical) {
                auto cf = power_supercritical(epf.N, epf.p, grid);
                pr = std::move(cf.profile);
                lam_star = cf.lambda_star;
                doc.config("m", *cf.m);
                doc.add_value("extremal.closed_form", 1.0, 0.0, "u = r^-alpha - 1");
            } else {
                auto br = trace_branch(epf.N, epf.p, epf.nonlinearity(), 0.1, 30.0, 24, grid);
                auto est = estimate_lambda_star(br, epf.N, epf.p);
                lam_star = est.lambda_star;
                lam_unc = est.uncertainty;
                pr = br.profiles.back();
                // truncation metadata: radius where the two largest-amplitude
                // profiles agree to 1%
                const auto& ua = br.profiles[br.profiles.size() - 2].u;
                const auto& ub = pr.u;
                double r_rel = pr.grid.r_min();
                for (std::size_t i = 0; i < pr.size(); ++i)
                    if (std::fabs(ub[i] - ua[i]) > 0.01 * (1.0 + std::fabs(ub[i])))
                        r_rel = pr.grid[i];
                eopt.r_reliable = r_rel;
                doc.add_value("extremal.r_reliable", r_rel, 0.0,
                              "branch-limit approximation below this radius is unconverged");
            }
            doc.add_value("extremal.lambda_star", lam_star, lam_unc);
            if (!pr.has_second() && pr.lambda && pr.f)
                derivatives_from_ode(pr, RhsAlongProfile::from_problem(pr));
            for (const auto& rep : check_theorem12(pr, eopt)) add_estimate_record(doc, rep);
            save_profile(dir / ex_csv, pr);
            doc.add_profile_reference(ex_csv);
            return finish(doc, dir / ex_json);
        }

        if (*stability) {
            ReportDocument doc("stability");
            stf.echo(doc);
            doc.config("cut", cut_radius);
            doc.config("mesh", mesh_count);
            RadialProfile pr;
            if (!st_profile.empty()) {
                pr = load_profile(st_profile, stf.N, stf.p);
                pr.lambda = stf.lambda;
                pr.f = stf.nonlinearity();
            } else {
                ProblemSpec spec(stf.N, stf.p, stf.lambda, stf.nonlinearity());
                pr = integrate_ivp(spec, st_amplitude, RadialGrid::standard());
            }
            auto rhs = RhsAlongProfile::from_problem(pr);
            StabilityOptions so;
            so.cut_radius = cut_radius;
            so.mesh_count = mesh_count;
            auto rep = min_eigenvalue(pr, rhs.gprime, so);
            doc.add_value("stability.min_eigenvalue", rep.min_eigenvalue, rep.tol,
                          verdict_name(rep.verdict));
            doc.add_record("stability.not_unstable", rep.verdict != StabilityVerdict::Unstable, 0,
                           0, rep.tol,
                           "one-sided certificate: nonnegative eigenvalue certifies "
                           "discrete semi-stability only");
            return finish(doc, dir / st_json);
        }

        if (*verify) {
            ReportDocument doc("verify");
            vpf.echo(doc);
            doc.config("suite", v_suite);
            doc.config("profile", v_profile);
            RadialProfile pr = load_profile(v_profile, vpf.N, vpf.p);
            std::optional<RhsAlongProfile> rhs;
            if (v_have_rhs) {
                pr.lambda = vpf.lambda;
                pr.f = vpf.nonlinearity();
                rhs = RhsAlongProfile::from_problem(pr);
            }
            run_estimate_suite(doc, v_suite, pr, rhs);
            return finish(doc, dir / v_json);
        }

        if (*family) {
            ReportDocument doc("family");
            doc.config("N", fN);
            doc.config("p", fp);
            doc.config("h", h_kind);
            GeneratorH h = GeneratorH::zero();
            if (h_kind == "constant") {
                h = GeneratorH::constant(h_const);
            } else if (h_kind != "zero") {
                std::vector<double> rn, yn;
                std::stringstream ss(h_points);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    const auto colon = tok.find(':');
                    if (colon == std::string::npos)
                        throw CLI::ValidationError("--points must be r:y,r:y,...");
                    rn.push_back(std::stod(tok.substr(0, colon)));
                    yn.push_back(std::stod(tok.substr(colon + 1)));
                }
                const PrescriptionMode mode = h_kind == "bumps" ? PrescriptionMode::Values
                                              : h_kind == "steps" ? PrescriptionMode::Slopes
                                                                  : PrescriptionMode::Concavity;
                h = construct_h(mode, rn, yn, f_eps);
            }
            FamilyOptions fo;
            fo.r_min = f_rmin;
            fo.grid_count = f_count;
            auto sol = family_profile(h, fN, fp, fo);
            auto certs = verify_family(sol);
            save_profile(dir / fa_csv, sol.profile);
            doc.add_profile_reference(fa_csv);
            doc.add_record("family.w1p_finite", certs.w1p_finite, 0, 0, 0);
            doc.add_record("family.unbounded_growth", certs.unbounded_growth, 0, 0, 0);
            doc.add_record("family.hardy_semistable", certs.hardy_semistable, 0, 0, 1e-12);
            doc.add_record("family.eigen_semistable", certs.eigen_semistable, 0, 0, 0);
            doc.add_record("family.g_nonneg", certs.g_nonneg, 0, 0, 1e-11);
            doc.add_record("family.g_monotone", certs.g_monotone, 0, 0, 1e-9);
            RhsAlongProfile rhs;
            rhs.g = sol.g_samples;
            rhs.gprime = sol.gprime_samples;
            doc.add_value("family.residual", residual(sol.profile, rhs), 1e-8);
            return finish(doc, dir / fa_json);
        }

        if (*demo) {
            ReportDocument doc("demo-blowup");
            doc.config("order", d_order);
            doc.config("N", dN);
            doc.config("p", dp);
            doc.config("rn", d_rn);
            doc.config("Mn", d_Mn);
            const auto rn = parse_list(d_rn), Mn = parse_list(d_Mn);
            auto res = demonstrate_blowup(d_order, rn, Mn, dN, dp);
            for (std::size_t i = 0; i < rn.size(); ++i)
                doc.add_record("blowup.target[" + std::to_string(i) + "]", res.achieved[i],
                               res.attained[i], rn[i], 0.0,
                               "target " + std::to_string(Mn[i]));
            doc.add_record("blowup.g_nonneg", d_order < 2 || res.solution.certs.g_nonneg, 0, 0, 0);
            doc.add_record("blowup.g_monotone", d_order < 3 || res.solution.certs.g_monotone, 0,
                           0, 0);
            doc.add_record("blowup.hardy_semistable", res.solution.certs.hardy_semistable, 0, 0,
                           0);
            return finish(doc, dir / d_json);
        }

        if (*report) {
            ReportDocument doc("report");
            auto& arr = doc.json()["records"];
            for (const auto& in : rep_inputs) {
                std::ifstream f(in);
                if (!f) throw std::runtime_error("cannot open " + in);
                nlohmann::ordered_json j;
                f >> j;
                for (const auto& rec : j["records"]) {
                    nlohmann::ordered_json copy = rec;
                    copy["source"] = in;
                    copy["source_command"] = j.value("command", "");
                    arr.push_back(copy);
                }
            }
            return finish(doc, dir / rep_out);
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
