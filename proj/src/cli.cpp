// cli.cpp — subcommand wiring, validation suite, exit-status mapping.

#include "qotto/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qotto/propagator.hpp"

namespace qotto::cli {

namespace {

using io::RunConfig;
using std::numbers::pi;

// Driving time with I = -4*pi, the u = 1 point used whenever an adiabatic
// stroke is needed by default.
double adiabatic_tau(const twolevel::Params& p) {
    return 8.0 * pi / (p.gamma1 + p.gamma2);
}

// ------------------------------------------------------------- commands ---

template <typename Fn>
void with_output(const RunConfig& cfg, std::ostream& out, Fn&& write) {
    if (cfg.output.empty()) {
        write(out);
        return;
    }
    const auto path = io::resolve_output_path(cfg.output);
    std::ofstream file(path);
    if (!file) throw InvalidInput("cannot open output file: " + path.string());
    write(file);
}

void print_warnings(const RunConfig& cfg, std::ostream& err) {
    const auto warnings = cfg.model == "twolevel"
                              ? twolevel::regime_warnings(cfg.twolevel)
                              : regime_warnings(io::make_spec(cfg));
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

int cmd_dist(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    print_warnings(cfg, err);
    const auto spec = io::make_spec(cfg);
    const auto dist = efficiency_distribution(joint_distribution(spec, cfg.tol), cfg.tol);
    const auto moments = efficiency_moments(dist);
    with_output(cfg, out, [&](std::ostream& o) {
        io::write_dist_artifact(o, cfg, dist, moments);
    });
    return kExitSuccess;
}

int cmd_sweep_tau(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    print_warnings(cfg, err);
    with_output(cfg, out, [&](std::ostream& o) { io::write_sweep_tau_csv(o, cfg); });
    return kExitSuccess;
}

int cmd_sweep_beta(RunConfig cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.tau_explicit) {
        cfg.twolevel.tau = adiabatic_tau(cfg.twolevel);
        err << "note: tau not given; using adiabatic driving time tau = "
            << io::format_double(cfg.twolevel.tau) << '\n';
    }
    if (cfg.beta_ratio == 1.0) {
        err << "warning: beta1 = beta2 along the sweep; no engine regime exists\n";
    }
    with_output(cfg, out, [&](std::ostream& o) { io::write_sweep_beta_csv(o, cfg); });
    return kExitSuccess;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    print_warnings(cfg, err);
    const auto spec = io::make_spec(cfg);
    const auto exact = efficiency_distribution(joint_distribution(spec, cfg.tol), cfg.tol);
    const auto reference =
        cfg.reference.empty() ? exact : io::read_dist_artifact_file(cfg.reference).dist;
    const auto empirical =
        mc::estimate_efficiency_distribution(spec, cfg.n_samples, cfg.seed, cfg.tol);
    mc::GofReport gof;
    try {
        gof = mc::goodness_of_fit(empirical, reference);
    } catch (const SupportViolation& violation) {
        with_output(cfg, out, [&](std::ostream& o) {
            io::write_support_violation(o, cfg, violation.what());
        });
        err << "support violation: " << violation.what() << '\n';
        return kExitSupport;
    }
    const double p_value =
        gof.dof >= 1 ? mc::chi_squared_survival(gof.chi2_stat, gof.dof) : 1.0;
    with_output(cfg, out, [&](std::ostream& o) {
        io::write_sample_artifact(o, cfg, empirical, reference, gof, p_value);
    });
    return kExitSuccess;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const auto checks = validation_suite(cfg);
    bool all_pass = true;
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        out << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(32) << c.name
            << " max_residual=" << io::format_double(c.residual)
            << " tol=" << io::format_double(c.tol);
        if (!c.note.empty()) out << "  (" << c.note << ')';
        out << '\n';
    }
    out << (all_pass ? "validation passed" : "validation FAILED") << '\n';
    return all_pass ? kExitSuccess : kExitValidation;
}

// ------------------------------------------------------- flag plumbing ---

// Raw flag storage; only values the user actually passed are copied into the
// RunConfig, so precedence is defaults < config file < flags.
struct Flags {
    std::string config;
    std::string model;
    std::string spec_file;
    std::string output;
    std::string reference;
    double gamma1 = 0.0, gamma2 = 0.0, tau = 0.0, omega = 0.0;
    double beta1 = 0.0, beta2 = 0.0, tol = 0.0;
    double sweep_min = 0.0, sweep_max = 0.0;
    int sweep_points = 0;
    bool sweep_log = false;
    double beta_ratio = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

void add_model_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON config file; explicit flags win");
    sub->add_option("--model", f.model, "twolevel | generic");
    sub->add_option("--spec-file", f.spec_file, "engine-spec JSON (generic model)");
    sub->add_option("--gamma1", f.gamma1, "field strength at t=0");
    sub->add_option("--gamma2", f.gamma2, "field strength at t=tau");
    sub->add_option("--tau", f.tau, "stroke duration");
    sub->add_option("--omega", f.omega, "rotation frequency (default pi/(2 tau))");
    sub->add_option("--beta1", f.beta1, "cold inverse temperature");
    sub->add_option("--beta2", f.beta2, "hot inverse temperature");
    sub->add_option("--tol", f.tol, "atom grouping tolerance");
    sub->add_option("-o,--output", f.output, "output path (default stdout)");
}

void add_sweep_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--min", f.sweep_min, "sweep lower end");
    sub->add_option("--max", f.sweep_max, "sweep upper end");
    sub->add_option("--points", f.sweep_points, "number of grid points");
    sub->add_flag("--log,!--no-log", f.sweep_log, "log-spaced grid");
}

void apply_flags(const CLI::App* sub, const Flags& f, RunConfig& cfg) {
    if (sub->count("--config")) io::apply_config_file(cfg, f.config);
    if (sub->count("--model")) cfg.model = f.model;
    if (sub->count("--spec-file")) {
        cfg.spec_file = f.spec_file;
        if (!sub->count("--model")) cfg.model = "generic";
    }
    if (sub->count("--gamma1")) cfg.twolevel.gamma1 = f.gamma1;
    if (sub->count("--gamma2")) cfg.twolevel.gamma2 = f.gamma2;
    if (sub->count("--tau")) {
        cfg.twolevel.tau = f.tau;
        cfg.tau_explicit = true;
    }
    if (sub->count("--omega")) cfg.twolevel.omega = f.omega;
    if (sub->count("--beta1")) cfg.twolevel.beta1 = f.beta1;
    if (sub->count("--beta2")) cfg.twolevel.beta2 = f.beta2;
    if (sub->count("--tol")) cfg.tol = f.tol;
    if (sub->count("-o")) cfg.output = f.output;
    if (sub->get_option_no_throw("--min") != nullptr) {
        if (sub->count("--min")) cfg.sweep.min = f.sweep_min;
        if (sub->count("--max")) cfg.sweep.max = f.sweep_max;
        if (sub->count("--points")) cfg.sweep.points = f.sweep_points;
        if (sub->count("--log") || sub->count("--no-log")) cfg.sweep.log_spaced = f.sweep_log;
    }
}

// -------------------------------------------------- value-atom helpers ---

double max_value_atom_discrepancy(const std::vector<ValueAtom>& a,
                                  const std::vector<ValueAtom>& b, double tol) {
    double worst = 0.0;
    std::vector<bool> matched(b.size(), false);
    for (const auto& atom : a) {
        bool found = false;
        for (size_t j = 0; j < b.size(); ++j) {
            if (!matched[j] && std::abs(atom.value - b[j].value) <= tol) {
                worst = std::max(worst, std::abs(atom.prob - b[j].prob));
                matched[j] = true;
                found = true;
                break;
            }
        }
        if (!found) worst = std::max(worst, atom.prob);
    }
    for (size_t j = 0; j < b.size(); ++j) {
        if (!matched[j]) worst = std::max(worst, b[j].prob);
    }
    return worst;
}

CheckResult make_check(std::string name, double residual, double tol,
                       std::string note = {}) {
    return {std::move(name), residual <= tol, residual, tol, std::move(note)};
}

void generic_spec_checks(const EngineSpec& spec, double tol,
                         std::vector<CheckResult>& checks) {
    const auto t_exp = transition_matrix(spec.u_expansion);
    const auto t_com = transition_matrix(spec.u_compression);
    double stochastic = 0.0;
    for (const auto* t : {&t_exp, &t_com}) {
        for (int i = 0; i < spec.dim(); ++i) {
            stochastic = std::max(stochastic, std::abs(t->row(i).sum() - 1.0));
            stochastic = std::max(stochastic, std::abs(t->col(i).sum() - 1.0));
        }
    }
    checks.push_back(make_check("transition_double_stochastic", stochastic, 1e-10));

    const auto joint = joint_distribution(spec, tol);
    checks.push_back(
        make_check("joint_normalization", std::abs(joint.total_mass() - 1.0), kMassTol));
    const auto eff = efficiency_distribution(joint, tol);
    checks.push_back(
        make_check("efficiency_normalization", std::abs(eff.total_mass() - 1.0), kMassTol));
    checks.push_back(make_check(
        "chain_rule_w1_marginal",
        max_value_atom_discrepancy(marginal_w1(joint), work1_distribution(spec, tol), tol),
        kMassTol));
}

} // namespace

std::vector<CheckResult> validation_suite(const RunConfig& cfg) {
    std::vector<CheckResult> checks;

    if (cfg.model == "generic") {
        const auto raw = io::load_engine_spec_raw(cfg.spec_file);
        auto defect = [](const ComplexMatrix& m) {
            return (m.adjoint() * m -
                    ComplexMatrix::Identity(m.rows(), m.cols()))
                .cwiseAbs()
                .maxCoeff();
        };
        const double worst = std::max(defect(raw.u_expansion), defect(raw.u_compression));
        checks.push_back(make_check("input_unitarity", worst, kUnitarityTol));
        if (!checks.back().pass) return checks;
        generic_spec_checks(io::load_engine_spec(cfg.spec_file), cfg.tol, checks);
        return checks;
    }
    if (cfg.model != "twolevel") throw InvalidInput("unknown model \"" + cfg.model + "\"");

    const twolevel::Params& base = cfg.twolevel;

    // Closed-form operator stays unitary along the stroke.
    {
        double worst = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double t = base.tau * i / 100.0;
            worst = std::max(worst,
                             twolevel::closed_form_unitary(base, t).unitarity_defect());
        }
        checks.push_back(make_check("unitary_consistency", worst, 1e-12));
    }

    // Closed-form distribution against the generic enumeration across a
    // driving-time grid.
    {
        std::vector<double> taus = {2.39, 7.18, base.tau};
        for (int i = 0; i < 51; ++i) taus.push_back(0.5 + 9.5 * i / 50.0);
        double worst_atom = 0.0;
        double worst_mass = 0.0;
        for (double tau : taus) {
            twolevel::Params p = base;
            p.tau = tau;
            const auto closed = twolevel::efficiency_distribution_closed(p, cfg.tol);
            const auto enumerated = efficiency_distribution(
                joint_distribution(twolevel::make_engine_spec(p), cfg.tol), cfg.tol);
            worst_atom =
                std::max(worst_atom, max_atom_discrepancy(closed, enumerated, cfg.tol));
            worst_mass = std::max({worst_mass, std::abs(closed.total_mass() - 1.0),
                                   std::abs(enumerated.total_mass() - 1.0)});
        }
        checks.push_back(make_check("closed_form_vs_enumeration", worst_atom, 1e-12));
        checks.push_back(make_check("distribution_normalization", worst_mass, 1e-12));
    }

    // Propagated stroke operators against the closed forms.
    {
        const auto u_closed = twolevel::expansion_unitary(base).matrix();
        const auto u_prop = prop::propagate(prop::expansion_protocol(base)).matrix();
        checks.push_back(make_check("propagator_vs_closed_form",
                                    (u_prop - u_closed).cwiseAbs().maxCoeff(), 1e-8));
        const auto t_exp = transition_matrix(Unitary(u_prop));
        const auto t_com =
            transition_matrix(prop::propagate(prop::compression_protocol(base)));
        checks.push_back(make_check("time_reversal_transitions",
                                    (t_com - t_exp).cwiseAbs().maxCoeff(), 1e-10));
    }

    // Covariance identity, covariance sign, and adiabatic moments at u = 1
    // across a temperature grid.
    {
        double worst_identity = 0.0;
        double min_cov = 0.0;
        double worst_moment = 0.0;
        for (double b1 : {0.2, 0.5, 1.0, 2.0, 5.0, 10.0}) {
            twolevel::Params p = base;
            p.tau = adiabatic_tau(p);
            p.omega.reset();
            p.beta1 = b1;
            p.beta2 = b1 / 10.0;
            const auto joint = joint_distribution(twolevel::make_engine_spec(p), cfg.tol);
            const auto cov = efficiency_heat_covariance(joint);
            if (cov.defined) {
                worst_identity = std::max(worst_identity, cov.identity_residual);
                min_cov = std::min(min_cov, cov.cov);
            }
            const auto moments = efficiency_moments(efficiency_distribution(joint, cfg.tol));
            if (moments.defined) {
                worst_moment =
                    std::max({worst_moment, std::abs(*moments.mean - twolevel::adiabatic_mean(p)),
                              std::abs(*moments.variance - twolevel::adiabatic_variance(p))});
            }
        }
        checks.push_back(make_check("covariance_identity", worst_identity, 1e-12));
        checks.push_back(make_check("covariance_nonnegative", std::max(0.0, -min_cov), 0.0));
        checks.push_back(make_check("adiabatic_moments", worst_moment, 1e-12));
    }

    // Engine bounds agree with the sign conditions on the mean energetics
    // over a driving-time sweep (1e-10 boundary tolerance).
    {
        int disagreements = 0;
        for (int i = 0; i <= 200; ++i) {
            twolevel::Params p = base;
            p.tau = 2.0 + 8.0 * i / 200.0;
            const auto d = twolevel::derive(p);
            const auto bounds = twolevel::engine_bounds(p);
            const auto conditions = engine_conditions(twolevel::make_engine_spec(p));
            if (conditions.is_engine != bounds.satisfied) {
                const double margin = std::min(std::abs(d.a_star - bounds.bound_heat),
                                               std::abs(d.a_star - bounds.bound_work));
                if (margin > 1e-10) ++disagreements;
            }
        }
        checks.push_back(
            make_check("engine_bounds_consistency", disagreements, 0.0, "tau in [2, 10]"));
    }

    generic_spec_checks(twolevel::make_engine_spec(base), cfg.tol, checks);
    return checks;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"quantum Otto engine efficiency statistics"};
    app.require_subcommand(1);

    Flags flags;
    auto* dist = app.add_subcommand("dist", "exact efficiency distribution (JSON)");
    add_model_flags(dist, flags);

    auto* sweep_tau =
        app.add_subcommand("sweep-tau", "driving-time sweep (CSV)");
    add_model_flags(sweep_tau, flags);
    add_sweep_flags(sweep_tau, flags);

    auto* sweep_beta =
        app.add_subcommand("sweep-beta", "inverse-temperature sweep at fixed ratio (CSV)");
    add_model_flags(sweep_beta, flags);
    add_sweep_flags(sweep_beta, flags);
    sweep_beta->add_option("--beta-ratio", flags.beta_ratio, "beta1/beta2 (default 10)");

    auto* sample = app.add_subcommand("sample", "Monte Carlo trajectories (JSON)");
    add_model_flags(sample, flags);
    sample->add_option("-n,--samples", flags.n_samples, "number of cycles");
    sample->add_option("--seed", flags.seed, "RNG seed");
    sample->add_option("--reference", flags.reference,
                       "dist artifact to test the samples against");

    auto* validate = app.add_subcommand("validate", "run the cross-check suite");
    add_model_flags(validate, flags);

    std::vector<const char*> argv;
    argv.push_back("qotto");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitSuccess : kExitUsage;
    }

    try {
        RunConfig cfg;
        if (app.got_subcommand(sweep_tau)) {
            cfg.sweep = {2.0, 10.0, 201, false};
        } else if (app.got_subcommand(sweep_beta)) {
            cfg.sweep = {0.1, 30.0, 61, true};
        }
        const CLI::App* sub = app.get_subcommands().front();
        apply_flags(sub, flags, cfg);
        if (app.got_subcommand(sweep_beta) && sub->count("--beta-ratio")) {
            cfg.beta_ratio = flags.beta_ratio;
        }
        if (app.got_subcommand(sample)) {
            if (sub->count("-n")) cfg.n_samples = flags.n_samples;
            if (sub->count("--seed")) cfg.seed = flags.seed;
            if (sub->count("--reference")) cfg.reference = flags.reference;
        }

        if (app.got_subcommand(dist)) return cmd_dist(cfg, out, err);
        if (app.got_subcommand(sweep_tau)) return cmd_sweep_tau(cfg, out, err);
        if (app.got_subcommand(sweep_beta)) return cmd_sweep_beta(cfg, out, err);
        if (app.got_subcommand(sample)) return cmd_sample(cfg, out, err);
        return cmd_validate(cfg, out, err);
    } catch (const SupportViolation& e) {
        err << "support violation: " << e.what() << '\n';
        return kExitSupport;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UndefinedResult& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

} // namespace qotto::cli
