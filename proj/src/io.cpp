// io.cpp — config loading, artifact emission and parsing.

#include "qotto/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

namespace qotto::io {

namespace {

using nlohmann::json;

// Minimal streaming JSON emitter with fixed 17-significant-digit numbers.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& out) : out_(out) {}

    JsonWriter& begin_object() { return open('{', /*array=*/false); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('[', /*array=*/true); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(const std::string& k) {
        prepare();
        out_ << '"' << escaped(k) << "\": ";
        pending_value_ = true;
        return *this;
    }
    JsonWriter& value(double v) {
        prepare();
        out_ << format_double(v);
        return *this;
    }
    JsonWriter& value(std::uint64_t v) {
        prepare();
        out_ << v;
        return *this;
    }
    JsonWriter& value(int v) {
        prepare();
        out_ << v;
        return *this;
    }
    JsonWriter& value(bool v) {
        prepare();
        out_ << (v ? "true" : "false");
        return *this;
    }
    JsonWriter& value(const std::string& v) {
        prepare();
        out_ << '"' << escaped(v) << '"';
        return *this;
    }
    JsonWriter& value(const ExtendedReal& v) {
        if (v.is_finite()) return value(v.value());
        return value(std::string(v.is_plus_inf() ? "+inf" : "-inf"));
    }
    void finish() { out_ << '\n'; }

private:
    struct Level {
        bool array = false;
        int items = 0;
    };

    static std::string escaped(const std::string& s) {
        std::string r;
        for (char c : s) {
            if (c == '"' || c == '\\') {
                r += '\\';
                r += c;
            } else if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                r += buf;
            } else {
                r += c;
            }
        }
        return r;
    }

    void indent() {
        out_ << '\n' << std::string(2 * stack_.size(), ' ');
    }

    void prepare() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        if (!stack_.empty()) {
            if (stack_.back().items > 0) out_ << ',';
            ++stack_.back().items;
            indent();
        }
    }

    JsonWriter& open(char c, bool array) {
        prepare();
        out_ << c;
        stack_.push_back({array, 0});
        return *this;
    }

    JsonWriter& close(char c) {
        const bool had_items = stack_.back().items > 0;
        stack_.pop_back();
        if (had_items) indent();
        out_ << c;
        return *this;
    }

    std::ostream& out_;
    std::vector<Level> stack_;
    bool pending_value_ = false;
};

json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InvalidInput("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

ComplexMatrix parse_complex_matrix(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw InvalidInput(what + ": expected matrix rows");
    const auto d = j.size();
    ComplexMatrix m(d, d);
    for (size_t r = 0; r < d; ++r) {
        if (!j[r].is_array() || j[r].size() != d) {
            throw InvalidInput(what + ": matrix must be square");
        }
        for (size_t c = 0; c < d; ++c) {
            const auto& cell = j[r][c];
            if (!cell.is_array() || cell.size() != 2) {
                throw InvalidInput(what + ": entries must be [re, im] pairs");
            }
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                std::complex<double>(cell[0].get<double>(), cell[1].get<double>());
        }
    }
    return m;
}

ExtendedReal parse_eta(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "+inf") return ExtendedReal::plus_inf();
        if (s == "-inf") return ExtendedReal::minus_inf();
        throw InvalidInput("dist artifact: unrecognized eta string \"" + s + "\"");
    }
    return ExtendedReal::finite(j.get<double>());
}

void write_params(JsonWriter& w, const RunConfig& cfg) {
    w.key("params").begin_object();
    w.key("model").value(cfg.model);
    if (cfg.model == "twolevel") {
        const auto d = twolevel::derive(cfg.twolevel);
        w.key("gamma1").value(cfg.twolevel.gamma1);
        w.key("gamma2").value(cfg.twolevel.gamma2);
        w.key("tau").value(cfg.twolevel.tau);
        w.key("omega").value(d.omega);
        w.key("beta1").value(cfg.twolevel.beta1);
        w.key("beta2").value(cfg.twolevel.beta2);
        w.key("nu0").value(d.nu0);
        w.key("nu_tau").value(d.nu_tau);
        w.key("u").value(d.u);
        w.key("a_star").value(d.a_star);
    } else {
        w.key("spec_file").value(cfg.spec_file);
    }
    w.key("tol").value(cfg.tol);
    w.end_object();
}

// Empty string for undefined cells; CSVs never carry sentinel numbers.
std::string cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

} // namespace

void apply_config_file(RunConfig& cfg, const std::string& path) {
    const json j = parse_json_file(path);
    if (!j.is_object()) throw InvalidInput("config must be a JSON object: " + path);
    try {
        if (j.contains("model")) cfg.model = j["model"].get<std::string>();
        if (j.contains("gamma1")) cfg.twolevel.gamma1 = j["gamma1"].get<double>();
        if (j.contains("gamma2")) cfg.twolevel.gamma2 = j["gamma2"].get<double>();
        if (j.contains("tau")) {
            cfg.twolevel.tau = j["tau"].get<double>();
            cfg.tau_explicit = true;
        }
        if (j.contains("omega")) cfg.twolevel.omega = j["omega"].get<double>();
        if (j.contains("beta1")) cfg.twolevel.beta1 = j["beta1"].get<double>();
        if (j.contains("beta2")) cfg.twolevel.beta2 = j["beta2"].get<double>();
        if (j.contains("spec_file")) cfg.spec_file = j["spec_file"].get<std::string>();
        if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
        if (j.contains("sweep_min")) cfg.sweep.min = j["sweep_min"].get<double>();
        if (j.contains("sweep_max")) cfg.sweep.max = j["sweep_max"].get<double>();
        if (j.contains("sweep_points")) cfg.sweep.points = j["sweep_points"].get<int>();
        if (j.contains("sweep_log")) cfg.sweep.log_spaced = j["sweep_log"].get<bool>();
        if (j.contains("beta_ratio")) cfg.beta_ratio = j["beta_ratio"].get<double>();
        if (j.contains("n_samples")) cfg.n_samples = j["n_samples"].get<std::uint64_t>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("reference")) cfg.reference = j["reference"].get<std::string>();
        if (j.contains("output")) cfg.output = j["output"].get<std::string>();
    } catch (const json::exception& e) {
        throw InvalidInput("bad config value in " + path + ": " + e.what());
    }
}

RawEngineSpecFile load_engine_spec_raw(const std::string& path) {
    const json j = parse_json_file(path);
    try {
        RawEngineSpecFile raw;
        raw.spectrum_start = j.at("spectrum_start").get<std::vector<double>>();
        raw.spectrum_end = j.at("spectrum_end").get<std::vector<double>>();
        raw.u_expansion = parse_complex_matrix(j.at("u_expansion"), "u_expansion");
        raw.u_compression = parse_complex_matrix(j.at("u_compression"), "u_compression");
        raw.beta_cold = j.at("beta_cold").get<double>();
        raw.beta_hot = j.at("beta_hot").get<double>();
        return raw;
    } catch (const json::exception& e) {
        throw InvalidInput("bad engine spec in " + path + ": " + e.what());
    }
}

EngineSpec load_engine_spec(const std::string& path) {
    auto raw = load_engine_spec_raw(path);
    return EngineSpec(EnergySpectrum(std::move(raw.spectrum_start)),
                      EnergySpectrum(std::move(raw.spectrum_end)),
                      Unitary(std::move(raw.u_expansion)),
                      Unitary(std::move(raw.u_compression)), raw.beta_cold, raw.beta_hot);
}

EngineSpec make_spec(const RunConfig& cfg) {
    if (cfg.model == "twolevel") return twolevel::make_engine_spec(cfg.twolevel);
    if (cfg.model == "generic") {
        if (cfg.spec_file.empty()) {
            throw InvalidInput("generic model requires a spec_file");
        }
        return load_engine_spec(cfg.spec_file);
    }
    throw InvalidInput("unknown model \"" + cfg.model + "\"");
}

double grid_point(const SweepRange& range, int i) {
    if (range.points < 1 || range.min > range.max || !std::isfinite(range.min) ||
        !std::isfinite(range.max)) {
        throw InvalidInput("sweep range must be nonempty and ordered");
    }
    if (range.points == 1) return range.min;
    const double f = static_cast<double>(i) / (range.points - 1);
    if (range.log_spaced) {
        if (range.min <= 0.0) throw InvalidInput("log-spaced sweep requires min > 0");
        return range.min * std::pow(range.max / range.min, f);
    }
    return range.min + (range.max - range.min) * f;
}

std::string format_double(double v) {
    if (!std::isfinite(v)) throw InvalidInput("format_double: non-finite value");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::filesystem::path resolve_output_path(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(kOutputDirEnvVar); dir && *dir) {
            p = std::filesystem::path(dir) / p;
        }
    }
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    return p;
}

// ------------------------------------------------------- JSON artifacts ---

void write_dist_artifact(std::ostream& out, const RunConfig& cfg,
                         const EfficiencyDistribution& dist, const MomentReport& moments) {
    JsonWriter w(out);
    w.begin_object();
    w.key("command").value(std::string("dist"));
    write_params(w, cfg);
    w.key("support").begin_array();
    for (const auto& atom : dist.atoms) {
        w.begin_object();
        w.key("eta").value(atom.eta);
        w.key("prob").value(atom.prob);
        w.end_object();
    }
    w.end_array();
    w.key("zero_over_zero_mass").value(dist.zero_over_zero_weight);
    w.key("moments").begin_object();
    w.key("defined").value(moments.defined);
    w.key("infinity_mass").value(moments.infinity_mass);
    if (moments.defined) {
        w.key("mean").value(*moments.mean);
        w.key("variance").value(*moments.variance);
    }
    w.end_object();
    w.end_object();
    w.finish();
}

DistArtifact read_dist_artifact(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("malformed dist artifact: ") + e.what());
    }
    try {
        DistArtifact artifact;
        for (const auto& atom : j.at("support")) {
            artifact.dist.atoms.push_back(
                {parse_eta(atom.at("eta")), atom.at("prob").get<double>()});
        }
        artifact.dist.zero_over_zero_weight = j.at("zero_over_zero_mass").get<double>();
        if (j.contains("params") && j["params"].contains("tol")) {
            artifact.dist.grouping_tol = j["params"]["tol"].get<double>();
        }
        const auto& m = j.at("moments");
        artifact.moments.defined = m.at("defined").get<bool>();
        artifact.moments.infinity_mass = m.at("infinity_mass").get<double>();
        if (artifact.moments.defined) {
            artifact.moments.mean = m.at("mean").get<double>();
            artifact.moments.variance = m.at("variance").get<double>();
        }
        return artifact;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("bad dist artifact: ") + e.what());
    }
}

DistArtifact read_dist_artifact_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path);
    return read_dist_artifact(in);
}

void write_sample_artifact(std::ostream& out, const RunConfig& cfg,
                           const mc::EmpiricalDistribution& empirical,
                           const EfficiencyDistribution& reference,
                           const mc::GofReport& gof, double p_value) {
    JsonWriter w(out);
    w.begin_object();
    w.key("command").value(std::string("sample"));
    write_params(w, cfg);
    w.key("rng").value(std::string("mt19937_64"));
    w.key("seed").value(empirical.seed);
    w.key("n_samples").value(empirical.total);
    w.key("empirical").begin_array();
    for (const auto& atom : empirical.atoms) {
        w.begin_object();
        w.key("eta").value(atom.value);
        w.key("count").value(atom.count);
        w.end_object();
    }
    w.end_array();
    w.key("exact").begin_array();
    for (const auto& atom : reference.atoms) {
        w.begin_object();
        w.key("eta").value(atom.eta);
        w.key("prob").value(atom.prob);
        w.end_object();
    }
    w.end_array();
    w.key("tv_distance").value(gof.tv_distance);
    w.key("chi2").begin_object();
    w.key("stat").value(gof.chi2_stat);
    w.key("dof").value(gof.dof);
    w.key("p_value").value(p_value);
    w.key("rejected_at_0_001").value(p_value < 0.001);
    w.end_object();
    w.end_object();
    w.finish();
}

void write_support_violation(std::ostream& out, const RunConfig& cfg,
                             const std::string& message) {
    JsonWriter w(out);
    w.begin_object();
    w.key("command").value(std::string("sample"));
    write_params(w, cfg);
    w.key("error").value(std::string("support-violation"));
    w.key("detail").value(message);
    w.end_object();
    w.finish();
}

// -------------------------------------------------------- CSV artifacts ---

void write_sweep_tau_csv(std::ostream& out, const RunConfig& cfg) {
    out << "tau,omega,nu0,nu_tau,u,a_star,eta_th,mean_eta,is_engine,bound14,bound15\n";
    for (int i = 0; i < cfg.sweep.points; ++i) {
        twolevel::Params p = cfg.twolevel;
        p.tau = grid_point(cfg.sweep, i);
        const auto d = twolevel::derive(p);
        const auto bounds = twolevel::engine_bounds(p);
        std::optional<double> eta;
        try {
            eta = twolevel::eta_th(p);
        } catch (const UndefinedResult&) {
        }
        std::optional<double> mean_eta;
        if (std::abs(d.u - 1.0) < twolevel::kAdiabaticGate) {
            mean_eta = twolevel::adiabatic_mean(p);
        }
        out << format_double(p.tau) << ',' << format_double(d.omega) << ','
            << format_double(d.nu0) << ',' << format_double(d.nu_tau) << ','
            << format_double(d.u) << ',' << format_double(d.a_star) << ',' << cell(eta)
            << ',' << cell(mean_eta) << ',' << (bounds.satisfied ? 1 : 0) << ','
            << format_double(bounds.bound_heat) << ',' << format_double(bounds.bound_work)
            << '\n';
    }
}

void write_sweep_beta_csv(std::ostream& out, const RunConfig& cfg) {
    if (!(cfg.beta_ratio > 0.0) || !std::isfinite(cfg.beta_ratio)) {
        throw InvalidInput("sweep-beta: beta ratio must be finite and > 0");
    }
    out << "beta1,beta2,mean_eta,mean_high_limit,mean_low_limit,variance,"
           "var_high_limit,var_low_limit,cov_q2_eta,eta_th\n";
    for (int i = 0; i < cfg.sweep.points; ++i) {
        twolevel::Params p = cfg.twolevel;
        p.beta1 = grid_point(cfg.sweep, i);
        p.beta2 = p.beta1 / cfg.beta_ratio;
        const auto d = twolevel::derive(p);
        const bool adiabatic = std::abs(d.u - 1.0) < twolevel::kAdiabaticGate;
        std::optional<double> mean_eta;
        std::optional<double> variance;
        if (adiabatic) {
            mean_eta = twolevel::adiabatic_mean(p);
            variance = twolevel::adiabatic_variance(p);
        }
        const auto mean_limits = twolevel::adiabatic_mean_limits(p);
        const auto var_limits = twolevel::adiabatic_variance_limits(p);
        std::optional<double> cov;
        try {
            const auto report =
                efficiency_heat_covariance(joint_distribution(twolevel::make_engine_spec(p), cfg.tol));
            if (report.defined) cov = report.cov;
        } catch (const UndefinedResult&) {
        }
        std::optional<double> eta;
        try {
            eta = twolevel::eta_th(p);
        } catch (const UndefinedResult&) {
        }
        out << format_double(p.beta1) << ',' << format_double(p.beta2) << ','
            << cell(mean_eta) << ',' << format_double(mean_limits.high_t) << ','
            << format_double(mean_limits.low_t) << ',' << cell(variance) << ','
            << format_double(var_limits.high_t) << ',' << format_double(var_limits.low_t)
            << ',' << cell(cov) << ',' << cell(eta) << '\n';
    }
}

} // namespace qotto::io
