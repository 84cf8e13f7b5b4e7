// io.hpp — run configuration and artifact schemas (JSON and CSV) shared by
// the command-line front end and its tests. JSON artifacts serialize numbers
// with 17 significant digits, so re-reading reproduces the in-memory values
// bit for bit; infinities are serialized as the strings "+inf"/"-inf".

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "qotto/sampler.hpp"
#include "qotto/spectra.hpp"
#include "qotto/twolevel.hpp"

namespace qotto::io {

// Environment variable providing the default directory for relative output
// paths.
inline constexpr const char* kOutputDirEnvVar = "QOTTO_OUTPUT_DIR";

struct SweepRange {
    double min = 2.0;
    double max = 10.0;
    int points = 201;
    bool log_spaced = false;
};

// One structured config per invocation; a JSON config file may fill any field
// and explicit command-line flags win over it.
struct RunConfig {
    std::string model = "twolevel";  // "twolevel" | "generic"
    twolevel::Params twolevel;
    bool tau_explicit = false;  // whether tau came from config/flags
    std::string spec_file;      // generic model: engine-spec JSON path
    double tol = kDefaultGroupingTol;
    SweepRange sweep;
    double beta_ratio = 10.0;  // beta1/beta2 along beta sweeps
    std::uint64_t n_samples = 1000000;
    std::uint64_t seed = 42;
    std::string reference;  // optional dist artifact to test samples against
    std::string output;     // empty -> stdout
};

// Applies the keys present in a JSON config file on top of cfg.
void apply_config_file(RunConfig& cfg, const std::string& path);

// Engine spec from the generic-model JSON schema:
//   { "spectrum_start": [...], "spectrum_end": [...],
//     "u_expansion": [[[re, im], ...], ...], "u_compression": ...,
//     "beta_cold": ..., "beta_hot": ... }
EngineSpec load_engine_spec(const std::string& path);

// Same file, parsed without the unitarity check so validation can report the
// defect instead of refusing the input.
struct RawEngineSpecFile {
    std::vector<double> spectrum_start;
    std::vector<double> spectrum_end;
    ComplexMatrix u_expansion;
    ComplexMatrix u_compression;
    double beta_cold = 0.0;
    double beta_hot = 0.0;
};
RawEngineSpecFile load_engine_spec_raw(const std::string& path);

// Spec for cfg.model, either assembled from the two-level closed forms or
// loaded from cfg.spec_file.
EngineSpec make_spec(const RunConfig& cfg);

// Grid point i of a sweep range (log- or linearly spaced).
double grid_point(const SweepRange& range, int i);

// printf %.17g
std::string format_double(double v);

// Relative paths resolve under QOTTO_OUTPUT_DIR when set; parent directories
// are created.
std::filesystem::path resolve_output_path(const std::string& path);

// ------------------------------------------------------- JSON artifacts ---

void write_dist_artifact(std::ostream& out, const RunConfig& cfg,
                         const EfficiencyDistribution& dist, const MomentReport& moments);

struct DistArtifact {
    EfficiencyDistribution dist;
    MomentReport moments;
};
DistArtifact read_dist_artifact(std::istream& in);
DistArtifact read_dist_artifact_file(const std::string& path);

void write_sample_artifact(std::ostream& out, const RunConfig& cfg,
                           const mc::EmpiricalDistribution& empirical,
                           const EfficiencyDistribution& reference,
                           const mc::GofReport& gof, double p_value);

// Diagnostic payload emitted when sampled values escape the reference
// support.
void write_support_violation(std::ostream& out, const RunConfig& cfg,
                             const std::string& message);

// -------------------------------------------------------- CSV artifacts ---

// Columns: tau,omega,nu0,nu_tau,u,a_star,eta_th,mean_eta,is_engine,bound14,bound15
// mean_eta is empty off the adiabatic points; eta_th is empty on the
// vanishing-heat boundary; booleans serialize as 1/0.
void write_sweep_tau_csv(std::ostream& out, const RunConfig& cfg);

// Columns: beta1,beta2,mean_eta,mean_high_limit,mean_low_limit,variance,
//          var_high_limit,var_low_limit,cov_q2_eta,eta_th
void write_sweep_beta_csv(std::ostream& out, const RunConfig& cfg);

} // namespace qotto::io
