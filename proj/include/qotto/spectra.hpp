// spectra.hpp — finite-dimensional two-measurement machinery for quantum Otto
// cycles: thermal occupations, stroke transition probabilities, the joint
// (W1, Q2, W3) distribution, the stochastic-efficiency distribution on the
// extended real line, moments, and engine-operation checks.
//
// Conventions: hbar = k_B = 1 throughout; energies and inverse temperatures
// are dimensionless. All operations are pure functions of immutable inputs.

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "qotto/errors.hpp"
#include "qotto/extended_real.hpp"

namespace qotto {

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

// Absolute tolerance used to merge nearby atoms (energies and efficiency
// values); degenerate outcomes from distinct measurement paths must collapse
// deterministically.
inline constexpr double kDefaultGroupingTol = 1e-9;
// Construction tolerance for ||U†U - I||_max.
inline constexpr double kUnitarityTol = 1e-10;
// Total-mass tolerance for normalized discrete distributions.
inline constexpr double kMassTol = 1e-12;
// Infinity mass below this threshold is floating-point dust and does not
// undefine moments.
inline constexpr double kMomentDefinednessTol = 1e-12;

// ---------------------------------------------------------------- types ---

// Energy eigenvalues at one end of a driving stroke, sorted ascending.
class EnergySpectrum {
public:
    explicit EnergySpectrum(std::vector<double> levels);

    int dim() const { return static_cast<int>(levels_.size()); }
    double operator[](int n) const { return levels_[static_cast<size_t>(n)]; }
    const std::vector<double>& levels() const { return levels_; }

private:
    std::vector<double> levels_;
};

// Stroke evolution operator expressed in the energy-level labeling of the
// associated spectra: |entries(m, n)|^2 is the n -> m transition probability.
class Unitary {
public:
    explicit Unitary(ComplexMatrix entries, double tol = kUnitarityTol);

    static Unitary identity(int dim);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const ComplexMatrix& matrix() const { return entries_; }

    // ||U†U - I||_max, recomputed on demand.
    double unitarity_defect() const;

private:
    ComplexMatrix entries_;
};

// Boltzmann occupation of a spectrum. Weights are computed with the minimum
// energy factored out so that large beta*E never overflows.
struct ThermalState {
    double beta = 0.0;
    std::vector<double> weights;
    // Z itself can overflow for extreme beta*|E|; log_partition_function is
    // always finite.
    double partition_function = 0.0;
    double log_partition_function = 0.0;
};

// Full input of the four-stroke cycle: spectra at both stroke ends, the two
// stroke unitaries, and the two bath inverse temperatures.
struct EngineSpec {
    EngineSpec(EnergySpectrum spectrum_start, EnergySpectrum spectrum_end,
               Unitary u_expansion, Unitary u_compression,
               double beta_cold, double beta_hot);

    EnergySpectrum spectrum_start;  // E^0
    EnergySpectrum spectrum_end;    // E^tau
    Unitary u_expansion;
    Unitary u_compression;
    double beta_cold;  // beta_1
    double beta_hot;   // beta_2

    int dim() const { return spectrum_start.dim(); }
};

// Non-fatal diagnostics: the machinery evaluates non-engine parameter points
// (sweeps cross the boundary), so regime violations warn instead of throwing.
std::vector<std::string> regime_warnings(const EngineSpec& spec);

struct JointAtom {
    double w1 = 0.0;
    double q2 = 0.0;
    double w3 = 0.0;
    double prob = 0.0;
};

// Atomic joint distribution of (W1, Q2, W3) over one cycle.
struct JointDistribution {
    std::vector<JointAtom> atoms;  // lexicographically sorted by (w1, q2, w3)
    double grouping_tol = kDefaultGroupingTol;

    double total_mass() const;
    // Throws InvalidInput unless probs >= 0 and total mass is 1 within
    // kMassTol.
    void validate() const;
};

// One atom of a distribution over a real-valued quantity.
struct ValueAtom {
    double value = 0.0;
    double prob = 0.0;
};

struct EfficiencyAtom {
    ExtendedReal eta = ExtendedReal::finite(0.0);
    double prob = 0.0;
};

// Atomic distribution of the stochastic efficiency on R ∪ {±inf}.
// zero_over_zero_weight reports the mass routed to eta = 0 by the 0/0
// convention so the convention stays auditable.
struct EfficiencyDistribution {
    std::vector<EfficiencyAtom> atoms;  // sorted: -inf, finite ascending, +inf
    double zero_over_zero_weight = 0.0;
    double grouping_tol = kDefaultGroupingTol;

    double total_mass() const;
    double infinity_mass() const;
    void validate() const;
};

// Mean/variance with an explicit definedness flag: any non-negligible mass at
// ±inf leaves the moments undefined.
struct MomentReport {
    std::optional<double> mean;
    std::optional<double> variance;
    bool defined = false;
    double infinity_mass = 0.0;
};

struct EngineConditions {
    bool heat_in_positive = false;   // <Q2> > 0
    bool work_out_positive = false;  // -(<W1> + <W3>) > 0
    bool is_engine = false;
};

struct CovarianceReport {
    double cov = 0.0;                // Cov(Q2, eta)
    double identity_residual = 0.0;  // |<eta> - eta_th + cov/<Q2>|
    bool defined = false;
};

// ----------------------------------------------------------- operations ---

// Boltzmann weights exp(-beta E_n)/Z, shift-stabilized.
ThermalState thermal_state(const EnergySpectrum& spectrum, double beta);

// T(n, m) = |<m|U|n>|^2. Doubly stochastic within kUnitarityTol.
RealMatrix transition_matrix(const Unitary& u);

// Distribution of the expansion work W1 = E_m^tau - E_n^0.
std::vector<ValueAtom> work1_distribution(const EngineSpec& spec,
                                          double grouping_tol = kDefaultGroupingTol);

// Joint distribution over the quadruple sum of measurement paths
// (n, m, k, l); the post-isochore level k is Boltzmann-distributed at
// beta_hot independently of m (full rethermalization).
JointDistribution joint_distribution(const EngineSpec& spec,
                                     double grouping_tol = kDefaultGroupingTol);

// Marginals of the joint distribution, merged on the kept coordinate.
std::vector<ValueAtom> marginal_w1(const JointDistribution& joint);
std::vector<ValueAtom> marginal_q2(const JointDistribution& joint);
std::vector<ValueAtom> marginal_w3(const JointDistribution& joint);

// Per-cycle efficiency of one outcome, with the conventions used everywhere
// in this library: |Q2| <= tol counts as zero heat; then zero work output
// maps to eta = 0 (the 0/0 rule) and nonzero work output to sign(-W)·inf.
struct EfficiencyValue {
    ExtendedReal eta = ExtendedReal::finite(0.0);
    bool zero_over_zero = false;
};
EfficiencyValue stochastic_efficiency(double w1, double q2, double w3, double tol);

// eta = -(W1+W3)/Q2 pushed through the joint distribution; finite atoms are
// merged within tol.
EfficiencyDistribution efficiency_distribution(const JointDistribution& joint, double tol);
// Same, with tol = joint.grouping_tol.
EfficiencyDistribution efficiency_distribution(const JointDistribution& joint);

double mean_work1(const EngineSpec& spec);
double mean_work3(const EngineSpec& spec);
double mean_heat2(const EngineSpec& spec);

// eta_th = -(<W1> + <W3>)/<Q2>. Throws UndefinedResult when |<Q2>| < kMassTol.
double thermodynamic_efficiency(const EngineSpec& spec);

EngineConditions engine_conditions(const EngineSpec& spec);

// Moments of an efficiency distribution; defined only when the mass at ±inf
// is below kMomentDefinednessTol.
MomentReport efficiency_moments(const EfficiencyDistribution& dist);

// Cov(Q2, eta) together with the residual of the identity
// <eta> = eta_th - Cov(Q2, eta)/<Q2>. Undefined whenever the efficiency
// moments are undefined.
CovarianceReport efficiency_heat_covariance(const JointDistribution& joint);

// Max probability discrepancy between two efficiency distributions, aligning
// atoms within tol and treating missing atoms as zero mass.
double max_atom_discrepancy(const EfficiencyDistribution& a,
                            const EfficiencyDistribution& b,
                            double tol = kDefaultGroupingTol);

} // namespace qotto
