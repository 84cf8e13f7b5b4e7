// sampler.hpp — Monte Carlo generation of single-cycle trajectories under the
// two-measurement scheme. The RNG is std::mt19937_64 (64-bit Mersenne
// Twister), seeded explicitly and drawn through a fixed 53-bit uniform map,
// so runs are bit-reproducible.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qotto/spectra.hpp"

namespace qotto::mc {

// One sampled cycle: the four measured level indices, the corresponding
// energy exchanges, and the per-cycle efficiency under the library-wide
// conventions.
struct CycleRecord {
    int n = 0;
    int m = 0;
    int k = 0;
    int l = 0;
    double w1 = 0.0;
    double q2 = 0.0;
    double w3 = 0.0;
    ExtendedReal eta = ExtendedReal::finite(0.0);
};

struct EmpiricalAtom {
    ExtendedReal value = ExtendedReal::finite(0.0);
    std::uint64_t count = 0;
};

struct EmpiricalDistribution {
    std::vector<EmpiricalAtom> atoms;  // sorted by value
    std::uint64_t total = 0;
    std::uint64_t seed = 0;
};

// Precomputes the categorical tables (thermal occupations and per-row
// transition probabilities) for repeated draws from one spec. Sampling draws
// by inverse CDF: n ~ thermal(beta_cold), m ~ row n of T_exp, k ~
// thermal(beta_hot) independent of m, l ~ row k of T_com.
class CycleSampler {
public:
    explicit CycleSampler(const EngineSpec& spec, double tol = kDefaultGroupingTol);

    CycleRecord sample(std::mt19937_64& rng) const;

private:
    std::vector<double> start_levels_;
    std::vector<double> end_levels_;
    double tol_;
    std::vector<double> cdf_cold_;
    std::vector<double> cdf_hot_;
    std::vector<std::vector<double>> cdf_exp_rows_;
    std::vector<std::vector<double>> cdf_com_rows_;
};

CycleRecord sample_cycle(const EngineSpec& spec, std::mt19937_64& rng,
                         double tol = kDefaultGroupingTol);

// Aggregates n_samples cycles into an empirical efficiency distribution;
// sampled values within tol of the exact support are snapped onto it.
EmpiricalDistribution estimate_efficiency_distribution(const EngineSpec& spec,
                                                       std::uint64_t n_samples,
                                                       std::uint64_t seed,
                                                       double tol = kDefaultGroupingTol);

struct GofReport {
    double tv_distance = 0.0;
    double chi2_stat = 0.0;
    int dof = 0;
};

// Total-variation distance over all atoms plus the Pearson statistic over
// atoms with expected count >= 5. Throws SupportViolation if the empirical
// support is not covered by the exact one.
GofReport goodness_of_fit(const EmpiricalDistribution& empirical,
                          const EfficiencyDistribution& exact);

// Upper tail P(X > stat) of the chi-squared distribution with dof degrees of
// freedom, via the regularized incomplete gamma function.
double chi_squared_survival(double stat, int dof);

} // namespace qotto::mc
