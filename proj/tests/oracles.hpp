// oracles.hpp — independent reference implementations used only by tests.
// These deliberately avoid the library's merging/stabilization machinery so
// they can serve as brute-force cross-checks.

#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include "qotto/spectra.hpp"

namespace oracle {

// Direct Boltzmann summation at extended precision, no shift stabilization.
inline std::vector<double> thermal_weights(const std::vector<double>& levels, double beta) {
    long double z = 0.0L;
    for (double e : levels) z += std::exp(-static_cast<long double>(beta) * e);
    std::vector<double> w;
    w.reserve(levels.size());
    for (double e : levels) {
        w.push_back(static_cast<double>(std::exp(-static_cast<long double>(beta) * e) / z));
    }
    return w;
}

// Brute-force four-index enumeration of the cycle statistics. Keys are exact
// doubles: identical outcomes coming from symmetric index paths produce
// bit-identical energies, so no tolerance bucketing is needed for the spectra
// used in tests.
struct BruteForce {
    std::map<std::array<double, 3>, double> joint;  // (w1, q2, w3) -> prob
    // eta classes: 0 = minus_inf bucket, 1 = finite, 2 = plus_inf bucket
    std::map<std::pair<int, double>, double> eta;
    double zero_over_zero = 0.0;
    double mean_w1 = 0.0, mean_q2 = 0.0, mean_w3 = 0.0;
};

inline BruteForce enumerate_cycle(const qotto::EngineSpec& spec, double tol) {
    const auto& e0 = spec.spectrum_start.levels();
    const auto& et = spec.spectrum_end.levels();
    const auto p0 = thermal_weights(e0, spec.beta_cold);
    const auto pt = thermal_weights(et, spec.beta_hot);
    const auto& u_exp = spec.u_expansion.matrix();
    const auto& u_com = spec.u_compression.matrix();
    const int d = spec.dim();

    BruteForce bf;
    for (int n = 0; n < d; ++n) {
        for (int m = 0; m < d; ++m) {
            const double t_nm = std::norm(u_exp(m, n));
            for (int k = 0; k < d; ++k) {
                for (int l = 0; l < d; ++l) {
                    const double prob = p0[static_cast<size_t>(n)] * t_nm *
                                        pt[static_cast<size_t>(k)] *
                                        std::norm(u_com(l, k));
                    if (prob == 0.0) continue;
                    const double w1 = et[static_cast<size_t>(m)] - e0[static_cast<size_t>(n)];
                    const double q2 = et[static_cast<size_t>(k)] - et[static_cast<size_t>(m)];
                    const double w3 = e0[static_cast<size_t>(l)] - et[static_cast<size_t>(k)];
                    bf.joint[{w1, q2, w3}] += prob;
                    bf.mean_w1 += prob * w1;
                    bf.mean_q2 += prob * q2;
                    bf.mean_w3 += prob * w3;
                    const double work_out = -(w1 + w3);
                    if (std::abs(q2) <= tol) {
                        if (std::abs(work_out) <= tol) {
                            bf.eta[{1, 0.0}] += prob;
                            bf.zero_over_zero += prob;
                        } else if (work_out > 0.0) {
                            bf.eta[{2, 0.0}] += prob;
                        } else {
                            bf.eta[{0, 0.0}] += prob;
                        }
                    } else {
                        bf.eta[{1, work_out / q2}] += prob;
                    }
                }
            }
        }
    }
    return bf;
}

// Probability of one eta atom in the brute-force map, merging keys within tol
// of the requested value.
inline double eta_mass(const BruteForce& bf, const qotto::ExtendedReal& eta, double tol) {
    double mass = 0.0;
    for (const auto& [key, prob] : bf.eta) {
        const auto& [cls, value] = key;
        const bool match = eta.is_minus_inf() ? cls == 0
                           : eta.is_plus_inf()
                               ? cls == 2
                               : cls == 1 && std::abs(value - eta.value()) <= tol;
        if (match) mass += prob;
    }
    return mass;
}

// ---------------------------------------------------------------- random ---

inline std::vector<double> random_spectrum(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    std::vector<double> levels(static_cast<size_t>(d));
    for (auto& e : levels) e = uni(rng);
    std::sort(levels.begin(), levels.end());
    return levels;
}

// Haar-ish unitary: QR of a complex Gaussian matrix with the R-diagonal phase
// correction.
inline qotto::ComplexMatrix random_unitary(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    qotto::ComplexMatrix g(d, d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            g(r, c) = std::complex<double>(gauss(rng), gauss(rng));
        }
    }
    Eigen::HouseholderQR<qotto::ComplexMatrix> qr(g);
    qotto::ComplexMatrix q = qr.householderQ();
    const qotto::ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < d; ++c) {
        const auto pivot = r(c, c);
        q.col(c) *= std::abs(pivot) > 0.0 ? pivot / std::abs(pivot) : 1.0;
    }
    return q;
}

inline qotto::EngineSpec random_spec(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> beta_dist(0.05, 4.0);
    return qotto::EngineSpec(qotto::EnergySpectrum(random_spectrum(d, rng)),
                             qotto::EnergySpectrum(random_spectrum(d, rng)),
                             qotto::Unitary(random_unitary(d, rng)),
                             qotto::Unitary(random_unitary(d, rng)),
                             beta_dist(rng), beta_dist(rng));
}

} // namespace oracle
