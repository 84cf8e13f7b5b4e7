// sampler.cpp — trajectory sampling and goodness-of-fit statistics.

#include "qotto/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace qotto::mc {

namespace {

// 53-bit uniform in [0, 1); fixed mapping from raw generator output so the
// stream does not depend on the standard library's distribution internals.
double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> cumulative(const std::vector<double>& weights) {
    std::vector<double> cdf(weights.size());
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cdf[i] = acc;
    }
    return cdf;
}

int draw(const std::vector<double>& cdf, std::mt19937_64& rng) {
    const double r = uniform53(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    const auto idx = static_cast<size_t>(it - cdf.begin());
    return static_cast<int>(std::min(idx, cdf.size() - 1));
}

std::vector<std::vector<double>> row_cdfs(const RealMatrix& t) {
    std::vector<std::vector<double>> rows(static_cast<size_t>(t.rows()));
    for (Eigen::Index n = 0; n < t.rows(); ++n) {
        std::vector<double> w(static_cast<size_t>(t.cols()));
        for (Eigen::Index m = 0; m < t.cols(); ++m) w[static_cast<size_t>(m)] = t(n, m);
        rows[static_cast<size_t>(n)] = cumulative(w);
    }
    return rows;
}

// Regularized lower incomplete gamma P(s, x) by series (x < s + 1) or
// continued fraction (modified Lentz).
double regularized_gamma_p(double s, double x) {
    if (x < 0.0 || s <= 0.0) throw InvalidInput("regularized_gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double log_gamma = std::lgamma(s);
    if (x < s + 1.0) {
        double term = 1.0 / s;
        double sum = term;
        double a = s;
        for (int i = 0; i < 500; ++i) {
            a += 1.0;
            term *= x / a;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + s * std::log(x) - log_gamma);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + s * std::log(x) - log_gamma) * h;
    return 1.0 - q;
}

} // namespace

CycleSampler::CycleSampler(const EngineSpec& spec, double tol)
    : start_levels_(spec.spectrum_start.levels()),
      end_levels_(spec.spectrum_end.levels()),
      tol_(tol) {
    cdf_cold_ = cumulative(thermal_state(spec.spectrum_start, spec.beta_cold).weights);
    cdf_hot_ = cumulative(thermal_state(spec.spectrum_end, spec.beta_hot).weights);
    cdf_exp_rows_ = row_cdfs(transition_matrix(spec.u_expansion));
    cdf_com_rows_ = row_cdfs(transition_matrix(spec.u_compression));
}

CycleRecord CycleSampler::sample(std::mt19937_64& rng) const {
    CycleRecord rec;
    rec.n = draw(cdf_cold_, rng);
    rec.m = draw(cdf_exp_rows_[static_cast<size_t>(rec.n)], rng);
    rec.k = draw(cdf_hot_, rng);
    rec.l = draw(cdf_com_rows_[static_cast<size_t>(rec.k)], rng);
    rec.w1 = end_levels_[static_cast<size_t>(rec.m)] - start_levels_[static_cast<size_t>(rec.n)];
    rec.q2 = end_levels_[static_cast<size_t>(rec.k)] - end_levels_[static_cast<size_t>(rec.m)];
    rec.w3 = start_levels_[static_cast<size_t>(rec.l)] - end_levels_[static_cast<size_t>(rec.k)];
    rec.eta = stochastic_efficiency(rec.w1, rec.q2, rec.w3, tol_).eta;
    return rec;
}

CycleRecord sample_cycle(const EngineSpec& spec, std::mt19937_64& rng, double tol) {
    return CycleSampler(spec, tol).sample(rng);
}

EmpiricalDistribution estimate_efficiency_distribution(const EngineSpec& spec,
                                                       std::uint64_t n_samples,
                                                       std::uint64_t seed, double tol) {
    if (n_samples < 1) throw InvalidInput("estimate_efficiency_distribution: n_samples < 1");
    const CycleSampler sampler(spec, tol);
    const auto exact = efficiency_distribution(joint_distribution(spec, tol), tol);
    std::vector<double> support;
    for (const auto& a : exact.atoms) {
        if (a.eta.is_finite()) support.push_back(a.eta.value());
    }

    const auto snap = [&](ExtendedReal eta) {
        if (!eta.is_finite() || support.empty()) return eta;
        const double v = eta.value();
        auto it = std::lower_bound(support.begin(), support.end(), v);
        double best = it != support.end() ? *it : support.back();
        if (it != support.begin() && std::abs(*(it - 1) - v) < std::abs(best - v)) {
            best = *(it - 1);
        }
        return std::abs(best - v) <= tol ? ExtendedReal::finite(best) : eta;
    };

    std::mt19937_64 rng(seed);
    std::map<ExtendedReal, std::uint64_t> counts;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        counts[snap(sampler.sample(rng).eta)] += 1;
    }

    EmpiricalDistribution empirical;
    empirical.total = n_samples;
    empirical.seed = seed;
    empirical.atoms.reserve(counts.size());
    for (const auto& [value, count] : counts) empirical.atoms.push_back({value, count});
    return empirical;
}

GofReport goodness_of_fit(const EmpiricalDistribution& empirical,
                          const EfficiencyDistribution& exact) {
    if (empirical.total == 0) throw InvalidInput("goodness_of_fit: empty sample");
    const double n = static_cast<double>(empirical.total);

    std::vector<std::uint64_t> observed(exact.atoms.size(), 0);
    for (const auto& emp : empirical.atoms) {
        bool matched = false;
        for (size_t j = 0; j < exact.atoms.size(); ++j) {
            const auto& ex = exact.atoms[j].eta;
            if (emp.value.is_finite()
                    ? (ex.is_finite() &&
                       std::abs(ex.value() - emp.value.value()) <= exact.grouping_tol)
                    : ex == emp.value) {
                observed[j] += emp.count;
                matched = true;
                break;
            }
        }
        if (!matched) {
            std::ostringstream msg;
            msg << "goodness_of_fit: sampled value " << emp.value.str() << " (count "
                << emp.count << ") lies outside the exact support";
            throw SupportViolation(msg.str());
        }
    }

    GofReport report;
    int informative = 0;
    for (size_t j = 0; j < exact.atoms.size(); ++j) {
        const double expected = n * exact.atoms[j].prob;
        const double diff = static_cast<double>(observed[j]) - expected;
        report.tv_distance += std::abs(diff) / n;
        if (expected >= 5.0) {
            report.chi2_stat += diff * diff / expected;
            ++informative;
        }
    }
    report.tv_distance /= 2.0;
    report.dof = std::max(informative - 1, 0);
    return report;
}

double chi_squared_survival(double stat, int dof) {
    if (dof < 1) throw InvalidInput("chi_squared_survival: dof must be >= 1");
    if (!(stat >= 0.0)) throw InvalidInput("chi_squared_survival: stat must be >= 0");
    return 1.0 - regularized_gamma_p(dof / 2.0, stat / 2.0);
}

} // namespace qotto::mc
