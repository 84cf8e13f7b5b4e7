// spectra.cpp — core two-measurement statistics of the Otto cycle.

#include "qotto/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qotto {

namespace {

// Greedy tolerance grouping of sorted values: a new group starts whenever the
// value drifts more than tol away from the group's representative (its first,
// i.e. smallest, element). Exact ties always land in the same group.
template <typename T, typename ValueFn>
std::vector<std::pair<size_t, size_t>> group_sorted(const std::vector<T>& items,
                                                    ValueFn value_of, double tol) {
    std::vector<std::pair<size_t, size_t>> ranges;
    size_t begin = 0;
    for (size_t i = 1; i <= items.size(); ++i) {
        if (i == items.size() || value_of(items[i]) - value_of(items[begin]) > tol) {
            ranges.emplace_back(begin, i);
            begin = i;
        }
    }
    return ranges;
}

std::vector<ValueAtom> merge_value_atoms(std::vector<ValueAtom> atoms, double tol) {
    std::erase_if(atoms, [](const ValueAtom& a) { return a.prob == 0.0; });
    std::sort(atoms.begin(), atoms.end(),
              [](const ValueAtom& a, const ValueAtom& b) { return a.value < b.value; });
    std::vector<ValueAtom> merged;
    for (auto [b, e] : group_sorted(atoms, [](const ValueAtom& a) { return a.value; }, tol)) {
        ValueAtom m{atoms[b].value, 0.0};
        for (size_t i = b; i < e; ++i) m.prob += atoms[i].prob;
        merged.push_back(m);
    }
    return merged;
}

double mean_of_joint(const JointDistribution& joint, double JointAtom::*field) {
    double s = 0.0;
    for (const auto& a : joint.atoms) s += a.prob * (a.*field);
    return s;
}

std::vector<ValueAtom> marginal_of(const JointDistribution& joint,
                                   double JointAtom::*field) {
    std::vector<ValueAtom> atoms;
    atoms.reserve(joint.atoms.size());
    for (const auto& a : joint.atoms) atoms.push_back({a.*field, a.prob});
    return merge_value_atoms(std::move(atoms), joint.grouping_tol);
}

} // namespace

// ---------------------------------------------------------------- types ---

EnergySpectrum::EnergySpectrum(std::vector<double> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw InvalidInput("EnergySpectrum: no levels");
    for (size_t i = 0; i < levels_.size(); ++i) {
        if (!std::isfinite(levels_[i])) {
            throw InvalidInput("EnergySpectrum: non-finite level");
        }
        if (i > 0 && levels_[i] < levels_[i - 1]) {
            throw InvalidInput("EnergySpectrum: levels must be sorted ascending");
        }
    }
}

Unitary::Unitary(ComplexMatrix entries, double tol) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
        throw InvalidInput("Unitary: matrix must be square and nonempty");
    }
    if (!entries_.allFinite()) throw InvalidInput("Unitary: non-finite entries");
    if (unitarity_defect() > tol) {
        std::ostringstream msg;
        msg << "Unitary: ||U†U - I||_max = " << unitarity_defect()
            << " exceeds tolerance " << tol;
        throw InvalidInput(msg.str());
    }
}

Unitary Unitary::identity(int dim) {
    return Unitary(ComplexMatrix::Identity(dim, dim));
}

double Unitary::unitarity_defect() const {
    const auto d = entries_.rows();
    return (entries_.adjoint() * entries_ - ComplexMatrix::Identity(d, d))
        .cwiseAbs()
        .maxCoeff();
}

EngineSpec::EngineSpec(EnergySpectrum spectrum_start_, EnergySpectrum spectrum_end_,
                       Unitary u_expansion_, Unitary u_compression_,
                       double beta_cold_, double beta_hot_)
    : spectrum_start(std::move(spectrum_start_)),
      spectrum_end(std::move(spectrum_end_)),
      u_expansion(std::move(u_expansion_)),
      u_compression(std::move(u_compression_)),
      beta_cold(beta_cold_),
      beta_hot(beta_hot_) {
    const int d = spectrum_start.dim();
    if (d < 2) throw InvalidInput("EngineSpec: dimension must be >= 2");
    if (spectrum_end.dim() != d || u_expansion.dim() != d || u_compression.dim() != d) {
        throw InvalidInput("EngineSpec: dimension mismatch between spectra and unitaries");
    }
    if (!std::isfinite(beta_cold) || beta_cold <= 0.0 || !std::isfinite(beta_hot) ||
        beta_hot <= 0.0) {
        throw InvalidInput("EngineSpec: inverse temperatures must be finite and > 0");
    }
}

std::vector<std::string> regime_warnings(const EngineSpec& spec) {
    std::vector<std::string> warnings;
    if (spec.beta_cold <= spec.beta_hot) {
        warnings.push_back(
            "beta_cold <= beta_hot: cold bath is not colder than hot bath; "
            "cycle cannot operate as a heat engine");
    }
    return warnings;
}

double JointDistribution::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.prob;
    return s;
}

void JointDistribution::validate() const {
    for (const auto& a : atoms) {
        if (!(a.prob >= 0.0)) throw InvalidInput("JointDistribution: negative probability");
        if (!std::isfinite(a.w1) || !std::isfinite(a.q2) || !std::isfinite(a.w3)) {
            throw InvalidInput("JointDistribution: non-finite atom");
        }
    }
    if (std::abs(total_mass() - 1.0) > kMassTol) {
        throw InvalidInput("JointDistribution: total mass deviates from 1");
    }
}

double EfficiencyDistribution::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.prob;
    return s;
}

double EfficiencyDistribution::infinity_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) {
        if (a.eta.is_infinite()) s += a.prob;
    }
    return s;
}

void EfficiencyDistribution::validate() const {
    for (const auto& a : atoms) {
        if (!(a.prob >= 0.0)) {
            throw InvalidInput("EfficiencyDistribution: negative probability");
        }
    }
    if (std::abs(total_mass() - 1.0) > kMassTol) {
        throw InvalidInput("EfficiencyDistribution: total mass deviates from 1");
    }
    for (size_t i = 1; i < atoms.size(); ++i) {
        if (atoms[i - 1].eta.is_finite() && atoms[i].eta.is_finite() &&
            atoms[i].eta.value() - atoms[i - 1].eta.value() <= grouping_tol) {
            throw InvalidInput("EfficiencyDistribution: finite atoms not separated");
        }
    }
}

// ----------------------------------------------------------- operations ---

ThermalState thermal_state(const EnergySpectrum& spectrum, double beta) {
    if (!std::isfinite(beta) || beta <= 0.0) {
        throw InvalidInput("thermal_state: beta must be finite and > 0");
    }
    const auto& e = spectrum.levels();
    const double e_min = e.front();
    ThermalState ts;
    ts.beta = beta;
    ts.weights.resize(e.size());
    double shifted_sum = 0.0;
    for (size_t n = 0; n < e.size(); ++n) {
        ts.weights[n] = std::exp(-beta * (e[n] - e_min));
        shifted_sum += ts.weights[n];
    }
    for (auto& w : ts.weights) w /= shifted_sum;
    ts.log_partition_function = std::log(shifted_sum) - beta * e_min;
    ts.partition_function = shifted_sum * std::exp(-beta * e_min);
    return ts;
}

RealMatrix transition_matrix(const Unitary& u) {
    const int d = u.dim();
    RealMatrix t(d, d);
    for (int n = 0; n < d; ++n) {
        for (int m = 0; m < d; ++m) {
            t(n, m) = std::norm(u.matrix()(m, n));
        }
    }
    return t;
}

std::vector<ValueAtom> work1_distribution(const EngineSpec& spec, double grouping_tol) {
    const auto thermal = thermal_state(spec.spectrum_start, spec.beta_cold);
    const auto t_exp = transition_matrix(spec.u_expansion);
    const int d = spec.dim();
    std::vector<ValueAtom> atoms;
    atoms.reserve(static_cast<size_t>(d) * d);
    for (int n = 0; n < d; ++n) {
        for (int m = 0; m < d; ++m) {
            atoms.push_back({spec.spectrum_end[m] - spec.spectrum_start[n],
                             thermal.weights[static_cast<size_t>(n)] * t_exp(n, m)});
        }
    }
    return merge_value_atoms(std::move(atoms), grouping_tol);
}

JointDistribution joint_distribution(const EngineSpec& spec, double grouping_tol) {
    const auto cold = thermal_state(spec.spectrum_start, spec.beta_cold);
    const auto hot = thermal_state(spec.spectrum_end, spec.beta_hot);
    const auto t_exp = transition_matrix(spec.u_expansion);
    const auto t_com = transition_matrix(spec.u_compression);
    const int d = spec.dim();

    std::vector<JointAtom> atoms;
    atoms.reserve(static_cast<size_t>(d) * d * d * d);
    for (int n = 0; n < d; ++n) {
        for (int m = 0; m < d; ++m) {
            const double p_nm = cold.weights[static_cast<size_t>(n)] * t_exp(n, m);
            if (p_nm == 0.0) continue;
            const double w1 = spec.spectrum_end[m] - spec.spectrum_start[n];
            for (int k = 0; k < d; ++k) {
                const double p_k = hot.weights[static_cast<size_t>(k)];
                const double q2 = spec.spectrum_end[k] - spec.spectrum_end[m];
                for (int l = 0; l < d; ++l) {
                    const double prob = p_nm * p_k * t_com(k, l);
                    if (prob == 0.0) continue;
                    atoms.push_back(
                        {w1, q2, spec.spectrum_start[l] - spec.spectrum_end[k], prob});
                }
            }
        }
    }

    // Hierarchical tolerance merge: group by w1, then q2, then w3.
    std::sort(atoms.begin(), atoms.end(), [](const JointAtom& a, const JointAtom& b) {
        if (a.w1 != b.w1) return a.w1 < b.w1;
        if (a.q2 != b.q2) return a.q2 < b.q2;
        return a.w3 < b.w3;
    });
    JointDistribution joint;
    joint.grouping_tol = grouping_tol;
    for (auto [b1, e1] :
         group_sorted(atoms, [](const JointAtom& a) { return a.w1; }, grouping_tol)) {
        std::vector<JointAtom> level1(atoms.begin() + static_cast<long>(b1),
                                      atoms.begin() + static_cast<long>(e1));
        std::sort(level1.begin(), level1.end(), [](const JointAtom& a, const JointAtom& b) {
            return a.q2 != b.q2 ? a.q2 < b.q2 : a.w3 < b.w3;
        });
        for (auto [b2, e2] :
             group_sorted(level1, [](const JointAtom& a) { return a.q2; }, grouping_tol)) {
            std::vector<JointAtom> level2(level1.begin() + static_cast<long>(b2),
                                          level1.begin() + static_cast<long>(e2));
            std::sort(level2.begin(), level2.end(),
                      [](const JointAtom& a, const JointAtom& b) { return a.w3 < b.w3; });
            for (auto [b3, e3] :
                 group_sorted(level2, [](const JointAtom& a) { return a.w3; }, grouping_tol)) {
                JointAtom merged = level2[b3];
                merged.prob = 0.0;
                for (size_t i = b3; i < e3; ++i) merged.prob += level2[i].prob;
                joint.atoms.push_back(merged);
            }
        }
    }
    return joint;
}

std::vector<ValueAtom> marginal_w1(const JointDistribution& joint) {
    return marginal_of(joint, &JointAtom::w1);
}
std::vector<ValueAtom> marginal_q2(const JointDistribution& joint) {
    return marginal_of(joint, &JointAtom::q2);
}
std::vector<ValueAtom> marginal_w3(const JointDistribution& joint) {
    return marginal_of(joint, &JointAtom::w3);
}

EfficiencyValue stochastic_efficiency(double w1, double q2, double w3, double tol) {
    const double work_out = -(w1 + w3);
    if (std::abs(q2) <= tol) {
        if (std::abs(work_out) <= tol) {
            // 0/0: fixed to zero by the temperature-limit argument.
            return {ExtendedReal::finite(0.0), true};
        }
        // Zero heat is approached from above, so the sign of the work output
        // picks the infinity.
        return {work_out > 0.0 ? ExtendedReal::plus_inf() : ExtendedReal::minus_inf(),
                false};
    }
    return {ExtendedReal::finite(work_out / q2), false};
}

EfficiencyDistribution efficiency_distribution(const JointDistribution& joint, double tol) {
    joint.validate();

    double minus_inf_mass = 0.0;
    double plus_inf_mass = 0.0;
    double zero_over_zero = 0.0;
    std::vector<ValueAtom> finite_atoms;
    finite_atoms.reserve(joint.atoms.size());
    for (const auto& a : joint.atoms) {
        const auto ev = stochastic_efficiency(a.w1, a.q2, a.w3, tol);
        if (ev.zero_over_zero) zero_over_zero += a.prob;
        if (ev.eta.is_minus_inf()) {
            minus_inf_mass += a.prob;
        } else if (ev.eta.is_plus_inf()) {
            plus_inf_mass += a.prob;
        } else {
            finite_atoms.push_back({ev.eta.value(), a.prob});
        }
    }

    EfficiencyDistribution dist;
    dist.grouping_tol = tol;
    dist.zero_over_zero_weight = zero_over_zero;
    if (minus_inf_mass > 0.0) dist.atoms.push_back({ExtendedReal::minus_inf(), minus_inf_mass});
    for (const auto& a : merge_value_atoms(std::move(finite_atoms), tol)) {
        dist.atoms.push_back({ExtendedReal::finite(a.value), a.prob});
    }
    if (plus_inf_mass > 0.0) dist.atoms.push_back({ExtendedReal::plus_inf(), plus_inf_mass});
    return dist;
}

EfficiencyDistribution efficiency_distribution(const JointDistribution& joint) {
    return efficiency_distribution(joint, joint.grouping_tol);
}

double mean_work1(const EngineSpec& spec) {
    return mean_of_joint(joint_distribution(spec), &JointAtom::w1);
}
double mean_work3(const EngineSpec& spec) {
    return mean_of_joint(joint_distribution(spec), &JointAtom::w3);
}
double mean_heat2(const EngineSpec& spec) {
    return mean_of_joint(joint_distribution(spec), &JointAtom::q2);
}

double thermodynamic_efficiency(const EngineSpec& spec) {
    const auto joint = joint_distribution(spec);
    const double q2 = mean_of_joint(joint, &JointAtom::q2);
    if (std::abs(q2) < kMassTol) {
        throw UndefinedResult("thermodynamic_efficiency: mean absorbed heat vanishes");
    }
    return -(mean_of_joint(joint, &JointAtom::w1) + mean_of_joint(joint, &JointAtom::w3)) / q2;
}

EngineConditions engine_conditions(const EngineSpec& spec) {
    const auto joint = joint_distribution(spec);
    const double q2 = mean_of_joint(joint, &JointAtom::q2);
    const double work_out =
        -(mean_of_joint(joint, &JointAtom::w1) + mean_of_joint(joint, &JointAtom::w3));
    EngineConditions c;
    c.heat_in_positive = q2 > 0.0;
    c.work_out_positive = work_out > 0.0;
    c.is_engine = c.heat_in_positive && c.work_out_positive;
    return c;
}

MomentReport efficiency_moments(const EfficiencyDistribution& dist) {
    MomentReport report;
    report.infinity_mass = dist.infinity_mass();
    report.defined = report.infinity_mass < kMomentDefinednessTol;
    if (!report.defined) return report;
    double mean = 0.0;
    double second = 0.0;
    for (const auto& a : dist.atoms) {
        if (!a.eta.is_finite()) continue;
        mean += a.prob * a.eta.value();
        second += a.prob * a.eta.value() * a.eta.value();
    }
    report.mean = mean;
    report.variance = second - mean * mean;
    return report;
}

CovarianceReport efficiency_heat_covariance(const JointDistribution& joint) {
    joint.validate();
    const double tol = joint.grouping_tol;

    CovarianceReport report;
    double infinity_mass = 0.0;
    double mean_eta = 0.0;
    double mean_q2 = 0.0;
    double mean_q2_eta = 0.0;
    double mean_work = 0.0;
    for (const auto& a : joint.atoms) {
        const auto ev = stochastic_efficiency(a.w1, a.q2, a.w3, tol);
        mean_q2 += a.prob * a.q2;
        mean_work += a.prob * (a.w1 + a.w3);
        if (ev.eta.is_infinite()) {
            infinity_mass += a.prob;
        } else {
            mean_eta += a.prob * ev.eta.value();
            mean_q2_eta += a.prob * a.q2 * ev.eta.value();
        }
    }
    if (infinity_mass >= kMomentDefinednessTol) {
        report.defined = false;
        return report;
    }
    if (std::abs(mean_q2) < kMassTol) {
        throw UndefinedResult("efficiency_heat_covariance: mean absorbed heat vanishes");
    }
    report.defined = true;
    report.cov = mean_q2_eta - mean_q2 * mean_eta;
    const double eta_th = -mean_work / mean_q2;
    report.identity_residual = std::abs(mean_eta - eta_th + report.cov / mean_q2);
    return report;
}

double max_atom_discrepancy(const EfficiencyDistribution& a,
                            const EfficiencyDistribution& b, double tol) {
    double worst = 0.0;
    std::vector<bool> matched(b.atoms.size(), false);
    for (const auto& atom : a.atoms) {
        double best_prob = 0.0;
        bool found = false;
        for (size_t j = 0; j < b.atoms.size(); ++j) {
            const auto& other = b.atoms[j];
            const bool same =
                (atom.eta.is_finite() && other.eta.is_finite() &&
                 std::abs(atom.eta.value() - other.eta.value()) <= tol) ||
                (!atom.eta.is_finite() && atom.eta == other.eta);
            if (same && !matched[j]) {
                matched[j] = true;
                best_prob = other.prob;
                found = true;
                break;
            }
        }
        worst = std::max(worst, std::abs(atom.prob - (found ? best_prob : 0.0)));
    }
    for (size_t j = 0; j < b.atoms.size(); ++j) {
        if (!matched[j]) worst = std::max(worst, b.atoms[j].prob);
    }
    return worst;
}

} // namespace qotto
