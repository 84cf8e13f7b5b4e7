// twolevel.cpp — analytic spin-1/2 engine.

#include "qotto/twolevel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace qotto::twolevel {

namespace {

using std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};

void validate(const Params& p) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(p.gamma1) || !positive(p.gamma2)) {
        throw InvalidInput("twolevel: field strengths must be finite and > 0");
    }
    if (!positive(p.tau)) throw InvalidInput("twolevel: tau must be finite and > 0");
    if (!positive(p.beta1) || !positive(p.beta2)) {
        throw InvalidInput("twolevel: inverse temperatures must be finite and > 0");
    }
    if (p.omega && !positive(*p.omega)) {
        throw InvalidInput("twolevel: omega override must be finite and > 0");
    }
    if (p.ramp) {
        if (std::abs(p.ramp(0.0) - p.gamma1) > 1e-9 ||
            std::abs(p.ramp(p.tau) - p.gamma2) > 1e-9) {
            throw InvalidInput("twolevel: ramp endpoints disagree with gamma1/gamma2");
        }
    }
}

double ramp_at(const Params& p, double t) {
    if (p.ramp) return p.ramp(t);
    return p.gamma1 * (1.0 - t / p.tau) + p.gamma2 * (t / p.tau);
}

// Adaptive Simpson quadrature; only used for user-supplied ramps.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate_ramp(const Params& p, double t) {
    if (t == 0.0) return 0.0;
    if (!p.ramp) {
        // linear ramp: ∫_0^t gamma = gamma1 t + (gamma2 - gamma1) t^2/(2 tau)
        return p.gamma1 * t + (p.gamma2 - p.gamma1) * t * t / (2.0 * p.tau);
    }
    const auto& f = p.ramp;
    const double fa = f(0.0);
    const double fb = f(t);
    const double fm = f(0.5 * t);
    const double whole = t / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, 0.0, t, fa, fm, fb, whole, 1e-12, 48);
}

double half_gap(double gamma, double omega) {
    return std::sqrt(4.0 * gamma * gamma + omega * omega) / 2.0;
}

struct TanhPair {
    double t1;  // tanh(beta1 nu0)
    double t2;  // tanh(beta2 nu_tau)
};

TanhPair tanh_pair(const Params& p, const Derived& d) {
    return {std::tanh(p.beta1 * d.nu0), std::tanh(p.beta2 * d.nu_tau)};
}

// Logistic 1/(1 + e^{-x}); overflow-safe for any x.
double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

void require_adiabatic(const Derived& d, const char* op) {
    if (std::abs(d.u - 1.0) >= kAdiabaticGate) {
        std::ostringstream msg;
        msg << op << ": requires adiabatic driving (|u - 1| < " << kAdiabaticGate
            << "), got u = " << d.u;
        throw InvalidInput(msg.str());
    }
}

} // namespace

double Params::effective_omega() const {
    return omega ? *omega : pi / (2.0 * tau);
}

std::vector<std::string> regime_warnings(const Params& p) {
    std::vector<std::string> warnings;
    if (p.beta1 <= p.beta2) {
        warnings.push_back(
            "beta1 <= beta2: cold bath is not colder than hot bath; "
            "cycle cannot operate as a heat engine");
    }
    return warnings;
}

Derived derive(const Params& p) {
    validate(p);
    Derived d;
    d.omega = p.effective_omega();
    d.nu0 = half_gap(p.gamma1, d.omega);
    d.nu_tau = half_gap(p.gamma2, d.omega);
    d.i_integral = -integrate_ramp(p, p.tau);
    const double c = std::cos(d.i_integral);
    d.u = c * c;
    d.a_star = 1.0 - 2.0 * d.u;
    return d;
}

ComplexMatrix hamiltonian(const Params& p, double t) {
    validate(p);
    const double omega = p.effective_omega();
    const double g = ramp_at(p, t);
    ComplexMatrix h(2, 2);
    h(0, 0) = omega / 2.0;
    h(1, 1) = -omega / 2.0;
    h(0, 1) = g * std::exp(-kI * (omega * t));
    h(1, 0) = g * std::exp(kI * (omega * t));
    return h;
}

Unitary closed_form_unitary(const Params& p, double t) {
    validate(p);
    if (!(t >= 0.0 && t <= p.tau)) {
        throw InvalidInput("closed_form_unitary: t outside [0, tau]");
    }
    const double omega = p.effective_omega();
    const double i_t = -integrate_ramp(p, t);
    const double c = std::cos(i_t);
    const double s = std::sin(i_t);
    const std::complex<double> phase = std::exp(-kI * (omega * t / 2.0));
    ComplexMatrix u(2, 2);
    u(0, 0) = phase * c;
    u(0, 1) = kI * phase * s;
    u(1, 0) = kI * std::conj(phase) * s;
    u(1, 1) = std::conj(phase) * c;
    return Unitary(std::move(u));
}

Unitary expansion_unitary(const Params& p) {
    return closed_form_unitary(p, p.tau);
}

Unitary compression_unitary(const Params& p) {
    // V(t) = U_exp(tau - t) U_exp(tau)† solves i dV/dt = H_com V, V(0) = I;
    // the full stroke is V(tau) = U_exp(tau)†.
    return Unitary(expansion_unitary(p).matrix().adjoint());
}

EngineSpec make_engine_spec(const Params& p) {
    const Derived d = derive(p);
    return EngineSpec(EnergySpectrum({-d.nu0, d.nu0}), EnergySpectrum({-d.nu_tau, d.nu_tau}),
                      expansion_unitary(p), compression_unitary(p), p.beta1, p.beta2);
}

MeanEnergetics mean_energetics(const Params& p) {
    const Derived d = derive(p);
    const auto [t1, t2] = tanh_pair(p, d);
    MeanEnergetics m;
    m.w1 = (d.nu_tau * d.a_star + d.nu0) * t1;
    m.w3 = (d.nu0 * d.a_star + d.nu_tau) * t2;
    m.q2 = -d.nu_tau * (t2 + t1 * d.a_star);
    return m;
}

EngineBounds engine_bounds(const Params& p) {
    const Derived d = derive(p);
    const auto [t1, t2] = tanh_pair(p, d);
    EngineBounds b;
    b.bound_heat = -t2 / t1;
    b.bound_work = -(d.nu0 * t1 + d.nu_tau * t2) / (d.nu_tau * t1 + d.nu0 * t2);
    b.satisfied = d.a_star <= std::min(b.bound_heat, b.bound_work);
    return b;
}

double eta_th(const Params& p) {
    const Derived d = derive(p);
    const auto [t1, t2] = tanh_pair(p, d);
    const double denom = t2 + t1 * d.a_star;
    if (std::abs(denom) < kMassTol) {
        throw UndefinedResult("eta_th: mean absorbed heat vanishes");
    }
    return 1.0 + (d.nu0 / d.nu_tau) * (t2 * d.a_star + t1) / denom;
}

EfficiencyDistribution efficiency_distribution_closed(const Params& p, double grouping_tol) {
    const Derived d = derive(p);
    const auto [t1, t2] = tanh_pair(p, d);
    const double u = d.u;
    const double v = 1.0 - u;
    const double r = d.nu0 / d.nu_tau;
    const double plus = (1.0 + t1 * t2) / 2.0;   // 2 cosh(a+b)/(Z^0 Z^tau)
    const double minus = (1.0 - t1 * t2) / 2.0;  // 2 cosh(a-b)/(Z^0 Z^tau)
    const double a = p.beta1 * d.nu0;

    const double w_zero = u * u * plus + v * v * minus;
    std::vector<ValueAtom> finite = {
        {0.0, w_zero},
        {1.0 - r, u * u * minus},
        {1.0, u * v},
        {1.0 + r, v * v * plus},
    };

    // Merge finite values (handles nu0 ≈ nu_tau collisions), drop dead atoms.
    std::erase_if(finite, [](const ValueAtom& va) { return va.prob == 0.0; });
    std::sort(finite.begin(), finite.end(),
              [](const ValueAtom& x, const ValueAtom& y) { return x.value < y.value; });
    std::vector<ValueAtom> merged;
    for (const auto& atom : finite) {
        if (!merged.empty() && atom.value - merged.back().value <= grouping_tol) {
            merged.back().prob += atom.prob;
        } else {
            merged.push_back(atom);
        }
    }

    EfficiencyDistribution dist;
    dist.grouping_tol = grouping_tol;
    dist.zero_over_zero_weight = w_zero;
    const double w_minus_inf = u * v * sigmoid(2.0 * a);
    const double w_plus_inf = u * v * sigmoid(-2.0 * a);
    if (w_minus_inf > 0.0) dist.atoms.push_back({ExtendedReal::minus_inf(), w_minus_inf});
    for (const auto& atom : merged) {
        dist.atoms.push_back({ExtendedReal::finite(atom.value), atom.prob});
    }
    if (w_plus_inf > 0.0) dist.atoms.push_back({ExtendedReal::plus_inf(), w_plus_inf});
    return dist;
}

double adiabatic_mean(const Params& p) {
    const Derived d = derive(p);
    require_adiabatic(d, "adiabatic_mean");
    const auto [t1, t2] = tanh_pair(p, d);
    return (1.0 - t1 * t2) / 2.0 * (1.0 - d.nu0 / d.nu_tau);
}

Limits adiabatic_mean_limits(const Params& p) {
    const Derived d = derive(p);
    const double eta_ad = 1.0 - d.nu0 / d.nu_tau;
    Limits l;
    l.high_t = eta_ad / 2.0;
    l.low_t = eta_ad * (std::exp(-2.0 * p.beta2 * d.nu_tau) + std::exp(-2.0 * p.beta1 * d.nu0));
    return l;
}

double adiabatic_variance(const Params& p) {
    const Derived d = derive(p);
    require_adiabatic(d, "adiabatic_variance");
    const auto [t1, t2] = tanh_pair(p, d);
    const double eta_ad = 1.0 - d.nu0 / d.nu_tau;
    return 0.25 * eta_ad * eta_ad * (1.0 - t1 * t1 * t2 * t2);
}

Limits adiabatic_variance_limits(const Params& p) {
    const Derived d = derive(p);
    const double eta_ad = 1.0 - d.nu0 / d.nu_tau;
    const double ea = std::exp(-2.0 * p.beta1 * d.nu0);
    const double eb = std::exp(-2.0 * p.beta2 * d.nu_tau);
    Limits l;
    l.high_t = eta_ad * eta_ad / 4.0;
    l.low_t = eta_ad * eta_ad * (eb + ea) / (1.0 + 2.0 * eb + 2.0 * ea);
    return l;
}

} // namespace qotto::twolevel
