// twolevel.hpp — closed-form spin-1/2 Otto engine: a qubit driven by a
// rotating transverse field of linearly ramped strength gamma(t) on top of a
// constant longitudinal field omega/2. Everything here has an exact analytic
// form; the generic enumeration in spectra.hpp serves as its cross-check.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qotto/spectra.hpp"

namespace qotto::twolevel {

// Adiabatic-only quantities are gated on |u - 1| below this threshold; exact
// u = 1 is attained only at isolated driving times.
inline constexpr double kAdiabaticGate = 1e-9;

struct Params {
    double gamma1 = 0.5;  // transverse field strength at t = 0
    double gamma2 = 3.0;  // transverse field strength at t = tau
    double tau = 1.0;     // stroke duration (expansion and compression equal)
    // Rotation frequency; defaults to pi/(2 tau) so the transverse field
    // completes a quarter turn over the stroke. Sweeps over tau recompute it
    // unless explicitly overridden.
    std::optional<double> omega;
    double beta1 = 1.0;  // cold inverse temperature
    double beta2 = 0.1;  // hot inverse temperature
    // Optional custom ramp gamma(t) on [0, tau]; must agree with gamma1 and
    // gamma2 at the endpoints. Linear when absent.
    std::function<double(double)> ramp;

    double effective_omega() const;
};

struct Derived {
    double omega = 0.0;
    double nu0 = 0.0;        // half energy gap at t = 0
    double nu_tau = 0.0;     // half energy gap at t = tau
    double i_integral = 0.0; // I(tau) = -∫_0^tau gamma
    double u = 0.0;          // survival probability cos^2 I
    double a_star = 0.0;     // adiabaticity parameter 1 - 2u in [-1, 1]
};

struct MeanEnergetics {
    double w1 = 0.0;
    double w3 = 0.0;
    double q2 = 0.0;
};

struct EngineBounds {
    double bound_heat = 0.0;  // engine requires a_star <= bound_heat
    double bound_work = 0.0;  // and a_star <= bound_work
    bool satisfied = false;
};

struct Limits {
    double high_t = 0.0;
    double low_t = 0.0;
};

std::vector<std::string> regime_warnings(const Params& p);

Derived derive(const Params& p);

// Lab-frame Hamiltonian at time t:
//   H(t) = gamma(t) (cos(omega t) sigma_x + sin(omega t) sigma_y)
//        + (omega/2) sigma_z.
ComplexMatrix hamiltonian(const Params& p, double t);

// Exact evolution operator of the expansion stroke up to time t in [0, tau]:
//   [ e^{-i omega t/2} cos I(t)    i e^{-i omega t/2} sin I(t) ]
//   [ i e^{+i omega t/2} sin I(t)  e^{+i omega t/2} cos I(t)   ]
// with I(t) = -∫_0^t gamma.
Unitary closed_form_unitary(const Params& p, double t);

// Full expansion stroke, t = tau.
Unitary expansion_unitary(const Params& p);

// Full compression stroke for H_com(t) = -H_exp(tau - t); equals the adjoint
// of the full expansion operator, so its transition probabilities match the
// expansion's entrywise.
Unitary compression_unitary(const Params& p);

// Two-level EngineSpec (spectra {-nu, +nu} at both ends plus the two closed
// form stroke unitaries) for the generic machinery.
EngineSpec make_engine_spec(const Params& p);

// <W1> = (nu_tau A* + nu0) tanh(beta1 nu0)
// <W3> = (nu0 A* + nu_tau) tanh(beta2 nu_tau)
// <Q2> = -nu_tau [tanh(beta2 nu_tau) + tanh(beta1 nu0) A*]
MeanEnergetics mean_energetics(const Params& p);

// Upper bounds on A* implied by <Q2> > 0 and -(<W1> + <W3>) > 0.
EngineBounds engine_bounds(const Params& p);

// eta_th = 1 + (nu0/nu_tau) (t2 A* + t1)/(t2 + t1 A*); throws UndefinedResult
// on the <Q2> = 0 boundary.
double eta_th(const Params& p);

// Closed-form efficiency distribution. Support {0, 1 - nu0/nu_tau, 1,
// 1 + nu0/nu_tau, -inf, +inf} with weights (t_i the two tanh factors,
// s(x) = 1/(1 + e^{-x}) and a = beta1 nu0):
//   w(0)      = u^2 (1 + t1 t2)/2 + v^2 (1 - t1 t2)/2   (all of it 0/0 mass)
//   w(1-r)    = u^2 (1 - t1 t2)/2
//   w(1)      = u v
//   w(1+r)    = v^2 (1 + t1 t2)/2
//   w(-inf)   = u v s(+2a)
//   w(+inf)   = u v s(-2a)
// These sum to (u + v)^2 = 1 identically. Matches the generic enumeration
// atom-for-atom within 1e-12.
EfficiencyDistribution efficiency_distribution_closed(const Params& p,
                                                      double grouping_tol = kDefaultGroupingTol);

// Mean efficiency under adiabatic driving (gated on |u - 1| < kAdiabaticGate):
//   <eta> = (1 - t1 t2)/2 * (1 - nu0/nu_tau), strictly below eta_th when
// nu_tau > nu0.
double adiabatic_mean(const Params& p);

// High-/low-temperature limits of the adiabatic mean:
//   high: eta_ad/2,   low: eta_ad (e^{-2 beta2 nu_tau} + e^{-2 beta1 nu0})
// with eta_ad = 1 - nu0/nu_tau. Pure functions of the gaps and temperatures.
Limits adiabatic_mean_limits(const Params& p);

// Variance under adiabatic driving (gated):
//   sigma^2 = (1/4)(1 - nu0/nu_tau)^2 [1 - tanh^2(beta1 nu0) tanh^2(beta2 nu_tau)]
double adiabatic_variance(const Params& p);

// high: eta_ad^2/4,
// low:  eta_ad^2 (e^{-2b} + e^{-2a}) / (1 + 2 e^{-2b} + 2 e^{-2a})
Limits adiabatic_variance_limits(const Params& p);

} // namespace qotto::twolevel
