// propagator.hpp — numerical time-ordered propagation of driven Hamiltonians,
// used to validate closed-form stroke operators and to support user-defined
// drivings. Each step applies the exact exponential of the midpoint
// Hamiltonian, so the result is unitary by construction.

#pragma once

#include <functional>
#include <vector>

#include "qotto/spectra.hpp"
#include "qotto/twolevel.hpp"

namespace qotto::prop {

struct DrivingProtocol {
    int dimension = 0;
    std::function<ComplexMatrix(double)> hamiltonian_at;  // Hermitian within 1e-12
    double duration = 0.0;
};

// Lab-frame expansion protocol of the two-level engine, and its time-reversed
// compression counterpart H_com(t) = -H_exp(tau - t).
DrivingProtocol expansion_protocol(const twolevel::Params& p);
DrivingProtocol compression_protocol(const twolevel::Params& p);

// Max operator norm of H over a sampling grid of the protocol.
double max_hamiltonian_norm(const DrivingProtocol& protocol);

// Step count at which the midpoint rule resolves this protocol to roughly
// 1e-8 accuracy on the operator entries.
int default_steps(const DrivingProtocol& protocol);

// Solves i dU/dt = H(t) U, U(0) = I with `steps` midpoint-exponential steps.
// Throws InvalidInput if the protocol produces a non-Hermitian matrix.
Unitary propagate(const DrivingProtocol& protocol, int steps);
Unitary propagate(const DrivingProtocol& protocol);

struct ConvergencePoint {
    int steps = 0;
    double deviation = 0.0;  // ||U(steps) - U(finest)||_max
    bool step_ok = true;     // max||H|| * dt <= 1
};

// Deviation of each coarse run from the finest one; deviations shrink at the
// integrator's (second) order.
std::vector<ConvergencePoint> convergence_report(const DrivingProtocol& protocol,
                                                 const std::vector<int>& step_sequence);

} // namespace qotto::prop
