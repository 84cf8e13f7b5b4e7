// propagator.cpp — midpoint-exponential stepping.

#include "qotto/propagator.hpp"

#include <cmath>
#include <complex>

namespace qotto::prop {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};
constexpr double kHermiticityTol = 1e-12;

void check_protocol(const DrivingProtocol& protocol) {
    if (protocol.dimension < 1) throw InvalidInput("propagate: dimension must be >= 1");
    if (!(protocol.duration > 0.0) || !std::isfinite(protocol.duration)) {
        throw InvalidInput("propagate: duration must be finite and > 0");
    }
    if (!protocol.hamiltonian_at) throw InvalidInput("propagate: missing hamiltonian_at");
}

ComplexMatrix hamiltonian_checked(const DrivingProtocol& protocol, double t) {
    ComplexMatrix h = protocol.hamiltonian_at(t);
    if (h.rows() != protocol.dimension || h.cols() != protocol.dimension) {
        throw InvalidInput("propagate: Hamiltonian dimension mismatch");
    }
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > kHermiticityTol) {
        throw InvalidInput("propagate: protocol returned a non-Hermitian matrix");
    }
    return h;
}

// exp(-i H dt) for Hermitian 2x2 H via the Pauli decomposition
// H = a0 I + a·sigma:  exp(-i H dt) = e^{-i a0 dt}(cos|a|dt - i sin|a|dt â·sigma).
ComplexMatrix step_exponential_2x2(const ComplexMatrix& h, double dt) {
    const double a0 = 0.5 * std::real(h(0, 0) + h(1, 1));
    const double az = 0.5 * std::real(h(0, 0) - h(1, 1));
    const double ax = std::real(h(0, 1));
    const double ay = -std::imag(h(0, 1));
    const double a = std::sqrt(ax * ax + ay * ay + az * az);
    const std::complex<double> phase = std::exp(-kI * (a0 * dt));
    ComplexMatrix e(2, 2);
    if (a == 0.0) {
        e << phase, 0.0, 0.0, phase;
        return e;
    }
    const double c = std::cos(a * dt);
    const std::complex<double> is = -kI * (std::sin(a * dt) / a);
    e(0, 0) = phase * (c + is * az);
    e(0, 1) = phase * (is * std::complex<double>(ax, -ay));
    e(1, 0) = phase * (is * std::complex<double>(ax, ay));
    e(1, 1) = phase * (c - is * az);
    return e;
}

// General dimension: eigendecompose and exponentiate the phases, which keeps
// the step exactly unitary up to solver accuracy.
ComplexMatrix step_exponential(const ComplexMatrix& h, double dt) {
    if (h.rows() == 2) return step_exponential_2x2(h, dt);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw InvalidInput("propagate: eigendecomposition of Hamiltonian failed");
    }
    const auto& values = solver.eigenvalues();
    Eigen::VectorXcd phases(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        phases(i) = std::exp(-kI * (values(i) * dt));
    }
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

double operator_norm(const ComplexMatrix& h) {
    if (h.rows() == 2) {
        const double a0 = 0.5 * std::abs(std::real(h(0, 0) + h(1, 1)));
        const double az = 0.5 * std::real(h(0, 0) - h(1, 1));
        const double ax = std::real(h(0, 1));
        const double ay = -std::imag(h(0, 1));
        return a0 + std::sqrt(ax * ax + ay * ay + az * az);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace

DrivingProtocol expansion_protocol(const twolevel::Params& p) {
    return {2, [p](double t) { return twolevel::hamiltonian(p, t); }, p.tau};
}

DrivingProtocol compression_protocol(const twolevel::Params& p) {
    return {2, [p](double t) { return (-twolevel::hamiltonian(p, p.tau - t)).eval(); },
            p.tau};
}

double max_hamiltonian_norm(const DrivingProtocol& protocol) {
    check_protocol(protocol);
    constexpr int kSamples = 128;
    double h_max = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
        const double t = protocol.duration * i / kSamples;
        h_max = std::max(h_max, operator_norm(hamiltonian_checked(protocol, t)));
    }
    return h_max;
}

int default_steps(const DrivingProtocol& protocol) {
    // Second-order error ~ duration * (||H|| dt)^2; this factor lands the
    // rotating-field protocols of interest a safe margin below 1e-8.
    constexpr double kStepsPerAction = 8192.0;
    const double action = protocol.duration * max_hamiltonian_norm(protocol);
    const double steps = std::ceil(kStepsPerAction * std::max(action, 1.0));
    return static_cast<int>(std::min(steps, 2.0e7));
}

Unitary propagate(const DrivingProtocol& protocol, int steps) {
    check_protocol(protocol);
    if (steps < 1) throw InvalidInput("propagate: steps must be >= 1");
    const double dt = protocol.duration / steps;
    ComplexMatrix u = ComplexMatrix::Identity(protocol.dimension, protocol.dimension);
    for (int i = 0; i < steps; ++i) {
        const double t_mid = (i + 0.5) * dt;
        u = step_exponential(hamiltonian_checked(protocol, t_mid), dt) * u;
    }
    return Unitary(std::move(u));
}

Unitary propagate(const DrivingProtocol& protocol) {
    return propagate(protocol, default_steps(protocol));
}

std::vector<ConvergencePoint> convergence_report(const DrivingProtocol& protocol,
                                                 const std::vector<int>& step_sequence) {
    check_protocol(protocol);
    if (step_sequence.empty()) throw InvalidInput("convergence_report: empty step sequence");
    for (size_t i = 0; i < step_sequence.size(); ++i) {
        if (step_sequence[i] < 1 || (i > 0 && step_sequence[i] <= step_sequence[i - 1])) {
            throw InvalidInput("convergence_report: step sequence must be increasing");
        }
    }
    const double h_max = max_hamiltonian_norm(protocol);
    const ComplexMatrix finest = propagate(protocol, step_sequence.back()).matrix();
    std::vector<ConvergencePoint> report;
    report.reserve(step_sequence.size());
    for (int steps : step_sequence) {
        ConvergencePoint point;
        point.steps = steps;
        point.step_ok = h_max * (protocol.duration / steps) <= 1.0;
        point.deviation = steps == step_sequence.back()
                              ? 0.0
                              : (propagate(protocol, steps).matrix() - finest)
                                    .cwiseAbs()
                                    .maxCoeff();
        report.push_back(point);
    }
    return report;
}

} // namespace qotto::prop
