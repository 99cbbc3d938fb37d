#pragma once

// Independent check of the reduced dynamics: integrate i dU/dtau = H U on the
// full 8-dimensional Hilbert space and read off x_i = Tr[O_i U rho0 U^dag].

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coherence/matrix_exp.hpp"
#include "coherence/reduced_dynamics.hpp"
#include "coherence/spin_algebra.hpp"

namespace coherence {

/// Per-step update rule for the Schroedinger propagator.
///  - magnus4: exp(-i Omega4) with the two-point Gauss fourth-order Magnus term.
///  - midpoint: exp(-i H(t + h/2) h), second order.
enum class Stepper { magnus4, midpoint };

struct UnitarySample {
    double tau = 0.0;
    Mat8c U = Mat8c::Identity();
};

struct UnitaryTrajectory {
    std::vector<UnitarySample> samples;
    double dtau = 0.0;
    Stepper stepper = Stepper::magnus4;
};

inline Mat8c schrodinger_step(const ControlParams& p, double t, double h, Stepper stepper) {
    if (stepper == Stepper::midpoint) return expm_hermitian(build_hamiltonian(p, t + 0.5 * h), h);
    const double c = std::sqrt(3.0) / 6.0;
    const Mat8c H1 = build_hamiltonian(p, t + (0.5 - c) * h);
    const Mat8c H2 = build_hamiltonian(p, t + (0.5 + c) * h);
    const cplx i{0.0, 1.0};
    const Mat8c commutator = H1 * H2 - H2 * H1;
    const Mat8c effective = 0.5 * h * (H1 + H2) + i * (std::sqrt(3.0) / 12.0 * h * h) * commutator;
    return expm_hermitian(effective, 1.0);
}

/// U(tau) on the same grid as propagate_rk4, starting from the identity.
inline UnitaryTrajectory schrodinger_propagate(const ControlParams& p, double tau_end, double dtau,
                                               int record_every = 1, Stepper stepper = Stepper::magnus4) {
    if (record_every < 1) throw std::invalid_argument("record stride must be >= 1");
    const std::vector<double> grid = time_grid(tau_end, dtau);
    UnitaryTrajectory traj{{}, dtau, stepper};
    Mat8c U = Mat8c::Identity();
    traj.samples.push_back({0.0, U});
    for (std::size_t k = 1; k < grid.size(); ++k) {
        U = schrodinger_step(p, grid[k - 1], grid[k] - grid[k - 1], stepper) * U;
        if (k % static_cast<std::size_t>(record_every) == 0 || k + 1 == grid.size()) traj.samples.push_back({grid[k], U});
    }
    return traj;
}

inline double unitarity_defect(const Mat8c& U) {
    return (U.adjoint() * U - Mat8c::Identity()).cwiseAbs().maxCoeff();
}

/// Coherence vector of rho(tau) = U rho0 U^dag. Only rho0 = (I + sx1)/8
/// ("sx1") is supported.
inline Vec8 expectations(const Mat8c& U, std::string_view rho0_label = "sx1") {
    if (rho0_label != "sx1") throw std::invalid_argument("unknown initial state '" + std::string(rho0_label) + "'");
    const auto& basis = coherence_basis();
    const Mat8c rho0 = (Mat8c::Identity() + basis[0]) / 8.0;
    const Mat8c rho = U * rho0 * U.adjoint();
    Vec8 x;
    for (int i = 0; i < 8; ++i) x(i) = (basis[static_cast<std::size_t>(i)] * rho).trace().real();
    return x;
}

/// Checks that i[H(tau), O_i] lies in span{O_j} with coefficients equal to
/// row i of M(tau). Returns the largest of the coefficient mismatch, the
/// imaginary part of the projections, and the out-of-span remainder.
inline double closure_check(const ControlParams& p, std::span<const double> tau_samples) {
    const auto& basis = coherence_basis();
    const cplx i{0.0, 1.0};
    double worst = 0.0;
    for (double tau : tau_samples) {
        const Mat8c H = build_hamiltonian(p, tau);
        const Mat8 M = build_M(p, tau);
        for (int r = 0; r < 8; ++r) {
            const Mat8c& O = basis[static_cast<std::size_t>(r)];
            const Mat8c C = i * (H * O - O * H);
            Mat8c remainder = C;
            for (int j = 0; j < 8; ++j) {
                const Mat8c& Oj = basis[static_cast<std::size_t>(j)];
                const cplx coeff = normalized_trace_product(Oj, C);
                worst = std::max({worst, std::abs(coeff.real() - M(r, j)), std::abs(coeff.imag())});
                remainder -= coeff * Oj;
            }
            worst = std::max(worst, remainder.cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

/// Projection matrix C_ij = Tr[O_j i[H, O_i]] / 8 (real part).
inline Mat8 heisenberg_coefficients(const ControlParams& p, double tau) {
    const auto& basis = coherence_basis();
    const cplx i{0.0, 1.0};
    const Mat8c H = build_hamiltonian(p, tau);
    Mat8 out;
    for (int r = 0; r < 8; ++r) {
        const Mat8c& O = basis[static_cast<std::size_t>(r)];
        const Mat8c C = i * (H * O - O * H);
        for (int j = 0; j < 8; ++j) out(r, j) = normalized_trace_product(basis[static_cast<std::size_t>(j)], C).real();
    }
    return out;
}

struct CrossValidation {
    double max_deviation = 0.0;
    double tau_at_max = 0.0;
    double max_unitarity_defect = 0.0;
};

/// Max over the shared grid of |x_full(tau) - x_rk4(tau)|_2 from x(0) = e1.
inline CrossValidation cross_validate(const ControlParams& p, double tau_end, double dtau, int record_every = 1,
                                      Stepper stepper = Stepper::magnus4) {
    const UnitaryTrajectory full = schrodinger_propagate(p, tau_end, dtau, record_every, stepper);
    const Trajectory reduced = propagate_rk4(p, unit_state(1), tau_end, dtau, record_every);
    if (full.samples.size() != reduced.samples.size())
        throw std::logic_error("cross_validate: trajectories sampled on different grids");
    CrossValidation out;
    for (std::size_t k = 0; k < full.samples.size(); ++k) {
        const double dev = (expectations(full.samples[k].U) - reduced.samples[k].x).norm();
        if (dev > out.max_deviation) out.max_deviation = dev, out.tau_at_max = full.samples[k].tau;
        out.max_unitarity_defect = std::max(out.max_unitarity_defect, unitarity_defect(full.samples[k].U));
    }
    return out;
}

/// Expectation-value trajectory from the full propagator, tagged full-hilbert.
inline Trajectory full_hilbert_trajectory(const ControlParams& p, double tau_end, double dtau, int record_every = 1) {
    const UnitaryTrajectory full = schrodinger_propagate(p, tau_end, dtau, record_every);
    Trajectory traj{{}, Method::full_hilbert, dtau};
    traj.samples.reserve(full.samples.size());
    for (const auto& s : full.samples) traj.samples.push_back({s.tau, expectations(s.U)});
    return traj;
}

}  // namespace coherence
