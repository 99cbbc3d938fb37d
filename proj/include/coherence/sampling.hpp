#pragma once

#include <cmath>
#include <random>

#include "coherence/boundary_solver.hpp"
#include "coherence/spin_algebra.hpp"

namespace coherence {

/// Random controls on the fixed-energy surface: omega_hat in
/// [omega_lo, omega_hi], K = +-1, bz uniform within the available field norm,
/// Omega in [-4, 4], theta0 in [0, 2 pi).
template <typename Rng>
ControlParams random_energy_consistent(Rng& rng, double omega_lo = 1.6, double omega_hi = 3.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ControlParams p;
    p.K = unit(rng) < 0.5 ? 1.0 : -1.0;
    p.omega_hat = omega_lo + (omega_hi - omega_lo) * unit(rng);
    const double bmax = std::sqrt(field_norm_squared(p.omega_hat, p.K));
    p.bz = bmax * (2.0 * unit(rng) - 1.0);
    p.b0 = std::sqrt(std::max(0.0, bmax * bmax - p.bz * p.bz));
    p.omega_rf = 8.0 * unit(rng) - 4.0;
    p.theta0 = 2.0 * pi * unit(rng);
    return p;
}

}  // namespace coherence
