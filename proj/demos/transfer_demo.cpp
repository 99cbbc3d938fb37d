// Minimal walk through the library: closed-form controls at the consistent
// energy, the resulting boundary constants, and the x8 transfer curve.

#include <cstdio>

#include "coherence/coherence.hpp"

int main() {
    using namespace coherence;

    const double omega = consistent_omega_closed_form();
    const double tau_star = optimal_tau_star();
    const ControlParams p = closed_form_params(omega, 1, Branch{1, 1, -1, 0});
    std::printf("omega_hat = %.12f  b0 = %.12f  Omega = %.12f  theta0 = %.12f\n", omega, p.b0, p.omega_rf, p.theta0);

    const BoundaryConstants c = abcd_from_physical(p, tau_star);
    std::printf("a = %.12f  b = %.12f  c+ = %.12f  d = %.3e\n", c.a, c.b, c.c_plus, c.d);
    std::printf("boundary residual max = %.3e\n", max_abs(boundary_residuals(analytic_family(0, 0, 1, 1).constants)));

    TransferEvaluator ev(p);
    std::printf("\n%8s %12s %12s\n", "tau", "x8 exact", "x8 ansatz");
    for (double tau : linspace(0.0, tau_star, 9))
        std::printf("%8.4f %12.8f %12.8f\n", tau, ev.value(tau, 8), expm_integral_state(p, unit_state(1), tau)(7));

    const Discrepancy d = propagator_discrepancy(p, linspace(0.0, tau_star, 201));
    std::printf("\nmax |exp(int M) - exact| on [0, tau*] = %.6f at tau = %.4f\n", d.max_deviation, d.tau_at_max);
    return 0;
}
