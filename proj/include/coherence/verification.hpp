#pragma once

// End-to-end verification run producing a VerificationReport.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "coherence/boundary_solver.hpp"
#include "coherence/full_hilbert.hpp"
#include "coherence/optimality_search.hpp"
#include "coherence/reduced_dynamics.hpp"
#include "coherence/report.hpp"
#include "coherence/sampling.hpp"

namespace coherence {

struct VerifyConfig {
    std::optional<double> omega_hat;  ///< nullopt selects a consistent value from the scan
    int k_sign = 1;
    int closure_sets = 10;
    int dynamics_sets = 5;
    double dynamics_dtau = 1e-4;
    int search_resolution = 21;
    bool run_search = true;
    unsigned seed = 20121110u;
    double tol_residual = 1e-10;
    double tol_closure = 1e-12;
    double tol_dynamics = 1e-8;
    double tol_transfer = 1e-6;
    double threshold = 0.999;
};

inline VerificationReport run_verification(const VerifyConfig& cfg) {
    if (std::abs(cfg.k_sign) != 1) throw std::invalid_argument("k_sign must be +1 or -1");
    if (cfg.omega_hat && !(*cfg.omega_hat * *cfg.omega_hat > 2.0))
        throw std::domain_error("omega_hat must satisfy omega_hat^2 > 1 + K^2 = 2");

    VerificationReport rep;
    const int k = cfg.k_sign;
    const double tau_opt = optimal_tau_star();

    // Boundary algebra of the minimal solution.
    const AnalyticSolution sol = analytic_family(0, 0, k, k);
    rep.expect_near("tau_star(0,0)", sol.tau_star, tau_opt, 1e-12, "sqrt(3) pi / 4");
    rep.expect_at_most("boundary residuals (0,0)", max_abs(boundary_residuals(sol.constants)), cfg.tol_residual,
                       "closed-form boundary system = 0");
    rep.expect_at_most("integer relations (0,0)", max_abs(integer_relations_check(sol.constants, sol.qn)),
                       cfg.tol_residual, "quantum-number relations, 2p = 2q = m + n + 1");
    rep.expect_at_most("exp boundary columns (0,0)", target_exp_defect(Target::x8, sol.constants), cfg.tol_residual,
                       "exp[A+-(tau*)] e1 = +-e4");

    const auto rows = sweep_tau(3, 3);
    const bool unique_min = rows.size() > 1 && rows[0].m0 == 0 && rows[0].n0 == 0 && rows[1].tau_star > rows[0].tau_star;
    rep.expect_true("sweep minimum at (0,0)", unique_min, rows.front().tau_star, "unique minimum at m0 = n0 = 0",
                    "tau* sweep over m0, n0 in [0, 3]");

    const auto x6 = target_analytic(Target::x6, 0, 0, k);
    rep.expect_at_most("x6 residuals (0,0)", max_abs(target_boundary_residuals(Target::x6, x6->constants)),
                       cfg.tol_residual, "x6 variant, same tau*");
    rep.expect_at_most("x6 exp boundary columns", target_exp_defect(Target::x6, x6->constants), cfg.tol_residual,
                       "exp[A+-(tau*)] e1 = +-e2");

    // Structural closure and dynamics oracles.
    std::mt19937_64 rng(cfg.seed);
    double closure = 0.0;
    const std::vector<double> taus = linspace(0.0, 3.0 * tau_opt, 10);
    for (int s = 0; s < cfg.closure_sets; ++s) closure = std::max(closure, closure_check(random_energy_consistent(rng), taus));
    rep.expect_at_most("closure i[H,O_i] vs M rows", closure, cfg.tol_closure, "Heisenberg rule d<O>/dt = i<[H,O]>");

    double full_vs_rk4 = 0.0, exact_vs_rk4 = 0.0;
    for (int s = 0; s < cfg.dynamics_sets; ++s) {
        const ControlParams p = random_energy_consistent(rng);
        full_vs_rk4 = std::max(full_vs_rk4, cross_validate(p, 3.0 * tau_opt, cfg.dynamics_dtau, 50).max_deviation);
        const Trajectory rk = propagate_rk4(p, unit_state(1), 3.0 * tau_opt, cfg.dynamics_dtau, 50);
        for (const auto& smp : rk.samples)
            exact_vs_rk4 = std::max(exact_vs_rk4, (exact_state(p, unit_state(1), smp.tau) - smp.x).norm());
    }
    rep.expect_at_most("full Hilbert vs reduced RK4", full_vs_rk4, cfg.tol_dynamics, "oracle equivalence");
    rep.expect_at_most("rotating-exact vs RK4", exact_vs_rk4, cfg.tol_dynamics, "oracle equivalence");

    // Consistency of the closed-form controls.
    const ConsistencyScan scan = consistency_scan(2.0, 4.0, k, 4001);
    const std::vector<double> consistent = scan.omegas();
    rep.expect_true("consistent omega_hat found", !consistent.empty(), static_cast<double>(consistent.size()),
                    ">= 1 value in (2, 4]", "bisection oracle: sin(sqrt(3) sqrt(omega^2 - 2)/2) = 1");
    if (!consistent.empty())
        rep.expect_near("consistent omega_hat value", consistent.front(), consistent_omega_closed_form(), 1e-6,
                        "sqrt(2 + pi^2/3)");

    double omega = cfg.omega_hat.value_or(consistent.empty() ? consistent_omega_closed_form() : consistent.front());
    std::optional<Branch> branch;
    for (const auto& pt : scan.points)
        if (std::abs(pt.omega_hat - omega) < 1e-6) {
            branch = pt.branch;
            break;
        }
    const ControlParams pstar = closed_form_params(omega, k, branch.value_or(Branch{1, 1, -1, 0}));
    const BoundaryConstants reached = abcd_from_physical(pstar, tau_opt);
    rep.measure("b(tau*) of chosen controls", reached.b, VerificationReport::fmt(-pi * k), "b = -pi K");
    rep.measure("d(tau*) of chosen controls", reached.d, "0", "d = 0");

    // Transfer with the chosen controls, and how far the integrated-generator ansatz is from the true propagator.
    const double x8_exact = target_expectation(pstar, tau_opt, Target::x8);
    const double x8_ansatz = expm_integral_state(pstar, unit_state(1), tau_opt)(7);
    Check& transfer = rep.measure("x8(tau*) rotating-exact", x8_exact, "1", "target sx1 -> sy1 sy2 sz3");
    transfer.tolerance = cfg.tol_transfer;
    transfer.detail = std::abs(x8_exact - 1.0) <= cfg.tol_transfer ? "within tolerance" : "tolerance violated";
    rep.measure("x8(tau*) integrated-generator ansatz", x8_ansatz, "1", "exp[A+-(tau*)] propagator");
    const Discrepancy disc = propagator_discrepancy(pstar, linspace(0.0, tau_opt, 201));
    rep.measure("propagator discrepancy over [0, tau*]", disc.max_deviation, "0 if exp[int M] were exact",
                "exp[A+-] vs rotating-frame exact")
        .detail = "at tau = " + VerificationReport::fmt(disc.tau_at_max);

    if (cfg.run_search) {
        SearchConfig sc;
        sc.threshold = cfg.threshold;
        sc.tau_max = 3.0 * tau_opt;
        const SearchResult gs = grid_search(omega, k, 8, SearchBounds::defaults(omega), cfg.search_resolution, sc);
        const double best = gs.best_tau.value_or(std::numeric_limits<double>::infinity());
        rep.expect_true("no x8 >= threshold before 0.95 tau*", best >= 0.95 * tau_opt, best,
                        ">= " + VerificationReport::fmt(0.95 * tau_opt), "ansatz grid search")
            .detail = gs.feasible ? "best tau measured" : "threshold never reached on grid (best tau = inf)";
        const ProbeResult probe = no_transfer_probe({omega}, k, 3.0 * tau_opt, cfg.search_resolution, 7);
        rep.expect_true("max x7 below threshold", probe.max_value < cfg.threshold, probe.max_value,
                        "< " + VerificationReport::fmt(cfg.threshold), "no transfer to sy1 sz2 sz3");
    }
    return rep;
}

}  // namespace coherence
