#pragma once

// Final-time boundary problem for the transfer sx1 -> sy1 sy2 sz3.
//
// With a = 2 tau*, c+- = (bz +- K) a and b, d the doubled phase integrals of
// the rotating field, the integrated generators read
//
//   A+-(tau*) = [[ 0,  0, -a,  0 ],
//                [ 0,  0, -b, -c+-],
//                [ a,  b,  0,  d ],
//                [ 0, c+-, -d, 0 ]]
//
// and the transfer requires exp[A+-] e1 = +-e4. This header evaluates the
// closed-form residual system for that condition, its integer-labelled
// solution family, and the inversion back to physical controls.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coherence/reduced_dynamics.hpp"
#include "coherence/roots.hpp"
#include "coherence/spin_algebra.hpp"

namespace coherence {

inline constexpr double pi = std::numbers::pi;

struct BoundaryConstants {
    double a = 0.0;
    double b = 0.0;
    double c_plus = 0.0;
    double c_minus = 0.0;
    double d = 0.0;

    double c(Half half) const { return half == Half::plus ? c_plus : c_minus; }
};

/// Integer labels of a boundary solution: m = 2 m0, n = 2 n0 + 1, 2p = 2q = m + n + 1.
struct QuantumNumbers {
    int m0 = 0;
    int n0 = 0;
    int m = 0;
    int n = 1;
    int p = 1;
    int q = 1;

    static QuantumNumbers from_indices(int m0, int n0) {
        if (m0 < 0 || n0 < m0) throw std::invalid_argument("quantum numbers require n0 >= m0 >= 0");
        const int m = 2 * m0;
        const int n = 2 * n0 + 1;
        return {m0, n0, m, n, (m + n + 1) / 2, (m + n + 1) / 2};
    }
};

inline double sinc(double z) {
    if (std::abs(z) < 1e-4) {
        const double z2 = z * z;
        return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0 * (1.0 - z2 / 110.0))));
    }
    return std::sin(z) / z;
}

struct DerivedQuantities {
    double X_plus = 0.0, X_minus = 0.0;
    double Delta_plus = 0.0, Delta_minus = 0.0;
    double sqrt_Delta_plus = 0.0, sqrt_Delta_minus = 0.0;
    double Z_plus = 0.0, Z_minus = 0.0, W_plus = 0.0, W_minus = 0.0;
    double CZ_plus = 1.0, CZ_minus = 1.0, CW_plus = 1.0, CW_minus = 1.0;
    double SZ_plus = 1.0, SZ_minus = 1.0, SW_plus = 1.0, SW_minus = 1.0;

    /// Overrides the four angles and recomputes their cosines and sinc values.
    void set_angles(double z_plus, double z_minus, double w_plus, double w_minus) {
        Z_plus = z_plus;
        Z_minus = z_minus;
        W_plus = w_plus;
        W_minus = w_minus;
        CZ_plus = std::cos(Z_plus);
        CZ_minus = std::cos(Z_minus);
        CW_plus = std::cos(W_plus);
        CW_minus = std::cos(W_minus);
        SZ_plus = sinc(Z_plus);
        SZ_minus = sinc(Z_minus);
        SW_plus = sinc(W_plus);
        SW_minus = sinc(W_minus);
    }
};

inline DerivedQuantities derived_quantities(const BoundaryConstants& c) {
    DerivedQuantities q;
    const double a2 = c.a * c.a, b2 = c.b * c.b, d2 = c.d * c.d;
    q.X_plus = a2 + b2 + c.c_plus * c.c_plus + d2;
    q.X_minus = a2 + b2 + c.c_minus * c.c_minus + d2;
    q.Delta_plus = q.X_plus * q.X_plus - 4.0 * a2 * c.c_plus * c.c_plus;
    q.Delta_minus = q.X_minus * q.X_minus - 4.0 * a2 * c.c_minus * c.c_minus;
    q.sqrt_Delta_plus = std::sqrt(std::max(0.0, q.Delta_plus));
    q.sqrt_Delta_minus = std::sqrt(std::max(0.0, q.Delta_minus));
    // X - sqrt(Delta) >= 0 analytically; clamp rounding.
    q.set_angles(std::sqrt(0.5 * (q.X_plus + q.sqrt_Delta_plus)),
                 std::sqrt(0.5 * std::max(0.0, q.X_plus - q.sqrt_Delta_plus)),
                 std::sqrt(0.5 * (q.X_minus + q.sqrt_Delta_minus)),
                 std::sqrt(0.5 * std::max(0.0, q.X_minus - q.sqrt_Delta_minus)));
    return q;
}

/// Boundary constants reached by physical controls at tau_star.
inline BoundaryConstants abcd_from_physical(const ControlParams& p, double tau_star) {
    const auto [cos_int, sin_int] = phase_integrals(p.omega_rf, p.theta0, tau_star);
    const double a = 2.0 * tau_star;
    return {a, 2.0 * p.b0 * cos_int, (p.bz + p.K) * a, (p.bz - p.K) * a, 2.0 * p.b0 * sin_int};
}

/// A+-(tau*) built directly from the boundary constants.
inline SkewMatrix4 boundary_generator(const BoundaryConstants& c, Half half) {
    return SkewMatrix4::from_upper(0.0, -c.a, 0.0, -c.b, -c.c(half), c.d);
}

/// First columns of exp[A+(tau*)] and exp[A-(tau*)].
inline std::pair<Vec4, Vec4> exp_boundary_check(const BoundaryConstants& c) {
    return {expm_skew4(boundary_generator(c, Half::plus)).col(0),
            expm_skew4(boundary_generator(c, Half::minus)).col(0)};
}

/// LHS - RHS of the eight closed-form boundary equations, ordered
/// (11)+, (11)-, (31)+, (31)-, (21)+, (21)-, (41)+, (41)-.
inline std::array<double, 8> boundary_residuals(const BoundaryConstants& c, const DerivedQuantities& q) {
    const double a2 = c.a * c.a;
    const double cp2 = c.c_plus * c.c_plus, cm2 = c.c_minus * c.c_minus;
    const double sdp = q.sqrt_Delta_plus, sdm = q.sqrt_Delta_minus;

    // sqrt(Delta)/a at a = 0 only arises in the trivial solution.
    auto over_a = [&](double s) {
        if (c.a != 0.0) return s / c.a;
        return s == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    };

    std::array<double, 8> r{};
    r[0] = (q.X_plus - 2.0 * a2 - sdp) * q.CZ_plus - (q.X_plus - 2.0 * a2 + sdp) * q.CZ_minus;
    r[1] = (q.X_minus - 2.0 * a2 - sdm) * q.CW_plus - (q.X_minus - 2.0 * a2 + sdm) * q.CW_minus;
    r[2] = (q.X_plus - 2.0 * cp2 + sdp) * q.SZ_plus - (q.X_plus - 2.0 * cp2 - sdp) * q.SZ_minus;
    r[3] = (q.X_minus - 2.0 * cm2 + sdm) * q.SW_plus - (q.X_minus - 2.0 * cm2 - sdm) * q.SW_minus;
    r[4] = c.b * (q.CZ_plus - q.CZ_minus) - c.c_plus * c.d * (q.SZ_plus - q.SZ_minus);
    r[5] = c.b * (q.CW_plus - q.CW_minus) - c.c_minus * c.d * (q.SW_plus - q.SW_minus);
    r[6] = c.d * (q.CZ_plus - q.CZ_minus) + c.c_plus * c.b * (q.SZ_plus - q.SZ_minus) - over_a(sdp);
    r[7] = c.d * (q.CW_plus - q.CW_minus) + c.c_minus * c.b * (q.SW_plus - q.SW_minus) + over_a(sdm);
    return r;
}

inline std::array<double, 8> boundary_residuals(const BoundaryConstants& c) {
    return boundary_residuals(c, derived_quantities(c));
}

template <std::size_t N>
double max_abs(const std::array<double, N>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Residuals (LHS - RHS) of the relations left after eliminating Z+- and W+-,
/// ordered: sqrt(Delta+), sqrt(Delta-), X+ - d^2, X- - d^2 in terms of (n, p)
/// and (m, q); then the two sqrt(Delta) relations through a^2 + b^2 - c^2 and
/// the two a b c+- relations.
inline std::array<double, 8> integer_relations_check(const BoundaryConstants& c, const QuantumNumbers& qn) {
    const DerivedQuantities q = derived_quantities(c);
    const double n1 = 2.0 * qn.n + 1.0;
    const double m1 = 2.0 * qn.m + 1.0;
    const double p = qn.p, qq = qn.q;
    const double pi2 = pi * pi;
    const double a2b2 = c.a * c.a + c.b * c.b;
    const double ep = a2b2 - c.c_plus * c.c_plus;
    const double em = a2b2 - c.c_minus * c.c_minus;
    const double np_gap = n1 - 2.0 * p;
    const double mq_gap = m1 - 2.0 * qq;
    const double sign_n = (qn.n + 1) % 2 == 0 ? 1.0 : -1.0;
    const double sign_m = qn.m % 2 == 0 ? 1.0 : -1.0;

    std::array<double, 8> r{};
    r[0] = q.sqrt_Delta_plus - 2.0 * pi2 * p * np_gap;
    r[1] = q.sqrt_Delta_minus + 2.0 * pi2 * qq * mq_gap;
    r[2] = a2b2 + c.c_plus * c.c_plus - 0.5 * pi2 * (n1 * n1 - 4.0 * p * n1 + 8.0 * p * p);
    r[3] = a2b2 + c.c_minus * c.c_minus - 0.5 * pi2 * (m1 * m1 - 4.0 * qq * m1 + 8.0 * qq * qq);
    r[4] = q.sqrt_Delta_plus - ep * 2.0 * p / np_gap;
    r[5] = q.sqrt_Delta_minus + em * 2.0 * qq / mq_gap;
    r[6] = c.a * c.b * c.c_plus - sign_n * ep * pi * n1 * (n1 - 4.0 * p) / (4.0 * np_gap);
    r[7] = c.a * c.b * c.c_minus - sign_m * em * pi * m1 * (m1 - 4.0 * qq) / (4.0 * mq_gap);
    return r;
}

/// Boundary residuals with the discarded angle branch Z- = Z+ + 2 pi p,
/// W+ = W- + 2 pi q substituted in place of the derived angles.
inline std::array<double, 8> rejected_branch_residuals(const BoundaryConstants& c, const QuantumNumbers& qn) {
    DerivedQuantities q = derived_quantities(c);
    q.set_angles(q.Z_plus, q.Z_plus + 2.0 * pi * qn.p, q.W_minus + 2.0 * pi * qn.q, q.W_minus);
    return boundary_residuals(c, q);
}

struct AnalyticSolution {
    BoundaryConstants constants;
    QuantumNumbers qn;
    double tau_star = 0.0;
    int k_sign = 1;
    int c_sign = 1;
};

/// Integer-labelled solution family with |K| = 1:
///   a = (pi/2) sqrt((2m+1)(2n+1)),  c+ = c_sign a,  c- = -c_sign a,
///   b = -pi K (n - m),  d = 0,  tau* = a / 2.
/// Only c_sign == k_sign (bz = 0) satisfies the boundary system.
inline AnalyticSolution analytic_family(int m0, int n0, int k_sign, int c_sign) {
    if (std::abs(k_sign) != 1 || std::abs(c_sign) != 1) throw std::invalid_argument("signs must be +1 or -1");
    const QuantumNumbers qn = QuantumNumbers::from_indices(m0, n0);
    const double a = 0.5 * pi * std::sqrt((2.0 * qn.m + 1.0) * (2.0 * qn.n + 1.0));
    const double K = k_sign;
    BoundaryConstants c{a, -pi * K * (qn.n - qn.m), c_sign * a, -c_sign * a, 0.0};
    return {c, qn, 0.5 * a, k_sign, c_sign};
}

/// Sign/branch labels for the closed-form optimal controls.
struct Branch {
    int b0_sign = 1;
    int omega_sign = 1;
    int theta_sign = -1;
    int r = 0;

    bool operator==(const Branch&) const = default;
};

/// Which lower bound on omega_hat is enforced: the fixed-energy floor
/// omega^2 > 1 + K^2, or the stricter omega > 2.
enum class OmegaFloor { energy, stated };

inline bool omega_in_domain(double omega_hat, double K, OmegaFloor floor) {
    if (floor == OmegaFloor::stated) return omega_hat > 2.0;
    return field_norm_squared(omega_hat, K) > 0.0;
}

/// Closed-form optimal controls for the (m0, n0) = (0, 0) solution:
///   bz = 0, b0 = +-K s, Omega = +-(4/pi) s, theta0 = ((2r+1) pi +- sqrt(3) s)/2,
/// with s = sqrt(omega^2 - 2).
inline ControlParams closed_form_params(double omega_hat, int k_sign, const Branch& br,
                                          OmegaFloor floor = OmegaFloor::energy) {
    if (std::abs(k_sign) != 1) throw std::invalid_argument("k_sign must be +1 or -1");
    const double K = k_sign;
    if (!omega_in_domain(omega_hat, K, floor) || omega_hat * omega_hat <= 2.0)
        throw std::domain_error("omega_hat below the allowed floor");
    const double s = std::sqrt(omega_hat * omega_hat - 2.0);
    ControlParams p;
    p.K = K;
    p.omega_hat = omega_hat;
    p.bz = 0.0;
    p.b0 = br.b0_sign * K * s;
    p.omega_rf = br.omega_sign * 4.0 / pi * s;
    p.theta0 = 0.5 * ((2.0 * br.r + 1.0) * pi + br.theta_sign * std::sqrt(3.0) * s);
    return p;
}

/// All 2 x 2 x 2 sign branches for r in [r_min, r_max].
inline std::vector<Branch> enumerate_branches(int r_min = 0, int r_max = 2) {
    std::vector<Branch> out;
    for (int sb : {1, -1})
        for (int so : {1, -1})
            for (int st : {1, -1})
                for (int r = r_min; r <= r_max; ++r) out.push_back({sb, so, st, r});
    return out;
}

struct InversionRequest {
    double omega_hat = 0.0;
    double K = 1.0;
    double tau_star = 0.0;
    double b_target = 0.0;
    std::optional<double> c_plus;  ///< defaults to K a, i.e. bz = 0
    int r_min = 0;
    int r_max = 0;
    double root_lo = 1e-3;
    double root_hi = 20.0;
    int scan_points = 10000;
    double xtol = 1e-12;
    double accept_tol = 1e-10;
};

struct InversionRoot {
    ControlParams params;
    Branch branch;
    double b_residual = 0.0;
    double d_residual = 0.0;
};

/// Solves for physical controls reaching (a, b_target, c+-, d = 0) at tau*.
/// On the d = 0 branch theta0 = ((2r+1) pi - Omega tau*)/2, and b = b_target
/// reduces to 4 (b0/Omega) (-1)^r sin(Omega tau*/2) = -b_target, solved for
/// Omega by bracketing and bisection. Both signs of b0 are tried.
inline std::vector<InversionRoot> invert_to_physical(const InversionRequest& req) {
    if (req.b_target == 0.0) throw std::invalid_argument("b_target must be nonzero");
    if (!(req.tau_star > 0.0)) throw std::invalid_argument("tau_star must be positive");
    if (req.omega_hat * req.omega_hat <= 2.0) throw std::domain_error("omega_hat^2 must exceed 2");
    const double a = 2.0 * req.tau_star;
    const double bz = req.c_plus ? *req.c_plus / a - req.K : 0.0;
    const double b0_sq = field_norm_squared(req.omega_hat, req.K) - bz * bz;
    if (b0_sq < 0.0) throw std::domain_error("requested bz exceeds the available field norm");
    const double b0_mag = std::sqrt(b0_sq);

    std::vector<InversionRoot> out;
    for (int r = req.r_min; r <= req.r_max; ++r) {
        const double parity = (r % 2 == 0) ? 1.0 : -1.0;
        for (int b0_sign : {1, -1}) {
            const double b0 = b0_sign * b0_mag;
            auto f = [&](double w) { return 4.0 * (b0 / w) * parity * std::sin(0.5 * w * req.tau_star) + req.b_target; };
            for (const Bracket& br : scan_brackets(f, req.root_lo, req.root_hi, req.scan_points)) {
                const double w = bisect(f, br, req.xtol);
                ControlParams p;
                p.K = req.K;
                p.omega_hat = req.omega_hat;
                p.b0 = b0;
                p.bz = bz;
                p.omega_rf = w;
                p.theta0 = 0.5 * ((2.0 * r + 1.0) * pi - w * req.tau_star);
                const BoundaryConstants c = abcd_from_physical(p, req.tau_star);
                InversionRoot root{p, {b0_sign, w > 0.0 ? 1 : -1, -1, r}, std::abs(c.b - req.b_target), std::abs(c.d)};
                if (root.b_residual <= req.accept_tol && root.d_residual <= req.accept_tol) out.push_back(root);
            }
        }
    }
    return out;
}

/// tau* of the (0, 0) solution, sqrt(3) pi / 4.
inline double optimal_tau_star() { return std::sqrt(3.0) * pi / 4.0; }

/// omega_hat at which the closed-form controls meet b = -pi K: sin(sqrt(3) s / 2) = 1
/// with s = sqrt(omega^2 - 2), i.e. omega^2 = 2 + pi^2/3.
inline double consistent_omega_closed_form() { return std::sqrt(2.0 + pi * pi / 3.0); }

struct ConsistentPoint {
    double omega_hat = 0.0;
    Branch branch;
    double b_residual = 0.0;
    double d_residual = 0.0;
};

struct ResidualSample {
    double omega_hat = 0.0;
    double residual = 0.0;  ///< min over branches of max(|b + pi K|, |d|)
};

struct ConsistencyScan {
    std::vector<ResidualSample> curve;
    std::vector<ConsistentPoint> points;

    /// Distinct omega_hat values, ascending. Points closer than 1e-6 are one
    /// root seen from several branches; the member with the smallest residual
    /// represents it. The residual touches zero quadratically, so refined
    /// locations only agree to about sqrt(machine epsilon).
    std::vector<double> omegas() const {
        std::vector<double> out;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& pt : points) {
            const double r = std::max(pt.b_residual, pt.d_residual);
            if (out.empty() || pt.omega_hat - out.back() > 1e-6) {
                out.push_back(pt.omega_hat);
                best = r;
            } else if (r < best) {
                out.back() = pt.omega_hat;
                best = r;
            }
        }
        return out;
    }
};

/// Residuals (|b - (-pi K)|, |d|) of the closed-form controls at tau* = sqrt(3) pi / 4.
inline std::pair<double, double> closed_form_residuals(double omega_hat, int k_sign, const Branch& br) {
    const ControlParams p = closed_form_params(omega_hat, k_sign, br);
    const BoundaryConstants c = abcd_from_physical(p, optimal_tau_star());
    return {std::abs(c.b + pi * k_sign), std::abs(c.d)};
}

/// Samples omega_hat on (lo, hi] and reports where the closed-form controls
/// satisfy the b and d boundary values. Each local minimum of the sampled
/// residual is refined by golden-section search before the tolerance test.
inline ConsistencyScan consistency_scan(double lo, double hi, int k_sign, int samples, double tol = 1e-9) {
    if (samples < 1) throw std::invalid_argument("consistency scan needs at least one sample");
    if (!(hi > lo)) throw std::invalid_argument("consistency scan needs lo < hi");
    const double floor = std::sqrt(2.0);
    if (hi <= floor) throw std::domain_error("scan range lies entirely below omega^2 = 2");
    lo = std::max(lo, floor);

    std::vector<double> grid(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * (i + 1) / samples;

    const std::vector<Branch> branches = enumerate_branches(0, 2);
    ConsistencyScan scan;
    scan.curve.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        scan.curve[i] = {grid[i], std::numeric_limits<double>::infinity()};

    for (const Branch& br : branches) {
        auto residual = [&](double w) {
            if (w * w <= 2.0) return std::numeric_limits<double>::infinity();
            const auto [rb, rd] = closed_form_residuals(w, k_sign, br);
            return std::max(rb, rd);
        };
        std::vector<double> values(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            values[i] = residual(grid[i]);
            scan.curve[i].residual = std::min(scan.curve[i].residual, values[i]);
        }
        std::vector<double> found;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const bool left_ok = i == 0 || values[i] <= values[i - 1];
            const bool right_ok = i + 1 == grid.size() || values[i] <= values[i + 1];
            if (!left_ok || !right_ok || !std::isfinite(values[i])) continue;
            const double a = i == 0 ? lo : grid[i - 1];
            const double b = i + 1 == grid.size() ? hi : grid[i + 1];
            const double w = golden_section_minimize(residual, a, b);
            const auto [rb, rd] = closed_form_residuals(w, k_sign, br);
            if (std::max(rb, rd) > tol) continue;
            if (std::any_of(found.begin(), found.end(), [&](double x) { return std::abs(x - w) < 1e-8; })) continue;
            found.push_back(w);
            scan.points.push_back({w, br, rb, rd});
        }
    }
    std::sort(scan.points.begin(), scan.points.end(),
              [](const ConsistentPoint& x, const ConsistentPoint& y) { return x.omega_hat < y.omega_hat; });
    return scan;
}

struct SweepRow {
    int m0 = 0;
    int n0 = 0;
    double tau_star = 0.0;
    bool admissible = true;  ///< n0 >= m0
};

/// tau*(m0, n0) = (pi/4) sqrt((2m+1)(2n+1)) over the full rectangle
/// [0, m0_max] x [0, n0_max], sorted ascending (ties by m0, n0).
inline std::vector<SweepRow> sweep_tau(int m0_max, int n0_max) {
    if (m0_max < 0 || n0_max < 0) throw std::invalid_argument("sweep bounds must be nonnegative");
    std::vector<SweepRow> rows;
    for (int m0 = 0; m0 <= m0_max; ++m0)
        for (int n0 = 0; n0 <= n0_max; ++n0) {
            const double m = 2.0 * m0, n = 2.0 * n0 + 1.0;
            rows.push_back({m0, n0, 0.25 * pi * std::sqrt((2.0 * m + 1.0) * (2.0 * n + 1.0)), n0 >= m0});
        }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SweepRow& x, const SweepRow& y) { return x.tau_star < y.tau_star; });
    return rows;
}

enum class Target { x6, x7, x8 };

inline Target target_from_name(const std::string& name) {
    if (name == "x6") return Target::x6;
    if (name == "x7") return Target::x7;
    if (name == "x8") return Target::x8;
    throw std::invalid_argument("unknown target '" + name + "' (expected x6, x7 or x8)");
}

inline int target_component(Target t) {
    switch (t) {
        case Target::x6: return 6;
        case Target::x7: return 7;
        case Target::x8: return 8;
    }
    return 8;
}

struct TargetBoundary {
    Vec4 y_plus = Vec4::Zero();
    Vec4 y_minus = Vec4::Zero();
    bool solution_expected = true;
};

/// Final values of y+- for x_target(tau*) = 1: y+ = e_k, y- = -e_k with k the
/// position of the target inside x_-.
inline TargetBoundary target_variant(Target t) {
    TargetBoundary out;
    const int k = target_component(t) - 5;
    out.y_plus(k) = 1.0;
    out.y_minus(k) = -1.0;
    out.solution_expected = t != Target::x7;
    return out;
}

/// Maps constants for the x6 problem onto the equivalent x8 problem. The
/// signed permutation swapping indices 2 and 4 of y+- takes A(a, b, c, d) to
/// A(a, -d, c, b) and e2 to e4.
inline BoundaryConstants x6_to_x8(const BoundaryConstants& c) { return {c.a, -c.d, c.c_plus, c.c_minus, c.b}; }

/// Plain exchange of b and d.
inline BoundaryConstants exchange_b_d(const BoundaryConstants& c) { return {c.a, c.d, c.c_plus, c.c_minus, c.b}; }

/// Analytic constants for a target, or nullopt when no transfer exists.
/// For x6 these are b = 0, d = pi K (n - m); the plain b <-> d exchange of the
/// x8 constants instead lands on -x6.
inline std::optional<AnalyticSolution> target_analytic(Target t, int m0, int n0, int k_sign) {
    if (t == Target::x7) return std::nullopt;
    AnalyticSolution sol = analytic_family(m0, n0, k_sign, k_sign);
    if (t == Target::x6) sol.constants = {sol.constants.a, 0.0, sol.constants.c_plus, sol.constants.c_minus,
                                          -sol.constants.b};
    return sol;
}

/// Closed-form boundary residuals for the given target.
inline std::array<double, 8> target_boundary_residuals(Target t, const BoundaryConstants& c) {
    switch (t) {
        case Target::x8: return boundary_residuals(c);
        case Target::x6: return boundary_residuals(x6_to_x8(c));
        case Target::x7: break;
    }
    throw std::invalid_argument("no closed-form residual system for target x7");
}

/// max over halves of |exp[A+-] e1 - y+-(tau*)|.
inline double target_exp_defect(Target t, const BoundaryConstants& c) {
    const auto [col_p, col_m] = exp_boundary_check(c);
    const TargetBoundary tb = target_variant(t);
    return std::max((col_p - tb.y_plus).cwiseAbs().maxCoeff(), (col_m - tb.y_minus).cwiseAbs().maxCoeff());
}

}  // namespace coherence
