#pragma once

// Brute-force probes of the rotating-field ansatz: minimal time to reach a
// target coherence over a grid of (bz, Omega, theta0) on the fixed-energy
// surface, local simplex refinement, and the supremum of an unreachable target.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coherence/boundary_solver.hpp"
#include "coherence/reduced_dynamics.hpp"
#include "coherence/roots.hpp"

namespace coherence {

/// Exact evolution of x from e1 under fixed controls, with cheap stepping on
/// a uniform grid through the precomputed rotating-frame step propagators.
class TransferEvaluator {
public:
    explicit TransferEvaluator(const ControlParams& p)
        : p_(p), gen_{rotating_frame_generator(p, Half::plus), rotating_frame_generator(p, Half::minus)} {}

    const ControlParams& params() const { return p_; }

    Vec8 state(double tau) const {
        const Mat4 R = frame_rotation(p_.omega_rf * tau);
        const Vec4 yp = R * expm(tau * gen_[0]).col(0);
        const Vec4 ym = R * expm(tau * gen_[1]).col(0);
        return join_halves(yp, ym);
    }

    double value(double tau, int component) const { return state(tau)(component - 1); }

    /// Calls visit(tau, x) on 0, dtau, ..., tau_max (last interval shortened).
    /// Stops early when visit returns false.
    template <typename Visitor>
    void scan(double tau_max, double dtau, Visitor&& visit) const {
        const std::vector<double> grid = time_grid(tau_max, dtau);
        const Mat4 step_p = expm(dtau * gen_[0]);
        const Mat4 step_m = expm(dtau * gen_[1]);
        Vec4 zp = Vec4::UnitX(), zm = Vec4::UnitX();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double t = grid[k];
            Vec8 x;
            if (k > 0 && std::abs(t - grid[k - 1] - dtau) <= 1e-12 * std::max(1.0, t)) {
                zp = step_p * zp;
                zm = step_m * zm;
                const Mat4 R = frame_rotation(p_.omega_rf * t);
                x = join_halves(R * zp, R * zm);
            } else {
                x = state(t);
            }
            if (!visit(t, x)) return;
        }
    }

private:
    ControlParams p_;
    std::array<Mat4, 2> gen_;
};

/// x_component(tau) from x(0) = e1, via the exact rotating-frame propagator.
inline double target_expectation(const ControlParams& p, double tau, int component) {
    if (component < 1 || component > 8) throw std::out_of_range("coherence component must be in 1..8");
    return TransferEvaluator(p).value(tau, component);
}

inline double target_expectation(const ControlParams& p, double tau, Target target) {
    return target_expectation(p, tau, target_component(target));
}

/// First tau in [0, tau_max] with x_component >= threshold: located on the
/// dtau grid, then bisected to 1e-9. nullopt when never reached.
inline std::optional<double> min_time_to_target(const TransferEvaluator& ev, int component, double threshold,
                                                double tau_max, double dtau) {
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    if (!(tau_max > 0.0)) throw std::invalid_argument("tau_max must be positive");
    if (component < 1 || component > 8) throw std::out_of_range("coherence component must be in 1..8");
    if (threshold > 1.0 + 1e-12) return std::nullopt;

    std::optional<double> hit;
    double prev_t = 0.0;
    ev.scan(tau_max, dtau, [&](double t, const Vec8& x) {
        if (x(component - 1) >= threshold) {
            hit = t;
            return false;
        }
        prev_t = t;
        return true;
    });
    if (!hit || *hit == 0.0) return hit;
    auto f = [&](double t) { return ev.value(t, component) - threshold; };
    if (f(prev_t) >= 0.0) return prev_t;
    return bisect(f, {prev_t, *hit}, 1e-9);
}

inline std::optional<double> min_time_to_target(const ControlParams& p, int component, double threshold,
                                                double tau_max, double dtau) {
    return min_time_to_target(TransferEvaluator(p), component, threshold, tau_max, dtau);
}

struct SearchBounds {
    double bz_lo = 0.0, bz_hi = 0.0;
    double omega_lo = -8.0, omega_hi = 8.0;
    double theta_lo = 0.0, theta_hi = 2.0 * pi;

    /// bz in [-omega_hat, omega_hat], Omega in [-8, 8], theta0 in [0, 2 pi).
    static SearchBounds defaults(double omega_hat) { return {-omega_hat, omega_hat, -8.0, 8.0, 0.0, 2.0 * pi}; }

    bool empty() const { return bz_lo > bz_hi || omega_lo > omega_hi || theta_lo > theta_hi; }
};

struct SearchConfig {
    double threshold = 0.999;
    double tau_max = 3.0 * optimal_tau_star();
    double dtau = 1e-3;
};

/// Axis samples: bz and Omega include both ends, theta0 is half-open. A
/// single-point axis uses the centre of bz and Omega and theta_lo.
struct GridAxes {
    std::vector<double> bz, omega, theta;

    static GridAxes build(const SearchBounds& b, int resolution) {
        if (resolution < 1) throw std::invalid_argument("grid resolution must be >= 1");
        if (b.empty()) throw std::invalid_argument("search bounds are empty");
        GridAxes g;
        if (resolution == 1) {
            g.bz = {0.5 * (b.bz_lo + b.bz_hi)};
            g.omega = {0.5 * (b.omega_lo + b.omega_hi)};
            g.theta = {b.theta_lo};
            return g;
        }
        g.bz = linspace(b.bz_lo, b.bz_hi, resolution);
        g.omega = linspace(b.omega_lo, b.omega_hi, resolution);
        for (int i = 0; i < resolution; ++i) g.theta.push_back(b.theta_lo + (b.theta_hi - b.theta_lo) * i / resolution);
        return g;
    }
};

/// Point on the fixed-energy surface with b0 >= 0 (the sign of b0 is
/// absorbed in theta0). nullopt when bz exceeds the available field norm.
inline std::optional<ControlParams> energy_surface_point(double omega_hat, double K, double bz, double omega_rf,
                                                         double theta0) {
    const double b0_sq = field_norm_squared(omega_hat, K) - bz * bz;
    if (b0_sq < 0.0) return std::nullopt;
    return ControlParams{K, omega_hat, std::sqrt(b0_sq), bz, omega_rf, theta0};
}

struct SearchResult {
    double omega_hat = 0.0;
    double K = 1.0;
    int component = 8;
    SearchConfig config;
    SearchBounds bounds;
    int resolution = 0;

    ControlParams best;
    std::optional<double> best_tau;
    double achieved = 0.0;  ///< x_component at best_tau (or at the seed's tau_max when infeasible)
    bool feasible = false;
    int evaluated = 0;
    int off_surface = 0;
    std::vector<double> trace;  ///< best tau after each refinement iteration
    std::string note;
};

/// Exhaustive grid over the ansatz; keeps the smallest time to reach the
/// threshold. Deterministic: ties keep the first point in (bz, Omega, theta0)
/// lexicographic order.
inline SearchResult grid_search(double omega_hat, double K, int component, const SearchBounds& bounds, int resolution,
                                const SearchConfig& cfg = {}) {
    if (field_norm_squared(omega_hat, K) < 0.0) throw std::domain_error("omega_hat below the energy floor");
    const GridAxes axes = GridAxes::build(bounds, resolution);
    SearchResult res;
    res.omega_hat = omega_hat;
    res.K = K;
    res.component = component;
    res.config = cfg;
    res.bounds = bounds;
    res.resolution = resolution;
    for (double bz : axes.bz)
        for (double w : axes.omega)
            for (double th : axes.theta) {
                const auto p = energy_surface_point(omega_hat, K, bz, w, th);
                if (!p) {
                    ++res.off_surface;
                    continue;
                }
                ++res.evaluated;
                const TransferEvaluator ev(*p);
                const auto t = min_time_to_target(ev, component, cfg.threshold, cfg.tau_max, cfg.dtau);
                if (t && (!res.best_tau || *t < *res.best_tau)) {
                    res.best_tau = t;
                    res.best = *p;
                    res.achieved = ev.value(*t, component);
                }
            }
    res.feasible = res.best_tau.has_value();
    if (!res.feasible) res.note = "threshold never reached on the grid";
    return res;
}

/// Nelder-Mead refinement of (bz, Omega, theta0) minimizing the time to reach
/// the threshold; b0 is re-projected onto the energy surface at every
/// evaluation. The recorded best tau never increases. An infeasible seed is
/// returned unchanged with a note.
inline SearchResult refine_local(const SearchResult& seed, int iterations) {
    if (iterations < 0) throw std::invalid_argument("iterations must be nonnegative");
    if (!seed.feasible || !seed.best_tau) {
        SearchResult out = seed;
        out.note = "infeasible seed: refinement skipped";
        return out;
    }
    const double bmax = std::sqrt(std::max(0.0, field_norm_squared(seed.omega_hat, seed.K)));
    using V3 = std::array<double, 3>;
    auto project = [&](const V3& v) {
        const double bz = std::clamp(v[0], -bmax, bmax);
        return *energy_surface_point(seed.omega_hat, seed.K, bz, v[1], v[2]);
    };
    auto objective = [&](const V3& v) {
        const auto t = min_time_to_target(project(v), seed.component, seed.config.threshold, seed.config.tau_max,
                                          seed.config.dtau);
        return t ? *t : std::numeric_limits<double>::infinity();
    };

    const V3 x0{seed.best.bz, seed.best.omega_rf, seed.best.theta0};
    const V3 steps{0.05 * std::max(bmax, 0.1), 0.05, 0.05};
    std::array<V3, 4> simplex{x0, x0, x0, x0};
    for (int i = 0; i < 3; ++i) simplex[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(i)] += steps[static_cast<std::size_t>(i)];
    std::array<double, 4> f{};
    f[0] = std::min(objective(x0), *seed.best_tau);
    for (std::size_t i = 1; i < 4; ++i) f[i] = objective(simplex[i]);

    SearchResult out = seed;
    out.trace.clear();
    auto lin = [](const V3& a, const V3& b, double t) {
        return V3{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])};
    };

    for (int it = 0; it < iterations; ++it) {
        std::array<std::size_t, 4> idx{0, 1, 2, 3};
        std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return f[x] < f[y]; });
        std::array<V3, 4> s2;
        std::array<double, 4> f2{};
        for (std::size_t i = 0; i < 4; ++i) s2[i] = simplex[idx[i]], f2[i] = f[idx[i]];
        simplex = s2;
        f = f2;

        V3 centroid{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t k = 0; k < 3; ++k) centroid[k] += simplex[i][k] / 3.0;

        const V3 xr = lin(centroid, simplex[3], -1.0);
        const double fr = objective(xr);
        if (fr < f[0]) {
            const V3 xe = lin(centroid, simplex[3], -2.0);
            const double fe = objective(xe);
            if (fe < fr) simplex[3] = xe, f[3] = fe;
            else simplex[3] = xr, f[3] = fr;
        } else if (fr < f[2]) {
            simplex[3] = xr, f[3] = fr;
        } else {
            const V3 xc = lin(centroid, simplex[3], 0.5);
            const double fc = objective(xc);
            if (fc < f[3]) {
                simplex[3] = xc, f[3] = fc;
            } else {
                for (std::size_t i = 1; i < 4; ++i) {
                    simplex[i] = lin(simplex[0], simplex[i], 0.5);
                    f[i] = objective(simplex[i]);
                }
            }
        }
        out.trace.push_back(*std::min_element(f.begin(), f.end()));
    }

    const auto best = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
    if (f[best] < *seed.best_tau) {
        out.best = project(simplex[best]);
        out.best_tau = f[best];
        out.achieved = target_expectation(out.best, f[best], seed.component);
    }
    out.note = "refined";
    return out;
}

struct ProbeResult {
    double max_value = -std::numeric_limits<double>::infinity();
    ControlParams params;
    double tau = 0.0;
    int evaluated = 0;
};

/// Supremum of x_component(tau) over the ansatz grid (default bounds per
/// omega_hat) and tau in [0, tau_max].
inline ProbeResult no_transfer_probe(const std::vector<double>& omega_hats, double K, double tau_max, int resolution,
                                     int component = 7, double dtau = 1e-3) {
    if (omega_hats.empty()) throw std::invalid_argument("no omega_hat values given");
    ProbeResult best;
    for (double omega_hat : omega_hats) {
        const GridAxes axes = GridAxes::build(SearchBounds::defaults(omega_hat), resolution);
        for (double bz : axes.bz)
            for (double w : axes.omega)
                for (double th : axes.theta) {
                    const auto p = energy_surface_point(omega_hat, K, bz, w, th);
                    if (!p) continue;
                    ++best.evaluated;
                    TransferEvaluator(*p).scan(tau_max, dtau, [&](double t, const Vec8& x) {
                        if (x(component - 1) > best.max_value) best = {x(component - 1), *p, t, best.evaluated};
                        return true;
                    });
                }
    }
    // Polish the best sample between its grid neighbours.
    const TransferEvaluator ev(best.params);
    const double lo = std::max(0.0, best.tau - dtau), hi = std::min(tau_max, best.tau + dtau);
    if (hi > lo) {
        const double t = golden_section_minimize([&](double s) { return -ev.value(s, component); }, lo, hi, 1e-10);
        if (const double v = ev.value(t, component); v > best.max_value) best.max_value = v, best.tau = t;
    }
    return best;
}

}  // namespace coherence
