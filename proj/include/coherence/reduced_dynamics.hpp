#pragma once

// Reduced 8-dimensional expectation-value dynamics dx/dtau = M(tau) x with
// M = 2 [[P, Q], [Q, P]], and its decoupled halves y+- = x_+ +- x_- evolving
// under M+- = 2 (P +- Q).

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "coherence/matrix_exp.hpp"
#include "coherence/spin_algebra.hpp"

namespace coherence {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;
using Mat8 = Eigen::Matrix<double, 8, 8>;

/// Which decoupled half: +1 for y+ (generator P + Q), -1 for y- (P - Q).
enum class Half : int { plus = 1, minus = -1 };

inline double sign_of(Half h) { return h == Half::plus ? 1.0 : -1.0; }

/// 4x4 real skew-symmetric matrix. Construction checks A + A^T = 0.
class SkewMatrix4 {
public:
    SkewMatrix4() : m_(Mat4::Zero()) {}

    explicit SkewMatrix4(const Mat4& m, double tol = 1e-14) : m_(m) {
        if (skewness_defect(m) > tol) throw std::invalid_argument("matrix is not skew-symmetric");
    }

    /// Builds from the strict upper triangle, completing the lower part by antisymmetry.
    static SkewMatrix4 from_upper(double a12, double a13, double a14, double a23, double a24, double a34) {
        Mat4 m = Mat4::Zero();
        m(0, 1) = a12; m(0, 2) = a13; m(0, 3) = a14;
        m(1, 2) = a23; m(1, 3) = a24; m(2, 3) = a34;
        m -= Mat4(m.transpose());
        return SkewMatrix4(m);
    }

    static double skewness_defect(const Mat4& m) { return (m + m.transpose()).cwiseAbs().maxCoeff(); }

    const Mat4& matrix() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

    SkewMatrix4 operator+(const SkewMatrix4& o) const { return SkewMatrix4(m_ + o.m_); }
    SkewMatrix4 operator-(const SkewMatrix4& o) const { return SkewMatrix4(m_ - o.m_); }
    SkewMatrix4 operator*(double s) const { return SkewMatrix4(m_ * s); }

private:
    Mat4 m_;
};

/// ([cos theta(tau) - cos theta0] / Omega, [sin theta(tau) - sin theta0] / Omega),
/// i.e. the integrals of -sin theta(s) and cos theta(s) over [0, tau].
/// Below |Omega| < 1e-8 a series in Omega replaces the removable singularity.
inline std::pair<double, double> phase_integrals(double omega_rf, double theta0, double tau) {
    if (std::abs(omega_rf) < 1e-8) {
        const double c = std::cos(theta0), s = std::sin(theta0);
        const double t2 = tau * tau, t3 = t2 * tau;
        const double w = omega_rf;
        return {-tau * s - 0.5 * w * t2 * c + w * w * t3 * s / 6.0,
                tau * c - 0.5 * w * t2 * s - w * w * t3 * c / 6.0};
    }
    const double th = omega_rf * tau + theta0;
    return {(std::cos(th) - std::cos(theta0)) / omega_rf, (std::sin(th) - std::sin(theta0)) / omega_rf};
}

inline SkewMatrix4 build_P(const ControlParams& p, double tau) {
    const double th = p.phase(tau);
    return SkewMatrix4::from_upper(0.0, -1.0, 0.0, p.b0 * std::sin(th), -p.bz, p.b0 * std::cos(th));
}

inline SkewMatrix4 build_Q(double K) { return SkewMatrix4::from_upper(0.0, 0.0, 0.0, 0.0, -K, 0.0); }

inline Mat8 build_M(const ControlParams& p, double tau) {
    const Mat4 P = build_P(p, tau).matrix();
    const Mat4 Q = build_Q(p.K).matrix();
    Mat8 M;
    M << P, Q, Q, P;
    return 2.0 * M;
}

/// M+-(tau) = 2 (P(tau) +- Q).
inline SkewMatrix4 build_M_half(const ControlParams& p, double tau, Half half) {
    return (build_P(p, tau) + build_Q(p.K) * sign_of(half)) * 2.0;
}

inline std::pair<Vec4, Vec4> split_halves(const Vec8& x) {
    const Vec4 xp = x.head<4>();
    const Vec4 xm = x.tail<4>();
    return {xp + xm, xp - xm};
}

inline Vec8 join_halves(const Vec4& y_plus, const Vec4& y_minus) {
    Vec8 x;
    x.head<4>() = 0.5 * (y_plus + y_minus);
    x.tail<4>() = 0.5 * (y_plus - y_minus);
    return x;
}

inline Vec8 unit_state(int component) {
    if (component < 1 || component > 8) throw std::out_of_range("coherence component must be in 1..8");
    Vec8 x = Vec8::Zero();
    x(component - 1) = 1.0;
    return x;
}

enum class Method { rk4, expm_integral, rotating_exact, full_hilbert };

inline std::string_view method_name(Method m) {
    switch (m) {
        case Method::rk4: return "rk4";
        case Method::expm_integral: return "expm-integral";
        case Method::rotating_exact: return "rotating-exact";
        case Method::full_hilbert: return "full-hilbert";
    }
    return "unknown";
}

inline Method method_from_name(std::string_view name) {
    if (name == "rk4") return Method::rk4;
    if (name == "expm-integral") return Method::expm_integral;
    if (name == "rotating-exact" || name == "exact") return Method::rotating_exact;
    if (name == "full-hilbert") return Method::full_hilbert;
    throw std::invalid_argument("unknown propagation method '" + std::string(name) + "'");
}

struct TrajectorySample {
    double tau = 0.0;
    Vec8 x = Vec8::Zero();
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    Method method = Method::rk4;
    double dtau = 0.0;
};

/// Uniform time grid 0, dtau, 2 dtau, ..., ending exactly at tau_end (the last
/// interval may be shorter).
inline std::vector<double> time_grid(double tau_end, double dtau) {
    if (!(dtau > 0.0)) throw std::invalid_argument("time step must be positive");
    if (tau_end < 0.0) throw std::invalid_argument("end time must be nonnegative");
    std::vector<double> grid{0.0};
    const auto full_steps = static_cast<long>(std::floor(tau_end / dtau * (1.0 + 1e-14)));
    for (long k = 1; k <= full_steps; ++k) grid.push_back(static_cast<double>(k) * dtau);
    if (tau_end - grid.back() > 1e-12 * std::max(1.0, tau_end)) grid.push_back(tau_end);
    else grid.back() = tau_end;
    return grid;
}

/// Classic fixed-step RK4 on dx/dtau = M(tau) x. Every `record_every`-th grid
/// point is stored; the final point is always stored.
inline Trajectory propagate_rk4(const ControlParams& p, const Vec8& x0, double tau_end, double dtau,
                                int record_every = 1) {
    if (record_every < 1) throw std::invalid_argument("record stride must be >= 1");
    const std::vector<double> grid = time_grid(tau_end, dtau);
    Trajectory traj{{}, Method::rk4, dtau};
    traj.samples.reserve(grid.size() / static_cast<std::size_t>(record_every) + 2);
    Vec8 x = x0;
    traj.samples.push_back({0.0, x});
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double t = grid[k - 1];
        const double h = grid[k] - t;
        const Mat8 M0 = build_M(p, t);
        const Mat8 Mh = build_M(p, t + 0.5 * h);
        const Mat8 M1 = build_M(p, t + h);
        const Vec8 k1 = M0 * x;
        const Vec8 k2 = Mh * (x + 0.5 * h * k1);
        const Vec8 k3 = Mh * (x + 0.5 * h * k2);
        const Vec8 k4 = M1 * (x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (k % static_cast<std::size_t>(record_every) == 0 || k + 1 == grid.size())
            traj.samples.push_back({grid[k], x});
    }
    return traj;
}

/// A+-(tau) = int_0^tau M+-(s) ds, assembled in closed form as
/// 2 [[0, -R+-], [R+-^T, R0]].
inline SkewMatrix4 integral_generator(const ControlParams& p, double tau, Half half) {
    const auto [cos_int, sin_int] = phase_integrals(p.omega_rf, p.theta0, tau);
    const double r11 = tau;
    const double r21 = p.b0 * cos_int;
    const double r22 = (p.bz + sign_of(half) * p.K) * tau;
    const double r0 = p.b0 * sin_int;
    return SkewMatrix4::from_upper(0.0, -2.0 * r11, 0.0, -2.0 * r21, -2.0 * r22, 2.0 * r0);
}

/// Exponential of a skew-symmetric 4x4 matrix (an orthogonal matrix).
inline Mat4 expm_skew4(const Mat4& A, double tol = 1e-12) {
    if (SkewMatrix4::skewness_defect(A) > tol * std::max(1.0, A.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("expm_skew4: input is not skew-symmetric");
    return expm(A);
}

inline Mat4 expm_skew4(const SkewMatrix4& A) { return expm(A.matrix()); }

/// exp[A+-(tau)] y0: the integrated-generator ansatz. Exact only when M+-
/// commutes with its own integral (e.g. b0 = 0).
inline Vec4 propagate_expm_integral(const ControlParams& p, const Vec4& y0, double tau, Half half) {
    return expm_skew4(integral_generator(p, tau, half)) * y0;
}

namespace detail {

inline double frame_defect(const ControlParams& p, double tau, Half half, const Mat4& J) {
    const Mat4 M0 = build_M_half(p, 0.0, half).matrix();
    const Mat4 Mt = build_M_half(p, tau, half).matrix();
    const Mat4 R = expm((p.omega_rf * tau) * J);
    return (Mt - R * M0 * R.transpose()).cwiseAbs().maxCoeff();
}

inline Mat4 candidate_frame_generator() { return build_Q(1.0).matrix(); }

inline double resolve_frame_sign() {
    const ControlParams probe{1.0, 0.0, 1.3, 0.4, 1.7, 0.3};
    for (double sign : {1.0, -1.0}) {
        const Mat4 J = sign * candidate_frame_generator();
        double worst = 0.0;
        for (double tau : {0.1, 0.7, 1.9, 3.3})
            for (Half h : {Half::plus, Half::minus}) worst = std::max(worst, frame_defect(probe, tau, h, J));
        if (worst <= 1e-12) return sign;
    }
    throw std::logic_error("no rotating-frame generator sign satisfies the frame-conjugation invariant");
}

}  // namespace detail

/// Generator J of the (2,4)-plane rotation with M+-(tau) = e^{Omega tau J} M+-(0) e^{-Omega tau J}.
/// The orientation is fixed on first use by testing that identity.
inline const Mat4& frame_generator() {
    static const Mat4 J = detail::resolve_frame_sign() * detail::candidate_frame_generator();
    return J;
}

/// max |M+-(tau) - e^{Omega tau J} M+-(0) e^{-Omega tau J}| for the resolved J.
inline double frame_conjugation_defect(const ControlParams& p, double tau, Half half) {
    return detail::frame_defect(p, tau, half, frame_generator());
}

/// Planar rotation exp(phi J), evaluated in closed form.
inline Mat4 frame_rotation(double phi) {
    const Mat4& J = frame_generator();
    // J^2 projects (with a minus sign) onto the (2,4) plane.
    const Mat4 J2 = J * J;
    return Mat4::Identity() + std::sin(phi) * J + (1.0 - std::cos(phi)) * J2;
}

/// Constant generator in the rotating frame, M+-(0) - Omega J.
inline Mat4 rotating_frame_generator(const ControlParams& p, Half half) {
    return build_M_half(p, 0.0, half).matrix() - p.omega_rf * frame_generator();
}

/// Exact propagator of y+- over [0, tau]: e^{Omega tau J} e^{tau (M+-(0) - Omega J)}.
inline Mat4 rotating_exact_propagator(const ControlParams& p, double tau, Half half) {
    return frame_rotation(p.omega_rf * tau) * expm(tau * rotating_frame_generator(p, half));
}

inline Vec4 propagate_rotating_exact(const ControlParams& p, const Vec4& y0, double tau, Half half) {
    return rotating_exact_propagator(p, tau, half) * y0;
}

/// Full 8-vector at tau from x0 via the rotating-frame closed form.
inline Vec8 exact_state(const ControlParams& p, const Vec8& x0, double tau) {
    const auto [yp, ym] = split_halves(x0);
    return join_halves(propagate_rotating_exact(p, yp, tau, Half::plus),
                       propagate_rotating_exact(p, ym, tau, Half::minus));
}

/// Full 8-vector at tau from x0 via the integrated-generator ansatz.
inline Vec8 expm_integral_state(const ControlParams& p, const Vec8& x0, double tau) {
    const auto [yp, ym] = split_halves(x0);
    return join_halves(propagate_expm_integral(p, yp, tau, Half::plus),
                       propagate_expm_integral(p, ym, tau, Half::minus));
}

/// Samples a closed-form propagator (rotating-exact or expm-integral) on the
/// same grid propagate_rk4 would use.
inline Trajectory sample_closed_form(const ControlParams& p, const Vec8& x0, double tau_end, double dtau,
                                     Method method, int record_every = 1) {
    if (method != Method::rotating_exact && method != Method::expm_integral)
        throw std::invalid_argument("sample_closed_form supports rotating-exact and expm-integral only");
    if (record_every < 1) throw std::invalid_argument("record stride must be >= 1");
    const std::vector<double> grid = time_grid(tau_end, dtau);
    Trajectory traj{{}, method, dtau};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (k % static_cast<std::size_t>(record_every) != 0 && k + 1 != grid.size()) continue;
        const double t = grid[k];
        traj.samples.push_back(
            {t, method == Method::rotating_exact ? exact_state(p, x0, t) : expm_integral_state(p, x0, t)});
    }
    return traj;
}

struct Discrepancy {
    double max_deviation = 0.0;
    double tau_at_max = 0.0;
};

/// Largest Euclidean distance between exp[A+-(tau)] e_k and the exact
/// propagator applied to e_k, over both halves, all basis vectors e_k and the
/// given times.
inline Discrepancy propagator_discrepancy(const ControlParams& p, std::span<const double> tau_grid) {
    Discrepancy out;
    for (double tau : tau_grid) {
        for (Half h : {Half::plus, Half::minus}) {
            const Mat4 diff = expm_skew4(integral_generator(p, tau, h)) - rotating_exact_propagator(p, tau, h);
            const double dev = diff.colwise().norm().maxCoeff();
            if (dev > out.max_deviation) out = {dev, tau};
        }
    }
    return out;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("linspace needs at least one point");
    std::vector<double> v(static_cast<std::size_t>(n));
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return v;
}

}  // namespace coherence
