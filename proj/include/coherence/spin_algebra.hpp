#pragma once

// Three-qubit operator algebra for the controlled Ising chain
//
//   H(tau) = sz1 sz2 + K sz2 sz3 + B(tau) . sigma2
//
// in units of J12, with a transverse field of constant amplitude rotating at
// a constant rate and a static z component.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace coherence {

using cplx = std::complex<double>;
using Mat2c = Eigen::Matrix<cplx, 2, 2>;
using Mat8c = Eigen::Matrix<cplx, 8, 8>;
using Vec8 = Eigen::Matrix<double, 8, 1>;

/// Dense 8x8 complex operator on the three-qubit Hilbert space.
using ComplexOperator8 = Mat8c;

enum class Axis { x, y, z };

inline Axis axis_from_label(std::string_view label) {
    if (label == "x") return Axis::x;
    if (label == "y") return Axis::y;
    if (label == "z") return Axis::z;
    throw std::invalid_argument("invalid Pauli axis label '" + std::string(label) + "'");
}

inline Mat2c pauli(Axis axis) {
    const cplx i{0.0, 1.0};
    Mat2c m;
    switch (axis) {
        case Axis::x: m << 0.0, 1.0, 1.0, 0.0; break;
        case Axis::y: m << 0.0, -i, i, 0.0; break;
        case Axis::z: m << 1.0, 0.0, 0.0, -1.0; break;
    }
    return m;
}

inline Mat2c pauli(std::string_view label) { return pauli(axis_from_label(label)); }

inline Mat2c identity2() { return Mat2c::Identity(); }

/// Kronecker product op1 (x) op2 (x) op3, site 1 being the most significant qubit.
inline Mat8c embed3(const Mat2c& op1, const Mat2c& op2, const Mat2c& op3) {
    Mat8c out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                    for (int e = 0; e < 2; ++e)
                        for (int f = 0; f < 2; ++f)
                            out(4 * a + 2 * c + e, 4 * b + 2 * d + f) = op1(a, b) * op2(c, d) * op3(e, f);
    return out;
}

/// The eight operators O_1..O_8 spanning the dynamics of sx1 under H:
///   sx1, sy1 sx2, sy1 sz2, sy1 sy2, sx1 sz3, sy1 sx2 sz3, sy1 sz2 sz3, sy1 sy2 sz3.
/// Index k of the returned array holds O_{k+1}.
inline const std::array<Mat8c, 8>& coherence_basis() {
    static const std::array<Mat8c, 8> basis = [] {
        const Mat2c I = identity2();
        const Mat2c X = pauli(Axis::x);
        const Mat2c Y = pauli(Axis::y);
        const Mat2c Z = pauli(Axis::z);
        return std::array<Mat8c, 8>{
            embed3(X, I, I), embed3(Y, X, I), embed3(Y, Z, I), embed3(Y, Y, I),
            embed3(X, I, Z), embed3(Y, X, Z), embed3(Y, Z, Z), embed3(Y, Y, Z),
        };
    }();
    return basis;
}

/// Dimensionless control parameters of the rotating-field ansatz.
struct ControlParams {
    double K = 1.0;          ///< coupling ratio J23/J12
    double omega_hat = 0.0;  ///< rescaled energy
    double b0 = 0.0;         ///< rotating (transverse) amplitude
    double bz = 0.0;         ///< static z field
    double omega_rf = 0.0;   ///< rotation rate
    double theta0 = 0.0;     ///< initial phase

    double phase(double tau) const { return omega_rf * tau + theta0; }
};

/// b0^2 + bz^2 - (omega_hat^2 - (1 + K^2)); zero on the fixed-energy surface.
inline double energy_residual(const ControlParams& p) {
    return p.b0 * p.b0 + p.bz * p.bz - (p.omega_hat * p.omega_hat - (1.0 + p.K * p.K));
}

inline bool is_energy_consistent(const ControlParams& p, double tol = 1e-12) {
    return std::abs(energy_residual(p)) <= tol;
}

/// Field norm squared available on the energy surface, omega_hat^2 - (1 + K^2).
inline double field_norm_squared(double omega_hat, double K) {
    return omega_hat * omega_hat - (1.0 + K * K);
}

/// Field vector (Bx, By, Bz) at rescaled time tau.
inline Eigen::Vector3d field(const ControlParams& p, double tau) {
    const double th = p.phase(tau);
    return {p.b0 * std::cos(th), p.b0 * std::sin(th), p.bz};
}

inline Mat8c build_hamiltonian(const ControlParams& p, double tau) {
    static const Mat8c zz12 = embed3(pauli(Axis::z), pauli(Axis::z), identity2());
    static const Mat8c zz23 = embed3(identity2(), pauli(Axis::z), pauli(Axis::z));
    static const Mat8c x2 = embed3(identity2(), pauli(Axis::x), identity2());
    static const Mat8c y2 = embed3(identity2(), pauli(Axis::y), identity2());
    static const Mat8c z2 = embed3(identity2(), pauli(Axis::z), identity2());
    const Eigen::Vector3d B = field(p, tau);
    return zz12 + p.K * zz23 + B.x() * x2 + B.y() * y2 + B.z() * z2;
}

/// Largest |A_ij - conj(A_ji)|.
inline double hermiticity_defect(const Mat8c& A) { return (A - A.adjoint()).cwiseAbs().maxCoeff(); }

/// Tr[A B] / 8, the normalized Hilbert-Schmidt pairing for Hermitian A, B.
inline cplx normalized_trace_product(const Mat8c& A, const Mat8c& B) { return (A * B).trace() / 8.0; }

}  // namespace coherence
