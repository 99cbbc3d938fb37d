#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace coherence {

/// Matrix exponential of a small fixed-size square matrix by scaling and
/// squaring with the [13/13] Pade approximant (Higham 2005). Works for real
/// and complex scalars.
template <typename Derived>
typename Derived::PlainObject expm(const Eigen::MatrixBase<Derived>& input) {
    using Matrix = typename Derived::PlainObject;
    using Scalar = typename Matrix::Scalar;
    static_assert(Matrix::RowsAtCompileTime == Matrix::ColsAtCompileTime, "expm requires a square matrix");

    constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                            1187353796428800.0,  129060195264000.0,   10559470521600.0,
                            670442572800.0,      33522128640.0,       1323241920.0,
                            40840800.0,          960960.0,            16380.0,
                            182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    Matrix A = input;
    const Eigen::Index n = A.rows();
    const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
    if (norm1 == 0.0) return Matrix::Identity(A.rows(), A.cols());
    int squarings = 0;
    if (norm1 > theta13) {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
        A /= Scalar(std::ldexp(1.0, squarings));
    }

    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;

    const Matrix inner_u = A6 * (Scalar(b[13]) * A6 + Scalar(b[11]) * A4 + Scalar(b[9]) * A2) +
                           Scalar(b[7]) * A6 + Scalar(b[5]) * A4 + Scalar(b[3]) * A2 + Scalar(b[1]) * I;
    const Matrix U = A * inner_u;
    const Matrix V = A6 * (Scalar(b[12]) * A6 + Scalar(b[10]) * A4 + Scalar(b[8]) * A2) +
                     Scalar(b[6]) * A6 + Scalar(b[4]) * A4 + Scalar(b[2]) * A2 + Scalar(b[0]) * I;

    Matrix R = (V - U).partialPivLu().solve(V + U);
    for (int k = 0; k < squarings; ++k) R = R * R;
    return R;
}

/// exp(-i H t) for Hermitian H via its eigendecomposition; exactly unitary up
/// to rounding.
template <typename Derived>
typename Derived::PlainObject expm_hermitian(const Eigen::MatrixBase<Derived>& H, double t) {
    using Matrix = typename Derived::PlainObject;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
    if (eig.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
    const auto& V = eig.eigenvectors();
    Matrix phases = Matrix::Zero(H.rows(), H.cols());
    for (Eigen::Index k = 0; k < H.rows(); ++k)
        phases(k, k) = std::polar(1.0, -eig.eigenvalues()(k) * t);
    return V * phases * V.adjoint();
}

}  // namespace coherence
