#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "coherence/boundary_solver.hpp"
#include "coherence/full_hilbert.hpp"
#include "coherence/sampling.hpp"

namespace {

using namespace coherence;

TEST(Schrodinger, ConstantHamiltonianIsExact) {
    const ControlParams p{1.0, 2.0, 0.0, 0.9, 1.3, 0.2};
    const UnitaryTrajectory traj = schrodinger_propagate(p, 2.0, 1e-3, 100);
    const Mat8c H = build_hamiltonian(p, 0.0);
    for (const auto& s : traj.samples) EXPECT_LE((s.U - expm_hermitian(H, s.tau)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Schrodinger, ZeroHorizonIsIdentity) {
    const UnitaryTrajectory traj = schrodinger_propagate({1.0, 2.3, 1.2, 0.4, 2.0, 0.0}, 0.0, 1e-3);
    ASSERT_EQ(traj.samples.size(), 1u);
    EXPECT_TRUE(traj.samples[0].U.isIdentity(0.0));
}

TEST(Schrodinger, UnitaryAtEverySample) {
    std::mt19937_64 rng(21);
    const ControlParams p = random_energy_consistent(rng);
    const UnitaryTrajectory traj = schrodinger_propagate(p, 5.0, 1e-4, 500);
    for (const auto& s : traj.samples) {
        EXPECT_LE(unitarity_defect(s.U), 1e-9);
        EXPECT_NEAR(std::abs(s.U.determinant()), 1.0, 1e-9);
    }
}

TEST(Schrodinger, RejectsNonPositiveStep) {
    EXPECT_THROW(schrodinger_propagate({}, 1.0, 0.0), std::invalid_argument);
}

TEST(Schrodinger, MagnusBeatsMidpoint) {
    const ControlParams p{1.0, 0.0, 1.5, 0.7, 3.1, 0.4};
    const double T = 3.0 * optimal_tau_star();
    const auto fine = schrodinger_propagate(p, T, 2.5e-5, 1000000);
    const auto mag = schrodinger_propagate(p, T, 1e-3, 1000000, Stepper::magnus4);
    const auto mid = schrodinger_propagate(p, T, 1e-3, 1000000, Stepper::midpoint);
    const Mat8c& ref = fine.samples.back().U;
    const double err_mag = (mag.samples.back().U - ref).cwiseAbs().maxCoeff();
    const double err_mid = (mid.samples.back().U - ref).cwiseAbs().maxCoeff();
    EXPECT_LT(err_mag, 1e-9);
    EXPECT_LT(err_mag, 1e-3 * err_mid);
}

TEST(Expectations, IdentityGivesInitialPolarization) {
    EXPECT_EQ(expectations(Mat8c::Identity()), unit_state(1));
    EXPECT_THROW(expectations(Mat8c::Identity(), "sz2"), std::invalid_argument);
}

TEST(Expectations, FreeEvolutionWithoutSecondCoupling) {
    ControlParams p;
    p.K = 0.0;
    const UnitaryTrajectory traj = schrodinger_propagate(p, 2.0, 1e-3, 50);
    for (const auto& s : traj.samples) EXPECT_NEAR(expectations(s.U)(0), std::cos(2.0 * s.tau), 1e-12);
}

TEST(Expectations, StaysInUnitBall) {
    std::mt19937_64 rng(22);
    for (int k = 0; k < 3; ++k) {
        const ControlParams p = random_energy_consistent(rng);
        for (const auto& s : schrodinger_propagate(p, 4.0, 1e-3, 200).samples)
            EXPECT_LE(expectations(s.U).squaredNorm(), 1.0 + 1e-9);
    }
}

TEST(Closure, HandCommutator) {
    ControlParams p;
    p.K = 0.0;
    const Mat8 C = heisenberg_coefficients(p, 0.0);
    for (int j = 0; j < 8; ++j) EXPECT_NEAR(C(0, j), j == 2 ? -2.0 : 0.0, 1e-15);
}

TEST(Closure, RandomParameters) {
    std::mt19937_64 rng(23);
    const std::vector<double> taus = linspace(0.0, 4.0, 10);
    for (int s = 0; s < 10; ++s) {
        const ControlParams p = random_energy_consistent(rng);
        EXPECT_LE(closure_check(p, taus), 1e-12);
        const Mat8 C = heisenberg_coefficients(p, taus[static_cast<std::size_t>(s)]);
        EXPECT_LE((C + C.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Closure, OffEnergySurfaceToo) {
    const ControlParams p{-0.6, 0.0, 2.1, -1.3, -3.3, 2.0};
    EXPECT_LE(closure_check(p, linspace(0.0, 2.0, 5)), 1e-12);
}

TEST(CrossValidate, AnalyticPointAtOptimalTime) {
    const ControlParams p = closed_form_params(consistent_omega_closed_form(), 1, Branch{1, 1, -1, 0});
    const CrossValidation cv = cross_validate(p, optimal_tau_star(), 1e-4, 10);
    EXPECT_LE(cv.max_deviation, 1e-8);
    EXPECT_LE(cv.max_unitarity_defect, 1e-9);
}

TEST(CrossValidate, FreeCase) {
    ControlParams p;
    p.K = 0.0;
    EXPECT_LE(cross_validate(p, 2.0, 1e-3).max_deviation, 1e-10);
}

TEST(CrossValidate, FirstSampleMatches) {
    std::mt19937_64 rng(24);
    const ControlParams p = random_energy_consistent(rng);
    const auto full = full_hilbert_trajectory(p, 0.5, 1e-3);
    EXPECT_EQ(full.method, Method::full_hilbert);
    EXPECT_LE((full.samples.front().x - unit_state(1)).norm(), 1e-15);
}

TEST(CrossValidate, RandomParametersOverLongHorizon) {
    std::mt19937_64 rng(25);
    for (int s = 0; s < 2; ++s)
        EXPECT_LE(cross_validate(random_energy_consistent(rng), 3.0 * optimal_tau_star(), 1e-4, 100).max_deviation,
                  1e-8);
}

}  // namespace
