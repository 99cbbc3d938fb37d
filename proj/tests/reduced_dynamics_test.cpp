#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "coherence/boundary_solver.hpp"
#include "coherence/reduced_dynamics.hpp"
#include "coherence/sampling.hpp"

namespace {

using namespace coherence;

double max_entry(const Mat4& A) { return A.cwiseAbs().maxCoeff(); }

ControlParams generic_params() { return {1.0, 2.4, 1.5, 0.7, 3.1, 0.4}; }

TEST(Generators, PWithoutField) {
    const Mat4 P = build_P(ControlParams{}, 0.8).matrix();
    Mat4 expected = Mat4::Zero();
    expected(0, 2) = -1.0;
    expected(2, 0) = 1.0;
    EXPECT_EQ(max_entry(P - expected), 0.0);
}

TEST(Generators, PAtQuarterTurn) {
    ControlParams p;
    p.b0 = 1.0;
    p.theta0 = pi / 2.0;
    const SkewMatrix4 P = build_P(p, 0.0);
    EXPECT_NEAR(P(1, 2), 1.0, 1e-15);
    EXPECT_NEAR(P(2, 3), 0.0, 1e-15);
}

TEST(Generators, Q) {
    const SkewMatrix4 q = build_Q(1.0);
    EXPECT_EQ(q(1, 3), -1.0);
    EXPECT_EQ(q(3, 1), 1.0);
    EXPECT_EQ(max_entry(build_Q(0.0).matrix()), 0.0);
    EXPECT_EQ(max_entry(build_Q(-1.0).matrix() + q.matrix()), 0.0);
}

TEST(Generators, MBlocksAndSkewness) {
    std::mt19937_64 rng(1);
    for (int s = 0; s < 50; ++s) {
        const ControlParams p = random_energy_consistent(rng);
        const double tau = 3.0 * s / 50.0;
        const Mat8 M = build_M(p, tau);
        EXPECT_LE((M + M.transpose()).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LE(max_entry(M.topLeftCorner<4, 4>() - 2.0 * build_P(p, tau).matrix()), 0.0);
        EXPECT_LE(max_entry(M.bottomRightCorner<4, 4>() - 2.0 * build_P(p, tau).matrix()), 0.0);
        EXPECT_LE(max_entry(M.topRightCorner<4, 4>() - 2.0 * build_Q(p.K).matrix()), 0.0);
        EXPECT_LE(max_entry(M.bottomLeftCorner<4, 4>() - 2.0 * build_Q(p.K).matrix()), 0.0);
    }
}

TEST(Generators, FirstRowWithoutControlOrSecondCoupling) {
    ControlParams p;
    p.K = 0.0;
    const Mat8 M = build_M(p, 0.0);
    for (int j = 0; j < 8; ++j) EXPECT_EQ(M(0, j), j == 2 ? -2.0 : 0.0);
}

TEST(SkewMatrix, RejectsNonSkew) {
    Mat4 m = Mat4::Zero();
    m(0, 1) = 1.0;
    EXPECT_THROW(SkewMatrix4{m}, std::invalid_argument);
}

TEST(Halves, BoundaryVectors) {
    const auto [yp1, ym1] = split_halves(unit_state(1));
    EXPECT_EQ(yp1, Vec4(1, 0, 0, 0));
    EXPECT_EQ(ym1, Vec4(1, 0, 0, 0));
    const auto [yp8, ym8] = split_halves(unit_state(8));
    EXPECT_EQ(yp8, Vec4(0, 0, 0, 1));
    EXPECT_EQ(ym8, Vec4(0, 0, 0, -1));
}

TEST(Halves, RoundTripAndNormIdentity) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    for (int s = 0; s < 100; ++s) {
        Vec8 x;
        for (int i = 0; i < 8; ++i) x(i) = g(rng);
        const auto [yp, ym] = split_halves(x);
        EXPECT_LE((join_halves(yp, ym) - x).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_NEAR(yp.squaredNorm() + ym.squaredNorm(), 2.0 * x.squaredNorm(), 1e-12);
    }
}

TEST(Rk4, ZeroHorizon) {
    const Trajectory t = propagate_rk4(generic_params(), unit_state(1), 0.0, 1e-3);
    ASSERT_EQ(t.samples.size(), 1u);
    EXPECT_EQ(t.samples[0].x, unit_state(1));
}

TEST(Rk4, ClosedFormWithoutControls) {
    ControlParams p;
    p.K = 0.0;
    const Trajectory t = propagate_rk4(p, unit_state(1), 1.0, 1e-4);
    for (const auto& s : t.samples) EXPECT_NEAR(s.x(0), std::cos(2.0 * s.tau), 1e-12);
}

TEST(Rk4, GridEndsExactlyAtTauEnd) {
    const Trajectory t = propagate_rk4(generic_params(), unit_state(1), 1.00025, 1e-3);
    EXPECT_DOUBLE_EQ(t.samples.back().tau, 1.00025);
    EXPECT_EQ(t.samples.front().tau, 0.0);
    for (std::size_t i = 1; i < t.samples.size(); ++i) EXPECT_GT(t.samples[i].tau, t.samples[i - 1].tau);
}

TEST(Rk4, NormDrift) {
    const Trajectory t = propagate_rk4(generic_params(), unit_state(1), 10.0, 1e-3);
    for (const auto& s : t.samples) EXPECT_NEAR(s.x.norm(), 1.0, 1e-9);
}

TEST(Rk4, RejectsNonPositiveStep) {
    EXPECT_THROW(propagate_rk4(generic_params(), unit_state(1), 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(propagate_rk4(generic_params(), unit_state(1), 1.0, -1e-3), std::invalid_argument);
}

TEST(IntegralGenerator, ZeroAtOrigin) {
    EXPECT_EQ(max_entry(integral_generator(generic_params(), 0.0, Half::plus).matrix()), 0.0);
}

TEST(IntegralGenerator, MatchesSimpsonQuadrature) {
    std::mt19937_64 rng(4);
    for (int s = 0; s < 10; ++s) {
        const ControlParams p = random_energy_consistent(rng);
        for (Half h : {Half::plus, Half::minus}) {
            const double tau = 2.7;
            const int n = 2000;
            const double dx = tau / n;
            Mat4 acc = build_M_half(p, 0.0, h).matrix() + build_M_half(p, tau, h).matrix();
            for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * build_M_half(p, i * dx, h).matrix();
            acc *= dx / 3.0;
            EXPECT_LE(max_entry(integral_generator(p, tau, h).matrix() - acc), 1e-10);
        }
    }
}

TEST(IntegralGenerator, SmallOmegaSeriesIsContinuous) {
    ControlParams p = generic_params();
    p.omega_rf = 1e-9;
    const Mat4 series = integral_generator(p, 1.3, Half::plus).matrix();
    p.omega_rf = 2e-8;
    const Mat4 closed = integral_generator(p, 1.3, Half::plus).matrix();
    EXPECT_LE(max_entry(series - closed), 1e-7);
    p.omega_rf = 0.0;
    const Mat4 frozen = integral_generator(p, 1.3, Half::plus).matrix();
    EXPECT_LE(max_entry(frozen - 1.3 * build_M_half(p, 0.0, Half::plus).matrix()), 1e-15);
}

TEST(IntegralGenerator, AnalyticPointBlocks) {
    const ControlParams p = closed_form_params(consistent_omega_closed_form(), 1, Branch{1, 1, -1, 0});
    const double tau = optimal_tau_star();
    const BoundaryConstants c = abcd_from_physical(p, tau);
    for (Half h : {Half::plus, Half::minus}) {
        const SkewMatrix4 A = integral_generator(p, tau, h);
        EXPECT_NEAR(A(0, 2), -c.a, 1e-12);
        EXPECT_NEAR(A(1, 2), -c.b, 1e-12);
        EXPECT_NEAR(A(1, 3), -c.c(h), 1e-12);
        EXPECT_NEAR(A(2, 3), c.d, 1e-12);
        EXPECT_EQ(A(0, 1), 0.0);
        EXPECT_EQ(A(0, 3), 0.0);
    }
}

TEST(ExpmIntegral, ExactForConstantGenerator) {
    ControlParams p = generic_params();
    p.b0 = 0.0;
    const Trajectory rk = propagate_rk4(p, unit_state(1), 3.0, 1e-4, 100);
    for (const auto& s : rk.samples) EXPECT_LE((expm_integral_state(p, unit_state(1), s.tau) - s.x).norm(), 1e-8);
}

TEST(ExpmIntegral, PreservesNormAndStartsAtInitialState) {
    const Vec4 y0(0.3, -0.5, 0.1, 0.8);
    EXPECT_LE((propagate_expm_integral(generic_params(), y0, 0.0, Half::minus) - y0).norm(), 0.0);
    for (double tau : {0.3, 1.1, 4.0})
        EXPECT_NEAR(propagate_expm_integral(generic_params(), y0, tau, Half::plus).norm(), y0.norm(), 1e-12);
}

TEST(RotatingFrame, ConjugationInvariant) {
    std::mt19937_64 rng(6);
    for (int s = 0; s < 40; ++s) {
        const ControlParams p = random_energy_consistent(rng);
        for (double tau : linspace(0.0, 4.0, 9))
            for (Half h : {Half::plus, Half::minus}) EXPECT_LE(frame_conjugation_defect(p, tau, h), 1e-12);
    }
}

TEST(RotatingFrame, RotationClosedForm) {
    for (double phi : {0.0, 0.3, -2.1, 7.5})
        EXPECT_LE(max_entry(frame_rotation(phi) - expm(Mat4(phi * frame_generator()))), 1e-14);
}

TEST(RotatingFrame, FrozenFrameReducesToConstantExponential) {
    ControlParams p = generic_params();
    p.omega_rf = 0.0;
    for (Half h : {Half::plus, Half::minus}) {
        const Mat4 U = rotating_exact_propagator(p, 1.7, h);
        EXPECT_LE(max_entry(U - expm(Mat4(1.7 * build_M_half(p, 0.0, h).matrix()))), 1e-13);
    }
}

TEST(RotatingFrame, AgreesWithRk4) {
    std::mt19937_64 rng(8);
    for (int s = 0; s < 5; ++s) {
        const ControlParams p = random_energy_consistent(rng);
        const Trajectory rk = propagate_rk4(p, unit_state(1), 3.0, 1e-4, 50);
        for (const auto& smp : rk.samples) {
            const Vec8 x = exact_state(p, unit_state(1), smp.tau);
            EXPECT_LE((x - smp.x).norm(), 1e-8);
            EXPECT_NEAR(x.norm(), 1.0, 1e-12);
        }
    }
}

TEST(OracleEquivalence, WithoutRotatingComponentOrRotation) {
    std::mt19937_64 rng(10);
    for (int s = 0; s < 4; ++s) {
        ControlParams p = random_energy_consistent(rng);
        (s % 2 ? p.b0 : p.omega_rf) = 0.0;
        const Trajectory rk = propagate_rk4(p, unit_state(1), 3.0, 1e-4, 200);
        for (const auto& smp : rk.samples) {
            EXPECT_LE((exact_state(p, unit_state(1), smp.tau) - smp.x).norm(), 1e-8);
            EXPECT_LE((expm_integral_state(p, unit_state(1), smp.tau) - smp.x).norm(), 1e-8);
        }
        const Discrepancy d = propagator_discrepancy(p, linspace(0.0, 3.0, 31));
        EXPECT_LE(d.max_deviation, 1e-10);
    }
}

TEST(Discrepancy, NonNegativeAndLocated) {
    const Discrepancy d = propagator_discrepancy(generic_params(), linspace(0.0, 2.0, 41));
    EXPECT_GE(d.max_deviation, 0.0);
    EXPECT_GE(d.tau_at_max, 0.0);
    EXPECT_LE(d.tau_at_max, 2.0);
}

TEST(Trajectories, ClosedFormSamplingTags) {
    const Trajectory a = sample_closed_form(generic_params(), unit_state(1), 1.0, 0.1, Method::rotating_exact);
    const Trajectory b = sample_closed_form(generic_params(), unit_state(1), 1.0, 0.1, Method::expm_integral);
    EXPECT_EQ(a.method, Method::rotating_exact);
    EXPECT_EQ(b.method, Method::expm_integral);
    EXPECT_EQ(a.samples.size(), 11u);
    EXPECT_EQ(method_from_name("exact"), Method::rotating_exact);
    EXPECT_EQ(method_from_name("expm-integral"), Method::expm_integral);
    EXPECT_THROW(method_from_name("euler"), std::invalid_argument);
}

}  // namespace
