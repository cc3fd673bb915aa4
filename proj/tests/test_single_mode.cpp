#include <gtest/gtest.h>

#include <cmath>

#include "nhsw/single_mode.hpp"

using namespace nhsw;

namespace {

ModelParams mode(double gamma, double gamma_prime = 0.0) {
    ModelParams p;
    p.gamma = gamma;
    p.gamma_prime = gamma_prime;
    return p;
}

GroundState vacuum_of(const ModelParams& p, int n_max = 10) {
    ModelParams herm = p;
    herm.gamma = 0;
    herm.gamma_prime = 0;
    return ground_state_hermitian(herm, n_max);
}

// Squeezed-vacuum amplitudes on even Fock states from the closed-form series.
Eigen::VectorXcd smsv_series(double r, double phi, int n_max) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_max + 1);
    for (int n = 0; 2 * n <= n_max; ++n) {
        const double comb = std::exp(0.5 * std::lgamma(2.0 * n + 1) - n * std::log(2.0) - std::lgamma(n + 1.0));
        v(2 * n) = std::pow(-std::polar(std::tanh(r), phi), n) * comb / std::sqrt(std::cosh(r));
    }
    return v;
}

}  // namespace

TEST(Hamiltonian, MatrixElements) {
    const ModelParams p = mode(0.2);
    const auto h = build_single_mode_hamiltonian(p);
    const CoeffPair c = single_mode_coeffs(p);
    EXPECT_EQ(c.a, cplx(5.5, 0.2));
    EXPECT_EQ(c.b, cplx(0.5, 0));
    EXPECT_LT(std::abs(h(0, 0) - c.a / 2.0), 1e-15);
    EXPECT_LT(std::abs(h(2, 0) - c.b * std::sqrt(2.0) / 2.0), 1e-15);
    EXPECT_EQ(h(1, 0), cplx(0, 0));
    EXPECT_EQ(h.rows(), 11);
    EXPECT_TRUE(build_single_mode_hamiltonian(mode(0)).isApprox(build_single_mode_hamiltonian(mode(0)).adjoint(), 0));
    const auto q = build_single_mode_hamiltonian(mode(0.2, 0.05));
    EXPECT_LT(std::abs(q(3, 3) - (c.a * 3.5 - cplx(0, 0.025 * 9))), 1e-14);
    EXPECT_THROW(build_single_mode_hamiltonian(p, 3), domain_error);
}

TEST(GroundState, DecoupledModeIsVacuum) {
    ModelParams p = mode(0);
    p.J = 0;
    const GroundState gs = ground_state_hermitian(p);
    EXPECT_EQ(gs.squeeze.r, 0.0);
    EXPECT_NEAR(std::abs(gs.state.amplitudes(0)), 1.0, 1e-15);
}

TEST(GroundState, SqueezingMatchesBogolyubovAngle) {
    const GroundState gs = ground_state_hermitian(mode(0));
    EXPECT_NEAR(gs.squeeze.r, 0.5 * std::atanh(1.0 / 11.0), 1e-10);
    EXPECT_NEAR(gs.squeeze.r, 0.04558, 1e-5);
    EXPECT_EQ(gs.squeeze.phi, 0.0);
    EXPECT_THROW(ground_state_hermitian(mode(0.2)), domain_error);
}

TEST(GroundState, OverlapWithSqueezedVacuumSeries) {
    const GroundState gs = ground_state_hermitian(mode(0));
    const Eigen::VectorXcd s = smsv_series(gs.squeeze.r, gs.squeeze.phi, 10);
    EXPECT_GE(std::norm(s.dot(gs.state.amplitudes)) / s.squaredNorm(), 1 - 1e-10);
}

TEST(ExactEvolution, HermitianGroundStateIsStationary) {
    const GroundState gs = ground_state_hermitian(mode(0));
    const auto s = evolve_ed(build_single_mode_hamiltonian(mode(0)), gs.state, sample_times(0, 20, 200));
    for (double g : s.g) EXPECT_NEAR(g, s.g[0], 1e-10);
}

TEST(ExactEvolution, AgreesWithEquationsOfMotionAtLowOccupation) {
    const ModelParams p = mode(0.2);
    const auto times = sample_times(0, 10, 1000);
    const auto ed = evolve_ed(build_single_mode_hamiltonian(p), vacuum_of(p).state, times);
    const auto eom = evolve_eom(p, single_mode_initial(p), times);
    for (std::size_t i = 0; i < times.size() && ed.g[i] <= 1e-2; ++i) {
        EXPECT_NEAR(ed.g[i], eom.series.g[i], 1e-6) << "t=" << times[i];
        EXPECT_NEAR(std::abs(ed.f[i] - eom.series.f[i]), 0.0, 1e-5) << "t=" << times[i];
    }
}

TEST(ExactEvolution, NegativeGammaStaysSmall) {
    const ModelParams p = mode(-0.2);
    const auto s = evolve_ed(build_single_mode_hamiltonian(p), vacuum_of(p).state, sample_times(0, 20, 400));
    for (double g : s.g) EXPECT_LT(g, 1e-2);
    const auto e = evolve_eom(p, single_mode_initial(p), sample_times(0, 20, 400));
    EXPECT_FALSE(e.divergence);
}

TEST(ExactEvolution, ParityIsConserved) {
    for (double gp : {0.0, 0.05}) {
        const ModelParams p = mode(0.2, gp);
        const auto s = evolve_ed(build_single_mode_hamiltonian(p), vacuum_of(p).state, sample_times(0, 20, 100));
        for (const auto& st : s.states)
            for (int n = 1; n <= st.n_max(); n += 2) EXPECT_LE(std::abs(st.amplitudes(n)), 1e-14);
    }
}

TEST(ExactEvolution, TruncationRobustnessAtLowOccupation) {
    const ModelParams p = mode(0.2);
    const auto times = sample_times(0, 8, 80);
    const auto a = evolve_ed(build_single_mode_hamiltonian(p, 10), vacuum_of(p, 10).state, times);
    const auto b = evolve_ed(build_single_mode_hamiltonian(p, 14), vacuum_of(p, 14).state, times);
    for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(a.g[i], b.g[i], 1e-8) << "t=" << times[i];
}

TEST(ExactEvolution, TruncationRobustnessUpToTen) {
    const ModelParams p = mode(0.2);
    const auto times = sample_times(0, 10, 100);
    const auto a = evolve_ed(build_single_mode_hamiltonian(p, 10), vacuum_of(p, 10).state, times);
    const auto b = evolve_ed(build_single_mode_hamiltonian(p, 14), vacuum_of(p, 14).state, times);
    for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(a.g[i], b.g[i], 1e-8) << "t=" << times[i];
}

TEST(ExactEvolution, NormGrowthRateIsTwiceImaginaryEnergy) {
    for (double gp : {0.0, 0.05}) {
        const ModelParams p = mode(0.2, gp);
        const auto h = build_single_mode_hamiltonian(p);
        const double dt = 1e-4;
        // triplets t - dt, t, t + dt around t = 0.25, 0.5, ..., 10
        std::vector<double> fine{0.0};
        for (int j = 1; j <= 40; ++j) {
            fine.push_back(j * 0.25 - dt);
            fine.push_back(j * 0.25);
            fine.push_back(j * 0.25 + dt);
        }
        const auto s = evolve_ed(h, vacuum_of(p).state, fine);
        for (std::size_t i = 2; i + 1 < fine.size(); i += 3) {
            const Eigen::VectorXcd& v = s.states[i].amplitudes;
            const double im_h = v.dot(h * v).imag();
            const double rate = (s.norm_log[i + 1] - s.norm_log[i - 1]) / (2 * dt);
            EXPECT_NEAR(rate, 2 * im_h, 1e-6) << "t=" << fine[i];
        }
    }
}

TEST(ExactEvolution, UnderflowIsReported) {
    const ModelParams p = mode(-400);
    EXPECT_THROW(evolve_ed(build_single_mode_hamiltonian(p), vacuum_of(p).state, {0.0, 2.0}), numerical_error);
    EXPECT_THROW(evolve_ed(build_single_mode_hamiltonian(p), vacuum_of(p).state, {0.0, 0.0}), domain_error);
}

TEST(EquationsOfMotion, NormLogFollowsExactEvolution) {
    const ModelParams p = mode(0.2);
    const auto times = sample_times(0, 6, 60);
    const auto ed = evolve_ed(build_single_mode_hamiltonian(p), vacuum_of(p).state, times);
    const auto eom = evolve_eom(p, single_mode_initial(p), times);
    for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(ed.norm_log[i], eom.series.norm_log[i], 1e-8);
}

TEST(EquationsOfMotion, LinearModeDivergesBeforeOneTimeUnitPastEstimate) {
    const ModelParams p = mode(0.2);
    const double tf = divergence_time(vacuum_of(p).squeeze, 0.2);
    for (double cap : {1e3, 1e6, 1e9}) {
        const auto r = evolve_eom(p, single_mode_initial(p), sample_times(0, tf + 1, 100), 1e-3, cap);
        ASSERT_TRUE(r.divergence) << cap;
        EXPECT_LT(r.divergence->t_upper, tf + 1);
    }
    EXPECT_THROW(evolve_eom(mode(0.2, 0.05), single_mode_initial(p), {0.0, 1.0}), domain_error);
}

TEST(Nonlinearity, QuarticTermKeepsOccupationFinite) {
    const ModelParams p = mode(0.2, 0.05);
    const auto h = build_single_mode_hamiltonian(p);
    const auto s = evolve_ed(h, vacuum_of(p).state, sample_times(0, 300, 600));
    for (double g : s.g) {
        EXPECT_TRUE(std::isfinite(g));
        EXPECT_LT(g, 10.0);
    }
    // late-time state is the eigenvector with the largest imaginary eigenvalue
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::Index top = 0;
    for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i).imag() > es.eigenvalues()(top).imag()) top = i;
    const Eigen::VectorXcd v = es.eigenvectors().col(top).normalized();
    double n_top = 0;
    for (Eigen::Index n = 0; n < v.size(); ++n) n_top += static_cast<double>(n) * std::norm(v(n));
    EXPECT_NEAR(s.g.back(), n_top, 1e-6);
}

TEST(DivergenceTime, Estimates) {
    EXPECT_NEAR(divergence_time({0.04558, 0}, 0.2), 15.45, 0.01);
    EXPECT_GT(divergence_time({0.04558, 0}, 1e-9), 1e9);
    EXPECT_TRUE(std::isinf(divergence_time({0.0, 0}, 0.2)));
    EXPECT_THROW(divergence_time({0.04558, 0}, 0.0), domain_error);
    const double r = 0.04558, g0 = std::pow(std::sinh(r), 2);
    const double logistic = std::log((1 + g0) / g0) / (2 * 0.2);
    EXPECT_LT(std::abs(logistic - divergence_time({r, 0}, 0.2)) / logistic, 0.01);
}

TEST(Nonlinearity, OnsetTime) {
    const ModelParams p = mode(0.2);
    const auto h = build_single_mode_hamiltonian(p);
    const auto gs = vacuum_of(p);
    const auto t = nonlinearity_onset(h, gs.state, 0.2, 0.05, 20);
    ASSERT_TRUE(t);
    EXPECT_NEAR(*t, 11.2, 1.0);
    EXPECT_FALSE(nonlinearity_onset(h, gs.state, 0.2, 1e-12, 20));
    // crossing already met at t = 0 once gamma' <n n> >= gamma <n>
    const double g0 = std::pow(std::sinh(gs.squeeze.r), 2);
    const auto early = nonlinearity_onset(h, gs.state, 0.2, 0.2 / g0, 20);
    ASSERT_TRUE(early);
    EXPECT_EQ(*early, 0.0);
    const auto big = nonlinearity_onset(h, gs.state, 0.2, 1e3, 20);
    ASSERT_TRUE(big);
    EXPECT_EQ(*big, 0.0);
    EXPECT_THROW(nonlinearity_onset(h, gs.state, 0.2, 0.0, 20), domain_error);
}
