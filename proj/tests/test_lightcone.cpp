#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "nhsw/lightcone.hpp"

using namespace nhsw;

namespace {

CorrelationField line_field(int r_max, const std::vector<double>& times, const std::function<double(int, double)>& fn) {
    CorrelationField f;
    f.dimension = 1;
    f.distances = line_offsets(0, r_max);
    f.times = times;
    f.values = Eigen::MatrixXcd::Zero(r_max + 1, static_cast<Eigen::Index>(times.size()));
    for (int r = 0; r <= r_max; ++r)
        for (std::size_t t = 0; t < times.size(); ++t) f.values(r, static_cast<Eigen::Index>(t)) = fn(r, times[t]);
    return f;
}

CorrelationField square_field(int half, const std::vector<double>& times, const std::function<double(double, double)>& fn) {
    CorrelationField f;
    f.dimension = 2;
    f.distances = square_offsets(half);
    f.times = times;
    f.values = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(f.distances.size()), static_cast<Eigen::Index>(times.size()));
    for (std::size_t j = 0; j < f.distances.size(); ++j)
        for (std::size_t t = 0; t < times.size(); ++t)
            f.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(t)) =
                fn(std::hypot(f.distances[j][0], f.distances[j][1]), times[t]);
    return f;
}

}  // namespace

TEST(Fit, Examples) {
    const EdgeFit a = fit_velocity({{0, 0}, {1, 1}, {2, 2}});
    EXPECT_DOUBLE_EQ(a.velocity, 1.0);
    EXPECT_EQ(a.rms, 0.0);
    EXPECT_DOUBLE_EQ(fit_velocity({{0, 0}, {2, 1}, {4, 2}}).velocity, 2.0);
    EXPECT_THROW(fit_velocity({{0, 0}, {1, 1}}), domain_error);
    EXPECT_THROW(fit_velocity({{0, 1}, {1, 1}, {2, 1}}), domain_error);
}

TEST(Fit, TimeShiftMovesInterceptOnly) {
    const std::vector<EdgePoint> pts{{8, 3.1}, {9, 3.9}, {10, 4.4}, {11, 5.3}, {12, 5.8}};
    const EdgeFit base = fit_velocity(pts);
    for (double tau : {-2.0, 0.5, 7.0}) {
        auto shifted = pts;
        for (auto& p : shifted) p.time += tau;
        const EdgeFit s = fit_velocity(shifted);
        EXPECT_NEAR(s.velocity, base.velocity, 1e-12);
        EXPECT_NEAR(s.intercept, base.intercept - base.velocity * tau, 1e-10);
        EXPECT_NEAR(s.rms, base.rms, 1e-12);
    }
}

TEST(Activation, SinglePulse) {
    const auto f = line_field(5, sample_times(0, 4, 4), [](int r, double t) { return r == 3 && t == 2 ? 1.0 : 0.0; });
    const auto pts = activation_times(f);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_EQ(pts[0].distance, 3);
    EXPECT_EQ(pts[0].time, 2);
}

TEST(Activation, StepFrontGivesConstructionVelocity) {
    const auto times = sample_times(0, 13, 1300);
    const auto f = line_field(25, times, [](int r, double t) { return t >= r / 2.0 ? 1.0 : 0.0; });
    const auto pts = activation_times(f);
    ASSERT_EQ(pts.size(), 25u);  // R = 0 is active from the first sample and is skipped
    for (const auto& p : pts) EXPECT_NEAR(p.time, p.distance / 2, 0.01 + 1e-12);
    EXPECT_NEAR(edge_velocity(f).velocity, 2.0, 0.02);
    EXPECT_EQ(activation_times(f, {1e-3, false}).size(), 26u);
}

TEST(Activation, ThresholdIsRelative) {
    const auto times = sample_times(0, 13, 300);
    const auto f = line_field(30, times, [](int r, double t) { return std::exp(-0.5 * std::pow(r - 1.3 * t, 2)) * std::cos(3 * t); });
    const EdgeFit base = edge_velocity(f);
    for (double s : {1e-6, 0.37, 4.0, 1e9}) {
        CorrelationField g = f;
        g.values *= s;
        const EdgeFit e = edge_velocity(g);
        EXPECT_EQ(e.velocity, base.velocity);
        EXPECT_EQ(e.intercept, base.intercept);
        ASSERT_EQ(e.points.size(), base.points.size());
        for (std::size_t i = 0; i < e.points.size(); ++i) EXPECT_EQ(e.points[i].time, base.points[i].time);
    }
}

TEST(Activation, RejectsBadInput) {
    const auto f = line_field(5, sample_times(0, 1, 4), [](int, double) { return 0.0; });
    EXPECT_THROW(activation_times(f), domain_error);
    const auto g = line_field(5, sample_times(0, 1, 4), [](int r, double) { return r; });
    EXPECT_THROW(activation_times(g, {0.0, true}), domain_error);
    EXPECT_THROW(activation_times(g, {1.0, true}), domain_error);
    CorrelationField sq = square_field(2, sample_times(0, 1, 4), [](double, double) { return 1.0; });
    EXPECT_THROW(activation_times(sq), domain_error);
}

TEST(Window, KeepsRequestedRows) {
    const auto f = line_field(30, sample_times(0, 1, 2), [](int r, double) { return r; });
    const auto w = window(f, 8, 20);
    ASSERT_EQ(w.distances.size(), 13u);
    EXPECT_EQ(w.distances.front()[0], 8);
    EXPECT_EQ(w.values(12, 1).real(), 20.0);
}

TEST(Ridges, TravellingWaveVelocity) {
    // crests of cos(2h t - q R) move with dR/dt = 2h/q
    const double h = 5, q = -2;
    const auto f = line_field(20, sample_times(0, 13, 300),
                              [&](int r, double t) { return std::cos(2 * h * t - q * r) * std::exp(0.1 * t); });
    const RidgeReport rep = track_extrema(f);
    ASSERT_TRUE(rep.dominant);
    EXPECT_NEAR(rep.ridges[*rep.dominant].velocity, 2 * h / q, 0.02 * std::abs(2 * h / q));
    int close = 0;
    for (const auto& r : rep.ridges) close += r.points.size() >= 5 && std::abs(r.velocity - 2 * h / q) < 0.1;
    EXPECT_GT(close, 10);
}

TEST(Ridges, ScaleInvariant) {
    const auto f = line_field(20, sample_times(0, 13, 300),
                              [](int r, double t) { return std::cos(10 * t + 2 * r) * std::exp(-0.05 * r); });
    const RidgeReport a = track_extrema(f);
    // power-of-two scalings are exact, so the parabolic refinement is bit-identical
    for (double s : {0.125, 1024.0}) {
        CorrelationField g = f;
        g.values *= s;
        const RidgeReport b = track_extrema(g);
        ASSERT_EQ(a.ridges.size(), b.ridges.size());
        for (std::size_t i = 0; i < a.ridges.size(); ++i) EXPECT_EQ(a.ridges[i].velocity, b.ridges[i].velocity);
    }
    // other scalings round each sample, which reaches the refined extremum times at the last digits
    for (double s : {123.0, 1e-7}) {
        CorrelationField g = f;
        g.values *= s;
        const RidgeReport b = track_extrema(g);
        ASSERT_EQ(a.ridges.size(), b.ridges.size());
        for (std::size_t i = 0; i < a.ridges.size(); ++i)
            EXPECT_NEAR(a.ridges[i].velocity, b.ridges[i].velocity, 1e-12 * std::abs(a.ridges[i].velocity));
    }
}

TEST(Radial, IsotropicStepFront) {
    const auto f = square_field(30, sample_times(0, 9, 90), [](double r, double t) { return r <= 3 * t ? 1.0 : 0.0; });
    EXPECT_NEAR(radial_edge_2d(f, {1e-2, EdgeMode::radial}).velocity, 3.0, 0.03);
    EXPECT_NEAR(radial_edge_2d(f, {1e-2, EdgeMode::axis}).velocity, 3.0, 0.03);
}

TEST(Radial, RejectsLineField) {
    const auto f = line_field(5, sample_times(0, 1, 4), [](int r, double) { return r; });
    EXPECT_THROW(radial_edge_2d(f), domain_error);
}
