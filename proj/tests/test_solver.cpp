#include <cmath>
#include <numbers>
#include <random>

#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include "critex/solver.hpp"

using namespace critex;
using std::numbers::pi;

namespace {

PhysicalField smooth_field(const GridSpec& g, double mean, double a1, double b2) {
    PhysicalField f{g, std::vector<double>(g.size())};
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double x = g.coordinate(static_cast<int>(i));
        f.values[i] = mean + a1 * std::cos(2 * pi * x / g.length) + b2 * std::sin(4 * pi * x / g.length);
    }
    return f;
}

double spectral_distance(const SpectrumField& a, const SpectrumField& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) s += std::norm(a.coeffs[i] - b.coeffs[i]);
    return std::sqrt(s);
}

State march(MildStepper& stepper, State s, double h, int steps) {
    for (int k = 0; k < steps; ++k) s = stepper.step(s, h);
    return s;
}

}  // namespace

TEST(Nonlinearity, Examples) {
    GridSpec g(1, 16, 1.0);
    PhysicalField u{g, std::vector<double>(16, -2.0)};
    for (double v : nonlinearity(u, 3.0).field.values) EXPECT_DOUBLE_EQ(v, 8.0);
    PhysicalField z{g, std::vector<double>(16, 0.0)};
    for (double v : nonlinearity(z, 2.5).field.values) EXPECT_EQ(v, 0.0);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> N01;
    PhysicalField r{g, std::vector<double>(16)};
    for (auto& v : r.values) v = N01(rng);
    const auto out = nonlinearity(r, 2.0);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(out.field.values[i], r.values[i] * r.values[i]);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_GE(nonlinearity(r, 1.7).field.values[i], 0.0);
    EXPECT_FALSE(out.diverged);
    r.values[3] = std::nan("");
    EXPECT_TRUE(nonlinearity(r, 2.0).diverged);
}

TEST(Config, Validation) {
    SolverConfig c;
    EXPECT_NO_THROW(c.validate());
    auto bad = c;
    bad.p = 1.0;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = c;
    bad.dt = 0;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = c;
    bad.theta = 1.0;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = c;
    bad.t_end = -1;
    EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Step, ZeroDataIsLinear) {
    GridSpec g(1, 64, 2 * pi);
    const auto u0 = smooth_field(g, 0.3, 0.5, 0.2);
    const auto u1 = smooth_field(g, -0.1, 0.2, 0.4);
    State s = initial_state(u0, u1, 1.0);
    SolverConfig c;
    c.forcing = false;
    const auto stepped = step(s, 0.05, c);
    const auto exact = apply_linear({s.u_hat, s.ut_hat}, 0.05);
    EXPECT_LT(spectral_distance(stepped.u_hat, exact.u), 1e-14);
    EXPECT_LT(spectral_distance(stepped.ut_hat, exact.ut), 1e-14);

    SolverConfig zero;
    zero.eps = 0.0;
    State z = initial_state(u0, u1, 0.0);
    const auto zs = step(z, 0.05, zero);
    EXPECT_EQ(l2_norm(zs.u_hat), 0.0);
}

TEST(Step, SecondOrderConvergence) {
    GridSpec g(1, 32, 2 * pi);
    const auto u0 = smooth_field(g, 0.5, 0.3, 0.1);
    const auto u1 = smooth_field(g, 0.2, -0.1, 0.2);
    SolverConfig c;
    c.p = 2;
    c.dealias = false;
    MildStepper stepper(g, c);
    const State s0 = initial_state(u0, u1, 1.0);
    const double T = 1.0;
    const auto ref = march(stepper, s0, T / 1280, 1280);
    std::vector<double> err;
    for (int steps : {10, 20, 40}) err.push_back(spectral_distance(march(stepper, s0, T / steps, steps).u_hat, ref.u_hat));
    const double r1 = err[0] / err[1], r2 = err[1] / err[2];
    EXPECT_GE(r1, 3.4);
    EXPECT_LE(r1, 4.6);
    EXPECT_GE(r2, 3.4);
    EXPECT_LE(r2, 4.6);
}

TEST(Step, ZeroModeMatchesOdeOracle) {
    GridSpec g(1, 16, 2 * pi);
    PhysicalField u0{g, std::vector<double>(16, 0.8)}, u1{g, std::vector<double>(16, 0.4)};
    SolverConfig c;
    c.p = 2;
    c.dt = 1e-3;
    c.t_end = 1.0;
    const auto r = run(c, u0, u1, 1.0, 0.5);
    ASSERT_EQ(r.status, RunStatus::Completed);
    const double numeric = r.history.back().maxabs;

    using Vec = std::array<double, 2>;
    Vec y{0.8, 0.4};
    auto rhs = [](const Vec& x, Vec& dx, double) {
        dx[0] = x[1];
        dx[1] = -x[1] + x[0] * x[0];
    };
    namespace odeint = boost::numeric::odeint;
    odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<Vec>>(1e-13, 1e-13), rhs, y, 0.0,
                               1.0, 1e-3);
    EXPECT_NEAR(numeric, y[0], 1e-4 * y[0]);
}

TEST(Run, EpsZeroCompletesAndMatchesLinear) {
    GridSpec g(1, 256, 40 * pi);
    const auto u0 = make_initial_data(PaperProfileData{1.0, 0.5}, g);
    SolverConfig c;
    c.eps = 0.0;
    c.dt = 0.1;
    const auto r = run(c, u0, u0, 1.0, 0.5);
    EXPECT_EQ(r.status, RunStatus::Completed);
    for (const auto& h : r.history) EXPECT_EQ(h.l2, 0.0);
}

TEST(Run, LinearLimitAtTinyEps) {
    GridSpec g(1, 1024, 100 * pi);
    const auto u0 = make_initial_data(PaperProfileData{1.0, 0.5}, g);
    SolverConfig c;
    c.p = 2;
    c.eps = 1e-8;
    c.dt = 0.05;
    c.t_end = 10;
    auto lin = c;
    lin.forcing = false;
    const auto a = run(c, u0, u0, 1.0, 0.5);
    const auto b = run(lin, u0, u0, 1.0, 0.5);
    ASSERT_EQ(a.history.size(), b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        EXPECT_EQ(a.history[i].t, b.history[i].t);
        EXPECT_LT(std::abs(a.history[i].l2 - b.history[i].l2), 1e-6 * b.history[i].l2);
        EXPECT_LT(std::abs(a.history[i].hs - b.history[i].hs), 1e-6 * b.history[i].hs);
    }
}

TEST(Run, HistoryLandsOnSampleTimes) {
    SolverConfig c;
    c.dt = 0.07;
    c.t_end = 5;
    const auto times = history_times(c);
    EXPECT_EQ(times.size(), 65u);
    EXPECT_EQ(times.front(), 0.0);
    EXPECT_EQ(times.back(), 5.0);
    GridSpec g(1, 64, 20.0);
    const auto u0 = make_initial_data(GaussianData{0.1, 1.0}, g);
    const auto r = run(c, u0, u0, 1.0, 0.5);
    ASSERT_EQ(r.history.size(), times.size());
    for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(r.history[i].t, times[i], 1e-12 * times[i]);
}

TEST(Run, ForcingIncrementIsNonnegative) {
    GridSpec g(1, 128, 2 * pi);
    const auto u = smooth_field(g, 2.0, 1.0, 0.0);  // |u|^2 is band-limited and positive
    SolverConfig c;
    c.p = 2;
    MildStepper stepper(g, c);
    const auto f0 = stepper.forcing(transform_forward(u));
    State zero{SpectrumField::zeros(g), SpectrumField::zeros(g), 0.0};
    for (double h : {0.01, 0.1, 0.5}) {
        const auto inc = transform_inverse(stepper.advance(zero, f0, h).u_hat);
        double mx = 0, mn = 0;
        for (double v : inc.values) {
            mx = std::max(mx, v);
            mn = std::min(mn, v);
        }
        EXPECT_GT(mx, 0.0);
        EXPECT_GE(mn, -1e-10 * mx);
    }
}

TEST(Run, LinearEnergyIsNonincreasing) {
    GridSpec g(2, 32, 8 * pi);
    const auto u0 = make_initial_data(GaussianData{1.0, 2.0}, g);
    const auto u1 = make_initial_data(SingleModeData{{2, 1, 0}, 0.5}, g);
    SolverConfig c;
    c.forcing = false;
    c.dt = 0.1;
    c.t_end = 20;
    const auto r = run(c, u0, u1, 1.0, 0.5);
    for (std::size_t i = 1; i < r.history.size(); ++i)
        EXPECT_LE(r.history[i].energy, r.history[i - 1].energy * (1 + 1e-12));
}

TEST(Run, SupercriticalSmallDataCompletes) {
    GridSpec g(1, 1024, 200 * pi);
    const auto u0 = make_initial_data(PaperProfileData{1.0, 0.3}, g);
    SolverConfig c;
    c.p = 5;
    c.eps = 1e-3;
    c.dt = 0.2;
    c.t_end = 100;
    const auto r = run(c, u0, u0, 1.0, 0.3);
    EXPECT_EQ(r.status, RunStatus::Completed);
    EXPECT_TRUE(std::isfinite(r.weighted_sup));
    EXPECT_GT(r.weighted_sup, 0.0);
}

TEST(Lifespan, MonotoneAndThresholdRobust) {
    GridSpec g(1, 2048, 200 * pi);
    const auto u0 = make_initial_data(PaperProfileData{1.0, 0.5}, g);
    SolverConfig c;
    c.p = 2;
    c.dt = 0.1;
    c.t_end = 500;
    double prev = 0;
    for (double eps : {0.5, 0.3, 0.2}) {
        const auto m = measure_lifespan(c, u0, u0, eps);
        EXPECT_EQ(m.status, RunStatus::BlowUp);
        EXPECT_GT(m.time, prev);
        EXPECT_LE(m.time, c.t_end);
        prev = m.time;
    }
    auto hi = c;
    hi.theta = 1e16;
    const double t8 = measure_lifespan(c, u0, u0, 0.3).time;
    const double t16 = measure_lifespan(hi, u0, u0, 0.3).time;
    EXPECT_LT(std::abs(t16 - t8), 0.02 * t8);
}

TEST(Lifespan, ReportsInfinityWhenNoBlowUp) {
    GridSpec g(1, 256, 40 * pi);
    const auto u0 = make_initial_data(PaperProfileData{1.0, 0.5}, g);
    SolverConfig c;
    c.p = 2;
    c.dt = 0.1;
    c.t_end = 1;
    const auto m = measure_lifespan(c, u0, u0, 1e-3);
    EXPECT_TRUE(std::isinf(m.time));
    EXPECT_EQ(m.status, RunStatus::Completed);
}

TEST(Lifespan, StepUnderflowIsReported) {
    GridSpec g(1, 64, 2 * pi);
    PhysicalField u0{g, std::vector<double>(64, 1.0)};
    SolverConfig c;
    c.p = 3;
    c.dt = 0.5;
    c.t_end = 10;
    c.growth_factor = 1.0001;
    c.dt_min_ratio = 1e-3;
    const auto r = run(c, u0, u0, 1.0, 0.5);
    EXPECT_EQ(r.status, RunStatus::StepUnderflow);
    EXPECT_LT(r.end_time, 10.0);
    EXPECT_GT(r.rejected, 0);
}

TEST(Run, WeightedNorm) {
    HistorySample h;
    h.t = 3;
    h.l2 = 2;
    h.hs = 5;
    EXPECT_NEAR(weighted_norm(h, 1.0, 0.5), std::pow(4.0, 0.25) * 2 + std::pow(4.0, 0.75) * 5, 1e-14);
}

TEST(Run, RejectsMismatchedGrids) {
    SolverConfig c;
    PhysicalField a{GridSpec(1, 16, 1.0), std::vector<double>(16)};
    PhysicalField b{GridSpec(1, 32, 1.0), std::vector<double>(32)};
    EXPECT_THROW(run(c, a, b, 1.0, 0.5), ContractViolation);
    auto bad = c;
    bad.dt = -1;
    EXPECT_THROW(run(bad, a, a, 1.0, 0.5), DomainError);
}
