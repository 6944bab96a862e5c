#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "curvnorm/error.hpp"
#include "curvnorm/flows.hpp"

using namespace curvnorm;

namespace {

constexpr double kPi = std::numbers::pi;

// Block reduction of -2z - (2 delta S / n) g with delta S = 0: the metric
// a g1 + b g2 has Ric = -(1/a) (a g1) - (1/b) (b g2), S = -2/a - 2/b, and
// da/dt = -2 z_11 / g-factor.
ProductRates reduction_oracle(double a, double b) {
    const double s = -2.0 / a - 2.0 / b;
    const double z1 = -1.0 / a - s / 4.0;  // trace-free Ricci on the first block, per unit metric
    const double z2 = -1.0 / b - s / 4.0;
    return {-2.0 * z1 * a, -2.0 * z2 * b};
}

ConformalFactorField cosine_start(int nodes, double amplitude, int mode = 1) {
    return ConformalFactorField::from_function(ConformalBackground::sphere(4), nodes,
                                               [=](double t) { return 1.0 + amplitude * std::cos(mode * t); });
}

}  // namespace

TEST(ProductRhs, Examples) {
    const auto r = ricci_product_rhs({1.0, 2.0});
    EXPECT_NEAR(r.da, 0.5, 1e-15);
    EXPECT_NEAR(r.db, -1.0, 1e-15);
    const auto swapped = ricci_product_rhs({2.0, 1.0});
    EXPECT_NEAR(swapped.da, -1.0, 1e-15);
    EXPECT_NEAR(swapped.db, 0.5, 1e-15);
    const auto fixed = ricci_product_rhs({3.0, 3.0});
    EXPECT_EQ(fixed.da, 0.0);
    EXPECT_EQ(fixed.db, 0.0);
    EXPECT_THROW(ricci_product_rhs({0.0, 1.0}), DomainError);
}

TEST(ProductRhs, MatchesBlockReduction) {
    for (double a : {0.3, 1.0, 2.5})
        for (double b : {0.7, 1.0, 4.0}) {
            const auto r = ricci_product_rhs({a, b});
            const auto o = reduction_oracle(a, b);
            EXPECT_NEAR(r.da, o.da, 1e-14);
            EXPECT_NEAR(r.db, o.db, 1e-14);
        }
}

TEST(ProductMonitors, ClosedForms) {
    const auto m = product_monitors({1.0, 2.0, 0.0, 3.0, 5.0});
    EXPECT_NEAR(m.scalar, -3.0, 1e-15);
    EXPECT_NEAR(m.volume, 30.0, 1e-13);
    EXPECT_NEAR(m.scalar_l2, 9.0 * 30.0, 1e-12);
    EXPECT_NEAR(m.ricci_l2, (2.0 + 0.5) * 30.0, 1e-12);
}

TEST(ProductRun, ConvergesMonotonically) {
    const auto tr = ricci_product_run({1.0, 2.0}, 20.0, 0.01);
    EXPECT_TRUE(tr.scalar_monotone);
    EXPECT_LT(tr.volume_drift, 1e-8);
    const auto& last = tr.states.back();
    EXPECT_NEAR(last.t, 20.0, 1e-9);
    EXPECT_LT(std::abs(last.a - last.b), 1e-6);
    EXPECT_NEAR(last.a, std::sqrt(2.0), 1e-6);
    for (std::size_t i = 1; i < tr.monitors.size(); ++i) {
        EXPECT_LE(tr.monitors[i].scalar_l2, tr.monitors[i - 1].scalar_l2 * (1.0 + 1e-15));
    }
    EXPECT_LT(tr.monitors[10].scalar_l2, tr.monitors[0].scalar_l2);
}

TEST(ProductRun, EinsteinStartIsStationary) {
    const auto tr = ricci_product_run({1.5, 1.5}, 5.0, 0.1);
    for (const auto& s : tr.states) {
        EXPECT_EQ(s.a, 1.5);
        EXPECT_EQ(s.b, 1.5);
    }
}

TEST(ProductRun, HalvesOversizedSteps) {
    // A unit step from (0.1, 10) would drive a negative; halving recovers.
    const auto tr = ricci_product_run({10.0, 0.1}, 1.0, 1.0);
    EXPECT_GT(tr.halvings, 0);
    for (const auto& s : tr.states) {
        EXPECT_GT(s.a, 0.0);
        EXPECT_GT(s.b, 0.0);
    }
    EXPECT_THROW(ricci_product_run({10.0, 0.1}, 1.0, 1.0, 0), StepSizeError);
    EXPECT_THROW(ricci_product_run({1.0, 2.0}, 1.0, 0.0), StepSizeError);
}

TEST(YamabeStep, ConstantFactorIsFixed) {
    YamabeFlowState s(ConformalFactorField::constant(ConformalBackground::sphere(4), 128, 1.0));
    const double dt = yamabe_stable_dt(s.u);
    for (int k = 0; k < 10; ++k) s = yamabe_flow_step(std::move(s), dt, YamabeFlowKind::Normalized);
    for (double x : s.u.values()) EXPECT_NEAR(x, 1.0, 1e-14);
    EXPECT_EQ(s.history.size(), 11u);
}

TEST(YamabeStep, UnnormalizedShrinksLikeASquareRoot) {
    YamabeFlowState s(ConformalFactorField::constant(ConformalBackground::sphere(4), 64, 1.0));
    // S = 12 / u^2, so du/dt = -(1/2) S u = -6 / u and u^2 = 1 - 12 t.
    // The stable step scales with u^2, so it shrinks along the run.
    double euler = 1.0;
    for (int k = 0; k < 300; ++k) {
        const double dt = yamabe_stable_dt(s.u);
        euler -= 6.0 * dt / euler;
        s = yamabe_flow_step(std::move(s), dt, YamabeFlowKind::Unnormalized, false);
    }
    EXPECT_NEAR(s.u[10], euler, 1e-12);
    // First-order global error.
    const double dt0 = yamabe_stable_dt(ConformalFactorField::constant(ConformalBackground::sphere(4), 64, 1.0));
    EXPECT_NEAR(s.u[10], std::sqrt(1.0 - 12.0 * s.t), 10.0 * dt0);
    EXPECT_LT(yamabe_stable_dt(s.u), dt0);
}

TEST(YamabeStep, StepSizeLimits) {
    YamabeFlowState s(cosine_start(64, 0.1));
    EXPECT_THROW(yamabe_flow_step(s, 2.0 * yamabe_stable_dt(s.u), YamabeFlowKind::Normalized), StepSizeError);
    EXPECT_THROW(yamabe_flow_step(s, -1.0, YamabeFlowKind::Normalized), StepSizeError);
}

TEST(YamabeStep, StableStepKeepsPositivityOnSteepFactors) {
    // At the stable step the diffusion part can remove at most half of u at a
    // node, and the mean scalar curvature is positive on these backgrounds,
    // so no halving is ever needed.
    const auto torus = ConformalFactorField::from_function(ConformalBackground::torus(4, 1.0), 64,
                                                           [](double x) { return 1.0 + 0.99 * std::cos(2 * kPi * x); });
    const auto sphere = ConformalFactorField::from_function(ConformalBackground::sphere(6), 64,
                                                            [](double t) { return 1.0 + 0.9 * std::cos(5 * t); });
    for (const auto& u : {torus, sphere}) {
        for (auto kind : {YamabeFlowKind::Normalized, YamabeFlowKind::Unnormalized}) {
            YamabeFlowState s(u);
            for (int k = 0; k < 50; ++k) {
                const std::vector<double> before(s.u.values().begin(), s.u.values().end());
                const double dt = yamabe_stable_dt(s.u);
                s = yamabe_flow_step(std::move(s), dt, kind, false, 0);
                EXPECT_EQ(s.last_dt, dt);
                for (int i = 0; i < s.u.size(); ++i) EXPECT_GE(s.u[i], 0.5 * before[i]);
            }
        }
    }
}

TEST(YamabeRun, PerturbedSphereSmoothsScalarCurvature) {
    YamabeRunOptions opt;
    opt.t_end = 1.0;
    opt.record_stride = 100;
    const auto rep = yamabe_flow_run(cosine_start(129, 0.05, 2), opt);
    const auto& h = rep.final_state.history;
    EXPECT_TRUE(rep.initial_positive);
    EXPECT_FALSE(rep.positivity_lost);
    EXPECT_TRUE(rep.monotone);
    EXPECT_LT(h.back().max_scalar - h.back().min_scalar, 0.01 * (h.front().max_scalar - h.front().min_scalar));
    EXPECT_LT(rep.volume_spread, 1e-4);
    EXPECT_NEAR(rep.lower_bound, 384.0 * kPi * kPi, 1e-9);
    EXPECT_GT(rep.min_bound_margin, -grid_tolerance(rep.final_state.u));
    EXPECT_NEAR(h.back().t, 1.0, 1e-12);
}

TEST(YamabeRun, ConstantStartKeepsMonitorsConstant) {
    YamabeRunOptions opt;
    opt.t_end = 0.01;
    const auto rep = yamabe_flow_run(ConformalFactorField::constant(ConformalBackground::sphere(4), 64, 1.0), opt);
    for (const auto& m : rep.final_state.history) {
        EXPECT_NEAR(m.lp_norm, rep.final_state.history.front().lp_norm, 1e-9);
        EXPECT_NEAR(m.volume, rep.final_state.history.front().volume, 1e-12);
        EXPECT_NEAR(m.max_scalar - m.min_scalar, 0.0, 1e-12);
    }
}

TEST(EvolutionResidual, LinearizationMatchesFiniteDifference) {
    const auto u = cosine_start(129, 0.1);
    const auto ds = scalar_time_derivative(u);
    // Central difference of S along one normalized step direction.
    const auto s0 = scalar_curvature(u);
    YamabeFlowState st(u);
    const double sbar = st.current.mean_scalar;
    const double delta = 1e-4;
    std::vector<double> plus(u.size()), minus(u.size());
    for (int i = 0; i < u.size(); ++i) {
        const double v = 0.5 * (sbar - s0.values[i]) * u[i];
        plus[i] = u[i] + delta * v;
        minus[i] = u[i] - delta * v;
    }
    const auto sp = scalar_curvature(u.with_values(plus));
    const auto sm = scalar_curvature(u.with_values(minus));
    for (int i = 0; i < u.size(); ++i) {
        EXPECT_NEAR(ds[i], (sp.values[i] - sm.values[i]) / (2.0 * delta), 1e-6);
    }
}

TEST(EvolutionResidual, SecondOrderUnderGridDoubling) {
    const auto rows = residual_convergence(ConformalBackground::sphere(4),
                                           [](double t) { return 1.0 + 0.1 * std::cos(t); }, {129, 257, 513});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].ratio, 0.0);
    EXPECT_GE(rows[1].ratio, 3.5);
    EXPECT_GE(rows[2].ratio, 3.5);
    EXPECT_LT(evolution_residual(ConformalFactorField::constant(ConformalBackground::sphere(4), 64, 1.0)), 1e-12);
}
