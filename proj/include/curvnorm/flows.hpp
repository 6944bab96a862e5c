#pragma once

// Reduced curvature flows: the normalized Ricci flow on a product of two
// hyperbolic surfaces (an ODE in the block scales) and the Yamabe flow on
// axisymmetric conformal factors.

#include <vector>

#include "curvnorm/conformal.hpp"

namespace curvnorm {

// ---------------------------------------------------------------------------
// Ricci flow on (H^2/G1, a g_hyp) x (H^2/G2, b g_hyp)

struct ProductFlowState {
    double a;
    double b;
    double t = 0.0;
    double v1 = 1.0;  // hyperbolic areas of the unscaled factors
    double v2 = 1.0;
};

struct ProductRates {
    double da;
    double db;
};

/// da/dt = 1 - a/b, db/dt = 1 - b/a.
ProductRates ricci_product_rhs(const ProductFlowState& s);

struct ProductMonitors {
    double scalar;      // S = -2/a - 2/b
    double scalar_l2;   // int S^2 dv
    double ricci_l2;    // int |Ric|^2 dv
    double volume;      // a b v1 v2
};

ProductMonitors product_monitors(const ProductFlowState& s);

struct ProductTrajectory {
    std::vector<ProductFlowState> states;
    std::vector<ProductMonitors> monitors;
    bool scalar_monotone = true;   // int S^2 dv never increased beyond round-off
    double max_scalar_increase = 0.0;  // largest relative step increase seen
    double volume_drift = 0.0;         // max |V - V0| / V0
    int halvings = 0;
};

/// Classical RK4 with fixed step dt; a step that would make a or b
/// nonpositive is retried with half the step, up to max_halvings times,
/// after which StepSizeError is thrown.
ProductTrajectory ricci_product_run(const ProductFlowState& initial, double t_end, double dt,
                                    int max_halvings = 20);

// ---------------------------------------------------------------------------
// Yamabe flow u_t = ((n-2)/4) (sbar - S) u  or  -((n-2)/4) S u

enum class YamabeFlowKind { Normalized, Unnormalized };

struct YamabeMonitor {
    double t;
    double lp_norm;     // int |S|^(n/2) dv
    double volume;
    double min_scalar;
    double max_scalar;
    double mean_scalar; // sbar = int S dv / Vol
};

struct YamabeFlowState {
    ConformalFactorField u;
    double t = 0.0;
    ScalarField scalar;     // S of the current u
    YamabeMonitor current{};
    std::vector<YamabeMonitor> history;
    double last_dt = 0.0;

    /// Evaluates S and the monitors of u and records them at time t.
    explicit YamabeFlowState(ConformalFactorField initial, double t0 = 0.0);
};

/// 0.25 h^2 r^2 / ((n-1) max u^(-4/(n-2))): the explicit-Euler limit of the
/// diffusion term (n-1) Lap_g.
double yamabe_stable_dt(const ConformalFactorField& u);

/// One explicit Euler step. dt above the stable limit throws StepSizeError; a
/// step that loses positivity is retried with dt halved, and max_halvings
/// failures throw StiffnessError. The monitor of the new state is appended to
/// the history when record is set.
YamabeFlowState yamabe_flow_step(YamabeFlowState state, double dt, YamabeFlowKind kind, bool record = true,
                                 int max_halvings = 8);

struct YamabeRunOptions {
    double t_end = 1.0;
    YamabeFlowKind kind = YamabeFlowKind::Normalized;
    double dt = 0.0;            // 0: use yamabe_stable_dt at every step
    double monotone_tol = 1e-8; // relative per-step tolerance on int |S|^(n/2) dv
    int record_stride = 1;      // keep every k-th monitor in the history
};

struct YamabeRunReport {
    YamabeFlowState final_state;
    long steps = 0;
    bool initial_positive = false;  // S > 0 at t = 0
    bool positivity_lost = false;   // S changed sign during the run
    bool monotone = true;           // checked only while S > 0
    double max_lp_increase = 0.0;   // largest relative per-step increase
    double volume_spread = 0.0;     // (max V - min V) / V0 over the run
    double lower_bound = 0.0;       // (n(n-1))^(n/2) omega_n on sphere backgrounds
    double min_bound_margin = 0.0;  // min over the run of (lp - bound) / bound
};

YamabeRunReport yamabe_flow_run(const ConformalFactorField& initial, const YamabeRunOptions& options);

/// dS/dt of the discrete scalar curvature along the normalized flow, by the
/// exact linearization of the grid operator.
std::vector<double> scalar_time_derivative(const ConformalFactorField& u);

/// Weighted L2 (dv_g) norm of dS/dt - ((n-1) Lap_g S + S (S - sbar)).
double evolution_residual(const ConformalFactorField& u);

struct ResidualRow {
    int nodes;
    double spacing;
    double residual;
    double ratio;  // previous residual / this residual; 0 on the first row
};

/// Residual of the scalar-curvature evolution for a profile on grids with
/// the given node counts.
std::vector<ResidualRow> residual_convergence(const ConformalBackground& bg,
                                              const std::function<double(double)>& profile,
                                              const std::vector<int>& nodes);

}  // namespace curvnorm
