#include "curvnorm/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvnorm/error.hpp"
#include "fast_pow.hpp"

namespace curvnorm {

using detail::rpow;

ProductRates ricci_product_rhs(const ProductFlowState& s) {
    if (!(s.a > 0.0) || !(s.b > 0.0)) throw DomainError("product scales must be positive");
    return {1.0 - s.a / s.b, 1.0 - s.b / s.a};
}

ProductMonitors product_monitors(const ProductFlowState& s) {
    const double vol = s.a * s.b * s.v1 * s.v2;
    ProductMonitors m{};
    m.scalar = -2.0 / s.a - 2.0 / s.b;
    // (2/a + 2/b)^2 a b = 4 (a+b)^2 / (a b), which avoids cancellation.
    m.scalar_l2 = 4.0 * (s.a + s.b) * (s.a + s.b) / (s.a * s.b) * s.v1 * s.v2;
    m.ricci_l2 = (2.0 / (s.a * s.a) + 2.0 / (s.b * s.b)) * vol;
    m.volume = vol;
    return m;
}

namespace {

bool rk4_step(const ProductFlowState& s, double h, ProductFlowState& out) {
    auto at = [&s](double da, double db) {
        ProductFlowState x = s;
        x.a += da;
        x.b += db;
        return x;
    };
    auto positive = [](const ProductFlowState& x) { return x.a > 0.0 && x.b > 0.0; };

    const ProductRates k1 = ricci_product_rhs(s);
    const ProductFlowState s2 = at(0.5 * h * k1.da, 0.5 * h * k1.db);
    if (!positive(s2)) return false;
    const ProductRates k2 = ricci_product_rhs(s2);
    const ProductFlowState s3 = at(0.5 * h * k2.da, 0.5 * h * k2.db);
    if (!positive(s3)) return false;
    const ProductRates k3 = ricci_product_rhs(s3);
    const ProductFlowState s4 = at(h * k3.da, h * k3.db);
    if (!positive(s4)) return false;
    const ProductRates k4 = ricci_product_rhs(s4);

    out = at(h / 6.0 * (k1.da + 2.0 * k2.da + 2.0 * k3.da + k4.da),
             h / 6.0 * (k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db));
    out.t = s.t + h;
    return positive(out);
}

}  // namespace

ProductTrajectory ricci_product_run(const ProductFlowState& initial, double t_end, double dt, int max_halvings) {
    if (!(dt > 0.0)) throw StepSizeError("time step must be positive");
    if (!(t_end >= initial.t)) throw DomainError("t_end precedes the initial time");
    ricci_product_rhs(initial);

    ProductTrajectory traj;
    traj.states.push_back(initial);
    traj.monitors.push_back(product_monitors(initial));
    const double v0 = traj.monitors.front().volume;
    constexpr double kRoundOff = 8.0 * std::numeric_limits<double>::epsilon();

    ProductFlowState s = initial;
    while (t_end - s.t > 1e-12 * std::max(1.0, t_end)) {
        double h = std::min(dt, t_end - s.t);
        ProductFlowState next;
        int tries = 0;
        while (!rk4_step(s, h, next)) {
            if (++tries > max_halvings) throw StepSizeError("product ODE step keeps leaving a, b > 0");
            h *= 0.5;
            ++traj.halvings;
        }
        const ProductMonitors m = product_monitors(next);
        const double prev = traj.monitors.back().scalar_l2;
        const double rise = (m.scalar_l2 - prev) / prev;
        traj.max_scalar_increase = std::max(traj.max_scalar_increase, rise);
        if (rise > kRoundOff) traj.scalar_monotone = false;
        traj.volume_drift = std::max(traj.volume_drift, std::abs(m.volume - v0) / v0);
        traj.states.push_back(next);
        traj.monitors.push_back(m);
        s = next;
    }
    return traj;
}

// ---------------------------------------------------------------------------

namespace {

double sphere_lower_bound(const ConformalBackground& bg) {
    const int n = bg.n;
    return std::pow(n * (n - 1.0), n / 2.0) * unit_sphere_volume(n);
}

void evaluate(YamabeFlowState& s) {
    s.scalar = scalar_curvature(s.u);
    const int n = s.u.dim();
    const double p = 2.0 * n / (n - 2.0);
    const auto& w = s.u.cache().weights;
    const auto uv = s.u.values();
    const auto& sv = s.scalar.values;

    double vol = 0.0, total = 0.0, lp = 0.0;
    for (int i = 0; i < s.u.size(); ++i) {
        const double dv = w[i] * rpow(uv[i], p);
        vol += dv;
        total += dv * sv[i];
        lp += dv * rpow(std::abs(sv[i]), n / 2.0);
    }
    s.current = {s.t, lp, vol, s.scalar.min(), s.scalar.max(), total / vol};
}

double mean_scalar(const ConformalFactorField& u, const std::vector<double>& s) {
    const int n = u.dim();
    const double p = 2.0 * n / (n - 2.0);
    const auto& w = u.cache().weights;
    double vol = 0.0, total = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        const double dv = w[i] * rpow(u[i], p);
        vol += dv;
        total += dv * s[i];
    }
    return total / vol;
}

}  // namespace

YamabeFlowState::YamabeFlowState(ConformalFactorField initial, double t0) : u(std::move(initial)), t(t0) {
    evaluate(*this);
    history.push_back(current);
}

double yamabe_stable_dt(const ConformalFactorField& u) {
    const int n = u.dim();
    const double r = u.background().kind == BackgroundKind::Sphere ? u.background().radius : 1.0;
    const double umin = *std::min_element(u.values().begin(), u.values().end());
    const double metric = rpow(umin, -4.0 / (n - 2.0));
    const double h = u.spacing();
    return 0.25 * h * h * r * r / ((n - 1.0) * metric);
}

YamabeFlowState yamabe_flow_step(YamabeFlowState state, double dt, YamabeFlowKind kind, bool record,
                                 int max_halvings) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw StepSizeError("time step must be positive");
    if (dt > yamabe_stable_dt(state.u) * (1.0 + 1e-12)) {
        throw StepSizeError("time step exceeds the explicit stability limit");
    }
    const int n = state.u.dim();
    const double c = (n - 2.0) / 4.0;
    const double target = kind == YamabeFlowKind::Normalized ? state.current.mean_scalar : 0.0;
    const auto uv = state.u.values();
    const auto& sv = state.scalar.values;

    std::vector<double> next(uv.size());
    for (int attempt = 0;; ++attempt) {
        bool ok = true;
        for (std::size_t i = 0; i < uv.size(); ++i) {
            next[i] = uv[i] * (1.0 + dt * c * (target - sv[i]));
            ok = ok && next[i] > 0.0 && std::isfinite(next[i]);
        }
        if (ok) break;
        if (attempt >= max_halvings) throw StiffnessError("Yamabe step keeps losing positivity of u");
        dt *= 0.5;
    }
    state.u = state.u.with_values(std::move(next));
    state.t += dt;
    state.last_dt = dt;
    evaluate(state);
    if (record) state.history.push_back(state.current);
    return state;
}

YamabeRunReport yamabe_flow_run(const ConformalFactorField& initial, const YamabeRunOptions& options) {
    if (!(options.t_end >= 0.0)) throw DomainError("t_end must be nonnegative");
    if (options.record_stride < 1) throw DomainError("record_stride must be >= 1");
    if (options.dt < 0.0) throw StepSizeError("time step must be nonnegative (0 selects the stable step)");

    YamabeRunReport rep{YamabeFlowState(initial)};
    YamabeFlowState& s = rep.final_state;
    rep.initial_positive = s.current.min_scalar > 0.0;
    rep.positivity_lost = !rep.initial_positive;
    const bool sphere = initial.background().kind == BackgroundKind::Sphere;
    rep.lower_bound = sphere ? sphere_lower_bound(initial.background()) : 0.0;
    rep.min_bound_margin = sphere ? (s.current.lp_norm - rep.lower_bound) / rep.lower_bound : 0.0;

    const double v0 = s.current.volume;
    double vmin = v0, vmax = v0;
    const double t_end = s.t + options.t_end;
    bool recorded = true;
    while (t_end - s.t > 1e-12 * std::max(1.0, t_end)) {
        double dt = options.dt > 0.0 ? options.dt : yamabe_stable_dt(s.u);
        dt = std::min(dt, t_end - s.t);
        const double prev = s.current.lp_norm;
        recorded = (rep.steps + 1) % options.record_stride == 0;
        s = yamabe_flow_step(std::move(s), dt, options.kind, recorded);
        ++rep.steps;

        if (s.current.min_scalar <= 0.0) rep.positivity_lost = true;
        if (!rep.positivity_lost) {
            const double rise = (s.current.lp_norm - prev) / prev;
            rep.max_lp_increase = std::max(rep.max_lp_increase, rise);
            if (rise > options.monotone_tol) rep.monotone = false;
        }
        vmin = std::min(vmin, s.current.volume);
        vmax = std::max(vmax, s.current.volume);
        if (sphere) {
            rep.min_bound_margin =
                std::min(rep.min_bound_margin, (s.current.lp_norm - rep.lower_bound) / rep.lower_bound);
        }
    }
    if (!recorded) s.history.push_back(s.current);
    rep.volume_spread = (vmax - vmin) / v0;
    return rep;
}

// ---------------------------------------------------------------------------

std::vector<double> scalar_time_derivative(const ConformalFactorField& u) {
    const int n = u.dim();
    const ScalarField s = scalar_curvature(u);
    const double sbar = mean_scalar(u, s.values);
    const double c = (n - 2.0) / 4.0;
    const double a = (n + 2.0) / (n - 2.0);
    const double s0 = u.background().scalar();
    const double cn = conformal_laplacian_constant(n);

    std::vector<double> v(u.size());
    for (int i = 0; i < u.size(); ++i) v[i] = c * (sbar - s.values[i]) * u[i];
    const std::vector<double> lv = background_laplacian(u, v);

    // S = u^(-a) (S0 u - C L u) differentiated along u -> u + t v.
    std::vector<double> ds(u.size());
    for (int i = 0; i < u.size(); ++i) {
        ds[i] = -a * s.values[i] * v[i] / u[i] + rpow(u[i], -a) * (s0 * v[i] - cn * lv[i]);
    }
    return ds;
}

double evolution_residual(const ConformalFactorField& u) {
    const int n = u.dim();
    const ScalarField s = scalar_curvature(u);
    const double sbar = mean_scalar(u, s.values);
    const std::vector<double> ds = scalar_time_derivative(u);
    const std::vector<double> lap = conformal_laplacian(u, s.values);

    std::vector<double> r2(u.size());
    for (int i = 0; i < u.size(); ++i) {
        const double r = ds[i] - ((n - 1.0) * lap[i] + s.values[i] * (s.values[i] - sbar));
        r2[i] = r * r;
    }
    return std::sqrt(volume_integrate(r2, u));
}

std::vector<ResidualRow> residual_convergence(const ConformalBackground& bg,
                                              const std::function<double(double)>& profile,
                                              const std::vector<int>& nodes) {
    std::vector<ResidualRow> rows;
    for (int m : nodes) {
        const auto u = ConformalFactorField::from_function(bg, m, profile);
        ResidualRow row{m, u.spacing(), evolution_residual(u), 0.0};
        if (!rows.empty()) row.ratio = rows.back().residual / row.residual;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace curvnorm
