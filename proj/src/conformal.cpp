#include "curvnorm/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "curvnorm/error.hpp"
#include "fast_pow.hpp"

namespace curvnorm {

namespace {

using detail::rpow;

constexpr double kPi = std::numbers::pi;

void require_conformal_dim(int n) {
    if (n < 3) throw InvalidDimension("conformal factors need n >= 3, got " + std::to_string(n));
}

void require_same_grid(std::span<const double> f, const ConformalFactorField& u) {
    if (static_cast<int>(f.size()) != u.size()) {
        throw GridMismatch("field has " + std::to_string(f.size()) + " nodes, grid has " +
                           std::to_string(u.size()));
    }
}

// Derivative along the active coordinate; zero at the poles by reflection.
std::vector<double> grid_derivative(const ConformalFactorField& grid, std::span<const double> f) {
    const int m = grid.size();
    const double h = grid.spacing();
    std::vector<double> d(m, 0.0);
    if (grid.background().kind == BackgroundKind::Sphere) {
        for (int i = 1; i < m - 1; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    } else {
        for (int i = 0; i < m; ++i) {
            d[i] = (f[(i + 1) % m] - f[(i + m - 1) % m]) / (2.0 * h);
        }
    }
    return d;
}

std::shared_ptr<const ConformalFactorField::GridCache> make_cache(const ConformalBackground& bg, int m,
                                                                  double h) {
    auto cache = std::make_shared<ConformalFactorField::GridCache>();
    cache->weights.assign(m, 0.0);
    cache->cot.assign(m, 0.0);
    if (bg.kind == BackgroundKind::Sphere) {
        const double shell = std::pow(bg.radius, bg.n) * unit_sphere_volume(bg.n - 1);
        // Endpoint weights vanish with sin^(n-1).
        for (int i = 1; i < m - 1; ++i) {
            const double theta = i * h;
            cache->weights[i] = shell * rpow(std::sin(theta), bg.n - 1) * h;
            cache->cot[i] = std::cos(theta) / std::sin(theta);
        }
    } else {
        std::fill(cache->weights.begin(), cache->weights.end(), bg.cross_section * h);
    }
    return cache;
}

// Metric factor turning coordinate derivatives into g0-lengths.
double inverse_metric_factor(const ConformalBackground& bg) {
    return bg.kind == BackgroundKind::Sphere ? 1.0 / (bg.radius * bg.radius) : 1.0;
}

}  // namespace

// ---------------------------------------------------------------------------

ConformalBackground ConformalBackground::from_geometry(const ModelGeometry& geom) {
    if (const auto* s = geom.as<RoundSphere>()) return sphere(s->n, s->radius);
    if (const auto* t = geom.as<FlatTorus>()) {
        double cross = 1.0;
        for (std::size_t i = 1; i < t->periods.size(); ++i) cross *= t->periods[i];
        return torus(geom.dim(), t->periods.front(), cross);
    }
    throw DomainError("conformal factors live on round spheres or flat tori, not " + geom.kind_name());
}

ConformalBackground ConformalBackground::sphere(int n, double radius) {
    require_conformal_dim(n);
    if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
    return {BackgroundKind::Sphere, n, radius, 1.0, 1.0};
}

ConformalBackground ConformalBackground::torus(int n, double length, double cross_section) {
    require_conformal_dim(n);
    if (!(length > 0.0) || !(cross_section > 0.0)) throw DomainError("torus periods must be positive");
    return {BackgroundKind::Torus, n, 1.0, length, cross_section};
}

double ConformalBackground::scalar() const noexcept {
    return kind == BackgroundKind::Sphere ? n * (n - 1.0) / (radius * radius) : 0.0;
}

double conformal_laplacian_constant(int n) { return 4.0 * (n - 1.0) / (n - 2.0); }

// ---------------------------------------------------------------------------

ConformalFactorField::ConformalFactorField(ConformalBackground background, std::vector<double> values)
    : bg_(background), u_(std::move(values)), h_(0.0) {
    require_conformal_dim(bg_.n);
    const int m = static_cast<int>(u_.size());
    if (m < kMinGridNodes) {
        throw GridMismatch("conformal grids need at least " + std::to_string(kMinGridNodes) + " nodes");
    }
    for (double x : u_) {
        if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("conformal factor must be positive and finite");
    }
    h_ = bg_.kind == BackgroundKind::Sphere ? kPi / (m - 1) : bg_.length / m;
    cache_ = make_cache(bg_, m, h_);
}

ConformalFactorField::ConformalFactorField(ConformalBackground background, std::vector<double> values,
                                           std::shared_ptr<const GridCache> cache)
    : bg_(background), u_(std::move(values)), h_(0.0), cache_(std::move(cache)) {
    const int m = static_cast<int>(u_.size());
    for (double x : u_) {
        if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("conformal factor must be positive and finite");
    }
    h_ = bg_.kind == BackgroundKind::Sphere ? kPi / (m - 1) : bg_.length / m;
}

ConformalFactorField ConformalFactorField::from_function(const ConformalBackground& background, int nodes,
                                                         const std::function<double(double)>& profile) {
    if (nodes < kMinGridNodes) throw GridMismatch("too few grid nodes");
    const double h = background.kind == BackgroundKind::Sphere ? kPi / (nodes - 1) : background.length / nodes;
    std::vector<double> v(nodes);
    for (int i = 0; i < nodes; ++i) v[i] = profile(i * h);
    return {background, std::move(v)};
}

ConformalFactorField ConformalFactorField::constant(const ConformalBackground& background, int nodes, double c) {
    return from_function(background, nodes, [c](double) { return c; });
}

ConformalFactorField ConformalFactorField::scaled(double c) const {
    std::vector<double> v = u_;
    for (double& x : v) x *= c;
    return {bg_, std::move(v), cache_};
}

ConformalFactorField ConformalFactorField::with_values(std::vector<double> values) const {
    if (values.size() != u_.size()) throw GridMismatch("replacement values have a different grid size");
    return {bg_, std::move(values), cache_};
}

double ConformalFactorField::pole_defect() const noexcept {
    if (bg_.kind != BackgroundKind::Sphere) return 0.0;
    const double top = *std::max_element(u_.begin(), u_.end());
    const auto m = u_.size();
    const double north = std::abs(u_[1] - u_[0]);
    const double south = std::abs(u_[m - 2] - u_[m - 1]);
    return std::max(north, south) / (h_ * top);
}

double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }
double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }

// ---------------------------------------------------------------------------

std::vector<double> background_laplacian(const ConformalFactorField& grid, std::span<const double> f) {
    require_same_grid(f, grid);
    const auto& bg = grid.background();
    const int m = grid.size();
    const double h = grid.spacing();
    const double h2 = h * h;
    std::vector<double> lap(m);
    if (bg.kind == BackgroundKind::Sphere) {
        const int n = bg.n;
        const double scale = inverse_metric_factor(bg);
        const auto& cot = grid.cache().cot;
        // Pole limit of u'' + (n-1) cot(theta) u' with u'(pole) = 0 is n u''.
        lap[0] = scale * n * 2.0 * (f[1] - f[0]) / h2;
        lap[m - 1] = scale * n * 2.0 * (f[m - 2] - f[m - 1]) / h2;
        for (int i = 1; i < m - 1; ++i) {
            const double second = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
            const double first = (f[i + 1] - f[i - 1]) / (2.0 * h);
            lap[i] = scale * (second + (n - 1) * cot[i] * first);
        }
    } else {
        for (int i = 0; i < m; ++i) {
            lap[i] = (f[(i + 1) % m] - 2.0 * f[i] + f[(i + m - 1) % m]) / h2;
        }
    }
    return lap;
}

std::vector<double> conformal_laplacian(const ConformalFactorField& u, std::span<const double> f) {
    require_same_grid(f, u);
    const int n = u.dim();
    const auto uv = u.values();
    std::vector<double> lap = background_laplacian(u, f);
    const std::vector<double> du = grid_derivative(u, uv);
    const std::vector<double> df = grid_derivative(u, f);
    const double scale = inverse_metric_factor(u.background());
    for (int i = 0; i < u.size(); ++i) {
        lap[i] = rpow(uv[i], -4.0 / (n - 2)) * (lap[i] + 2.0 * scale * du[i] * df[i] / uv[i]);
    }
    return lap;
}

ScalarField scalar_curvature(const ConformalFactorField& u) {
    const int n = u.dim();
    const auto uv = u.values();
    const double s0 = u.background().scalar();
    const double cn = conformal_laplacian_constant(n);
    const double power = -(n + 2.0) / (n - 2.0);
    const std::vector<double> lap = background_laplacian(u, uv);

    ScalarField s;
    s.values.resize(uv.size());
    for (std::size_t i = 0; i < uv.size(); ++i) {
        s.values[i] = rpow(uv[i], power) * (s0 * uv[i] - cn * lap[i]);
    }
    s.pole_regular = u.pole_defect() <= std::sqrt(u.spacing());
    return s;
}

std::vector<double> background_weights(const ConformalFactorField& grid) { return grid.cache().weights; }

double volume_integrate(std::span<const double> f, const ConformalFactorField& u) {
    require_same_grid(f, u);
    const int n = u.dim();
    const double power = 2.0 * n / (n - 2.0);
    const auto& w = u.cache().weights;
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) s += w[i] * f[i] * rpow(u[i], power);
    return s;
}

double volume(const ConformalFactorField& u) {
    const std::vector<double> one(u.size(), 1.0);
    return volume_integrate(one, u);
}

double lp_scalar_functional(const ConformalFactorField& u) {
    const ScalarField s = scalar_curvature(u);
    std::vector<double> f(s.values.size());
    const double p = u.dim() / 2.0;
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = rpow(std::abs(s.values[i]), p);
    return volume_integrate(f, u);
}

double yamabe_quotient(const ConformalFactorField& u) {
    const int n = u.dim();
    const auto uv = u.values();
    const auto& w = u.cache().weights;
    const std::vector<double> du = grid_derivative(u, uv);
    const double scale = inverse_metric_factor(u.background());
    const double s0 = u.background().scalar();
    const double p = 2.0 * n / (n - 2.0);

    double grad = 0.0, mass = 0.0, norm = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        grad += w[i] * scale * du[i] * du[i];
        mass += w[i] * s0 * uv[i] * uv[i];
        norm += w[i] * rpow(uv[i], p);
    }
    return (conformal_laplacian_constant(n) * grad + mass) / std::pow(norm, (n - 2.0) / n);
}

double grid_tolerance(const ConformalFactorField& u) {
    return kGridToleranceFactor * u.spacing() * u.spacing();
}

double round_sphere_yamabe_value(int n) {
    require_conformal_dim(n);
    return n * (n - 1.0) * std::pow(unit_sphere_volume(n), 2.0 / n);
}

// ---------------------------------------------------------------------------

double bubble_scalar_curvature(int n) {
    require_conformal_dim(n);
    return conformal_laplacian_constant(n) * n * (n - 2.0);
}

ConformalFactorField bubble_pullback(const BubbleSpec& spec, int nodes) {
    require_conformal_dim(spec.n);
    if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon)) throw DomainError("bubble epsilon must be positive");
    const double eps = spec.epsilon;
    const double k = (spec.n - 2.0) / 2.0;
    return ConformalFactorField::from_function(
        ConformalBackground::sphere(spec.n), nodes, [eps, k](double theta) {
            const double s = std::sin(theta / 2.0);
            const double c = std::cos(theta / 2.0);
            return std::pow(eps / (2.0 * (eps * eps * s * s + c * c)), k);
        });
}

double bubble_radial_integral(int n, double lower, double upper) {
    if (!(lower >= 0.0) || !(upper >= lower)) throw DomainError("radial integral needs 0 <= lower <= upper");
    // r = tan(phi) turns r^(n-1) (1+r^2)^(-n) dr into sin^(n-1) cos^(n-1) dphi.
    const double a = std::atan(lower);
    const double b = std::isinf(upper) ? kPi / 2.0 : std::atan(upper);
    if (b <= a) return 0.0;
    auto integrand = [n](double phi) { return std::pow(std::sin(phi) * std::cos(phi), n - 1); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a, b, 15, 1e-14);
}

BubbleConcentration bubble_concentration(const BubbleSpec& spec, double cap_radius) {
    require_conformal_dim(spec.n);
    if (!(spec.epsilon > 0.0)) throw DomainError("bubble epsilon must be positive");
    if (!(cap_radius > 0.0 && cap_radius < kPi)) throw DomainError("cap radius must lie in (0, pi)");
    const int n = spec.n;
    const double prefactor =
        std::pow(bubble_scalar_curvature(n), n / 2.0) * unit_sphere_volume(n - 1);
    // A geodesic cap of radius rho about the south pole is the chart ball |x| < tan(rho/2).
    const double split = std::tan(cap_radius / 2.0) / spec.epsilon;
    const double inside = bubble_radial_integral(n, 0.0, split);
    const double outside = bubble_radial_integral(n, split, INFINITY);

    BubbleConcentration out{};
    out.prefactor = prefactor;
    out.inside = prefactor * inside;
    out.outside = prefactor * outside;
    out.total = out.inside + out.outside;
    out.radial_integral = bubble_radial_integral(n, 0.0, INFINITY);
    return out;
}

// ---------------------------------------------------------------------------

double round_sphere_sobolev_constant(int n) {
    require_conformal_dim(n);
    return std::max(4.0 / (n * (n - 2.0)), 1.0);
}

SobolevReport sobolev_bound_report(const ConformalFactorField& u, double a, double b, double c_inject) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("Ricci pinching constants a, b must be positive");
    if (!(c_inject > 0.0)) throw DomainError("Sobolev constant must be positive");
    const int n = u.dim();
    const auto& bg = u.background();
    const double ricci = bg.kind == BackgroundKind::Sphere ? (n - 1.0) / (bg.radius * bg.radius) : 0.0;
    const double scalar_term = n * a * a;
    const double gradient_term = conformal_laplacian_constant(n);

    SobolevReport rep{};
    rep.lhs = lp_scalar_functional(u);
    const auto one = ConformalFactorField::constant(bg, u.size(), 1.0);
    rep.background_integral = std::pow(std::abs(bg.scalar()), n / 2.0) * volume(one);
    rep.constant = std::isinf(c_inject) ? 0.0 : std::min(gradient_term, scalar_term) / (c_inject * n * b * b);
    rep.power_constant = std::pow(rep.constant, n / 2.0);
    rep.rhs = rep.constant * rep.background_integral;
    rep.margin = rep.lhs - rep.rhs;
    rep.holds = rep.margin >= 0.0;
    rep.ricci_pinched = a * a <= ricci * (1.0 + 1e-12) && ricci <= b * b * (1.0 + 1e-12);
    rep.scalar_term_binding = scalar_term < gradient_term;
    return rep;
}

}  // namespace curvnorm
