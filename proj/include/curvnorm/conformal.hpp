#pragma once

// Conformal metrics g = u^(4/(n-2)) g0 on one-dimensional reductions of the
// round sphere (axisymmetric, colatitude grid including both poles) and the
// flat torus (dependence on the first periodic coordinate only).

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "curvnorm/models.hpp"

namespace curvnorm {

enum class BackgroundKind { Sphere, Torus };

struct ConformalBackground {
    BackgroundKind kind;
    int n;
    double radius = 1.0;         // sphere
    double length = 1.0;         // torus: period of the active coordinate
    double cross_section = 1.0;  // torus: volume of the remaining n-1 directions

    /// RoundSphere or FlatTorus with n >= 3; anything else throws DomainError.
    static ConformalBackground from_geometry(const ModelGeometry& geom);
    static ConformalBackground sphere(int n, double radius = 1.0);
    static ConformalBackground torus(int n, double length = 1.0, double cross_section = 1.0);

    double scalar() const noexcept;  // S(g0)
};

inline constexpr int kDefaultGridNodes = 512;
inline constexpr int kMinGridNodes = 32;

/// 4 (n-1) / (n-2)
double conformal_laplacian_constant(int n);

class ConformalFactorField {
public:
    /// Uniform grid: theta_i = i pi / (N-1) on the sphere, x_i = i L / N on the torus.
    ConformalFactorField(ConformalBackground background, std::vector<double> values);

    static ConformalFactorField from_function(const ConformalBackground& background, int nodes,
                                              const std::function<double(double)>& profile);
    static ConformalFactorField constant(const ConformalBackground& background, int nodes, double c);

    const ConformalBackground& background() const noexcept { return bg_; }
    int dim() const noexcept { return bg_.n; }
    int size() const noexcept { return static_cast<int>(u_.size()); }
    double spacing() const noexcept { return h_; }
    double node(int i) const noexcept { return i * h_; }
    std::span<const double> values() const noexcept { return u_; }
    double operator[](int i) const noexcept { return u_[i]; }

    ConformalFactorField scaled(double c) const;
    ConformalFactorField with_values(std::vector<double> values) const;

    /// |u_1 - u_0| / (h max u) at each pole, larger of the two; 0 on the torus.
    double pole_defect() const noexcept;

    /// Trapezoid weights of dv0 and cot(theta) at the nodes, shared between
    /// fields on the same grid.
    struct GridCache {
        std::vector<double> weights;
        std::vector<double> cot;
    };
    const GridCache& cache() const noexcept { return *cache_; }

private:
    ConformalFactorField(ConformalBackground background, std::vector<double> values,
                         std::shared_ptr<const GridCache> cache);

    ConformalBackground bg_;
    std::vector<double> u_;
    double h_;
    std::shared_ptr<const GridCache> cache_;
};

struct ScalarField {
    std::vector<double> values;
    bool pole_regular = true;

    double min() const;
    double max() const;
};

/// Grid Laplacian of the background metric: u'' + (n-1) cot(theta) u' over r^2
/// on the sphere (n u'' at the poles, ghost-node reflection), periodic second
/// difference on the torus.
std::vector<double> background_laplacian(const ConformalFactorField& grid, std::span<const double> f);

/// Laplacian of g = u^(4/(n-2)) g0 applied to f:
/// u^(-4/(n-2)) (Lap0 f + 2 <grad u, grad f> / u).
std::vector<double> conformal_laplacian(const ConformalFactorField& u, std::span<const double> f);

/// S(g) = u^(-(n+2)/(n-2)) (S0 u - C_n Lap0 u).
ScalarField scalar_curvature(const ConformalFactorField& u);

/// Trapezoid weights of dv0 at the grid nodes.
std::vector<double> background_weights(const ConformalFactorField& grid);

/// int f dv_g with dv_g = u^(2n/(n-2)) dv0.
double volume_integrate(std::span<const double> f, const ConformalFactorField& u);
double volume(const ConformalFactorField& u);

/// int |S(g)|^(n/2) dv_g
double lp_scalar_functional(const ConformalFactorField& u);

/// (C_n int|grad u|^2 dv0 + int S0 u^2 dv0) / (int u^(2n/(n-2)) dv0)^((n-2)/n)
double yamabe_quotient(const ConformalFactorField& u);

/// Relative tolerance for comparing grid quantities with their continuum
/// values: kGridToleranceFactor h^2.
inline constexpr double kGridToleranceFactor = 10.0;
double grid_tolerance(const ConformalFactorField& u);

/// n (n-1) omega_n^(2/n), the quotient of the round sphere.
double round_sphere_yamabe_value(int n);

struct BubbleSpec {
    int n;
    double epsilon;
};

/// Scalar curvature of the flat-chart bubble metric u_eps^(4/(n-2)) delta,
/// C_n n (n-2) = 4 n (n-1).
double bubble_scalar_curvature(int n);

/// Bubble metric pulled back to the unit round sphere by stereographic
/// projection from the north pole (theta = 0), written relative to the round
/// metric: (eps / (2 (eps^2 sin^2(theta/2) + cos^2(theta/2))))^((n-2)/2).
/// Concentrates at the south pole as eps -> 0.
ConformalFactorField bubble_pullback(const BubbleSpec& spec, int nodes = kDefaultGridNodes);

struct BubbleConcentration {
    double total;
    double inside;    // geodesic cap about the south pole
    double outside;
    double radial_integral;  // int_0^inf r^(n-1) (1+r^2)^(-n) dr
    double prefactor;        // S_bubble^(n/2) omega_(n-1)
};

/// int |S|^(n/2) dv of the bubble metric split by a cap of the given radius.
BubbleConcentration bubble_concentration(const BubbleSpec& spec, double cap_radius);

/// int_a^b r^(n-1) (1+r^2)^(-n) dr by adaptive Gauss-Kronrod quadrature;
/// upper = infinity allowed.
double bubble_radial_integral(int n, double lower, double upper);

struct SobolevReport {
    double lhs;                 // int |S(g)|^(n/2) dv_g
    double background_integral; // int |S0|^(n/2) dv0
    double constant;            // min{4(n-1)/(n-2), n a^2} / (C_inject n b^2)
    double rhs;                 // constant * background_integral
    double power_constant;      // constant^(n/2), the dimensionally homogeneous variant
    double margin;              // lhs - rhs
    bool holds;
    bool ricci_pinched;         // b^2 g >= Ric(g0) >= a^2 g
    bool scalar_term_binding;   // n a^2 < 4(n-1)/(n-2)
};

SobolevReport sobolev_bound_report(const ConformalFactorField& u, double a, double b, double c_inject);

/// Constant C(n, a) of the Sobolev inequality on the unit round sphere with
/// its sharp constants: max{4 / (n (n-2)), 1}.
double round_sphere_sobolev_constant(int n);

}  // namespace curvnorm
