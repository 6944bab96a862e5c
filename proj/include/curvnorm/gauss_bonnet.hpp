#pragma once

// Gauss-Bonnet integrands in even dimensions with self-calibrated constants.

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "curvnorm/curvature.hpp"
#include "curvnorm/models.hpp"

namespace curvnorm {

/// Double sum over permutation pairs of sign(s) sign(t) times the product of
/// R(s(2m-1), s(2m), t(2m-1), t(2m)) over m = 1..n/2. n in {2, 4, 6}.
/// Parallel over the outer permutation; partial sums are reduced in a fixed
/// order so the result does not depend on the thread count.
double pfaffian_integrand(const CurvatureTensor& r);

/// Single-threaded reference for pfaffian_integrand.
double pfaffian_integrand_serial(const CurvatureTensor& r);

/// |U|^2 - |Z|^2 + |W|^2 (n = 4 only).
double closed_form_integrand(const CurvatureTensor& r);

struct GBCalibration {
    int n;
    double c_n;                  // chi = (integrand * Vol) / c_n on homogeneous spaces
    std::optional<double> k_4;   // chi = k_4 * int(|U|^2 - |Z|^2 + |W|^2), n = 4
};

/// Fixes the constants so that the round unit sphere has chi = 2.
GBCalibration calibrate(int n);

struct EulerEstimate {
    double pfaffian_route;
    std::optional<double> closed_form_route;
    double integrand;
    double residual;   // |pfaffian - closed form| (0 when only one route exists)
};

EulerEstimate euler_characteristic(const ModelGeometry& geom, const GBCalibration& cal);

/// {route, n, integrand, chi_estimate, residual}
nlohmann::json euler_record(const std::string& route, int n, double integrand, double chi, double residual);

/// Integrals of |U|^2, |Z|^2, |W|^2, |S|^2 over the manifold (n = 4).
struct CurvatureIntegrals {
    double scalar_part;
    double traceless_part;
    double weyl;
    double scalar;
};

struct HolderReport {
    bool vacuous;               // chi == 0: no lower bound follows
    bool integer_chi;
    bool hypotheses_hold;       // int|Z|^2 <= delta and int|W|^2 <= eps
    double delta;
    double eps;
    double certified_bound;     // lower bound on int S^2 when the hypotheses hold
    double actual_scalar;
    bool bound_satisfied;
};

/// n = 4 instance of the Holder-cascade lower bound on int S^2. The a priori
/// thresholds are delta = eps = 8 pi^2, so k_4 (delta + eps) = 1/2.
HolderReport holder_cascade_check(int n, const CurvatureIntegrals& ints, double chi);

struct VolumeBound {
    double bound;
    bool hypothesis_violated;
};

/// Einstein 4-manifold with Ric = +-3 g: Vol >= (chi / k_4 - int|W|^2) / 24.
VolumeBound einstein_volume_bound(int n, double weyl_integral, double chi);

}  // namespace curvnorm
