#pragma once

// Closed-form homogeneous backgrounds.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvnorm/curvature.hpp"

namespace curvnorm {

struct RoundSphere {
    int n;
    double radius = 1.0;
};

/// Compact hyperbolic n-manifold, known only through its volume.
struct HyperbolicForm {
    int n;
    double volume;
};

/// Flat torus; the dimension is the number of periods.
struct FlatTorus {
    std::vector<double> periods;
};

/// Product of two hyperbolic surfaces of areas v1, v2 (curvature -1), with
/// the blocks scaled by a and b: g = a g1 + b g2.
struct HyperbolicSurfaceProduct {
    double v1;
    double v2;
    double a = 1.0;
    double b = 1.0;
};

class ModelGeometry {
public:
    using Kind = std::variant<RoundSphere, HyperbolicForm, FlatTorus, HyperbolicSurfaceProduct>;

    /// Validates the parameters; throws DomainError / InvalidDimension.
    explicit ModelGeometry(Kind kind);

    static ModelGeometry round_sphere(int n, double radius = 1.0);
    static ModelGeometry hyperbolic(int n, double volume);
    static ModelGeometry flat_torus(int n, double period = 1.0);
    static ModelGeometry hyperbolic_product(double v1, double v2, double a = 1.0, double b = 1.0);

    int dim() const noexcept { return n_; }
    const Kind& kind() const noexcept { return kind_; }
    std::string kind_name() const;

    template <class T>
    const T* as() const noexcept {
        return std::get_if<T>(&kind_);
    }

private:
    Kind kind_;
    int n_;
};

struct GeometrySummary {
    double scalar;
    std::vector<double> ricci_eigenvalues;
    double volume;
    std::optional<double> euler;
};

/// Volume of the unit n-sphere, 2 pi^((n+1)/2) / Gamma((n+1)/2).
double unit_sphere_volume(int n);

CurvatureTensor curvature_tensor(const ModelGeometry& geom);

/// Euler characteristic is left empty for odd n and for hyperbolic forms
/// (those go through the calibrated Gauss-Bonnet route instead).
GeometrySummary summary(const ModelGeometry& geom);

/// {"kind": "round_sphere" | "hyperbolic" | "flat_torus" | "hyperbolic_product", ...}
ModelGeometry geometry_from_json(const nlohmann::json& j);
nlohmann::json geometry_to_json(const ModelGeometry& geom);

}  // namespace curvnorm
