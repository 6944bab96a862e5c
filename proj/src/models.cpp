#include "curvnorm/models.hpp"

#include <cmath>
#include <numbers>

#include "curvnorm/error.hpp"

namespace curvnorm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

void require_dim(int n) {
    if (n < 2) throw InvalidDimension("model geometry dimension must be >= 2");
}

}  // namespace

ModelGeometry::ModelGeometry(Kind kind) : kind_(std::move(kind)), n_(0) {
    n_ = std::visit(overloaded{
                        [](const RoundSphere& s) {
                            require_dim(s.n);
                            require_positive(s.radius, "radius");
                            return s.n;
                        },
                        [](const HyperbolicForm& h) {
                            require_dim(h.n);
                            require_positive(h.volume, "volume");
                            return h.n;
                        },
                        [](const FlatTorus& t) {
                            const int n = static_cast<int>(t.periods.size());
                            require_dim(n);
                            for (double p : t.periods) require_positive(p, "period");
                            return n;
                        },
                        [](const HyperbolicSurfaceProduct& p) {
                            require_positive(p.v1, "factor volume v1");
                            require_positive(p.v2, "factor volume v2");
                            require_positive(p.a, "scale a");
                            require_positive(p.b, "scale b");
                            return 4;
                        },
                    },
                    kind_);
}

ModelGeometry ModelGeometry::round_sphere(int n, double radius) {
    return ModelGeometry(RoundSphere{n, radius});
}

ModelGeometry ModelGeometry::hyperbolic(int n, double volume) {
    return ModelGeometry(HyperbolicForm{n, volume});
}

ModelGeometry ModelGeometry::flat_torus(int n, double period) {
    if (n < 1) throw InvalidDimension("torus dimension must be positive");
    return ModelGeometry(FlatTorus{std::vector<double>(static_cast<std::size_t>(n), period)});
}

ModelGeometry ModelGeometry::hyperbolic_product(double v1, double v2, double a, double b) {
    return ModelGeometry(HyperbolicSurfaceProduct{v1, v2, a, b});
}

std::string ModelGeometry::kind_name() const {
    return std::visit(overloaded{
                          [](const RoundSphere&) { return std::string("round_sphere"); },
                          [](const HyperbolicForm&) { return std::string("hyperbolic"); },
                          [](const FlatTorus&) { return std::string("flat_torus"); },
                          [](const HyperbolicSurfaceProduct&) { return std::string("hyperbolic_product"); },
                      },
                      kind_);
}

double unit_sphere_volume(int n) {
    if (n < 0) throw InvalidDimension("sphere dimension must be nonnegative");
    const double m = (n + 1) / 2.0;
    return 2.0 * std::pow(std::numbers::pi, m) / std::tgamma(m);
}

CurvatureTensor curvature_tensor(const ModelGeometry& geom) {
    const int n = geom.dim();
    return std::visit(
        overloaded{
            [n](const RoundSphere& s) {
                return CurvatureTensor::constant_curvature(n, 1.0 / (s.radius * s.radius));
            },
            [n](const HyperbolicForm&) { return CurvatureTensor::constant_curvature(n, -1.0); },
            [n](const FlatTorus&) { return CurvatureTensor(n); },
            [](const HyperbolicSurfaceProduct& p) {
                // Block tensor: planes e1^e2 and e3^e4 carry -1/a and -1/b, mixed planes are flat.
                std::vector<double> c(256, 0.0);
                auto put = [&c](int i, int j, double k) {
                    c[((i * 4 + j) * 4 + i) * 4 + j] = k;
                    c[((i * 4 + j) * 4 + j) * 4 + i] = -k;
                    c[((j * 4 + i) * 4 + j) * 4 + i] = k;
                    c[((j * 4 + i) * 4 + i) * 4 + j] = -k;
                };
                put(0, 1, -1.0 / p.a);
                put(2, 3, -1.0 / p.b);
                return CurvatureTensor::from_symmetric(4, std::move(c));
            },
        },
        geom.kind());
}

GeometrySummary summary(const ModelGeometry& geom) {
    const int n = geom.dim();
    return std::visit(
        overloaded{
            [n](const RoundSphere& s) {
                const double k = 1.0 / (s.radius * s.radius);
                GeometrySummary out{n * (n - 1) * k, std::vector<double>(n, (n - 1) * k),
                                    unit_sphere_volume(n) * std::pow(s.radius, n), std::nullopt};
                if (n % 2 == 0) out.euler = 2.0;
                return out;
            },
            [n](const HyperbolicForm& h) {
                return GeometrySummary{-n * (n - 1.0), std::vector<double>(n, -(n - 1.0)), h.volume,
                                       std::nullopt};
            },
            [n](const FlatTorus& t) {
                double vol = 1.0;
                for (double p : t.periods) vol *= p;
                GeometrySummary out{0.0, std::vector<double>(n, 0.0), vol, std::nullopt};
                if (n % 2 == 0) out.euler = 0.0;
                return out;
            },
            [](const HyperbolicSurfaceProduct& p) {
                // chi(surface) = -area / (2 pi) for curvature -1.
                const double chi = (p.v1 / (2.0 * std::numbers::pi)) * (p.v2 / (2.0 * std::numbers::pi));
                return GeometrySummary{-2.0 / p.a - 2.0 / p.b,
                                       {-1.0 / p.a, -1.0 / p.a, -1.0 / p.b, -1.0 / p.b},
                                       p.a * p.b * p.v1 * p.v2,
                                       chi};
            },
        },
        geom.kind());
}

ModelGeometry geometry_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("geometry descriptor needs a \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    auto allow = [&j](std::initializer_list<const char*> keys) {
        for (const auto& [key, _] : j.items()) {
            bool known = key == "kind";
            for (const char* k : keys) known = known || key == k;
            if (!known) throw ConfigError("unknown geometry field: " + key);
        }
    };
    try {
        if (kind == "round_sphere") {
            allow({"n", "radius"});
            return ModelGeometry::round_sphere(j.at("n").get<int>(), j.value("radius", 1.0));
        }
        if (kind == "hyperbolic") {
            allow({"n", "volume"});
            return ModelGeometry::hyperbolic(j.at("n").get<int>(), j.at("volume").get<double>());
        }
        if (kind == "flat_torus") {
            allow({"n", "periods"});
            if (j.contains("periods")) {
                auto periods = j.at("periods").get<std::vector<double>>();
                if (j.contains("n") && j.at("n").get<std::size_t>() != periods.size()) {
                    throw ConfigError("flat_torus: n does not match the number of periods");
                }
                return ModelGeometry(FlatTorus{std::move(periods)});
            }
            return ModelGeometry::flat_torus(j.at("n").get<int>());
        }
        if (kind == "hyperbolic_product") {
            allow({"n", "v1", "v2", "a", "b"});
            if (j.contains("n") && j.at("n").get<int>() != 4) {
                throw ConfigError("hyperbolic_product is four-dimensional");
            }
            return ModelGeometry::hyperbolic_product(j.at("v1").get<double>(), j.at("v2").get<double>(),
                                                     j.value("a", 1.0), j.value("b", 1.0));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed geometry descriptor: ") + e.what());
    }
    throw ConfigError("unknown geometry kind: " + kind);
}

nlohmann::json geometry_to_json(const ModelGeometry& geom) {
    return std::visit(
        overloaded{
            [](const RoundSphere& s) {
                return nlohmann::json{{"kind", "round_sphere"}, {"n", s.n}, {"radius", s.radius}};
            },
            [](const HyperbolicForm& h) {
                return nlohmann::json{{"kind", "hyperbolic"}, {"n", h.n}, {"volume", h.volume}};
            },
            [](const FlatTorus& t) {
                return nlohmann::json{{"kind", "flat_torus"}, {"n", t.periods.size()}, {"periods", t.periods}};
            },
            [](const HyperbolicSurfaceProduct& p) {
                return nlohmann::json{{"kind", "hyperbolic_product"}, {"n", 4}, {"v1", p.v1},
                                      {"v2", p.v2}, {"a", p.a}, {"b", p.b}};
            },
        },
        geom.kind());
}

}  // namespace curvnorm
