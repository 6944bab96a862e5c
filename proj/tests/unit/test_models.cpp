#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "curvnorm/error.hpp"
#include "curvnorm/models.hpp"

using namespace curvnorm;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEpsilon = 1e-12;

}  // namespace

TEST(UnitSphereVolume, KnownValues) {
    EXPECT_NEAR(unit_sphere_volume(1), 2.0 * kPi, kEpsilon);
    EXPECT_NEAR(unit_sphere_volume(2), 4.0 * kPi, kEpsilon);
    EXPECT_NEAR(unit_sphere_volume(3), 2.0 * kPi * kPi, kEpsilon);
    EXPECT_NEAR(unit_sphere_volume(4), 8.0 * kPi * kPi / 3.0, kEpsilon);
    EXPECT_NEAR(unit_sphere_volume(6), 16.0 * kPi * kPi * kPi / 15.0, kEpsilon);
}

TEST(Summary, RoundSphere) {
    const auto s = summary(ModelGeometry::round_sphere(4, 2.0));
    EXPECT_NEAR(s.scalar, 3.0, kEpsilon);
    EXPECT_NEAR(s.volume, 16.0 * 8.0 * kPi * kPi / 3.0, 1e-10);
    ASSERT_TRUE(s.euler.has_value());
    EXPECT_EQ(*s.euler, 2.0);
    EXPECT_FALSE(summary(ModelGeometry::round_sphere(3)).euler.has_value());
}

TEST(Summary, HyperbolicFormHasNoKnownEuler) {
    const auto s = summary(ModelGeometry::hyperbolic(4, 7.0));
    EXPECT_NEAR(s.scalar, -12.0, kEpsilon);
    EXPECT_EQ(s.volume, 7.0);
    EXPECT_FALSE(s.euler.has_value());
}

TEST(Summary, FlatTorus) {
    const auto s = summary(ModelGeometry(FlatTorus{{1.0, 2.0, 3.0, 0.5}}));
    EXPECT_EQ(s.scalar, 0.0);
    EXPECT_NEAR(s.volume, 3.0, kEpsilon);
    EXPECT_EQ(*s.euler, 0.0);
}

TEST(Summary, HyperbolicProduct) {
    const auto g = ModelGeometry::hyperbolic_product(4.0 * kPi, 8.0 * kPi, 2.0, 0.5);
    const auto s = summary(g);
    EXPECT_NEAR(s.scalar, -2.0 / 2.0 - 2.0 / 0.5, kEpsilon);
    EXPECT_NEAR(s.volume, 2.0 * 0.5 * 32.0 * kPi * kPi, 1e-10);
    EXPECT_NEAR(*s.euler, 2.0 * 4.0, kEpsilon);  // (-2) * (-4)
}

TEST(CurvatureTensor, ProductBlocks) {
    const auto r = curvature_tensor(ModelGeometry::hyperbolic_product(1.0, 1.0, 2.0, 4.0));
    EXPECT_NEAR(r(0, 1, 0, 1), -0.5, kEpsilon);
    EXPECT_NEAR(r(2, 3, 2, 3), -0.25, kEpsilon);
    EXPECT_NEAR(r(0, 2, 0, 2), 0.0, kEpsilon);
    const auto rs = ricci_and_scalar(r);
    EXPECT_NEAR(rs.scalar, summary(ModelGeometry::hyperbolic_product(1.0, 1.0, 2.0, 4.0)).scalar, kEpsilon);
    EXPECT_NEAR(rs.ricci(0, 0), -0.5, kEpsilon);
    EXPECT_NEAR(rs.ricci(3, 3), -0.25, kEpsilon);
}

TEST(CurvatureTensor, ScalarMatchesSummary) {
    for (const auto& g : {ModelGeometry::round_sphere(5, 3.0), ModelGeometry::hyperbolic(6, 1.0),
                          ModelGeometry::flat_torus(4)}) {
        EXPECT_NEAR(ricci_and_scalar(curvature_tensor(g)).scalar, summary(g).scalar, kEpsilon) << g.kind_name();
    }
}

TEST(Validation, RejectsBadParameters) {
    EXPECT_THROW(ModelGeometry::round_sphere(4, -1.0), DomainError);
    EXPECT_THROW(ModelGeometry::round_sphere(1), InvalidDimension);
    EXPECT_THROW(ModelGeometry::hyperbolic(4, 0.0), DomainError);
    EXPECT_THROW(ModelGeometry(FlatTorus{{1.0, -1.0}}), DomainError);
    EXPECT_THROW(ModelGeometry::hyperbolic_product(1.0, 1.0, 0.0, 1.0), DomainError);
}

TEST(Json, RoundTrip) {
    for (const auto& g : {ModelGeometry::round_sphere(4, 2.0), ModelGeometry::hyperbolic(4, 3.0),
                          ModelGeometry(FlatTorus{{1.0, 2.0, 3.0}}), ModelGeometry::hyperbolic_product(1, 2, 3, 4)}) {
        const auto j = geometry_to_json(g);
        EXPECT_EQ(geometry_to_json(geometry_from_json(j)), j);
    }
}

TEST(Json, RejectsUnknownKindsAndFields) {
    EXPECT_THROW(geometry_from_json({{"kind", "klein_bottle"}}), ConfigError);
    EXPECT_THROW(geometry_from_json({{"kind", "round_sphere"}, {"n", 4}, {"colour", 1}}), ConfigError);
    EXPECT_THROW(geometry_from_json({{"kind", "hyperbolic"}, {"n", 4}}), ConfigError);
    EXPECT_THROW(geometry_from_json(nlohmann::json::array()), ConfigError);
}
