#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "curvnorm/curvature.hpp"
#include "curvnorm/error.hpp"
#include "curvnorm/identity_suite.hpp"

using namespace curvnorm;

namespace {

constexpr double kClosedForm = 1e-12;
constexpr double kRandom = 1e-10;

// Direct sums used as oracles below.
std::vector<double> brute_ricci(const CurvatureTensor& r) {
    const int n = r.dim();
    std::vector<double> ric(n * n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i) ric[j * n + l] += r(i, j, i, l);
    return ric;
}

double brute_norm(const CurvatureTensor& r) {
    double s = 0.0;
    const int n = r.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) s += r(i, j, k, l) * r(i, j, k, l);
    return s;
}

double max_diff(const CurvatureTensor& a, const CurvatureTensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.components().size(); ++i) {
        m = std::max(m, std::abs(a.components()[i] - b.components()[i]));
    }
    return m;
}

double max_abs(const CurvatureTensor& a) {
    double m = 0.0;
    for (double x : a.components()) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> random_array(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> raw(n * n * n * n);
    for (double& x : raw) x = g(rng);
    return raw;
}

}  // namespace

TEST(Projection, ZeroArrayIsFixed) {
    const std::vector<double> zero(256, 0.0);
    EXPECT_EQ(max_abs(project_symmetries(4, zero)), 0.0);
}

TEST(Projection, ConstantPatternIsFixed) {
    const auto round = CurvatureTensor::constant_curvature(4, 1.0);
    const auto again = project_symmetries(4, round.components());
    EXPECT_LT(max_diff(round, again), kClosedForm);
}

TEST(Projection, RandomArraySatisfiesSymmetriesAndIsIdempotent) {
    for (int n : {2, 3, 4, 5, 6}) {
        const auto raw = random_array(n, 17 + n);
        const auto once = project_symmetries(n, raw);
        const auto twice = project_symmetries(n, once.components());
        EXPECT_LT(once.symmetry_defect(), kClosedForm) << "n = " << n;
        EXPECT_LT(max_diff(once, twice), 1e-14) << "n = " << n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        EXPECT_NEAR(once(i, j, k, l), -once(j, i, k, l), 1e-14);
                        EXPECT_NEAR(once(i, j, k, l), once(k, l, i, j), 1e-14);
                        EXPECT_NEAR(once(i, j, k, l) + once(i, k, l, j) + once(i, l, j, k), 0.0, 1e-14);
                    }
    }
}

TEST(Projection, RejectsBadInput) {
    EXPECT_THROW(project_symmetries(1, std::vector<double>(1, 0.0)), InvalidDimension);
    EXPECT_THROW(project_symmetries(4, std::vector<double>(10, 0.0)), InvalidDimension);
    EXPECT_THROW(CurvatureTensor(1), InvalidDimension);
    auto bad = std::vector<double>(16, 0.0);
    bad[1] = 1.0;
    EXPECT_THROW(CurvatureTensor::from_symmetric(2, bad), DomainError);
}

TEST(RicciScalar, RoundSphere) {
    const auto rs = ricci_and_scalar(CurvatureTensor::constant_curvature(4, 1.0));
    EXPECT_NEAR(rs.scalar, 12.0, kClosedForm);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_NEAR(rs.ricci(i, j), i == j ? 3.0 : 0.0, kClosedForm);
}

TEST(RicciScalar, HyperbolicAndZero) {
    EXPECT_NEAR(ricci_and_scalar(CurvatureTensor::constant_curvature(4, -1.0)).scalar, -12.0, kClosedForm);
    const auto zero = ricci_and_scalar(CurvatureTensor(4));
    EXPECT_EQ(zero.scalar, 0.0);
    EXPECT_EQ(zero.ricci.norm_sq(), 0.0);
}

TEST(RicciScalar, MatchesDirectContraction) {
    const auto r = random_curvature(5, 3);
    const auto rs = ricci_and_scalar(r);
    const auto ric = brute_ricci(r);
    double trace = 0.0;
    for (int i = 0; i < 5; ++i) {
        trace += ric[i * 5 + i];
        for (int j = 0; j < 5; ++j) {
            EXPECT_NEAR(rs.ricci(i, j), ric[i * 5 + j], 1e-13);
            EXPECT_NEAR(rs.ricci(i, j), rs.ricci(j, i), 1e-15);
        }
    }
    EXPECT_NEAR(rs.scalar, trace, 1e-12);
}

TEST(KulkarniNomizu, MetricSquareIsTwiceConstantPattern) {
    const auto g = SymTensor2::identity(4);
    const auto gg = kulkarni_nomizu(g, g);
    EXPECT_LT(max_diff(gg, 2.0 * CurvatureTensor::constant_curvature(4, 1.0)), kClosedForm);
}

TEST(Decompose, RoundSphereIsPureScalarPart) {
    const auto r = CurvatureTensor::constant_curvature(4, 1.0);
    const auto d = decompose(r);
    EXPECT_LT(max_abs(d.weyl), kClosedForm);
    EXPECT_LT(max_abs(d.traceless_ricci_part), kClosedForm);
    EXPECT_LT(max_diff(d.scalar_part, r), kClosedForm);
    EXPECT_NEAR(tensor_norm_sq(d.scalar_part), 24.0, kClosedForm);
}

TEST(Decompose, EinsteinTensorHasNoTracelessPart) {
    const auto weyl = decompose(random_curvature(4, 9)).weyl;
    const auto einstein = CurvatureTensor::constant_curvature(4, 1.0) + weyl;
    const auto d = decompose(einstein);
    EXPECT_LT(max_abs(d.traceless_ricci_part), kClosedForm);
    EXPECT_LT(max_diff(d.weyl, weyl), kClosedForm);
}

TEST(Decompose, PartsSumToSourceAndWeylIsTraceless) {
    for (int n : {4, 5, 6}) {
        const auto r = random_curvature(n, 100 + n);
        const auto d = decompose(r);
        EXPECT_LT(max_diff(d.sum(), r), kClosedForm * max_abs(r));
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                double tr = 0.0;
                for (int i = 0; i < n; ++i) tr += d.weyl(i, j, i, l);
                EXPECT_NEAR(tr, 0.0, 1e-12);
            }
        const double pyth = tensor_norm_sq(d.weyl) + tensor_norm_sq(d.traceless_ricci_part) +
                            tensor_norm_sq(d.scalar_part);
        EXPECT_NEAR(brute_norm(r), pyth, kRandom * brute_norm(r));
    }
}

TEST(Decompose, RedecomposingTheSumReproducesTheParts) {
    const auto d = decompose(random_curvature(6, 5));
    const auto again = decompose(d.sum());
    EXPECT_LT(max_diff(again.weyl, d.weyl), 1e-12);
    EXPECT_LT(max_diff(again.traceless_ricci_part, d.traceless_ricci_part), 1e-12);
    EXPECT_LT(max_diff(again.scalar_part, d.scalar_part), 1e-12);
}

TEST(Decompose, LowDimensionsUnsupported) {
    EXPECT_THROW(decompose(CurvatureTensor(3)), UnsupportedDimension);
    EXPECT_THROW(decompose(CurvatureTensor(2)), UnsupportedDimension);
}

TEST(Norm, MatchesBruteForceSum) {
    EXPECT_EQ(tensor_norm_sq(CurvatureTensor(4)), 0.0);
    const auto r = random_curvature(4, 11);
    EXPECT_NEAR(tensor_norm_sq(r), brute_norm(r), 1e-12 * brute_norm(r));
}

TEST(NormIdentities, RoundSphere) {
    EXPECT_LT(norm_identities_check(CurvatureTensor::constant_curvature(4, 1.0)).max(), kClosedForm);
}

TEST(NormIdentities, RandomTensorsAgainstIndependentSides) {
    for (int n : {4, 6}) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto r = random_curvature(n, seed);
            EXPECT_LT(norm_identities_check(r).max(), kRandom);

            // Independent evaluation of both sides from the raw contraction.
            const auto ric = brute_ricci(r);
            double s = 0.0, ric2 = 0.0;
            for (int i = 0; i < n; ++i) s += ric[i * n + i];
            for (double x : ric) ric2 += x * x;
            double z2 = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double z = ric[i * n + j] - (i == j ? s / n : 0.0);
                    z2 += z * z;
                }
            const auto d = decompose(r);
            EXPECT_NEAR(tensor_norm_sq(d.scalar_part), 2.0 * s * s / (n * (n - 1.0)), kRandom * (1 + s * s));
            EXPECT_NEAR(tensor_norm_sq(d.traceless_ricci_part), 4.0 * z2 / (n - 2.0), kRandom * (1 + z2));
            EXPECT_NEAR(ric2, z2 + s * s / n, kRandom * ric2);
        }
    }
}

TEST(RicciBounds, RoundSphereIsEquality) {
    const auto rep = ricci_lower_bounds_check(CurvatureTensor::constant_curvature(4, 1.0));
    EXPECT_NEAR(rep.ricci_norm, 6.0, kClosedForm);
    EXPECT_NEAR(rep.scalar_bound, 6.0, kClosedForm);
    EXPECT_FALSE(rep.violated());
}

TEST(RicciBounds, PureWeylIsZero) {
    const auto rep = ricci_lower_bounds_check(decompose(random_curvature(4, 2)).weyl);
    EXPECT_NEAR(rep.ricci_norm, 0.0, 1e-12);
    EXPECT_NEAR(rep.traceless_bound, 0.0, 1e-12);
    EXPECT_NEAR(rep.scalar_bound, 0.0, 1e-12);
}

TEST(RicciBounds, NoViolationsOnRandomTensors) {
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        EXPECT_FALSE(ricci_lower_bounds_check(random_curvature(4, seed)).violated(1e-12)) << seed;
    }
}

TEST(Sectional, ConstantCurvature) {
    const auto round = CurvatureTensor::constant_curvature(4, 1.0);
    const std::vector<double> u{1.0, 2.0, -0.5, 0.3}, v{0.2, -1.0, 4.0, 1.0};
    EXPECT_NEAR(sectional(round, u, v), 1.0, kClosedForm);
    EXPECT_NEAR(sectional(CurvatureTensor::constant_curvature(4, -1.0), 0, 1), -1.0, kClosedForm);
}

TEST(Sectional, ScaleInvariant) {
    const auto r = random_curvature(4, 21);
    const std::vector<double> u{1.0, 0.5, -0.25, 2.0}, v{0.0, 1.0, 1.0, -1.0};
    std::vector<double> u2(u), v3(v);
    for (double& x : u2) x *= 2.0;
    for (double& x : v3) x *= 3.0;
    EXPECT_NEAR(sectional(r, u, v), sectional(r, u2, v3), 1e-12);
}

TEST(Sectional, DegeneratePlaneThrows) {
    const auto r = random_curvature(4, 1);
    const std::vector<double> u{1.0, 2.0, 3.0, 4.0}, v{2.0, 4.0, 6.0, 8.0};
    EXPECT_THROW(sectional(r, u, v), DegeneratePlane);
    EXPECT_THROW(sectional(r, 2, 2), DegeneratePlane);
}

TEST(Polarization, ConstantOracles) {
    const auto one = reconstruct_from_sectional([](auto, auto) { return 1.0; }, 4);
    EXPECT_LT(max_diff(one, CurvatureTensor::constant_curvature(4, 1.0)), kClosedForm);
    const auto minus = reconstruct_from_sectional([](auto, auto) { return -1.0; }, 5);
    EXPECT_LT(max_diff(minus, CurvatureTensor::constant_curvature(5, -1.0)), kClosedForm);
}

TEST(Polarization, RoundTripOnRandomTensors) {
    for (int n : {4, 5, 6}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto r = random_curvature(n, seed);
            const auto back = reconstruct_from_sectional(sectional_oracle(r), n);
            EXPECT_LT(max_diff(back, r) / max_abs(r), kRandom) << "n = " << n;
        }
    }
}

TEST(Polarization, NonFiniteOracleThrows) {
    EXPECT_THROW(reconstruct_from_sectional([](auto, auto) { return std::nan(""); }, 4), NonFiniteValue);
}

TEST(RandomCurvature, DeterministicPerSeed) {
    EXPECT_EQ(max_diff(random_curvature(4, 1), random_curvature(4, 1)), 0.0);
    EXPECT_GT(max_diff(random_curvature(4, 1), random_curvature(4, 2)), 0.0);
    EXPECT_LT(random_curvature(6, 77).symmetry_defect(), kClosedForm);
}

TEST(SymTensor2, TracelessPart) {
    SymTensor2 a(3);
    a.set(0, 0, 1.0);
    a.set(1, 2, 4.0);
    a.set(2, 2, 5.0);
    const auto z = a.traceless();
    EXPECT_NEAR(z.trace(), 0.0, 1e-12 * (std::sqrt(z.norm_sq()) + 1.0));
    EXPECT_EQ(z(1, 2), z(2, 1));
}

TEST(IdentitySuite, ParallelMatchesSerial) {
    for (int n : {4, 6}) {
        const IdentitySuiteOptions o{n, 50, 3};
        const auto a = run_identity_suite(o);
        const auto b = run_identity_suite_serial(o);
        EXPECT_EQ(a.max_residual(), b.max_residual());
        EXPECT_EQ(a.max_ricci, b.max_ricci);
        EXPECT_EQ(a.ricci_bound_violations, b.ricci_bound_violations);
        EXPECT_LT(a.max_residual(), 1e-10);
        EXPECT_EQ(a.count, 50);
    }
}
