#include "curvnorm/gauss_bonnet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "curvnorm/error.hpp"

namespace curvnorm {

namespace {

struct SignedPermutation {
    std::array<int, 6> p;
    int sign;
};

// Lexicographic order, sign from the inversion count.
std::vector<SignedPermutation> permutations(int n) {
    std::array<int, 6> p{};
    std::iota(p.begin(), p.begin() + n, 0);
    std::vector<SignedPermutation> out;
    do {
        int inversions = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) inversions += p[i] > p[j] ? 1 : 0;
        out.push_back({p, inversions % 2 == 0 ? 1 : -1});
    } while (std::next_permutation(p.begin(), p.begin() + n));
    return out;
}

void require_supported(int n) {
    if (n % 2 != 0 || n < 2 || n > 6) {
        throw UnsupportedDimension("permutation-sum integrand supports n in {2, 4, 6}, got " +
                                   std::to_string(n));
    }
}

// Contribution of one outer permutation s: sign(s) * sum_t sign(t) prod_m R(...).
double outer_term(const CurvatureTensor& r, const std::vector<SignedPermutation>& perms,
                  const SignedPermutation& s) {
    const int n = r.dim();
    const int half = n / 2;
    double acc = 0.0;
    for (const auto& t : perms) {
        double prod = t.sign;
        for (int m = 0; m < half; ++m) {
            prod *= r(s.p[2 * m], s.p[2 * m + 1], t.p[2 * m], t.p[2 * m + 1]);
        }
        acc += prod;
    }
    return s.sign * acc;
}

double ordered_sum(const std::vector<double>& partial) {
    double total = 0.0;
    for (double x : partial) total += x;
    return total;
}

}  // namespace

double pfaffian_integrand(const CurvatureTensor& r) {
    require_supported(r.dim());
    const auto perms = permutations(r.dim());
    const auto count = static_cast<long>(perms.size());
    std::vector<double> partial(perms.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) {
        partial[i] = outer_term(r, perms, perms[i]);
    }
    return ordered_sum(partial);
}

double pfaffian_integrand_serial(const CurvatureTensor& r) {
    require_supported(r.dim());
    const auto perms = permutations(r.dim());
    std::vector<double> partial(perms.size());
    for (std::size_t i = 0; i < perms.size(); ++i) partial[i] = outer_term(r, perms, perms[i]);
    return ordered_sum(partial);
}

double closed_form_integrand(const CurvatureTensor& r) {
    if (r.dim() != 4) throw UnsupportedDimension("closed-form Gauss-Bonnet integrand is defined for n = 4");
    const Decomposition d = decompose(r);
    return tensor_norm_sq(d.scalar_part) - tensor_norm_sq(d.traceless_ricci_part) + tensor_norm_sq(d.weyl);
}

GBCalibration calibrate(int n) {
    require_supported(n);
    const auto round = ModelGeometry::round_sphere(n, 1.0);
    const double vol = summary(round).volume;
    const CurvatureTensor r = curvature_tensor(round);

    GBCalibration cal{n, pfaffian_integrand(r) * vol / 2.0, std::nullopt};
    if (n == 4) cal.k_4 = 2.0 / (closed_form_integrand(r) * vol);
    return cal;
}

EulerEstimate euler_characteristic(const ModelGeometry& geom, const GBCalibration& cal) {
    if (geom.dim() != cal.n) {
        throw InvalidDimension("geometry dimension does not match the calibration");
    }
    const CurvatureTensor r = curvature_tensor(geom);
    const double vol = summary(geom).volume;

    EulerEstimate est{};
    est.integrand = pfaffian_integrand(r);
    est.pfaffian_route = est.integrand * vol / cal.c_n;
    if (cal.k_4) {
        est.closed_form_route = *cal.k_4 * closed_form_integrand(r) * vol;
        est.residual = std::abs(est.pfaffian_route - *est.closed_form_route);
    }
    return est;
}

nlohmann::json euler_record(const std::string& route, int n, double integrand, double chi, double residual) {
    return {{"route", route}, {"n", n}, {"integrand", integrand}, {"chi_estimate", chi}, {"residual", residual}};
}

HolderReport holder_cascade_check(int n, const CurvatureIntegrals& ints, double chi) {
    if (n != 4) throw UnsupportedDimension("Holder cascade constants are pinned for n = 4 only");
    if (ints.scalar_part < 0 || ints.traceless_part < 0 || ints.weyl < 0 || ints.scalar < 0) {
        throw DomainError("curvature integrals must be nonnegative");
    }
    const double k4 = *calibrate(4).k_4;

    HolderReport rep{};
    rep.vacuous = chi == 0.0;
    rep.integer_chi = std::abs(chi - std::round(chi)) < 1e-9;
    rep.delta = 0.25 / k4;
    rep.eps = 0.25 / k4;
    rep.hypotheses_hold = ints.traceless_part <= rep.delta && ints.weyl <= rep.eps;
    // |chi| <= k4 (int|U|^2 + int|Z|^2 + int|W|^2) and k4 (delta + eps) = 1/2 give
    // int|U|^2 >= (|chi| - 1/2) / k4; |U|^2 = S^2 / 6.
    rep.certified_bound = rep.vacuous ? 0.0 : 6.0 * (std::abs(chi) - 0.5) / k4;
    rep.actual_scalar = ints.scalar;
    rep.bound_satisfied = rep.vacuous || !rep.hypotheses_hold || ints.scalar >= rep.certified_bound;
    return rep;
}

VolumeBound einstein_volume_bound(int n, double weyl_integral, double chi) {
    if (n != 4) throw UnsupportedDimension("Einstein volume bound is pinned for n = 4 only");
    if (chi == 0.0) throw DomainError("Einstein volume bound needs chi != 0");
    const double k4 = *calibrate(4).k_4;
    // |U|^2 = 2 S^2 / (n (n-1)) = 24 when |S| = 12.
    const double bound = (chi / k4 - weyl_integral) / 24.0;
    return {bound, bound < 0.0};
}

}  // namespace curvnorm
