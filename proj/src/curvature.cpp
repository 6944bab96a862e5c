#include "curvnorm/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "curvnorm/error.hpp"

namespace curvnorm {

namespace {

void require_dimension(int n) {
    if (n < 2) {
        throw InvalidDimension("curvature tensor dimension must be >= 2, got " + std::to_string(n));
    }
}

std::size_t idx4(int n, int i, int j, int k, int l) {
    return static_cast<std::size_t>(((i * n + j) * n + k) * n + l);
}

double relative_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double evaluate(const CurvatureTensor& r, std::span<const double> x, std::span<const double> y,
                std::span<const double> z, std::span<const double> w) {
    const int n = r.dim();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        if (x[i] == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            if (y[j] == 0.0) continue;
            for (int k = 0; k < n; ++k) {
                if (z[k] == 0.0) continue;
                for (int l = 0; l < n; ++l) {
                    s += r(i, j, k, l) * x[i] * y[j] * z[k] * w[l];
                }
            }
        }
    }
    return s;
}

double plane_area_sq(std::span<const double> u, std::span<const double> v) {
    return dot(u, u) * dot(v, v) - dot(u, v) * dot(u, v);
}

bool degenerate(std::span<const double> u, std::span<const double> v, double area_sq) {
    return !(area_sq > 1e-14 * dot(u, u) * dot(v, v));
}

}  // namespace

// ---------------------------------------------------------------------------
// SymTensor2

SymTensor2::SymTensor2(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
    require_dimension(n);
}

SymTensor2 SymTensor2::identity(int n, double scale) {
    SymTensor2 t(n);
    for (int i = 0; i < n; ++i) t.a_[i * n + i] = scale;
    return t;
}

void SymTensor2::set(int i, int j, double value) noexcept {
    a_[i * n_ + j] = value;
    a_[j * n_ + i] = value;
}

double SymTensor2::trace() const noexcept {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += a_[i * n_ + i];
    return s;
}

double SymTensor2::norm_sq() const noexcept {
    double s = 0.0;
    for (double x : a_) s += x * x;
    return s;
}

SymTensor2 SymTensor2::traceless() const {
    SymTensor2 t = *this;
    const double mean = trace() / n_;
    for (int i = 0; i < n_; ++i) t.a_[i * n_ + i] -= mean;
    return t;
}

// ---------------------------------------------------------------------------
// CurvatureTensor

CurvatureTensor::CurvatureTensor(int n) : n_(n) {
    require_dimension(n);
    c_.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
}

CurvatureTensor::CurvatureTensor(int n, std::vector<double> components)
    : n_(n), c_(std::move(components)) {}

CurvatureTensor CurvatureTensor::from_symmetric(int n, std::vector<double> components) {
    require_dimension(n);
    if (components.size() != static_cast<std::size_t>(n) * n * n * n) {
        throw InvalidDimension("component array does not have n^4 entries");
    }
    CurvatureTensor t(n, std::move(components));
    double scale = 1.0;
    for (double x : t.c_) scale = std::max(scale, std::abs(x));
    if (t.symmetry_defect() > 1e-10 * scale) {
        throw DomainError("components violate the curvature tensor symmetries");
    }
    return t;
}

CurvatureTensor CurvatureTensor::constant_curvature(int n, double kappa) {
    require_dimension(n);
    CurvatureTensor t(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            t.c_[idx4(n, i, j, i, j)] = kappa;
            t.c_[idx4(n, i, j, j, i)] = -kappa;
        }
    }
    return t;
}

double CurvatureTensor::symmetry_defect() const {
    const int n = n_;
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const double r = (*this)(i, j, k, l);
                    worst = std::max(worst, std::abs(r + (*this)(j, i, k, l)));
                    worst = std::max(worst, std::abs(r + (*this)(i, j, l, k)));
                    worst = std::max(worst, std::abs(r - (*this)(k, l, i, j)));
                    worst = std::max(worst,
                                     std::abs(r + (*this)(i, k, l, j) + (*this)(i, l, j, k)));
                }
    return worst;
}

CurvatureTensor& CurvatureTensor::operator+=(const CurvatureTensor& other) {
    if (other.n_ != n_) throw InvalidDimension("dimension mismatch in tensor sum");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
    return *this;
}

CurvatureTensor& CurvatureTensor::operator-=(const CurvatureTensor& other) {
    if (other.n_ != n_) throw InvalidDimension("dimension mismatch in tensor difference");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= other.c_[i];
    return *this;
}

CurvatureTensor& CurvatureTensor::operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
}

CurvatureTensor project_symmetries(int n, std::span<const double> raw) {
    require_dimension(n);
    const std::size_t size = static_cast<std::size_t>(n) * n * n * n;
    if (raw.size() != size) throw InvalidDimension("raw array does not have n^4 entries");

    std::vector<double> a(raw.begin(), raw.end());
    std::vector<double> b(size);
    auto at = [n](const std::vector<double>& v, int i, int j, int k, int l) {
        return v[idx4(n, i, j, k, l)];
    };
    auto sweep = [n](auto&& body) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) body(i, j, k, l);
    };

    sweep([&](int i, int j, int k, int l) {
        b[idx4(n, i, j, k, l)] = 0.5 * (at(a, i, j, k, l) - at(a, j, i, k, l));
    });
    sweep([&](int i, int j, int k, int l) {
        a[idx4(n, i, j, k, l)] = 0.5 * (at(b, i, j, k, l) - at(b, i, j, l, k));
    });
    sweep([&](int i, int j, int k, int l) {
        b[idx4(n, i, j, k, l)] = 0.5 * (at(a, i, j, k, l) + at(a, k, l, i, j));
    });
    // The cyclic sum of a tensor with the pair symmetries is totally
    // antisymmetric; subtracting a third of it enforces Bianchi.
    sweep([&](int i, int j, int k, int l) {
        const double cyclic = at(b, i, j, k, l) + at(b, i, k, l, j) + at(b, i, l, j, k);
        a[idx4(n, i, j, k, l)] = at(b, i, j, k, l) - cyclic / 3.0;
    });
    return CurvatureTensor(n, std::move(a));
}

RicciScalar ricci_and_scalar(const CurvatureTensor& r) {
    const int n = r.dim();
    SymTensor2 ric(n);
    for (int j = 0; j < n; ++j) {
        for (int l = j; l < n; ++l) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += r(i, j, i, l);
            ric.set(j, l, s);
        }
    }
    const double scalar = ric.trace();
    return {std::move(ric), scalar};
}

CurvatureTensor kulkarni_nomizu(const SymTensor2& h, const SymTensor2& k) {
    const int n = h.dim();
    if (k.dim() != n) throw InvalidDimension("Kulkarni-Nomizu product of mismatched dimensions");
    std::vector<double> c(static_cast<std::size_t>(n) * n * n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    c[idx4(n, i, j, a, b)] = h(i, a) * k(j, b) + h(j, b) * k(i, a) -
                                             h(i, b) * k(j, a) - h(j, a) * k(i, b);
                }
    return CurvatureTensor::from_symmetric(n, std::move(c));
}

CurvatureTensor Decomposition::sum() const { return weyl + traceless_ricci_part + scalar_part; }

Decomposition decompose(const CurvatureTensor& r) {
    const int n = r.dim();
    if (n < 4) {
        throw UnsupportedDimension("Weyl decomposition needs n >= 4, got " + std::to_string(n));
    }
    const auto [ric, scalar] = ricci_and_scalar(r);
    const SymTensor2 g = SymTensor2::identity(n);
    const SymTensor2 z = ric.traceless();

    CurvatureTensor u = kulkarni_nomizu(g, g) * (scalar / (2.0 * n * (n - 1)));
    CurvatureTensor zt = kulkarni_nomizu(z, g) * (1.0 / (n - 2));
    CurvatureTensor w = r - zt - u;
    return {std::move(w), std::move(zt), std::move(u), scalar};
}

double tensor_norm_sq(const CurvatureTensor& t) {
    double s = 0.0;
    for (double x : t.components()) s += x * x;
    return s;
}

double NormIdentityReport::max() const noexcept {
    return std::max({pythagoras, scalar_part, traceless_part, ricci});
}

NormIdentityReport norm_identities_check(const CurvatureTensor& r) {
    const int n = r.dim();
    const Decomposition d = decompose(r);
    const auto [ric, s] = ricci_and_scalar(r);
    const double z_sq = ric.traceless().norm_sq();

    const double w2 = tensor_norm_sq(d.weyl);
    const double zz2 = tensor_norm_sq(d.traceless_ricci_part);
    const double u2 = tensor_norm_sq(d.scalar_part);

    NormIdentityReport rep{};
    rep.pythagoras = relative_gap(tensor_norm_sq(r), w2 + zz2 + u2);
    rep.scalar_part = relative_gap(u2, 2.0 * s * s / (n * (n - 1.0)));
    rep.traceless_part = relative_gap(zz2, 4.0 / (n - 2.0) * z_sq);
    rep.ricci = relative_gap(ric.norm_sq(), z_sq + s * s / n);
    return rep;
}

bool RicciBoundReport::violated(double tol) const noexcept {
    const double scale = std::max(1.0, ricci_norm);
    return traceless_margin() < -tol * scale || scalar_margin() < -tol * scale;
}

RicciBoundReport ricci_lower_bounds_check(const CurvatureTensor& r) {
    const int n = r.dim();
    const Decomposition d = decompose(r);
    const auto rs = ricci_and_scalar(r);
    RicciBoundReport rep{};
    rep.ricci_norm = std::sqrt(rs.ricci.norm_sq());
    rep.traceless_bound =
        (n - 2.0) / std::sqrt(4.0 * (n - 2.0)) * std::sqrt(tensor_norm_sq(d.traceless_ricci_part));
    rep.scalar_bound = std::sqrt((n - 1.0) / 2.0) * std::sqrt(tensor_norm_sq(d.scalar_part));
    return rep;
}

double sectional(const CurvatureTensor& r, std::span<const double> u, std::span<const double> v) {
    const auto n = static_cast<std::size_t>(r.dim());
    if (u.size() != n || v.size() != n) throw InvalidDimension("vector length differs from tensor dimension");
    const double area = plane_area_sq(u, v);
    if (degenerate(u, v, area)) throw DegeneratePlane("vectors do not span a plane");
    return evaluate(r, u, v, u, v) / area;
}

double sectional(const CurvatureTensor& r, int i, int j) {
    if (i == j) throw DegeneratePlane("basis plane needs two distinct indices");
    return r(i, j, i, j);
}

SectionalOracle sectional_oracle(const CurvatureTensor& r) {
    return [r](std::span<const double> u, std::span<const double> v) { return sectional(r, u, v); };
}

CurvatureTensor reconstruct_from_sectional(const SectionalOracle& sigma, int n) {
    require_dimension(n);
    std::vector<double> u(n), v(n);

    // Unnormalized biquadratic K(x + s z, y + t w); zero on degenerate planes.
    auto quad = [&](int x, int z, double s, int y, int w, double t) {
        std::fill(u.begin(), u.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        u[x] += 1.0;
        u[z] += s;
        v[y] += 1.0;
        v[w] += t;
        const double area = plane_area_sq(u, v);
        if (degenerate(u, v, area)) return 0.0;
        const double value = sigma(u, v);
        if (!std::isfinite(value)) throw NonFiniteValue("sectional oracle returned a non-finite value");
        return value * area;
    };
    // Coefficient of s t in K(x + s z, y + t w).
    auto mixed = [&](int x, int z, int y, int w) {
        return 0.25 * (quad(x, z, 1, y, w, 1) - quad(x, z, 1, y, w, -1) - quad(x, z, -1, y, w, 1) +
                       quad(x, z, -1, y, w, -1));
    };

    std::vector<double> c(static_cast<std::size_t>(n) * n * n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    c[idx4(n, i, j, k, l)] = (mixed(i, k, j, l) - mixed(i, l, j, k)) / 6.0;
                }
    return project_symmetries(n, c);
}

CurvatureTensor random_curvature(int n, std::uint64_t seed) {
    require_dimension(n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> raw(static_cast<std::size_t>(n) * n * n * n);
    for (double& x : raw) x = normal(rng);
    return project_symmetries(n, raw);
}

}  // namespace curvnorm
