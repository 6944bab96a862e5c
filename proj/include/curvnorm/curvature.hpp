#pragma once

// Pointwise algebraic curvature tensors in an orthonormal frame.
//
// Index convention: R(i,j,i,j) is the sectional curvature of the e_i, e_j
// plane, so the unit round sphere has R(i,j,k,l) = d_ik d_jl - d_il d_jk.
// Ricci is the contraction over the first and third slots.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace curvnorm {

class SymTensor2 {
public:
    explicit SymTensor2(int n);

    static SymTensor2 identity(int n, double scale = 1.0);

    int dim() const noexcept { return n_; }
    double operator()(int i, int j) const noexcept { return a_[i * n_ + j]; }
    void set(int i, int j, double value) noexcept;

    double trace() const noexcept;
    double norm_sq() const noexcept;

    SymTensor2 traceless() const;

private:
    int n_;
    std::vector<double> a_;
};

class CurvatureTensor {
public:
    /// Zero tensor of dimension n (n >= 2).
    explicit CurvatureTensor(int n);

    /// Adopts components that already carry the curvature symmetries.
    /// Throws DomainError if the symmetry defect exceeds round-off.
    static CurvatureTensor from_symmetric(int n, std::vector<double> components);

    /// kappa * (d_ik d_jl - d_il d_jk): constant sectional curvature kappa.
    static CurvatureTensor constant_curvature(int n, double kappa);

    int dim() const noexcept { return n_; }

    double operator()(int i, int j, int k, int l) const noexcept {
        return c_[((i * n_ + j) * n_ + k) * n_ + l];
    }

    std::span<const double> components() const noexcept { return c_; }

    /// Largest absolute residual over the antisymmetry, pair-symmetry and
    /// first Bianchi identities.
    double symmetry_defect() const;

    CurvatureTensor& operator+=(const CurvatureTensor& other);
    CurvatureTensor& operator-=(const CurvatureTensor& other);
    CurvatureTensor& operator*=(double s);

    friend CurvatureTensor operator+(CurvatureTensor a, const CurvatureTensor& b) { return a += b; }
    friend CurvatureTensor operator-(CurvatureTensor a, const CurvatureTensor& b) { return a -= b; }
    friend CurvatureTensor operator*(CurvatureTensor a, double s) { return a *= s; }
    friend CurvatureTensor operator*(double s, CurvatureTensor a) { return a *= s; }
    friend CurvatureTensor operator-(CurvatureTensor a) { return a *= -1.0; }

private:
    CurvatureTensor(int n, std::vector<double> components);

    friend CurvatureTensor project_symmetries(int n, std::span<const double> raw);

    int n_;
    std::vector<double> c_;
};

/// Projects an arbitrary n^4 array onto the space of algebraic curvature
/// tensors: antisymmetrize both pairs, symmetrize under pair exchange, then
/// remove the totally antisymmetric (Bianchi-violating) part. Linear and
/// idempotent.
CurvatureTensor project_symmetries(int n, std::span<const double> raw);

struct RicciScalar {
    SymTensor2 ricci;
    double scalar;
};

RicciScalar ricci_and_scalar(const CurvatureTensor& r);

/// (h o k)_ijkl = h_ik k_jl + h_jl k_ik - h_il k_jk - h_jk k_il
CurvatureTensor kulkarni_nomizu(const SymTensor2& h, const SymTensor2& k);

/// R = W + Z + U with U the constant-curvature part, Z built from the
/// trace-free Ricci tensor and W totally trace-free.
struct Decomposition {
    CurvatureTensor weyl;
    CurvatureTensor traceless_ricci_part;
    CurvatureTensor scalar_part;
    double scalar;

    CurvatureTensor sum() const;
};

/// Requires n >= 4; throws UnsupportedDimension otherwise.
Decomposition decompose(const CurvatureTensor& r);

/// Plain componentwise sum of squares.
double tensor_norm_sq(const CurvatureTensor& t);

/// Relative residuals of the orthogonal-decomposition norm identities.
struct NormIdentityReport {
    double pythagoras;       // |R|^2 vs |W|^2 + |Z|^2 + |U|^2
    double scalar_part;      // |U|^2 vs 2 S^2 / (n (n-1))
    double traceless_part;   // |Z|^2 vs 4 |z|^2 / (n-2)
    double ricci;            // |Ric|^2 vs |z|^2 + S^2 / n

    double max() const noexcept;
};

NormIdentityReport norm_identities_check(const CurvatureTensor& r);

/// Pointwise bounds |Ric| >= sqrt(n-2)/2 |Z| and |Ric| >= sqrt((n-1)/2) |U|.
struct RicciBoundReport {
    double ricci_norm;
    double traceless_bound;
    double scalar_bound;

    double traceless_margin() const noexcept { return ricci_norm - traceless_bound; }
    double scalar_margin() const noexcept { return ricci_norm - scalar_bound; }
    bool violated(double tol = 1e-12) const noexcept;
};

RicciBoundReport ricci_lower_bounds_check(const CurvatureTensor& r);

/// R(u, v, u, v) / (|u|^2 |v|^2 - <u, v>^2). Throws DegeneratePlane when u, v
/// are (numerically) dependent.
double sectional(const CurvatureTensor& r, std::span<const double> u, std::span<const double> v);

/// Basis-plane shortcut R(i, j, i, j).
double sectional(const CurvatureTensor& r, int i, int j);

/// Evaluates sectional curvature on an arbitrary pair of vectors.
using SectionalOracle = std::function<double(std::span<const double>, std::span<const double>)>;

SectionalOracle sectional_oracle(const CurvatureTensor& r);

/// Recovers the full tensor from its sectional curvatures by polarization of
/// the biquadratic form K(u, v) = sigma(u, v) (|u|^2 |v|^2 - <u, v>^2).
CurvatureTensor reconstruct_from_sectional(const SectionalOracle& sigma, int n);

/// Deterministic for fixed (n, seed): gaussian n^4 array, then projection.
CurvatureTensor random_curvature(int n, std::uint64_t seed);

}  // namespace curvnorm
