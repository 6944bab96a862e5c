#pragma once

// The quadratic form sum_{i<j} sigma_ij (n lambda_i lambda_j + |lambda|^2) over
// pinched plane curvatures sigma and trace-free Ricci eigenvalues lambda.

#include <cstdint>
#include <vector>

namespace curvnorm {

/// TwoSided: sigma in [-1-eps, -1+eps]. OneSided: sigma in [-1, -1+eps].
enum class PinchingBox { TwoSided, OneSided };

struct PinchingSample {
    int n;
    std::vector<double> sigma;   // n x n row-major, symmetric, diagonal unused
    std::vector<double> lambda;  // n

    /// Constant sigma, given lambda.
    static PinchingSample uniform(int n, double sigma, std::vector<double> lambda);
};

double pinching_form(const PinchingSample& sample);

/// -(n/2) (sum lambda)^2 - (n(n-2)/2) |lambda|^2, the value at sigma = -1.
double unpinched_closed_form(const std::vector<double>& lambda);

struct ViolationSearchOptions {
    int n = 4;
    double epsilon = 0.25;
    long trials = 100000;
    std::uint64_t seed = 1;
    PinchingBox box = PinchingBox::TwoSided;
    bool trace_free = true;
    int refine_top = 16;
    int ascent_iterations = 200;
};

struct ViolationResult {
    double max_f;
    double max_f_sampled;  // before refinement
    PinchingSample argmax;
    long trials;

    bool safe() const noexcept { return max_f < 0.0; }
};

/// Uniform sampling of sigma in the box and lambda on the unit sphere
/// (trace-free when requested), then alternating ascent on the best
/// candidates: sigma snaps to the maximizing box vertex, lambda moves to the
/// top eigenvector of the form restricted to the constraint sphere.
/// Trials run in parallel chunks with per-chunk seeds; the result does not
/// depend on the thread count.
ViolationResult violation_search(const ViolationSearchOptions& options);

/// Single-threaded reference; returns the same result as violation_search.
ViolationResult violation_search_serial(const ViolationSearchOptions& options);

struct CriticalEpsilon {
    double lower;  // largest probed epsilon found safe
    double upper;  // smallest probed epsilon found violated
    int probes;

    double estimate() const noexcept { return lower; }
    double width() const noexcept { return upper - lower; }
};

/// Bisection between eps = 0 (safe) and a violated value found by doubling
/// from 1, until upper - lower <= tol.
CriticalEpsilon critical_epsilon(int n, long trials, std::uint64_t seed, double tol,
                                 PinchingBox box = PinchingBox::TwoSided, bool trace_free = true);

}  // namespace curvnorm
