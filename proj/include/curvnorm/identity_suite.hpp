#pragma once

// Batch check of the decomposition and norm identities on random tensors.

#include <cstdint>

namespace curvnorm {

struct IdentitySuiteOptions {
    int n = 4;
    int count = 1000;
    std::uint64_t seed = 1;  // tensor k uses seed + k
};

struct IdentitySuiteResult {
    int n;
    int count;
    double max_reconstruction;  // |W + Z + U - R|_max / |R|_max
    double max_weyl_trace;      // |tr W|_max / |R|_max
    double max_pythagoras;
    double max_scalar_part;
    double max_traceless_part;
    double max_ricci;
    long ricci_bound_violations;

    /// Largest of the relative residuals above.
    double max_residual() const noexcept;
};

/// Parallel over tensors; per-tensor results are reduced in index order.
IdentitySuiteResult run_identity_suite(const IdentitySuiteOptions& options);

IdentitySuiteResult run_identity_suite_serial(const IdentitySuiteOptions& options);

}  // namespace curvnorm
