#include "curvnorm/identity_suite.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "curvnorm/curvature.hpp"
#include "curvnorm/error.hpp"

namespace curvnorm {

namespace {

struct Row {
    double reconstruction, weyl_trace, pythagoras, scalar_part, traceless_part, ricci;
    bool bound_violated;
};

double max_abs(std::span<const double> c) {
    double m = 0.0;
    for (double x : c) m = std::max(m, std::abs(x));
    return m;
}

Row check_one(int n, std::uint64_t seed) {
    const CurvatureTensor r = random_curvature(n, seed);
    const Decomposition d = decompose(r);
    const double scale = max_abs(r.components());

    Row row{};
    row.reconstruction = max_abs((d.sum() - r).components()) / scale;
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            double tr = 0.0;
            for (int i = 0; i < n; ++i) tr += d.weyl(i, j, i, l);
            row.weyl_trace = std::max(row.weyl_trace, std::abs(tr) / scale);
        }
    const NormIdentityReport rep = norm_identities_check(r);
    row.pythagoras = rep.pythagoras;
    row.scalar_part = rep.scalar_part;
    row.traceless_part = rep.traceless_part;
    row.ricci = rep.ricci;
    row.bound_violated = ricci_lower_bounds_check(r).violated(1e-12 * scale);
    return row;
}

IdentitySuiteResult run(const IdentitySuiteOptions& o, bool parallel) {
    if (o.n < 4) throw UnsupportedDimension("identity suite needs n >= 4");
    if (o.count < 1) throw DomainError("identity suite needs at least one tensor");
    std::vector<Row> rows(o.count);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int k = 0; k < o.count; ++k) rows[k] = check_one(o.n, o.seed + static_cast<std::uint64_t>(k));

    IdentitySuiteResult out{o.n, o.count, 0, 0, 0, 0, 0, 0, 0};
    for (const Row& r : rows) {
        out.max_reconstruction = std::max(out.max_reconstruction, r.reconstruction);
        out.max_weyl_trace = std::max(out.max_weyl_trace, r.weyl_trace);
        out.max_pythagoras = std::max(out.max_pythagoras, r.pythagoras);
        out.max_scalar_part = std::max(out.max_scalar_part, r.scalar_part);
        out.max_traceless_part = std::max(out.max_traceless_part, r.traceless_part);
        out.max_ricci = std::max(out.max_ricci, r.ricci);
        out.ricci_bound_violations += r.bound_violated ? 1 : 0;
    }
    return out;
}

}  // namespace

double IdentitySuiteResult::max_residual() const noexcept {
    return std::max({max_reconstruction, max_weyl_trace, max_pythagoras, max_scalar_part, max_traceless_part,
                     max_ricci});
}

IdentitySuiteResult run_identity_suite(const IdentitySuiteOptions& options) { return run(options, true); }

IdentitySuiteResult run_identity_suite_serial(const IdentitySuiteOptions& options) {
    return run(options, false);
}

}  // namespace curvnorm
