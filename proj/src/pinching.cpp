#include "curvnorm/pinching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "curvnorm/error.hpp"

namespace curvnorm {

namespace {

constexpr long kChunk = 4096;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void require_valid(int n, const std::vector<double>& sigma, const std::vector<double>& lambda) {
    if (n < 2) throw InvalidDimension("pinching form needs n >= 2");
    if (sigma.size() != static_cast<std::size_t>(n * n) || lambda.size() != static_cast<std::size_t>(n)) {
        throw DomainError("pinching sample arrays do not match n = " + std::to_string(n));
    }
}

double form(int n, const double* sigma, const double* lambda) {
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += lambda[i] * lambda[i];
    double f = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) f += sigma[i * n + j] * (n * lambda[i] * lambda[j] + norm);
    return f;
}

struct Bounds {
    double lo;
    double hi;
};

Bounds box_bounds(const ViolationSearchOptions& o) {
    if (o.box == PinchingBox::TwoSided) return {-1.0 - o.epsilon, -1.0 + o.epsilon};
    return {-1.0, -1.0 + o.epsilon};
}

void project_trace(std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

bool normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    if (!(s > 0.0)) return false;
    s = std::sqrt(s);
    for (double& x : v) x /= s;
    return true;
}

struct Candidate {
    double f;
    long index;
    PinchingSample sample;
};

bool better(const Candidate& a, const Candidate& b) {
    return a.f > b.f || (a.f == b.f && a.index < b.index);
}

// Keeps the k best candidates sorted by better().
void offer(std::vector<Candidate>& top, std::size_t k, Candidate c) {
    if (top.size() == k && !better(c, top.back())) return;
    auto pos = std::upper_bound(top.begin(), top.end(), c, better);
    top.insert(pos, std::move(c));
    if (top.size() > k) top.pop_back();
}

std::vector<Candidate> sample_chunk(const ViolationSearchOptions& o, long chunk) {
    const int n = o.n;
    const Bounds b = box_bounds(o);
    std::mt19937_64 rng(splitmix64(o.seed ^ splitmix64(static_cast<std::uint64_t>(chunk))));
    std::uniform_real_distribution<double> unif(b.lo, b.hi);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const long first = chunk * kChunk;
    const long last = std::min(o.trials, first + kChunk);
    const std::size_t k = static_cast<std::size_t>(std::max(1, o.refine_top));
    std::vector<Candidate> top;
    std::vector<double> sigma(n * n, 0.0), lambda(n);
    for (long t = first; t < last; ++t) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) sigma[i * n + j] = sigma[j * n + i] = unif(rng);
        do {
            for (double& x : lambda) x = gauss(rng);
            if (o.trace_free) project_trace(lambda);
        } while (!normalize(lambda));
        const double f = form(n, sigma.data(), lambda.data());
        if (top.size() < k || f > top.back().f) offer(top, k, {f, t, {n, sigma, lambda}});
    }
    return top;
}

// Alternating ascent: sigma to the best vertex for the current lambda, then
// lambda to the top eigenvector of the form on the constraint sphere.
Candidate refine(const ViolationSearchOptions& o, Candidate c) {
    const int n = o.n;
    const Bounds b = box_bounds(o);
    auto& sigma = c.sample.sigma;
    auto& lambda = c.sample.lambda;
    std::vector<double> a(n * n), next(n), trial(n);

    for (int it = 0; it < o.ascent_iterations; ++it) {
        const double before = c.f;
        double norm = 0.0;
        for (double x : lambda) norm += x * x;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double coeff = n * lambda[i] * lambda[j] + norm;
                sigma[i * n + j] = sigma[j * n + i] = coeff > 0.0 ? b.hi : b.lo;
            }
        c.f = form(n, sigma.data(), lambda.data());

        // F = lambda^T A lambda.
        double diag = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) diag += sigma[i * n + j];
        double shift = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                a[i * n + j] = i == j ? diag : 0.5 * n * sigma[i * n + j];
                shift += std::abs(a[i * n + j]);
            }
        trial = lambda;
        for (int p = 0; p < 200; ++p) {
            for (int i = 0; i < n; ++i) {
                double s = shift * trial[i];
                for (int j = 0; j < n; ++j) s += a[i * n + j] * trial[j];
                next[i] = s;
            }
            if (o.trace_free) project_trace(next);
            if (!normalize(next)) break;
            trial.swap(next);
        }
        const double f = form(n, sigma.data(), trial.data());
        if (f > c.f) {
            lambda = trial;
            c.f = f;
        }
        if (c.f <= before + 1e-15 * std::abs(before)) break;
    }
    return c;
}

ViolationResult search(const ViolationSearchOptions& o, bool parallel) {
    if (o.n < 2) throw InvalidDimension("pinching search needs n >= 2");
    if (!(o.epsilon >= 0.0) || !std::isfinite(o.epsilon)) throw DomainError("epsilon must be >= 0");
    if (o.trials < 1) throw DomainError("trials must be >= 1");

    const long chunks = (o.trials + kChunk - 1) / kChunk;
    std::vector<std::vector<Candidate>> per_chunk(chunks);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long c = 0; c < chunks; ++c) per_chunk[c] = sample_chunk(o, c);

    const std::size_t k = static_cast<std::size_t>(std::max(1, o.refine_top));
    std::vector<Candidate> top;
    for (auto& chunk : per_chunk)
        for (auto& cand : chunk) offer(top, k, std::move(cand));

    ViolationResult res{top.front().f, top.front().f, top.front().sample, o.trials};
    if (o.refine_top <= 0 || o.ascent_iterations <= 0) return res;

    std::vector<Candidate> refined(top.size());
    const long count = static_cast<long>(top.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (long i = 0; i < count; ++i) refined[i] = refine(o, top[i]);
    for (const auto& r : refined) {
        if (r.f > res.max_f) {
            res.max_f = r.f;
            res.argmax = r.sample;
        }
    }
    return res;
}

}  // namespace

PinchingSample PinchingSample::uniform(int n, double sigma, std::vector<double> lambda) {
    std::vector<double> s(n * n, sigma);
    for (int i = 0; i < n; ++i) s[i * n + i] = 0.0;
    PinchingSample out{n, std::move(s), std::move(lambda)};
    require_valid(out.n, out.sigma, out.lambda);
    return out;
}

double pinching_form(const PinchingSample& sample) {
    require_valid(sample.n, sample.sigma, sample.lambda);
    return form(sample.n, sample.sigma.data(), sample.lambda.data());
}

double unpinched_closed_form(const std::vector<double>& lambda) {
    const double n = static_cast<double>(lambda.size());
    double sum = 0.0, norm = 0.0;
    for (double x : lambda) {
        sum += x;
        norm += x * x;
    }
    return -(n / 2.0) * sum * sum - (n * (n - 2.0) / 2.0) * norm;
}

ViolationResult violation_search(const ViolationSearchOptions& options) { return search(options, true); }

ViolationResult violation_search_serial(const ViolationSearchOptions& options) { return search(options, false); }

CriticalEpsilon critical_epsilon(int n, long trials, std::uint64_t seed, double tol, PinchingBox box,
                                 bool trace_free) {
    if (!(tol > 0.0)) throw DomainError("bisection tolerance must be positive");
    ViolationSearchOptions o;
    o.n = n;
    o.trials = trials;
    o.seed = seed;
    o.box = box;
    o.trace_free = trace_free;

    CriticalEpsilon out{0.0, 1.0, 0};
    auto safe = [&](double eps) {
        o.epsilon = eps;
        ++out.probes;
        return violation_search(o).safe();
    };
    if (!safe(0.0)) throw DomainError("the unpinched form is not negative; no safe epsilon exists");
    while (safe(out.upper)) {
        out.lower = out.upper;
        out.upper *= 2.0;
        if (out.upper > 1024.0) throw DomainError("no violation found below epsilon = 1024");
    }
    while (out.width() > tol) {
        const double mid = 0.5 * (out.lower + out.upper);
        if (safe(mid)) {
            out.lower = mid;
        } else {
            out.upper = mid;
        }
    }
    return out;
}

}  // namespace curvnorm
