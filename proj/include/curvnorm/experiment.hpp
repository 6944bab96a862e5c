#pragma once

// Experiment configs, the per-command pipelines and their reports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace curvnorm {

inline constexpr int kReportSchemaVersion = 1;

/// Every field except command is optional; to_json writes the defaults back
/// so a parsed config round-trips.
struct ExperimentConfig {
    std::string command;
    int n = 4;
    std::uint64_t seed = 1;
    int seeds = 100;               // identities: number of random tensors
    int grid = 512;                // conformal grid nodes
    double epsilon = 0.25;         // pinching box half-width
    long trials = 100000;          // pinching samples
    std::string box = "two-sided"; // or "one-sided"
    bool trace_free = true;
    double critical_tol = 0.0;     // > 0 also runs the critical-epsilon bisection
    double dt = 0.0;               // 0: 0.01 for ricci-ode, the stable step for yamabe-flow
    std::optional<double> t_end;   // default 20 for ricci-ode, 1 for yamabe-flow
    std::string flow = "normalized";
    int record_stride = 1000;      // yamabe-flow: history thinning
    std::optional<nlohmann::json> initial;
    std::optional<nlohmann::json> geometry;
    std::optional<std::vector<double>> epsilons;  // bubble: {1, 0.1, 0.01, 0.001}; quotient: {0.5, 2}
    double cap_radius = 0.5;
    std::optional<double> ricci_lower;   // sobolev-report: a
    std::optional<double> ricci_upper;   // sobolev-report: b
    std::optional<double> sobolev_constant;
    std::string output;
    bool timing = false;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Commands accepted by run().
const std::vector<std::string>& experiment_commands();

struct ExperimentReport {
    nlohmann::json report;            // {tool, schema_version, config, results, ledger, status, failures}
    std::vector<std::string> failures;
    std::string csv;                  // fixed-column table, first line "# curvnorm <command> v1"

    bool ok() const noexcept { return failures.empty(); }
};

/// Throws UnknownCommand or ConfigError before doing any work.
ExperimentReport run(const ExperimentConfig& config);

/// The discrepancy ledger embedded in every report; entries exercised by
/// the command are marked triggered.
nlohmann::json discrepancy_ledger(const std::string& command);

enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitUnknownCommand = 2,
    kExitBadConfig = 3,
    kExitInvariantFailure = 4,
};

}  // namespace curvnorm
