#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "curvnorm/error.hpp"
#include "curvnorm/experiment.hpp"

using namespace curvnorm;

namespace {

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvnorm: curvature-norm experiments"};
    std::string command, config_path, out_path, format = "json";
    std::uint64_t seed = 0;
    int grid = 0;
    bool timing = false;
    app.add_option("command", command, "identities | gauss-bonnet | pinching | ricci-ode | yamabe-flow | bubble | "
                                       "quotient | sobolev-report (overrides the config)");
    app.add_option("--config", config_path, "JSON experiment config");
    app.add_option("--out", out_path, "write the report here instead of stdout");
    auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
    auto* grid_opt = app.add_option("--grid", grid, "override the conformal grid size");
    app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--timing", timing, "include wall time in the JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitBadConfig;
    }

    try {
        nlohmann::json raw = config_path.empty() ? nlohmann::json::object() : load_config(config_path);
        if (!command.empty()) raw["command"] = command;
        if (*seed_opt) raw["seed"] = seed;
        if (*grid_opt) raw["grid"] = grid;
        if (timing) raw["timing"] = true;
        if (!raw.is_object() || !raw.contains("command")) throw ConfigError("no command given");
        ExperimentConfig cfg = ExperimentConfig::from_json(raw);
        if (!out_path.empty()) cfg.output = out_path;

        const ExperimentReport rep = run(cfg);
        const std::string text = format == "csv" ? rep.csv : rep.report.dump(2) + "\n";
        if (cfg.output.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(cfg.output);
            if (!out) throw Error("cannot write " + cfg.output);
            out << text;
        }
        for (const auto& f : rep.failures) std::cerr << "invariant failure: " << f << '\n';
        return rep.ok() ? kExitOk : kExitInvariantFailure;
    } catch (const UnknownCommand& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUnknownCommand;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}
