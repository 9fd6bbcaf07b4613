#pragma once

#include "magschro/diagnostics.hpp"
#include "magschro/potentials.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>

namespace magschro {

inline constexpr int kConfigSchemaVersion = 1;

// Known experiment ids, in catalog order.
const std::vector<std::string>& experiment_ids();

struct GridSpec {
    int n = 2, N = 64;
    double L = 32, dt = 1.0 / 64, T = 1.0;
    Grid grid() const { return make_grid(n, N, L, dt, T); }
};

struct ExperimentConfig {
    int schema_version = kConfigSchemaVersion;
    std::vector<std::string> experiments;  // empty: any id may be run
    GridSpec grid;
    std::vector<PresetParams> presets;
    std::vector<double> eps;
    std::uint64_t seed = 0;
    std::string output_dir = "magschro-out";
    int threads = 1;
    std::map<std::string, double> tolerances;  // check id -> threshold
};

// Schema problems, each naming the offending key path.
struct ConfigDiagnostic {
    std::string path;
    std::string message;
};
// Side-effect free.
std::vector<ConfigDiagnostic> validate(const nlohmann::json& j);
// Throws InvalidArgument listing every diagnostic.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);
nlohmann::json preset_json(const PresetParams& p);

// Settings the acceptance criteria pin for each experiment.
ExperimentConfig default_config(const std::string& experiment);

enum class Sense { at_most, at_least, report };

struct CheckSpec {
    std::string id;
    std::string experiment;
    int criterion = 0;  // acceptance criterion number
    double threshold = 0;
    Sense sense = Sense::at_most;
    std::string description;
};
const std::vector<CheckSpec>& list_checks();
const CheckSpec& find_check(const std::string& id);

// CSV contract: check_id,param_json,value,threshold,pass
struct CheckRow {
    std::string check_id;
    nlohmann::json params = nlohmann::json::object();
    double value = 0;
    double threshold = 0;
    Sense sense = Sense::at_most;
    bool pass = false;
};

struct RunReport {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<CheckRow> rows;
    std::vector<Warning> warnings;
    nlohmann::json environment;
    double wall_seconds = 0;

    bool all_pass() const;
    std::string csv() const;
    // Everything except the environment stamp and wall time is deterministic.
    nlohmann::json summary() const;
};

// Throws InvalidArgument (config), BudgetExceeded, NumericalFailure (NaN, with the check and parameters).
RunReport run(const ExperimentConfig& cfg, const std::string& experiment);
// <dir>/<experiment>.csv and <dir>/<experiment>.json
void write_report(const RunReport& r, const std::string& dir);

// SplitMix64 of seed advanced by `stream` increments: independent sub-task streams.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace magschro
