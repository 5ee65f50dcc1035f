#pragma once

#include "gdrift/io.hpp"
#include "gdrift/simulate.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gdrift {

/// Monte Carlo parameters shared by every scenario.
struct McParams {
    std::size_t n_paths = 10000;
    double dt = 1e-4;
    double epsilon = 0.02;
    double t_end = 1.0;
    std::uint64_t seed = 20240617;
    double x_max = 1e6;
};

using ScenarioParams = std::map<std::string, double>;

struct ScenarioOverrides {
    std::optional<std::size_t> n_paths;
    std::optional<double> dt;
    std::optional<double> epsilon;
    std::optional<double> t_end;
    std::optional<std::uint64_t> seed;
    std::optional<double> x_max;
    ScenarioParams params;
};

McParams apply_overrides(McParams mc, const ScenarioOverrides& overrides);

/// Reads {"n_paths", "dt", "epsilon", "t_end", "seed", "x_max", "params": {...}};
/// every key is optional. Throws Error(ConfigError) on unknown keys.
ScenarioOverrides overrides_from_json(const io::Json& j);

enum class Relation { AtMost, AtLeast, Equal };
std::string_view to_string(Relation r);

struct Check {
    std::string name;
    double statistic;
    Relation relation;
    double tolerance;
    bool pass;
};

Check make_check(std::string name, double statistic, Relation relation, double tolerance);

struct Report {
    std::string scenario;
    McParams mc;
    ScenarioParams params;
    io::Json config;
    std::vector<Check> checks;
    double runtime_seconds = 0.0;

    bool passed() const;
};

/// Serialized report. Runtime is left out so that equal configurations give
/// byte-identical output.
io::Json report_to_json(const Report& report);
std::string report_to_csv(const Report& report);

struct ScenarioInfo {
    std::string name;
    std::string summary;
    ScenarioParams params;  ///< defaults of the scenario-specific parameters
    McParams mc;            ///< default Monte Carlo parameters
};

const std::vector<ScenarioInfo>& scenario_registry();

/// Throws Error(UnknownScenario).
const ScenarioInfo& find_scenario(std::string_view name);

/// The simulated model of a scenario (the first one for scenarios comparing several).
/// Throws Error(UnknownScenario) or Error(ConfigError) for unknown parameters.
SdeSpec scenario_spec(std::string_view name, const ScenarioParams& params = {});

/// Runs the simulations and checks of a scenario.
/// Throws Error(UnknownScenario) or Error(ConfigError).
Report run_scenario(std::string_view name, const ScenarioOverrides& overrides = {});

struct ConvergenceRow {
    double dt;
    double epsilon;
    double residual_mean;         ///< mean |Tanaka residual| at t_end
    double ratio_gap;             ///< |c+ L+ - c- L-| / L^ at the watched point
    double ks_statistic;          ///< against the scenario oracle; NaN without one
    double left_local_time_mean;  ///< mean left local time at the watched point
};

struct ConvergenceTable {
    std::string scenario;
    McParams mc;
    ScenarioParams params;
    io::Json config;
    double watched_point;
    std::vector<ConvergenceRow> rows;
    bool residual_decreasing;
    bool residual_negligible;  ///< every residual mean <= 1e-10
    bool left_local_time_decreasing;
};

/// Repeats the main simulation of a scenario at each (dt, epsilon) pair. A list
/// of length one is broadcast against the other. n_paths defaults to 1000.
/// Throws Error(ConfigError) for empty or mismatched lists.
ConvergenceTable convergence_study(std::string_view name, std::span<const double> dt_list,
                                   std::span<const double> eps_list, const ScenarioOverrides& overrides = {});

io::Json convergence_to_json(const ConvergenceTable& table);
std::string convergence_to_csv(const ConvergenceTable& table);

io::Json mc_to_json(const McParams& mc);

}  // namespace gdrift
