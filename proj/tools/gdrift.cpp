#include "gdrift/classify.hpp"
#include "gdrift/error.hpp"
#include "gdrift/io.hpp"
#include "gdrift/loctime.hpp"
#include "gdrift/scenario.hpp"
#include "gdrift/simulate.hpp"
#include "gdrift/stats.hpp"
#include "gdrift/transform.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using gdrift::io::Json;

struct Globals {
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    double dt = 0.0;
    double eps = 0.0;
    double t_end = 0.0;
    double x_max = 0.0;
    std::string out;
    std::string format = "json";

    CLI::Option* seed_opt = nullptr;
    CLI::Option* n_paths_opt = nullptr;
    CLI::Option* dt_opt = nullptr;
    CLI::Option* eps_opt = nullptr;
    CLI::Option* t_end_opt = nullptr;
    CLI::Option* x_max_opt = nullptr;
    CLI::Option* format_opt = nullptr;

    gdrift::ScenarioOverrides overrides() const {
        gdrift::ScenarioOverrides o;
        if (seed_opt->count()) o.seed = seed;
        if (n_paths_opt->count()) o.n_paths = n_paths;
        if (dt_opt->count()) o.dt = dt;
        if (eps_opt->count()) o.epsilon = eps;
        if (t_end_opt->count()) o.t_end = t_end;
        if (x_max_opt->count()) o.x_max = x_max;
        return o;
    }

    gdrift::McParams mc() const { return gdrift::apply_overrides(gdrift::McParams{}, overrides()); }
};

/// Writes text to <out>/<name> when --out is set, otherwise to stdout.
void emit(const Globals& g, const std::string& name, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(g.out);
    const auto file = (std::filesystem::path(g.out) / name).string();
    gdrift::io::write_text_file(file, text);
    std::cerr << "wrote " << file << "\n";
}

/// A bare measure, or any config object holding one under "measure".
gdrift::DriftMeasure load_measure(const std::string& file) {
    const Json j = gdrift::io::read_json_file(file);
    if (j.is_object() && j.contains("measure")) return gdrift::io::measure_from_json(j.at("measure"));
    return gdrift::io::measure_from_json(j);
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw gdrift::Error(gdrift::ErrorKind::ConfigError, std::string("bad number in ") + what + ": " + item);
        }
    }
    return out;
}

gdrift::ScenarioParams parse_params(const std::vector<std::string>& items) {
    gdrift::ScenarioParams out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw gdrift::Error(gdrift::ErrorKind::ConfigError, "--param expects key=value, got " + item);
        }
        out[item.substr(0, eq)] = parse_list(item.substr(eq + 1), "--param").at(0);
    }
    return out;
}

/// Config file first, then --param, then global flags.
gdrift::ScenarioOverrides scenario_overrides(const Globals& g, const std::string& config_file,
                                             const std::vector<std::string>& params) {
    gdrift::ScenarioOverrides o;
    if (!config_file.empty()) o = gdrift::overrides_from_json(gdrift::io::read_json_file(config_file));
    for (const auto& [k, v] : parse_params(params)) o.params[k] = v;
    const auto flags = g.overrides();
    if (flags.seed) o.seed = flags.seed;
    if (flags.n_paths) o.n_paths = flags.n_paths;
    if (flags.dt) o.dt = flags.dt;
    if (flags.epsilon) o.epsilon = flags.epsilon;
    if (flags.t_end) o.t_end = flags.t_end;
    if (flags.x_max) o.x_max = flags.x_max;
    return o;
}

int run_classify(const Globals& g, const std::string& spec_file, const std::string& measure_file,
                 const std::string& convention, double b_value, const std::vector<double>& points) {
    gdrift::SdeSpec spec;
    if (!spec_file.empty()) {
        spec = gdrift::io::spec_from_json(gdrift::io::read_json_file(spec_file));
    } else {
        spec.nu = load_measure(measure_file);
        spec.convention = gdrift::parse_convention(convention);
        spec.b = gdrift::Coefficient::constant(b_value);
    }
    Json rows = Json::array();
    std::string csv = "x,weight,b,class\n";
    for (double x : points) {
        const double weight = spec.nu.atom_weight(x);
        const auto cls = gdrift::classify_point(spec.nu, spec.convention, x, spec.b(x));
        rows.push_back({{"x", x}, {"weight", weight}, {"b", spec.b(x)}, {"class", std::string(to_string(cls))}});
        csv += format_number(x) + "," + format_number(weight) + "," + format_number(spec.b(x)) + "," +
               std::string(to_string(cls)) + "\n";
    }
    const Json config = {{"command", "classify"}, {"spec", gdrift::io::spec_to_json(spec)}, {"points", points}};
    if (g.format == "csv") {
        emit(g, "classify.csv", gdrift::io::csv_config_header(config) + csv);
    } else {
        emit(g, "classify.json", Json{{"config", config}, {"points", rows}}.dump(2) + "\n");
    }
    return 0;
}

int run_convert(const Globals& g, const std::string& measure_file, const std::string& from, const std::string& to) {
    const auto nu = load_measure(measure_file);
    const auto c_from = gdrift::parse_convention(from);
    const auto c_to = gdrift::parse_convention(to);
    const auto converted = gdrift::convert_measure(nu, c_from, c_to);
    const Json config = {{"command", "convert"},
                         {"measure", gdrift::io::measure_to_json(nu)},
                         {"from", std::string(to_string(c_from))},
                         {"to", std::string(to_string(c_to))}};
    const Json out = {{"config", config},
                      {"measure", gdrift::io::measure_to_json(converted)},
                      {"convention", std::string(to_string(c_to))}};
    emit(g, "converted.json", out.dump(2) + "\n");
    return 0;
}

int run_transform(const Globals& g, const std::string& measure_file, const std::string& convention, double lo,
                  double hi, std::size_t n_points) {
    if (!(lo < hi) || n_points < 2) {
        throw gdrift::Error(gdrift::ErrorKind::ConfigError, "transform grid needs from < to and at least 2 points");
    }
    const auto nu = load_measure(measure_file);
    const auto conv = gdrift::parse_convention(convention);
    const gdrift::GTransform gt(nu, conv);
    std::vector<double> grid(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        grid[i] = i + 1 == n_points ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
    }
    const double residual = gdrift::residual_of_integral_equation(gt, grid);
    const Json config = {{"command", "transform"},
                         {"measure", gdrift::io::measure_to_json(nu)},
                         {"convention", std::string(to_string(conv))},
                         {"from", lo},
                         {"to", hi},
                         {"points", n_points}};
    if (g.format == "json") {
        Json rows = Json::array();
        for (double x : grid) {
            const auto v = gt.g(x);
            rows.push_back({{"x", x}, {"g", v.right}, {"g_minus", v.left}, {"G", gt.G(x)}});
        }
        emit(g, "transform.json", Json{{"config", config}, {"rows", rows}, {"max_residual", residual}}.dump(2) + "\n");
    } else {
        std::string csv = gdrift::io::csv_config_header(config) + "x,g,g_minus,G\n";
        for (double x : grid) {
            const auto v = gt.g(x);
            csv += format_number(x) + "," + format_number(v.right) + "," + format_number(v.left) + "," +
                   format_number(gt.G(x)) + "\n";
        }
        emit(g, "transform.csv", csv);
    }
    std::cout << "max_residual " << format_number(residual) << "\n";
    return 0;
}

int run_simulate(const Globals& g, const std::string& spec_file, bool write_paths) {
    const auto spec = gdrift::io::spec_from_json(gdrift::io::read_json_file(spec_file));
    const auto mc = g.mc();
    const gdrift::PathSimulator sim(spec, mc.x_max);
    const Json config = {{"command", "simulate"}, {"spec", gdrift::io::spec_to_json(spec)}, {"mc", gdrift::mc_to_json(mc)}};

    std::ofstream path_file;
    std::ostream* path_out = nullptr;
    if (write_paths) {
        if (g.out.empty()) {
            path_out = &std::cout;
        } else {
            std::filesystem::create_directories(g.out);
            path_file.open(std::filesystem::path(g.out) / "paths.csv", std::ios::binary);
            if (!path_file) throw gdrift::Error(gdrift::ErrorKind::ConfigError, "cannot write paths.csv");
            path_out = &path_file;
        }
        *path_out << gdrift::io::csv_config_header(config);
    }

    std::vector<double> terminals;
    terminals.reserve(mc.n_paths);
    std::map<std::string, std::size_t> status_counts;
    std::size_t events = 0;
    const std::uint64_t seed = gdrift::mix_seed(mc.seed, 1);
    for (std::size_t i = 0; i < mc.n_paths; ++i) {
        gdrift::RngStream rng(seed, i);
        const auto path = sim.simulate(mc.t_end, mc.dt, rng);
        terminals.push_back(path.terminal());
        ++status_counts[std::string(to_string(path.status.kind))];
        events += path.events.size();
        if (path_out) gdrift::io::write_paths_csv(*path_out, std::span(&path, 1), i, i == 0);
    }
    const auto m = gdrift::stats::moments(terminals);
    Json counts = Json::object();
    for (const auto& [k, v] : status_counts) counts[k] = v;
    const Json summary = {{"config", config},
                          {"terminal",
                           {{"mean", m.mean},
                            {"variance", m.variance},
                            {"stderr_mean", m.stderr_mean},
                            {"min", *std::min_element(terminals.begin(), terminals.end())},
                            {"max", *std::max_element(terminals.begin(), terminals.end())}}},
                          {"status_counts", counts},
                          {"events", events}};
    if (write_paths && g.out.empty()) {
        std::cerr << summary.dump(2) << "\n";
    } else {
        emit(g, "summary.json", summary.dump(2) + "\n");
    }
    return 0;
}

int run_estimate(const Globals& g, const std::string& path_file, std::size_t path_index, double y,
                 const std::string& convention, const std::string& spec_file) {
    std::ifstream in(path_file);
    if (!in) throw gdrift::Error(gdrift::ErrorKind::ConfigError, "cannot open " + path_file);
    auto path = gdrift::io::read_path_csv(in, path_index);
    const auto conv = gdrift::parse_convention(convention);
    const double eps = g.eps_opt->count() ? g.eps : gdrift::McParams{}.epsilon;
    Json config = {{"command", "estimate-loctime"},
                   {"path_file", path_file},
                   {"path_index", path_index},
                   {"y", y},
                   {"convention", std::string(to_string(conv))},
                   {"epsilon", eps}};
    auto qv = gdrift::QvSource::SquaredIncrements;
    if (!spec_file.empty()) {
        const auto spec = gdrift::io::spec_from_json(gdrift::io::read_json_file(spec_file));
        config["spec"] = gdrift::io::spec_to_json(spec);
        for (std::size_t i = 0; i + 1 < path.values.size(); ++i) {
            const double b = spec.b(path.values[i]);
            path.qv_increments.push_back(b * b * path.dt);
        }
        qv = gdrift::QvSource::Recorded;
    }
    config["qv_source"] = qv == gdrift::QvSource::Recorded ? "coefficient" : "squared_increments";
    const auto est = gdrift::estimate_local_time(path, y, conv, eps, qv);
    std::string csv = gdrift::io::csv_config_header(config) + "t,L\n";
    for (std::size_t i = 0; i < est.values.size(); ++i) {
        csv += format_number(path.time(i)) + "," + format_number(est.values[i]) + "\n";
    }
    emit(g, "loctime.csv", csv);
    return 0;
}

int run_scenario_cmd(const Globals& g, const std::string& name, const std::string& config_file,
                     const std::vector<std::string>& params) {
    const auto report = gdrift::run_scenario(name, scenario_overrides(g, config_file, params));
    if (g.format == "csv") {
        emit(g, report.scenario + "_report.csv", gdrift::report_to_csv(report));
    } else {
        emit(g, report.scenario + "_report.json", gdrift::report_to_json(report).dump(2) + "\n");
    }
    for (const auto& c : report.checks) {
        std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << " " << format_number(c.statistic) << " "
                  << to_string(c.relation) << " " << format_number(c.tolerance) << "\n";
    }
    std::cerr << "runtime_seconds " << report.runtime_seconds << "\n";
    return report.passed() ? 0 : 1;
}

int run_convergence_cmd(const Globals& g, const std::string& name, const std::string& dt_text,
                        const std::string& eps_text, const std::string& config_file,
                        const std::vector<std::string>& params) {
    const auto dts = parse_list(dt_text, "--dt-list");
    std::vector<double> eps;
    if (eps_text.empty()) {
        for (double dt : dts) eps.push_back(2.0 * std::sqrt(dt));
    } else {
        eps = parse_list(eps_text, "--eps-list");
    }
    const auto table = gdrift::convergence_study(name, dts, eps, scenario_overrides(g, config_file, params));
    if (g.format == "csv") {
        emit(g, table.scenario + "_convergence.csv", gdrift::convergence_to_csv(table));
    } else {
        emit(g, table.scenario + "_convergence.json", gdrift::convergence_to_json(table).dump(2) + "\n");
    }
    return 0;
}

int run_list(const Globals& g) {
    if (g.format == "csv") {
        std::string out = "name,params,summary\n";
        for (const auto& s : gdrift::scenario_registry()) {
            std::string params;
            for (const auto& [k, v] : s.params) params += (params.empty() ? "" : ";") + k + "=" + format_number(v);
            out += s.name + "," + params + ",\"" + s.summary + "\"\n";
        }
        emit(g, "scenarios.csv", out);
    } else {
        Json list = Json::array();
        for (const auto& s : gdrift::scenario_registry()) {
            Json params = Json::object();
            for (const auto& [k, v] : s.params) params[k] = v;
            list.push_back({{"name", s.name}, {"summary", s.summary}, {"params", params}, {"mc", gdrift::mc_to_json(s.mc)}});
        }
        emit(g, "scenarios.json", list.dump(2) + "\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and analysis of SDEs with generalized drift"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    g.seed_opt = app.add_option("--seed", g.seed, "Random seed");
    g.n_paths_opt = app.add_option("--n-paths", g.n_paths, "Number of simulated paths")->check(CLI::PositiveNumber);
    g.dt_opt = app.add_option("--dt", g.dt, "Time step")->check(CLI::PositiveNumber);
    g.eps_opt = app.add_option("--eps", g.eps, "Local-time window width")->check(CLI::PositiveNumber);
    g.t_end_opt = app.add_option("--t-end", g.t_end, "Time horizon")->check(CLI::PositiveNumber);
    g.x_max_opt = app.add_option("--x-max", g.x_max, "Explosion threshold")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output directory (default: standard output)");
    g.format_opt = app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    std::string spec_file, measure_file, convention = "symmetric", from, to, path_file, config_file;
    std::string dt_list = "1e-2,1e-3,1e-4", eps_list;
    std::vector<std::string> params;
    std::vector<double> points;
    double b_value = 1.0, grid_lo = -2.0, grid_hi = 2.0, y = 0.0;
    std::size_t grid_n = 401, path_index = 0;
    bool write_paths = false;
    std::string scenario_name;

    auto* classify = app.add_subcommand("classify", "Classify points of a drift measure");
    auto* classify_spec = classify->add_option("--spec", spec_file, "Model config (measure, convention, b)");
    classify->add_option("--measure", measure_file, "Measure config")->excludes(classify_spec);
    classify->add_option("--convention", convention, "right, left or symmetric");
    classify->add_option("--b", b_value, "Constant diffusion coefficient");
    classify->add_option("--points", points, "Points to classify")->required();

    auto* convert = app.add_subcommand("convert", "Convert a measure between local-time conventions");
    convert->add_option("--measure", measure_file, "Measure config")->required();
    convert->add_option("--from", from, "Source convention")->required();
    convert->add_option("--to", to, "Target convention")->required();

    auto* transform = app.add_subcommand("transform", "Tabulate g, g(x-) and G over a grid");
    transform->add_option("--measure", measure_file, "Measure config")->required();
    transform->add_option("--convention", convention, "right, left or symmetric");
    transform->add_option("--from", grid_lo, "Grid start");
    transform->add_option("--to", grid_hi, "Grid end");
    transform->add_option("--points", grid_n, "Number of grid points");

    auto* simulate = app.add_subcommand("simulate", "Simulate paths and summarize terminal values");
    simulate->add_option("--spec", spec_file, "Model config")->required();
    simulate->add_flag("--write-paths", write_paths, "Write the (path_index, t, x) CSV");

    auto* estimate = app.add_subcommand("estimate-loctime", "Estimate a local time from a path CSV");
    estimate->add_option("--path", path_file, "Path CSV")->required();
    estimate->add_option("--path-index", path_index, "Which path of the file");
    estimate->add_option("--y", y, "Level");
    estimate->add_option("--convention", convention, "right, left or symmetric");
    estimate->add_option("--spec", spec_file, "Model config; its coefficient gives the quadratic variation");

    auto* scenario = app.add_subcommand("scenario", "Run a named scenario and its checks");
    scenario->add_option("name", scenario_name, "Scenario name")->required();
    scenario->add_option("--config", config_file, "Scenario config file");
    scenario->add_option("--param", params, "Scenario parameter key=value");

    auto* convergence = app.add_subcommand("convergence", "Refinement table for a scenario");
    convergence->add_option("name", scenario_name, "Scenario name")->required();
    convergence->add_option("--dt-list", dt_list, "Comma-separated time steps");
    convergence->add_option("--eps-list", eps_list, "Comma-separated windows (default 2 sqrt(dt))");
    convergence->add_option("--config", config_file, "Scenario config file");
    convergence->add_option("--param", params, "Scenario parameter key=value");

    auto* list = app.add_subcommand("list-scenarios", "List registered scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (classify->parsed()) {
            if (spec_file.empty() && measure_file.empty()) {
                throw gdrift::Error(gdrift::ErrorKind::ConfigError, "classify needs --spec or --measure");
            }
            return run_classify(g, spec_file, measure_file, convention, b_value, points);
        }
        if (convert->parsed()) return run_convert(g, measure_file, from, to);
        if (transform->parsed()) {
            if (!g.format_opt->count()) g.format = "csv";
            return run_transform(g, measure_file, convention, grid_lo, grid_hi, grid_n);
        }
        if (simulate->parsed()) return run_simulate(g, spec_file, write_paths);
        if (estimate->parsed()) return run_estimate(g, path_file, path_index, y, convention, spec_file);
        if (scenario->parsed()) return run_scenario_cmd(g, scenario_name, config_file, params);
        if (convergence->parsed()) return run_convergence_cmd(g, scenario_name, dt_list, eps_list, config_file, params);
        if (list->parsed()) return run_list(g);
    } catch (const gdrift::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
