#include "gdrift/io.hpp"

#include "gdrift/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gdrift::io {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

const Json& require(const Json& j, const char* key, const char* where) {
    if (!j.is_object()) config_error(std::string(where) + " must be an object");
    auto it = j.find(key);
    if (it == j.end()) config_error(std::string(where) + " lacks \"" + key + "\"");
    return *it;
}

double number(const Json& j, const char* what) {
    if (!j.is_number()) config_error(std::string(what) + " must be a number");
    return j.get<double>();
}

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> known, const char* where) {
    if (!j.is_object()) config_error(std::string(where) + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) config_error(std::string(where) + ": unknown key \"" + it.key() + "\"");
    }
}

std::vector<double> number_list(const Json& j, const char* what) {
    if (!j.is_array()) config_error(std::string(what) + " must be an array");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, what));
    return out;
}

}  // namespace

Json measure_to_json(const DriftMeasure& nu) {
    Json atoms = Json::array();
    for (const auto& a : nu.atoms()) atoms.push_back({{"at", a.at}, {"weight", a.weight}});
    Json density = Json::array();
    for (const auto& p : nu.density()) density.push_back({{"from", p.from}, {"to", p.to}, {"value", p.value}});
    return {{"atoms", atoms}, {"density", density}};
}

DriftMeasure measure_from_json(const Json& j) {
    if (!j.is_object()) config_error("measure must be an object");
    reject_unknown_keys(j, {"atoms", "density"}, "measure");
    std::vector<Atom> atoms;
    std::vector<DensityPiece> density;
    if (auto it = j.find("atoms"); it != j.end()) {
        if (!it->is_array()) config_error("measure.atoms must be an array");
        for (const auto& a : *it) {
            reject_unknown_keys(a, {"at", "weight"}, "atom");
            atoms.push_back({number(require(a, "at", "atom"), "atom.at"),
                             number(require(a, "weight", "atom"), "atom.weight")});
        }
    }
    if (auto it = j.find("density"); it != j.end()) {
        if (!it->is_array()) config_error("measure.density must be an array");
        for (const auto& p : *it) {
            reject_unknown_keys(p, {"from", "to", "value"}, "density piece");
            density.push_back({number(require(p, "from", "density piece"), "density.from"),
                               number(require(p, "to", "density piece"), "density.to"),
                               number(require(p, "value", "density piece"), "density.value")});
        }
    }
    try {
        return DriftMeasure(std::move(atoms), std::move(density));
    } catch (const Error& e) {
        config_error(e.what());
    }
}

Json coefficient_to_json(const Coefficient& b) {
    if (b.tag() == "constant") return {{"type", "constant"}, {"value", b.values().front()}};
    if (b.tag() == "indicator_positive") return {{"type", "indicator_positive"}};
    Json points = Json::array();
    for (const auto& p : b.points()) points.push_back({{"at", p.at}, {"value", p.value}});
    return {{"type", "table"}, {"breakpoints", b.breakpoints()}, {"values", b.values()}, {"points", points}};
}

Coefficient coefficient_from_json(const Json& j) {
    if (j.is_number()) return Coefficient::constant(j.get<double>());
    const Json& type = require(j, "type", "coefficient");
    if (!type.is_string()) config_error("coefficient.type must be a string");
    const auto name = type.get<std::string>();
    try {
        if (name == "constant") {
            reject_unknown_keys(j, {"type", "value"}, "coefficient");
            return Coefficient::constant(number(require(j, "value", "coefficient"), "coefficient.value"));
        }
        if (name == "indicator_positive") {
            reject_unknown_keys(j, {"type"}, "coefficient");
            return Coefficient::indicator_positive();
        }
        if (name == "table") {
            reject_unknown_keys(j, {"type", "breakpoints", "values", "points"}, "coefficient");
            std::vector<double> breakpoints;
            if (auto it = j.find("breakpoints"); it != j.end()) breakpoints = number_list(*it, "coefficient.breakpoints");
            auto values = number_list(require(j, "values", "coefficient"), "coefficient.values");
            std::vector<Coefficient::PointValue> points;
            if (auto it = j.find("points"); it != j.end()) {
                if (!it->is_array()) config_error("coefficient.points must be an array");
                for (const auto& p : *it) {
                    reject_unknown_keys(p, {"at", "value"}, "coefficient point");
                    points.push_back({number(require(p, "at", "coefficient point"), "point.at"),
                                      number(require(p, "value", "coefficient point"), "point.value")});
                }
            }
            return Coefficient::table(std::move(breakpoints), std::move(values), std::move(points));
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigError) throw;
        config_error(e.what());
    }
    config_error("unknown coefficient type \"" + name + "\"");
}

Json spec_to_json(const SdeSpec& spec) {
    return {{"measure", measure_to_json(spec.nu)},
            {"convention", std::string(to_string(spec.convention))},
            {"x0", spec.x0},
            {"b", coefficient_to_json(spec.b)}};
}

SdeSpec spec_from_json(const Json& j) {
    if (!j.is_object()) config_error("model config must be an object");
    reject_unknown_keys(j, {"measure", "convention", "x0", "b"}, "spec");
    SdeSpec spec;
    if (auto it = j.find("measure"); it != j.end()) spec.nu = measure_from_json(*it);
    if (auto it = j.find("convention"); it != j.end()) {
        if (!it->is_string()) config_error("spec.convention must be a string");
        spec.convention = parse_convention(it->get<std::string>());
    }
    if (auto it = j.find("x0"); it != j.end()) spec.x0 = number(*it, "spec.x0");
    if (auto it = j.find("b"); it != j.end()) spec.b = coefficient_from_json(*it);
    return spec;
}

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        config_error(std::string("malformed JSON: ") + e.what());
    }
}

Json read_json_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) config_error("cannot open " + file);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_json(text.str());
}

void write_text_file(const std::string& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) config_error("cannot write " + file);
    out << text;
    if (!out) config_error("failed writing " + file);
}

std::string csv_config_header(const Json& config) { return "# config: " + config.dump() + "\n"; }

void write_paths_csv(std::ostream& out, std::span<const Path> paths, std::size_t first_index, bool column_header) {
    char buf[96];
    if (column_header) out << "path_index,t,x\n";
    for (std::size_t k = 0; k < paths.size(); ++k) {
        const Path& p = paths[k];
        for (std::size_t i = 0; i < p.values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", first_index + k, p.time(i), p.values[i]);
            out << buf;
        }
    }
}

Path read_path_csv(std::istream& in, std::size_t path_index) {
    Path path;
    std::vector<double> times;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("path_index", 0) == 0) continue;
        std::istringstream row(line);
        std::string f0, f1, f2;
        if (!std::getline(row, f0, ',') || !std::getline(row, f1, ',') || !std::getline(row, f2)) {
            config_error("path CSV line " + std::to_string(line_no) + " needs three columns");
        }
        std::size_t index = 0;
        double t = 0.0, x = 0.0;
        try {
            index = std::stoull(f0);
            t = std::stod(f1);
            x = std::stod(f2);
        } catch (const std::exception&) {
            config_error("path CSV line " + std::to_string(line_no) + " is not numeric");
        }
        if (index != path_index) continue;
        times.push_back(t);
        path.values.push_back(x);
    }
    if (path.values.size() < 2) {
        throw Error(ErrorKind::InsufficientPathData,
                    "path " + std::to_string(path_index) + " has fewer than two points");
    }
    path.dt = times[1] - times[0];
    if (!(path.dt > 0.0)) config_error("path CSV times must increase");
    return path;
}

}  // namespace gdrift::io
