#include "gdrift/io.hpp"

#include "support.hpp"

#include <sstream>

using namespace gdrift;

TEST_CASE("specs round-trip through JSON text") {
    const SdeSpec spec{Coefficient::table({0.0, 1.25}, {1.0, 0.5, 2.0}, {{0.5, 3.0}}),
                       DriftMeasure({{0.123456789012, -0.987654321098}, {2.5, 0.5}}, {{-1.0, 0.75, 0.333333333333}}),
                       Convention::Left, 0.314159265359};
    const auto text = io::spec_to_json(spec).dump();
    const SdeSpec back = io::spec_from_json(io::parse_json(text));
    CHECK(back.nu == spec.nu);
    CHECK(back.convention == spec.convention);
    CHECK(back.x0 == spec.x0);
    CHECK(back.b.tag() == "table");
    CHECK(back.b.breakpoints() == spec.b.breakpoints());
    CHECK(back.b.values() == spec.b.values());
    CHECK(back.b(0.5) == 3.0);
    CHECK(io::spec_to_json(back).dump() == text);
}

TEST_CASE("model config defaults and coefficient shorthands") {
    const SdeSpec s = io::spec_from_json(io::parse_json(R"({"measure": {"atoms": [{"at": 0, "weight": 0.5}]}, "convention": "right"})"));
    CHECK(s.x0 == 0.0);
    CHECK(s.b(3.0) == 1.0);
    CHECK(s.nu == DriftMeasure::dirac(0.0, 0.5));
    CHECK(io::coefficient_from_json(io::parse_json("2.5"))(0.0) == 2.5);
    CHECK(io::coefficient_from_json(io::parse_json(R"({"type": "indicator_positive"})"))(0.0) == 0.0);
    CHECK(io::coefficient_from_json(io::parse_json(R"({"type": "constant", "value": 4})"))(-9.0) == 4.0);
}

TEST_CASE("configuration errors") {
    const char* bad[] = {
        R"({"measure": {}, "convention": "right", "extra": 1})",
        R"({"measure": {"atoms": [{"at": 0}]}, "convention": "right"})",
        R"({"measure": {"atoms": [{"at": "zero", "weight": 1}]}, "convention": "right"})",
        R"({"measure": {}, "convention": "upward"})",
        R"({"measure": {"density": [{"from": 0, "to": 2, "value": 1}, {"from": 1, "to": 3, "value": 1}]}, "convention": "right"})",
        R"({"measure": {}, "convention": "right", "b": {"type": "table", "values": [1, 2]}})",
        R"({"measure": {}, "convention": "right", "b": {"type": "wavy"}})",
        R"([1, 2])",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_KIND(io::spec_from_json(io::parse_json(text)), ErrorKind::ConfigError);
    }
    CHECK_THROWS_KIND(io::parse_json("{\"measure\": "), ErrorKind::ConfigError);
    CHECK_THROWS_KIND(io::read_json_file("/nonexistent/spec.json"), ErrorKind::ConfigError);
}

TEST_CASE("config header") {
    CHECK(io::csv_config_header(io::Json{{"seed", 1}}) == "# config: {\"seed\":1}\n");
}

TEST_CASE("path CSV round trip") {
    std::vector<Path> paths(2);
    for (std::size_t k = 0; k < 2; ++k) {
        paths[k].dt = 0.1;
        paths[k].values = {0.1 * k, 1.0 / 3.0, -2.0 / 7.0, 1e-300};
    }
    std::ostringstream out;
    out << io::csv_config_header(io::Json::object());
    io::write_paths_csv(out, paths, 5);
    const std::string text = out.str();
    CHECK(text.find("path_index,t,x\n") != std::string::npos);

    std::istringstream in(text);
    const Path p = io::read_path_csv(in, 6);
    CHECK(p.values == paths[1].values);
    CHECK(p.dt == doctest::Approx(0.1));
    CHECK(p.qv_increments.empty());

    std::istringstream missing(text);
    CHECK_THROWS_KIND(io::read_path_csv(missing, 9), ErrorKind::InsufficientPathData);
    std::istringstream junk("path_index,t,x\n0,0,abc\n");
    CHECK_THROWS_KIND(io::read_path_csv(junk, 0), ErrorKind::ConfigError);
}
