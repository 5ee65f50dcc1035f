#include "gdrift/scenario.hpp"

#include "support.hpp"

#include <set>

using namespace gdrift;

namespace {

ScenarioOverrides small(std::size_t n_paths = 200, double dt = 1e-3) {
    ScenarioOverrides o;
    o.n_paths = n_paths;
    o.dt = dt;
    o.epsilon = 0.05;
    return o;
}

const Check& find_check(const Report& r, const std::string& name) {
    for (const auto& c : r.checks) {
        if (c.name == name) return c;
    }
    throw std::runtime_error("missing check " + name);
}

}  // namespace

TEST_CASE("registry") {
    std::set<std::string> names;
    for (const auto& info : scenario_registry()) {
        names.insert(info.name);
        CHECK_FALSE(info.summary.empty());
        CHECK(info.mc.n_paths == 10000);
        CHECK(info.mc.dt == 1e-4);
        CHECK(info.mc.epsilon == 0.02);
        CHECK(info.mc.seed == 20240617);
    }
    CHECK(names == std::set<std::string>{"brownian", "harrison_shepp_skew", "reflect_one_sided", "reflect_right_half",
                                         "absorb", "no_solution", "two_sided_reflection", "chitashvili",
                                         "conversion_equivalence"});
    CHECK_THROWS_KIND(find_scenario("nope"), ErrorKind::UnknownScenario);
    CHECK_THROWS_KIND(run_scenario("nope"), ErrorKind::UnknownScenario);
}

TEST_CASE("scenario models") {
    CHECK(scenario_spec("harrison_shepp_skew", {{"beta", -0.5}}).nu == DriftMeasure::dirac(0.0, -0.5));
    CHECK(scenario_spec("reflect_right_half").convention == Convention::Right);
    const auto two = scenario_spec("two_sided_reflection", {{"r1", -1.0}, {"r2", 2.0}, {"x0", 0.0}});
    CHECK(two.nu == DriftMeasure({{-1.0, 1.0}, {2.0, -1.0}}, {}));
    CHECK(scenario_spec("chitashvili").b(0.0) == 0.0);
    CHECK_THROWS_KIND(scenario_spec("brownian", {{"colour", 1.0}}), ErrorKind::ConfigError);
    CHECK_THROWS_KIND(scenario_spec("harrison_shepp_skew", {{"beta", 2.0}}), ErrorKind::ConfigError);
    CHECK_THROWS_KIND(scenario_spec("two_sided_reflection", {{"r1", 1.0}, {"r2", 0.0}}), ErrorKind::ConfigError);
}

TEST_CASE("overrides") {
    const auto o = overrides_from_json(io::parse_json(R"({"n_paths": 7, "dt": 0.01, "seed": 3, "params": {"beta": 0.1}})"));
    const McParams mc = apply_overrides(McParams{}, o);
    CHECK(mc.n_paths == 7);
    CHECK(mc.dt == 0.01);
    CHECK(mc.seed == 3);
    CHECK(mc.epsilon == 0.02);
    CHECK(o.params.at("beta") == 0.1);
    CHECK_THROWS_KIND(overrides_from_json(io::parse_json(R"({"paths": 7})")), ErrorKind::ConfigError);
    CHECK_THROWS_KIND(overrides_from_json(io::parse_json(R"({"n_paths": "many"})")), ErrorKind::ConfigError);
    ScenarioOverrides bad = small();
    bad.dt = -1.0;
    CHECK_THROWS_KIND(run_scenario("brownian", bad), ErrorKind::ConfigError);
}

TEST_CASE("checks") {
    CHECK(make_check("a", 1.0, Relation::AtMost, 1.0).pass);
    CHECK_FALSE(make_check("a", 1.5, Relation::AtMost, 1.0).pass);
    CHECK(make_check("a", 2.0, Relation::AtLeast, 1.0).pass);
    CHECK(make_check("a", 0.0, Relation::Equal, 0.0).pass);
    CHECK_FALSE(make_check("a", NAN, Relation::AtMost, 1.0).pass);
}

TEST_CASE("reports are deterministic and carry their configuration") {
    for (const auto& info : scenario_registry()) {
        CAPTURE(info.name);
        auto o = small(100);
        if (info.name == "harrison_shepp_skew") o.params["walk_steps"] = 1000;
        const Report a = run_scenario(info.name, o);
        const Report b = run_scenario(info.name, o);
        CHECK(report_to_json(a).dump() == report_to_json(b).dump());
        CHECK(report_to_csv(a) == report_to_csv(b));
        CHECK_FALSE(a.checks.empty());
        CHECK(a.config["mc"]["n_paths"] == 100);
        CHECK(report_to_csv(a).rfind("# config: ", 0) == 0);
    }
    auto o = small(100);
    const Report base = run_scenario("brownian", o);
    o.seed = 77;
    CHECK(report_to_json(run_scenario("brownian", o)).dump() != report_to_json(base).dump());
}

TEST_CASE("small-sample scenario outcomes") {
    const Report absorb = run_scenario("absorb", small());
    CHECK(absorb.passed());
    CHECK(find_check(absorb, "max_displacement").statistic == 0.0);

    const Report refused = run_scenario("no_solution", small(400));
    CHECK(find_check(refused, "refused").pass);
    CHECK(find_check(refused, "no_solution_hit_fraction").statistic > 0.1);
    CHECK(find_check(refused, "untruncated_hits").statistic == 0.0);

    const Report reflect = run_scenario("reflect_one_sided", small());
    CHECK(find_check(reflect, "min_value").statistic >= 0.0);

    const Report two = run_scenario("two_sided_reflection", small());
    CHECK(find_check(two, "paths_outside_interval").statistic == 0.0);
}

TEST_CASE("convergence study") {
    const std::vector<double> dts = {1e-2, 1e-3}, eps = {0.2, 0.0632}, one = {0.05};
    auto o = small(300);
    const auto skew = convergence_study("harrison_shepp_skew", dts, eps, o);
    REQUIRE(skew.rows.size() == 2);
    CHECK(skew.rows[1].dt == 1e-3);
    CHECK(skew.rows[1].epsilon == 0.0632);
    CHECK(skew.watched_point == 0.0);
    CHECK(skew.residual_decreasing);
    CHECK_FALSE(skew.residual_negligible);

    const auto broadcast = convergence_study("brownian", dts, one, o);
    REQUIRE(broadcast.rows.size() == 2);
    CHECK(broadcast.rows[0].epsilon == 0.05);
    CHECK(broadcast.residual_negligible);

    const std::vector<double> fine = {1e-2, 1e-3, 1e-4}, fine_eps = {0.2, 0.0632, 0.02};
    const auto reflect = convergence_study("reflect_one_sided", fine, fine_eps, small(100));
    CHECK(reflect.left_local_time_decreasing);

    CHECK(convergence_to_csv(skew).rfind("# config: ", 0) == 0);
    CHECK(convergence_to_json(skew)["rows"].size() == 2);
    CHECK(convergence_study("brownian", dts, eps).mc.n_paths == 1000);

    const std::vector<double> three = {0.1, 0.2, 0.3};
    CHECK_THROWS_KIND(convergence_study("brownian", dts, three, o), ErrorKind::ConfigError);
    CHECK_THROWS_KIND(convergence_study("brownian", {}, eps, o), ErrorKind::ConfigError);
    CHECK_THROWS_KIND(convergence_study("nope", dts, eps, o), ErrorKind::UnknownScenario);
}
