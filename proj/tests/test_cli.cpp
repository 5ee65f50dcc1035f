#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& file) {
    std::ifstream in(file);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("gdrift_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run run(const std::string& args) {
    const auto out = scratch() / "stdout.txt";
    const auto err = scratch() / "stderr.txt";
    const std::string cmd = std::string("\"") + GDRIFT_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write_file(const std::string& name, const std::string& text) {
    const auto file = scratch() / name;
    std::ofstream(file) << text;
    return file;
}

}  // namespace

TEST_CASE("list-scenarios") {
    const auto r = run("list-scenarios");
    CHECK(r.code == 0);
    CHECK(r.out.find("harrison_shepp_skew") != std::string::npos);
    CHECK(r.out.find("chitashvili") != std::string::npos);
}

TEST_CASE("scenario exit codes") {
    const auto pass = run("scenario absorb --n-paths 100 --dt 1e-3");
    CHECK(pass.code == 0);
    const auto report = nlohmann::json::parse(pass.out);
    CHECK(report["passed"] == true);
    CHECK(report["config"]["mc"]["n_paths"] == 100);
    CHECK(pass.err.find("PASS ") != std::string::npos);

    const auto fail = run("scenario two_sided_reflection --n-paths 100 --dt 1e-3");
    CHECK(fail.code == 1);
    CHECK(fail.err.find("FAIL both_boundary_local_times_positive_fraction") != std::string::npos);

    CHECK(run("scenario nope").code == 2);
    CHECK(run("scenario brownian --n-paths 10 --dt 1e-2 --param colour=1").code == 2);
    CHECK(run("scenario brownian --bogus").code == 2);
    CHECK(run("scenario brownian --format xml").code == 2);
    const auto bad_config = write_file("bad.json", "{\"n_paths\": ");
    const auto err = run("scenario brownian --config \"" + bad_config.string() + "\"");
    CHECK(err.code == 2);
    CHECK(err.err.rfind("error: ", 0) == 0);
}

TEST_CASE("scenario reports written as files") {
    const auto dir = scratch() / "reports";
    const auto r = run("scenario brownian --n-paths 50 --dt 1e-2 --format csv --out \"" + dir.string() + "\"");
    CHECK(r.code == 0);
    const auto csv = slurp(dir / "brownian_report.csv");
    CHECK(csv.rfind("# config: {", 0) == 0);
    CHECK(csv.find("\ncheck,statistic,relation,tolerance,pass\n") != std::string::npos);
}

TEST_CASE("classify, convert and transform") {
    const auto measure = write_file("measure.json", R"({"atoms": [{"at": 0, "weight": 0.5}, {"at": 1, "weight": 0.25}]})");
    const auto c = run("classify --measure \"" + measure.string() + "\" --convention right --points 0 1 2");
    REQUIRE(c.code == 0);
    const auto rows = nlohmann::json::parse(c.out)["points"];
    CHECK(rows[0]["class"] == "ReflectingUp");
    CHECK(rows[1]["class"] == "Regular");

    const auto v = run("convert --measure \"" + measure.string() + "\" --from right --to symmetric");
    REQUIRE(v.code == 0);
    const auto converted = nlohmann::json::parse(v.out);
    CHECK(converted["convention"] == "symmetric");
    CHECK(converted["measure"]["atoms"][0]["weight"] == 1.0);

    const auto bad = write_file("bad_measure.json", R"({"atoms": [{"at": 0, "weight": 0.5}]})");
    CHECK(run("convert --measure \"" + bad.string() + "\" --from right --to left").code == 2);

    const auto dir = scratch() / "transform";
    const auto regular = write_file("regular.json", R"({"atoms": [{"at": 0, "weight": 0.25}], "density": [{"from": 0.5, "to": 1.5, "value": -0.5}]})");
    const auto t = run("transform --measure \"" + regular.string() + "\" --convention right --from -2 --to 2 --points 41 --out \"" +
                       dir.string() + "\"");
    REQUIRE(t.code == 0);
    CHECK(t.out.rfind("max_residual ", 0) == 0);
    const auto csv = slurp(dir / "transform.csv");
    CHECK(csv.rfind("# config: ", 0) == 0);
    CHECK(csv.find("\nx,g,g_minus,G\n") != std::string::npos);

    const auto violating = write_file("violating.json", R"({"atoms": [{"at": 0, "weight": 0.75}]})");
    CHECK(run("transform --measure \"" + violating.string() + "\" --convention right").code == 2);
}

TEST_CASE("simulate then estimate-loctime") {
    const auto spec = write_file("spec.json", R"({"measure": {"atoms": [{"at": 0, "weight": 0.3}]}, "convention": "symmetric"})");
    const auto dir = scratch() / "sim";
    const auto s = run("simulate --spec \"" + spec.string() + "\" --n-paths 3 --dt 1e-3 --write-paths --out \"" +
                       dir.string() + "\"");
    REQUIRE(s.code == 0);
    const auto paths = slurp(dir / "paths.csv");
    CHECK(paths.rfind("# config: ", 0) == 0);
    CHECK(paths.find("\npath_index,t,x\n") != std::string::npos);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["status_counts"]["Completed"] == 3);

    const auto again = run("simulate --spec \"" + spec.string() + "\" --n-paths 3 --dt 1e-3 --write-paths");
    CHECK(again.out == paths);

    const auto e = run("estimate-loctime --path \"" + (dir / "paths.csv").string() +
                       "\" --path-index 2 --y 0 --convention symmetric --eps 0.05");
    REQUIRE(e.code == 0);
    CHECK(e.out.rfind("# config: ", 0) == 0);
    CHECK(e.out.find("\"qv_source\":\"squared_increments\"") != std::string::npos);
    CHECK(e.out.find("\nt,L\n") != std::string::npos);
    CHECK(run("estimate-loctime --path \"" + (dir / "paths.csv").string() + "\" --path-index 7").code == 2);

    const auto refused = write_file("refused.json", R"({"measure": {"atoms": [{"at": 0, "weight": 0.75}]}, "convention": "right"})");
    const auto r = run("simulate --spec \"" + refused.string() + "\" --n-paths 1");
    CHECK(r.code == 2);
    CHECK(r.err.find("NoSolutionAtStart") != std::string::npos);
}

TEST_CASE("convergence") {
    const auto r = run("convergence harrison_shepp_skew --dt-list 1e-2,1e-3 --n-paths 100 --format csv");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("# config: ", 0) == 0);
    CHECK(r.out.find("\ndt,epsilon,residual_mean,ratio_gap,ks_statistic,left_local_time_mean\n") != std::string::npos);
    CHECK(run("convergence brownian --dt-list 1e-2,1e-3 --eps-list 0.1,0.2,0.3").code == 2);
}
