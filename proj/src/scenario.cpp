#include "gdrift/scenario.hpp"

#include "gdrift/classify.hpp"
#include "gdrift/error.hpp"
#include "gdrift/loctime.hpp"
#include "gdrift/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace gdrift {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum Salt : std::uint64_t { kMain = 1, kOracle = 2, kSecond = 3, kThird = 4 };

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

template <class T>
std::vector<T> per_path(std::size_t n, const std::function<T(std::size_t)>& body) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = body(i); });
    return out;
}

template <class T, class F>
std::vector<double> column(const std::vector<T>& rows, F field) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(field(r));
    return out;
}

double mean_of(const std::vector<double>& xs) { return stats::moments(xs).mean; }

double path_min(const Path& p) { return *std::min_element(p.values.begin(), p.values.end()); }
double path_max(const Path& p) { return *std::max_element(p.values.begin(), p.values.end()); }

double max_abs(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::abs(x));
    return m;
}

/// Terminal values of the main simulation of a spec.
std::vector<double> simulate_terminals(const SdeSpec& spec, const McParams& mc, std::uint64_t salt) {
    const PathSimulator sim(spec, mc.x_max);
    const std::uint64_t seed = mix_seed(mc.seed, salt);
    return per_path<double>(mc.n_paths, [&](std::size_t i) {
        RngStream rng(seed, i);
        return sim.simulate(mc.t_end, mc.dt, rng).terminal();
    });
}

std::vector<double> normal_terminals(double x0, const McParams& mc, std::uint64_t salt) {
    const std::uint64_t seed = mix_seed(mc.seed, salt);
    const double scale = std::sqrt(mc.t_end);
    return per_path<double>(mc.n_paths, [&](std::size_t i) {
        RngStream rng(seed, i);
        return x0 + scale * rng.normal();
    });
}

std::vector<double> reflected_bm_terminals(const McParams& mc, std::uint64_t salt) {
    const std::uint64_t seed = mix_seed(mc.seed, salt);
    return per_path<double>(mc.n_paths, [&](std::size_t i) {
        RngStream rng(seed, i);
        return simulate_reflected_bm(mc.t_end, mc.dt, rng).terminal();
    });
}

std::vector<double> skew_walk_terminals(double beta, std::size_t steps, const McParams& mc, std::uint64_t salt) {
    const std::uint64_t seed = mix_seed(mc.seed, salt);
    const double scale = std::sqrt(mc.t_end);
    return per_path<double>(mc.n_paths, [&](std::size_t i) {
        RngStream rng(seed, i);
        return scale * simulate_skew_walk(beta, steps, rng).terminal();
    });
}

double fraction_positive(const std::vector<double>& xs) {
    const auto k = std::count_if(xs.begin(), xs.end(), [](double x) { return x > 0.0; });
    return static_cast<double>(k) / static_cast<double>(xs.size());
}

// --- scenario definitions --------------------------------------------------

struct Context {
    const ScenarioInfo& info;
    McParams mc;
    ScenarioParams params;
    io::Json models = io::Json::object();
    std::vector<Check> checks;

    double p(const char* key) const { return params.at(key); }
    void add(std::string name, double statistic, Relation relation, double tolerance) {
        checks.push_back(make_check(std::move(name), statistic, relation, tolerance));
    }
};

SdeSpec unit_spec(DriftMeasure nu, Convention conv, double x0) {
    return {Coefficient::constant(1.0), std::move(nu), conv, x0};
}

SdeSpec two_sided_spec(const ScenarioParams& p) {
    const double r1 = p.at("r1"), r2 = p.at("r2"), x0 = p.at("x0");
    if (!(r1 < r2)) config_error("two_sided_reflection needs r1 < r2");
    if (!(x0 >= r1 && x0 <= r2)) config_error("two_sided_reflection needs r1 <= x0 <= r2");
    return unit_spec(DriftMeasure({{r1, 1.0}, {r2, -1.0}}, {}), Convention::Symmetric, x0);
}

SdeSpec absorbing_spec() {
    return {Coefficient::table({}, {1.0}, {{0.0, 0.0}}), DriftMeasure::dirac(0.0, 0.75), Convention::Right, 0.0};
}

/// Main model of each scenario.
SdeSpec build_spec(const std::string& name, const ScenarioParams& p) {
    if (name == "brownian") return unit_spec({}, Convention::Symmetric, p.at("x0"));
    if (name == "harrison_shepp_skew") {
        const double beta = p.at("beta");
        if (!(std::abs(beta) <= 1.0)) config_error("harrison_shepp_skew needs |beta| <= 1");
        return unit_spec(DriftMeasure::dirac(0.0, beta), Convention::Symmetric, 0.0);
    }
    if (name == "reflect_one_sided") return unit_spec(DriftMeasure::dirac(0.0, 1.0), Convention::Symmetric, 0.0);
    if (name == "reflect_right_half") return unit_spec(DriftMeasure::dirac(0.0, 0.5), Convention::Right, 0.0);
    if (name == "absorb") return absorbing_spec();
    if (name == "no_solution") return unit_spec(DriftMeasure::dirac(0.0, 0.75), Convention::Right, p.at("hit_x0"));
    if (name == "two_sided_reflection") return two_sided_spec(p);
    if (name == "chitashvili") {
        return {Coefficient::indicator_positive(), DriftMeasure::dirac(0.0, 0.5), Convention::Right, 0.0};
    }
    if (name == "conversion_equivalence") {
        return unit_spec(DriftMeasure::dirac(0.0, p.at("a")), Convention::Right, 0.0);
    }
    throw Error(ErrorKind::UnknownScenario, "unknown scenario \"" + name + "\"");
}

/// Terminal values of the law the main model is compared against, if any.
std::optional<std::vector<double>> oracle_terminals(const std::string& name, const ScenarioParams& p,
                                                    const McParams& mc) {
    if (name == "brownian") return normal_terminals(p.at("x0"), mc, kOracle);
    if (name == "harrison_shepp_skew") {
        return skew_walk_terminals(p.at("beta"), static_cast<std::size_t>(p.at("walk_steps")), mc, kOracle);
    }
    if (name == "reflect_one_sided" || name == "reflect_right_half" || name == "chitashvili") {
        return reflected_bm_terminals(mc, kOracle);
    }
    if (name == "conversion_equivalence") {
        const SdeSpec right = build_spec(name, p);
        SdeSpec sym = right;
        sym.nu = convert_measure(right.nu, Convention::Right, Convention::Symmetric);
        sym.convention = Convention::Symmetric;
        return simulate_terminals(sym, mc, kSecond);
    }
    return std::nullopt;
}

void run_brownian(Context& ctx) {
    const SdeSpec spec = build_spec("brownian", ctx.params);
    ctx.models["main"] = io::spec_to_json(spec);
    const McParams& mc = ctx.mc;
    const PathSimulator sim(spec, mc.x_max);
    const std::uint64_t seed = mix_seed(mc.seed, kMain);

    struct Row {
        double terminal, residual, local_time, occupation;
        bool support_ok;
    };
    const double half = 0.5 * mc.epsilon;
    const auto rows = per_path<Row>(mc.n_paths, [&](std::size_t i) {
        RngStream rng(seed, i);
        const Path path = sim.simulate(mc.t_end, mc.dt, rng);
        double occupation = 0.0;
        for (std::size_t k = 0; k < path.steps(); ++k) {
            if (std::abs(path.values[k] - spec.x0) < half) occupation += path.dt;
        }
        const auto far = estimate_local_time(path, path_max(path) + 1.0, Convention::Right, mc.epsilon);
        return Row{path.terminal(), max_abs(tanaka_residual(path, spec, mc.epsilon)),
                   estimate_local_time(path, spec.x0, Convention::Symmetric, mc.epsilon).final(),
                   occupation / (2.0 * half), check_support_property(far, path)};
    });

    const auto terminals = column(rows, [](const Row& r) { return r.terminal; });
    const double se = std::sqrt(mc.t_end / static_cast<double>(mc.n_paths));
    ctx.add("terminal_mean_zscore", std::abs(mean_of(terminals) - spec.x0) / se, Relation::AtMost, 3.0);
    ctx.add("ks_vs_normal_p_value", stats::ks_two_sample(terminals, normal_terminals(spec.x0, mc, kOracle)).p_value,
            Relation::AtLeast, 0.01);
    ctx.add("tanaka_residual_max", max_abs(column(rows, [](const Row& r) { return r.residual; })), Relation::AtMost,
            1e-10);
    const double lt = mean_of(column(rows, [](const Row& r) { return r.local_time; }));
    const double occ = mean_of(column(rows, [](const Row& r) { return r.occupation; }));
    ctx.add("local_time_vs_occupation_relative_gap", std::abs(lt - occ) / occ, Relation::AtMost, 0.25);
    ctx.add("support_property_failures",
            static_cast<double>(std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.support_ok; })),
            Relation::Equal, 0.0);
}

void run_skew(Context& ctx) {
    const SdeSpec spec = build_spec("harrison_shepp_skew", ctx.params);
    ctx.models["main"] = io::spec_to_json(spec);
    const McParams& mc = ctx.mc;
    const double beta = ctx.p("beta");
    const PathSimulator sim(spec, mc.x_max);
    const std::uint64_t seed = mix_seed(mc.seed, kMain);

    struct Row {
        double terminal, l_plus, l_minus, l_sym;
    };
    const auto rows = per_path<Row>(mc.n_paths, [&](std::size_t i) {
        RngStream rng(seed, i);
        const Path path = sim.simulate(mc.t_end, mc.dt, rng);
        return Row{path.terminal(), estimate_local_time(path, 0.0, Convention::Right, mc.epsilon).final(),
                   estimate_local_time(path, 0.0, Convention::Left, mc.epsilon).final(),
                   estimate_local_time(path, 0.0, Convention::Symmetric, mc.epsilon).final()};
    });
    const auto terminals = column(rows, [](const Row& r) { return r.terminal; });
    const auto walk = skew_walk_terminals(beta, static_cast<std::size_t>(ctx.p("walk_steps")), mc, kOracle);

    ctx.add("ks_vs_skew_walk_p_value", stats::ks_two_sample(terminals, walk).p_value, Relation::AtLeast, 0.01);
    const double p_sim = fraction_positive(terminals);
    const double p_walk = fraction_positive(walk);
    const double pooled = 0.5 * (p_sim + p_walk);
    const double se = std::sqrt(pooled * (1.0 - pooled) * 2.0 / static_cast<double>(mc.n_paths));
    ctx.add("positive_fraction_zscore", se > 0.0 ? std::abs(p_sim - p_walk) / se : 0.0, Relation::AtMost, 3.0);

    const double lp = mean_of(column(rows, [](const Row& r) { return r.l_plus; }));
    const double lm = mean_of(column(rows, [](const Row& r) { return r.l_minus; }));
    const double ls = mean_of(column(rows, [](const Row& r) { return r.l_sym; }));
    if (std::abs(beta) < 1.0) {
        const auto rel = local_time_relation(beta, Convention::Symmetric);
        const double rhs = rel.c_minus * lm;
        ctx.add("local_time_ratio_relative_gap", std::abs(rel.c_plus * lp - rhs) / rhs, Relation::AtMost, 0.10);
    }
    ctx.add("local_time_jump_relative_gap", std::abs((lp - lm) - 2.0 * beta * ls) / ls, Relation::AtMost, 0.10);
    if (beta == 0.0) {
        ctx.add("ks_vs_normal_p_value", stats::ks_two_sample(terminals, normal_terminals(0.0, mc, kThird)).p_value,
                Relation::AtLeast, 0.01);
    }
}

void run_reflecting(Context& ctx, const std::string& name) {
    const SdeSpec spec = build_spec(name, ctx.params);
    ctx.models["main"] = io::spec_to_json(spec);
    const McParams& mc = ctx.mc;
    const PathSimulator sim(spec, mc.x_max);
    const std::uint64_t seed = mix_seed(mc.seed, kMain);

    struct Row {
        double terminal, min, l_plus, l_minus;
        bool support_ok;
    };
    const auto rows = per_path<Row>(mc.n_paths, [&](std::size_t i) {
        RngStream rng(seed, i);
        const Path path = sim.simulate(mc.t_end, mc.dt, rng);
        const auto below = estimate_local_time(path, -0.5, spec.convention, mc.epsilon);
        return Row{path.terminal(), path_min(path),
                   estimate_local_time(path, 0.0, Convention::Right, mc.epsilon).final(),
                   estimate_local_time(path, 0.0, Convention::Left, mc.epsilon).final(),
                   check_support_property(below, path) && below.final() == 0.0};
    });
    const auto terminals = column(rows, [](const Row& r) { return r.terminal; });
    const auto mins = column(rows, [](const Row& r) { return r.min; });

    ctx.add("min_value", *std::min_element(mins.begin(), mins.end()), Relation::AtLeast, 0.0);
    ctx.add("ks_vs_reflected_bm_p_value", stats::ks_two_sample(terminals, reflected_bm_terminals(mc, kOracle)).p_value,
            Relation::AtLeast, 0.01);
    ctx.add("support_failures_below_zero",
            static_cast<double>(std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.support_ok; })),
            Relation::Equal, 0.0);
    // Only the starting point lies in the left window.
    ctx.add("left_local_time_mean", mean_of(column(rows, [](const Row& r) { return r.l_minus; })), Relation::AtMost,
            mc.dt / mc.epsilon * (1.0 + 1e-9));

    if (name == "chitashvili") {
        const double drift = 0.5 * mean_of(column(rows, [](const Row& r) { return r.l_plus; }));
        const double expected = std::sqrt(2.0 * mc.t_end / std::numbers::pi);
        ctx.add("drift_term_relative_gap", std::abs(drift - expected) / expected, Relation::AtMost, 0.05);
    }
}

void run_absorb(Context& ctx) {
    const SdeSpec spec = absorbing_spec();
    ctx.models["main"] = io::spec_to_json(spec);
    const McParams& mc = ctx.mc;
    const PathSimulator sim(spec, mc.x_max);
    const std::uint64_t seed = mix_seed(mc.seed, kMain);

    struct Row {
        double displacement, qv, residual, local_time;
        bool absorbed;
    };
    const auto rows = per_path<Row>(mc.n_paths, [&](std::size_t i) {
        RngStream rng(seed, i);
        const Path path = sim.simulate(mc.t_end, mc.dt, rng);
        double displacement = 0.0;
        for (double x : path.values) displacement = std::max(displacement, std::abs(x - spec.x0));
        return Row{displacement, max_abs(path.qv_increments), max_abs(tanaka_residual(path, spec, mc.epsilon)),
                   estimate_local_time(path, 0.0, Convention::Symmetric, mc.epsilon).final(),
                   path.status.kind == PathStatusKind::Absorbed};
    });
    ctx.add("start_is_absorbing", sim.start_class() == PointClass::Absorbing ? 1.0 : 0.0, Relation::Equal, 1.0);
    ctx.add("max_displacement", max_abs(column(rows, [](const Row& r) { return r.displacement; })), Relation::Equal,
            0.0);
    ctx.add("max_qv_increment", max_abs(column(rows, [](const Row& r) { return r.qv; })), Relation::Equal, 0.0);
    ctx.add("absorbed_fraction", mean_of(column(rows, [](const Row& r) { return r.absorbed ? 1.0 : 0.0; })),
            Relation::Equal, 1.0);
    ctx.add("tanaka_residual_max", max_abs(column(rows, [](const Row& r) { return r.residual; })), Relation::Equal,
            0.0);
    ctx.add("local_time_max", max_abs(column(rows, [](const Row& r) { return r.local_time; })), Relation::Equal, 0.0);
}

void run_no_solution(Context& ctx) {
    const SdeSpec spec = build_spec("no_solution", ctx.params);
    SdeSpec at_zero = spec;
    at_zero.x0 = 0.0;
    ctx.models["refused"] = io::spec_to_json(at_zero);
    ctx.models["main"] = io::spec_to_json(spec);
    const McParams& mc = ctx.mc;

    double refused = 0.0;
    try {
        PathSimulator probe(at_zero, mc.x_max);
    } catch (const Error& e) {
        refused = e.kind() == ErrorKind::NoSolutionAtStart ? 1.0 : 0.0;
    }
    ctx.add("refused", refused, Relation::Equal, 1.0);

    const PathSimulator sim(spec, mc.x_max);
    const std::uint64_t seed = mix_seed(mc.seed, kMain);
    struct Row {
        bool hit;
        bool truncated_at_point;
        double min;
    };
    const auto rows = per_path<Row>(mc.n_paths, [&](std::size_t i) {
        RngStream rng(seed, i);
        const Path path = sim.simulate(mc.t_end, mc.dt, rng);
        const bool hit = path.status.kind == PathStatusKind::NoSolutionHit;
        return Row{hit, !hit || (path.terminal() == 0.0 && path.values.size() == path.status.step + 1),
                   path_min(path)};
    });
    ctx.add("no_solution_hit_fraction", mean_of(column(rows, [](const Row& r) { return r.hit ? 1.0 : 0.0; })),
            Relation::AtLeast, 0.01);
    ctx.add("untruncated_hits",
            static_cast<double>(std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.truncated_at_point; })),
            Relation::Equal, 0.0);
    const auto mins = column(rows, [](const Row& r) { return r.min; });
    ctx.add("min_value", *std::min_element(mins.begin(), mins.end()), Relation::AtLeast, 0.0);
}

void run_two_sided(Context& ctx) {
    const SdeSpec spec = two_sided_spec(ctx.params);
    ctx.models["main"] = io::spec_to_json(spec);
    const McParams& mc = ctx.mc;
    const double r1 = ctx.p("r1"), r2 = ctx.p("r2");
    const PathSimulator sim(spec, mc.x_max);
    const std::uint64_t seed = mix_seed(mc.seed, kMain);

    struct Row {
        bool inside;
        bool both_positive;
    };
    const auto rows = per_path<Row>(mc.n_paths, [&](std::size_t i) {
        RngStream rng(seed, i);
        const Path path = sim.simulate(mc.t_end, mc.dt, rng);
        const bool inside = path_min(path) >= r1 && path_max(path) <= r2;
        const double low = estimate_local_time(path, r1, spec.convention, mc.epsilon).final();
        const double high = estimate_local_time(path, r2, spec.convention, mc.epsilon).final();
        return Row{inside, low > 0.0 && high > 0.0};
    });
    ctx.add("paths_outside_interval",
            static_cast<double>(std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.inside; })),
            Relation::Equal, 0.0);
    ctx.add("both_boundary_local_times_positive_fraction",
            mean_of(column(rows, [](const Row& r) { return r.both_positive ? 1.0 : 0.0; })), Relation::AtLeast, 0.99);
}

void run_conversion(Context& ctx) {
    const SdeSpec right = build_spec("conversion_equivalence", ctx.params);
    SdeSpec sym = right;
    sym.nu = convert_measure(right.nu, Convention::Right, Convention::Symmetric);
    sym.convention = Convention::Symmetric;
    SdeSpec left = right;
    left.nu = convert_measure(right.nu, Convention::Right, Convention::Left);
    left.convention = Convention::Left;
    ctx.models["main"] = io::spec_to_json(right);
    ctx.models["symmetric"] = io::spec_to_json(sym);
    ctx.models["left"] = io::spec_to_json(left);

    const auto x_right = simulate_terminals(right, ctx.mc, kMain);
    const auto x_sym = simulate_terminals(sym, ctx.mc, kSecond);
    const auto x_left = simulate_terminals(left, ctx.mc, kThird);
    ctx.add("ks_right_vs_symmetric_p_value", stats::ks_two_sample(x_right, x_sym).p_value, Relation::AtLeast, 0.01);
    ctx.add("ks_right_vs_left_p_value", stats::ks_two_sample(x_right, x_left).p_value, Relation::AtLeast, 0.01);

    // The symmetric model is skew Brownian motion, which is positive at time t
    // with probability (1 + weight) / 2.
    const double expected = 0.5 * (1.0 + sym.nu.atom_weight(0.0));
    const double se = std::sqrt(expected * (1.0 - expected) / static_cast<double>(ctx.mc.n_paths));
    ctx.add("positive_fraction_zscore", std::abs(fraction_positive(x_right) - expected) / se, Relation::AtMost, 3.0);
}

ScenarioParams merged_params(const ScenarioInfo& info, const ScenarioParams& given) {
    ScenarioParams out = info.params;
    for (const auto& [key, value] : given) {
        if (!out.contains(key)) config_error("scenario \"" + info.name + "\" has no parameter \"" + key + "\"");
        out[key] = value;
    }
    return out;
}

void validate(const McParams& mc) {
    if (mc.n_paths < 1) config_error("n_paths must be at least 1");
    if (!(mc.dt > 0.0)) config_error("dt must be positive");
    if (!(mc.epsilon > 0.0)) config_error("epsilon must be positive");
    if (!(mc.t_end >= mc.dt)) config_error("t_end must be at least dt");
    if (!(mc.x_max > 0.0)) config_error("x_max must be positive");
}

io::Json params_to_json(const ScenarioParams& params) {
    io::Json j = io::Json::object();
    for (const auto& [k, v] : params) j[k] = v;
    return j;
}

void append_number(std::string& out, double v) {
    char buf[40];
    if (std::isnan(v)) {
        out += "nan";
        return;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

io::Json number_or_null(double v) { return std::isfinite(v) ? io::Json(v) : io::Json(nullptr); }

}  // namespace

McParams apply_overrides(McParams mc, const ScenarioOverrides& o) {
    if (o.n_paths) mc.n_paths = *o.n_paths;
    if (o.dt) mc.dt = *o.dt;
    if (o.epsilon) mc.epsilon = *o.epsilon;
    if (o.t_end) mc.t_end = *o.t_end;
    if (o.seed) mc.seed = *o.seed;
    if (o.x_max) mc.x_max = *o.x_max;
    return mc;
}

ScenarioOverrides overrides_from_json(const io::Json& j) {
    if (!j.is_object()) config_error("scenario config must be an object");
    ScenarioOverrides o;
    auto number = [](const io::Json& v, const std::string& key) {
        if (!v.is_number()) config_error("\"" + key + "\" must be a number");
        return v.get<double>();
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const io::Json& v = it.value();
        if (key == "n_paths" || key == "seed") {
            if (!v.is_number_unsigned()) config_error("\"" + key + "\" must be a nonnegative integer");
            if (key == "n_paths") o.n_paths = v.get<std::size_t>();
            else o.seed = v.get<std::uint64_t>();
        } else if (key == "dt") {
            o.dt = number(v, key);
        } else if (key == "epsilon") {
            o.epsilon = number(v, key);
        } else if (key == "t_end") {
            o.t_end = number(v, key);
        } else if (key == "x_max") {
            o.x_max = number(v, key);
        } else if (key == "params") {
            if (!v.is_object()) config_error("\"params\" must be an object");
            for (auto p = v.begin(); p != v.end(); ++p) o.params[p.key()] = number(p.value(), p.key());
        } else {
            config_error("unknown scenario config key \"" + key + "\"");
        }
    }
    return o;
}

std::string_view to_string(Relation r) {
    switch (r) {
    case Relation::AtMost: return "<=";
    case Relation::AtLeast: return ">=";
    case Relation::Equal: return "==";
    }
    return "?";
}

Check make_check(std::string name, double statistic, Relation relation, double tolerance) {
    bool pass = false;
    switch (relation) {
    case Relation::AtMost: pass = statistic <= tolerance; break;
    case Relation::AtLeast: pass = statistic >= tolerance; break;
    case Relation::Equal: pass = statistic == tolerance; break;
    }
    return {std::move(name), statistic, relation, tolerance, pass};
}

bool Report::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

io::Json mc_to_json(const McParams& mc) {
    return {{"n_paths", mc.n_paths}, {"dt", mc.dt},       {"epsilon", mc.epsilon},
            {"t_end", mc.t_end},     {"seed", mc.seed},   {"x_max", mc.x_max}};
}

io::Json report_to_json(const Report& report) {
    io::Json checks = io::Json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"name", c.name},
                          {"statistic", number_or_null(c.statistic)},
                          {"relation", std::string(to_string(c.relation))},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
    }
    return {{"scenario", report.scenario},
            {"seed", report.mc.seed},
            {"config", report.config},
            {"checks", checks},
            {"passed", report.passed()}};
}

std::string report_to_csv(const Report& report) {
    std::string out = io::csv_config_header(report.config);
    out += "check,statistic,relation,tolerance,pass\n";
    for (const auto& c : report.checks) {
        out += c.name + ",";
        append_number(out, c.statistic);
        out += ",";
        out += to_string(c.relation);
        out += ",";
        append_number(out, c.tolerance);
        out += c.pass ? ",true\n" : ",false\n";
    }
    return out;
}

const std::vector<ScenarioInfo>& scenario_registry() {
    static const std::vector<ScenarioInfo> registry = [] {
        const McParams standard;
        return std::vector<ScenarioInfo>{
            {"brownian", "no drift measure: plain Brownian motion from x0", {{"x0", 0.0}}, standard},
            {"harrison_shepp_skew", "skew Brownian motion, symmetric local time, weight beta at 0",
             {{"beta", 0.5}, {"walk_steps", 10000.0}}, standard},
            {"reflect_one_sided", "unit atom at 0 with symmetric local time: reflection upward", {}, standard},
            {"reflect_right_half", "atom 1/2 at 0 with right local time: reflection upward", {}, standard},
            {"absorb", "atom 3/4 at 0 with right local time and b(0) = 0: absorption", {}, standard},
            {"no_solution", "atom 3/4 at 0 with right local time and b = 1: no solution once 0 is reached",
             {{"hit_x0", 1.0}}, standard},
            {"two_sided_reflection", "atoms +1 at r1 and -1 at r2, symmetric local time: confined to [r1, r2]",
             {{"r1", 0.0}, {"r2", 1.0}, {"x0", 0.5}}, standard},
            {"chitashvili", "b = 1 on (0, inf), atom 1/2 at 0 with right local time: stays nonnegative", {},
             standard},
            {"conversion_equivalence", "atom a at 0 under right, converted symmetric and converted left local times",
             {{"a", 0.25}}, standard},
        };
    }();
    return registry;
}

const ScenarioInfo& find_scenario(std::string_view name) {
    for (const auto& info : scenario_registry()) {
        if (info.name == name) return info;
    }
    throw Error(ErrorKind::UnknownScenario, "unknown scenario \"" + std::string(name) + "\"");
}

SdeSpec scenario_spec(std::string_view name, const ScenarioParams& params) {
    const ScenarioInfo& info = find_scenario(name);
    return build_spec(info.name, merged_params(info, params));
}

Report run_scenario(std::string_view name, const ScenarioOverrides& overrides) {
    const auto started = std::chrono::steady_clock::now();
    const ScenarioInfo& info = find_scenario(name);
    Context ctx{info, apply_overrides(info.mc, overrides), merged_params(info, overrides.params), io::Json::object(), {}};
    validate(ctx.mc);

    if (info.name == "brownian") run_brownian(ctx);
    else if (info.name == "harrison_shepp_skew") run_skew(ctx);
    else if (info.name == "reflect_one_sided" || info.name == "reflect_right_half" || info.name == "chitashvili")
        run_reflecting(ctx, info.name);
    else if (info.name == "absorb") run_absorb(ctx);
    else if (info.name == "no_solution") run_no_solution(ctx);
    else if (info.name == "two_sided_reflection") run_two_sided(ctx);
    else if (info.name == "conversion_equivalence") run_conversion(ctx);

    Report report;
    report.scenario = info.name;
    report.mc = ctx.mc;
    report.params = ctx.params;
    report.config = {{"scenario", info.name},
                     {"mc", mc_to_json(ctx.mc)},
                     {"params", params_to_json(ctx.params)},
                     {"models", ctx.models}};
    report.checks = std::move(ctx.checks);
    report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

ConvergenceTable convergence_study(std::string_view name, std::span<const double> dt_list,
                                   std::span<const double> eps_list, const ScenarioOverrides& overrides) {
    if (dt_list.empty() || eps_list.empty()) config_error("convergence study needs nonempty dt and epsilon lists");
    if (dt_list.size() != eps_list.size() && dt_list.size() != 1 && eps_list.size() != 1) {
        config_error("dt and epsilon lists must have equal length or length one");
    }
    const ScenarioInfo& info = find_scenario(name);
    McParams base = info.mc;
    base.n_paths = 1000;
    base = apply_overrides(base, overrides);
    const ScenarioParams params = merged_params(info, overrides.params);
    const SdeSpec spec = build_spec(info.name, params);

    ConvergenceTable table;
    table.scenario = info.name;
    table.mc = base;
    table.params = params;
    table.watched_point = spec.nu.atoms().empty() ? spec.x0 : spec.nu.atoms().front().at;
    const double y = table.watched_point;
    const auto relation = local_time_relation(spec.nu.atom_weight(y), spec.convention);

    const std::size_t rows = std::max(dt_list.size(), eps_list.size());
    io::Json dts = io::Json::array(), epss = io::Json::array();
    for (std::size_t r = 0; r < rows; ++r) {
        McParams mc = base;
        mc.dt = dt_list[dt_list.size() == 1 ? 0 : r];
        mc.epsilon = eps_list[eps_list.size() == 1 ? 0 : r];
        validate(mc);
        dts.push_back(mc.dt);
        epss.push_back(mc.epsilon);

        const PathSimulator sim(spec, mc.x_max);
        const std::uint64_t seed = mix_seed(mc.seed, kMain);
        struct Row {
            double terminal, residual, l_plus, l_minus, l_sym;
        };
        const auto out = per_path<Row>(mc.n_paths, [&](std::size_t i) {
            RngStream rng(seed, i);
            const Path path = sim.simulate(mc.t_end, mc.dt, rng);
            return Row{path.terminal(), std::abs(tanaka_residual(path, spec, mc.epsilon).back()),
                       estimate_local_time(path, y, Convention::Right, mc.epsilon).final(),
                       estimate_local_time(path, y, Convention::Left, mc.epsilon).final(),
                       estimate_local_time(path, y, Convention::Symmetric, mc.epsilon).final()};
        });
        const double lp = mean_of(column(out, [](const Row& o) { return o.l_plus; }));
        const double lm = mean_of(column(out, [](const Row& o) { return o.l_minus; }));
        const double ls = mean_of(column(out, [](const Row& o) { return o.l_sym; }));
        const double gap = ls > 0.0 ? std::abs(relation.c_plus * lp - relation.c_minus * lm) / ls : 0.0;

        double ks = kNaN;
        if (auto oracle = oracle_terminals(info.name, params, mc)) {
            ks = stats::ks_two_sample(column(out, [](const Row& o) { return o.terminal; }), *oracle).statistic;
        }
        table.rows.push_back({mc.dt, mc.epsilon, mean_of(column(out, [](const Row& o) { return o.residual; })), gap,
                              ks, lm});
    }

    table.residual_decreasing = true;
    table.left_local_time_decreasing = true;
    table.residual_negligible = true;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        table.residual_negligible = table.residual_negligible && table.rows[r].residual_mean <= 1e-10;
        if (r == 0) continue;
        table.residual_decreasing =
            table.residual_decreasing && table.rows[r].residual_mean < table.rows[r - 1].residual_mean;
        table.left_local_time_decreasing = table.left_local_time_decreasing &&
                                           table.rows[r].left_local_time_mean < table.rows[r - 1].left_local_time_mean;
    }
    io::Json mc_echo = mc_to_json(base);
    mc_echo["dt"] = dts;
    mc_echo["epsilon"] = epss;
    table.config = {{"scenario", info.name},
                    {"mc", mc_echo},
                    {"params", params_to_json(params)},
                    {"models", {{"main", io::spec_to_json(spec)}}}};
    return table;
}

io::Json convergence_to_json(const ConvergenceTable& table) {
    io::Json rows = io::Json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"dt", r.dt},
                        {"epsilon", r.epsilon},
                        {"residual_mean", r.residual_mean},
                        {"ratio_gap", number_or_null(r.ratio_gap)},
                        {"ks_statistic", number_or_null(r.ks_statistic)},
                        {"left_local_time_mean", r.left_local_time_mean}});
    }
    return {{"scenario", table.scenario},
            {"config", table.config},
            {"watched_point", table.watched_point},
            {"rows", rows},
            {"residual_decreasing", table.residual_decreasing},
            {"residual_negligible", table.residual_negligible},
            {"left_local_time_decreasing", table.left_local_time_decreasing}};
}

std::string convergence_to_csv(const ConvergenceTable& table) {
    std::string out = io::csv_config_header(table.config);
    out += "dt,epsilon,residual_mean,ratio_gap,ks_statistic,left_local_time_mean\n";
    for (const auto& r : table.rows) {
        for (double v : {r.dt, r.epsilon, r.residual_mean, r.ratio_gap, r.ks_statistic}) {
            append_number(out, v);
            out += ",";
        }
        append_number(out, r.left_local_time_mean);
        out += "\n";
    }
    return out;
}

}  // namespace gdrift
