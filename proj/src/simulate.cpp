#include "gdrift/simulate.hpp"

#include "gdrift/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iterator>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace gdrift {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// --- Coefficient -----------------------------------------------------------

Coefficient Coefficient::constant(double value) {
    Coefficient c = table({}, {value});
    c.tag_ = "constant";
    return c;
}

Coefficient Coefficient::table(std::vector<double> breakpoints, std::vector<double> values,
                               std::vector<PointValue> points) {
    if (values.size() != breakpoints.size() + 1) {
        throw Error(ErrorKind::IllPosedScenario,
                    "coefficient table needs exactly one more value than breakpoints");
    }
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()) ||
        std::adjacent_find(breakpoints.begin(), breakpoints.end()) != breakpoints.end()) {
        throw Error(ErrorKind::IllPosedScenario, "coefficient breakpoints must be strictly increasing");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(ErrorKind::IllPosedScenario, "non-finite coefficient value");
    }
    std::sort(points.begin(), points.end(),
              [](const PointValue& l, const PointValue& r) { return l.at < r.at; });
    Coefficient c;
    c.tag_ = "table";
    c.breakpoints_ = std::move(breakpoints);
    c.values_ = std::move(values);
    c.points_ = std::move(points);
    return c;
}

Coefficient Coefficient::indicator_positive() {
    Coefficient c = table({0.0}, {0.0, 1.0}, {{0.0, 0.0}});
    c.tag_ = "indicator_positive";
    return c;
}

double Coefficient::right_limit(double x) const {
    if (breakpoints_.empty()) return values_.front();
    const auto i = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin();
    return values_[static_cast<std::size_t>(i)];
}

double Coefficient::left_limit(double x) const {
    if (breakpoints_.empty()) return values_.front();
    const auto i = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin();
    return values_[static_cast<std::size_t>(i)];
}

double Coefficient::operator()(double x) const {
    if (!points_.empty()) {
        auto it = std::lower_bound(points_.begin(), points_.end(), x,
                                   [](const PointValue& p, double v) { return p.at < v; });
        if (it != points_.end() && it->at == x) return it->value;
    }
    return right_limit(x);
}

std::string_view to_string(PathStatusKind kind) {
    switch (kind) {
    case PathStatusKind::Completed: return "Completed";
    case PathStatusKind::Absorbed: return "Absorbed";
    case PathStatusKind::Exploded: return "Exploded";
    case PathStatusKind::NoSolutionHit: return "NoSolutionHit";
    }
    return "?";
}

// --- PathSimulator ---------------------------------------------------------

PathSimulator::PathSimulator(SdeSpec spec, double x_max) : spec_(std::move(spec)), x_max_(x_max) {
    if (!std::isfinite(spec_.x0)) throw Error(ErrorKind::InvalidParameter, "x0 must be finite");
    if (!(x_max_ > std::abs(spec_.x0))) throw Error(ErrorKind::InvalidParameter, "x_max must exceed |x0|");

    for (const auto& atom : spec_.nu.atoms()) {
        const PointClass cls = classify_weight(atom.weight, spec_.convention, spec_.b(atom.at));
        if (cls != PointClass::Regular) points_.push_back({atom.at, cls});
    }
    for (std::size_t i = 0; i <= points_.size(); ++i) {
        const double lo = i == 0 ? -kInf : points_[i - 1].at;
        const double hi = i == points_.size() ? kInf : points_[i].at;
        GTransform transform(spec_.nu.restrict_open(lo, hi), spec_.convention);
        const double y_lo = std::isfinite(lo) ? transform.G(lo) : -kInf;
        const double y_hi = std::isfinite(hi) ? transform.G(hi) : kInf;
        const bool reflect_lo = i > 0 && points_[i - 1].point_class == PointClass::ReflectingUp;
        const bool reflect_hi = i < points_.size() && points_[i].point_class == PointClass::ReflectingDown;

        std::vector<double> jumps;
        for (const auto& atom : transform.measure().atoms()) jumps.push_back(atom.at);
        for (double p : spec_.b.breakpoints()) {
            if (p > lo && p < hi) jumps.push_back(p);
        }
        std::sort(jumps.begin(), jumps.end());
        jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
        std::vector<SkewInterface> interfaces;
        if (reflect_lo) {
            interfaces.push_back({y_lo, 0.0, transform.g(lo).right * spec_.b.right_limit(lo), 1.0});
        }
        for (double p : jumps) {
            const GValue gv = transform.g(p);
            const double minus = gv.left * spec_.b.left_limit(p);
            const double plus = gv.right * spec_.b.right_limit(p);
            if (minus == plus || minus + plus <= 0.0) continue;
            interfaces.push_back({transform.G(p), minus, plus, (minus - plus) / (minus + plus)});
        }
        if (reflect_hi) {
            interfaces.push_back({y_hi, transform.g(hi).left * spec_.b.left_limit(hi), 0.0, -1.0});
        }
        regions_.push_back({lo, hi, reflect_lo, reflect_hi, std::move(transform), y_lo, y_hi,
                            std::move(interfaces)});
    }

    start_class_ = classify_point(spec_.nu, spec_.convention, spec_.x0, spec_.b(spec_.x0));
    const auto above = static_cast<std::size_t>(
        std::lower_bound(points_.begin(), points_.end(), spec_.x0,
                         [](const NonRegularPoint& p, double v) { return p.at < v; }) -
        points_.begin());
    switch (start_class_) {
    case PointClass::Regular:
    case PointClass::ReflectingDown:
    case PointClass::Absorbing:
        start_region_ = above;
        break;
    case PointClass::ReflectingUp:
        start_region_ = above + 1;
        break;
    case PointClass::NoSolutionIfReached: {
        std::ostringstream msg;
        msg << "x0 = " << spec_.x0 << " carries a strictly violating atom with b(x0) != 0";
        throw Error(ErrorKind::NoSolutionAtStart, msg.str(), spec_.x0, spec_.nu.atom_weight(spec_.x0));
    }
    }
}

Path PathSimulator::simulate(double t_end, double dt, RngStream& rng) const {
    if (!(dt > 0.0) || !(t_end >= dt)) {
        throw Error(ErrorKind::InvalidParameter, "need dt > 0 and t_end >= dt");
    }
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
    const double sqrt_dt = std::sqrt(dt);
    const Coefficient& b = spec_.b;

    Path path;
    path.dt = dt;
    path.values.reserve(n_steps + 1);
    path.brownian_increments.reserve(n_steps);
    path.qv_increments.reserve(n_steps);
    path.values.push_back(spec_.x0);

    auto freeze = [&](double at, std::size_t from_step) {
        path.status = {PathStatusKind::Absorbed, at, from_step};
        while (path.brownian_increments.size() < n_steps) {
            path.brownian_increments.push_back(sqrt_dt * rng.normal());
            path.qv_increments.push_back(0.0);
            path.values.push_back(at);
        }
    };

    if (start_class_ == PointClass::Absorbing) {
        freeze(spec_.x0, 0);
        return path;
    }

    std::size_t region_index = start_region_;
    const Region* region = &regions_[region_index];
    double x = spec_.x0;
    double y = region->transform.G(x);
    double g = region->transform.g(x).right;

    for (std::size_t i = 0; i < n_steps; ++i) {
        double b_used = b(x);
        if (region->reflect_lo && x == region->lo) {
            b_used = b.right_limit(x);
        } else if (region->reflect_hi && x == region->hi) {
            b_used = b.left_limit(x);
        }
        const double sigma = g * b_used;
        path.qv_increments.push_back(b_used * b_used * dt);

        const SkewInterface* nearest = nullptr;
        if (sigma != 0.0 && !region->interfaces.empty()) {
            const auto& fs = region->interfaces;
            auto it = std::lower_bound(fs.begin(), fs.end(), y,
                                       [](const SkewInterface& f, double v) { return f.q < v; });
            if (it != fs.end()) nearest = &*it;
            if (it != fs.begin() && (nearest == nullptr || y - std::prev(it)->q < nearest->q - y)) {
                nearest = &*std::prev(it);
            }
        }
        if (nearest == nullptr) {
            const double dB = sqrt_dt * rng.normal();
            path.brownian_increments.push_back(dB);
            y += sigma * dB;
        } else {
            const double z = (y - nearest->q) / sigma;
            const SkewStep step = skew_bm_step(z, nearest->skew, dt, rng);
            path.brownian_increments.push_back(step.dB);
            if (step.local_time > 0.0) {
                y = nearest->q + (step.z_end >= 0.0 ? nearest->sigma_plus : nearest->sigma_minus) * step.z_end;
            } else {
                y += sigma * step.dB;
            }
        }

        // Settle y inside the current region, crossing into neighbouring regions
        // as non-regular points are reached.
        bool stopped = false;
        for (int guard = 0; guard < 64; ++guard) {
            while ((region->reflect_lo && y < region->y_lo) || (region->reflect_hi && y > region->y_hi)) {
                if (region->reflect_lo && y < region->y_lo) y = 2.0 * region->y_lo - y;
                if (region->reflect_hi && y > region->y_hi) y = 2.0 * region->y_hi - y;
            }
            const bool hit_lo = !region->reflect_lo && std::isfinite(region->lo) && y <= region->y_lo;
            const bool hit_hi = !region->reflect_hi && std::isfinite(region->hi) && y >= region->y_hi;
            if (!hit_lo && !hit_hi) break;

            const std::size_t point_index = hit_lo ? region_index - 1 : region_index;
            const NonRegularPoint& point = points_[point_index];
            if (point.point_class == PointClass::Absorbing) {
                path.values.push_back(point.at);
                freeze(point.at, i + 1);
                return path;
            }
            if (point.point_class == PointClass::NoSolutionIfReached) {
                path.values.push_back(point.at);
                path.status = {PathStatusKind::NoSolutionHit, point.at, i + 1};
                return path;
            }
            // Reflecting point reached from the side it excludes afterwards:
            // continue on the admissible side, carrying the overshoot across.
            const double x_cross = region->transform.G_inverse(y);
            region_index = hit_lo ? region_index - 1 : region_index + 1;
            region = &regions_[region_index];
            y = region->transform.G(x_cross);
            path.events.push_back({i + 1, point.at, point.point_class});
            if (guard == 63) stopped = true;
        }
        if (stopped) {
            throw Error(ErrorKind::IllPosedScenario, "step crossed too many non-regular points; reduce dt");
        }

        const auto inv = region->transform.invert(y);
        x = std::clamp(inv.x, region->lo, region->hi);
        g = inv.g;
        path.values.push_back(x);
        if (std::abs(x) >= x_max_) {
            path.status = {PathStatusKind::Exploded, x, i + 1};
            return path;
        }
    }
    return path;
}

SkewStep skew_bm_step(double z, double skew, double dt, RngStream& rng) {
    const double w = z + std::sqrt(dt) * rng.normal();
    bool touched = z == 0.0 || (z > 0.0) != (w > 0.0);
    if (!touched) {
        // Brownian bridge from z to w touches 0 with probability exp(-2 z w / dt).
        const double exponent = 2.0 * z * w / dt;
        touched = exponent < 40.0 && rng.uniform() < std::exp(-exponent);
    }
    if (!touched) return {w, 0.0, w - z};
    // Local time at 0 given the endpoint: P(L > l) = exp(-((r + l)^2 - r^2) / (2 dt)), r = |w| + |z|.
    const double r = std::abs(w) + std::abs(z);
    const double local_time = std::sqrt(r * r - 2.0 * dt * std::log(rng.uniform())) - r;
    const double sign = rng.uniform() < 0.5 * (1.0 + skew) ? 1.0 : -1.0;
    const double z_end = sign * std::abs(w);
    return {z_end, local_time, z_end - z - skew * local_time};
}

Path simulate_path(const SdeSpec& spec, double t_end, double dt, RngStream& rng, double x_max) {
    return PathSimulator(spec, x_max).simulate(t_end, dt, rng);
}

Path simulate_skew_walk(double beta, std::size_t n_steps, RngStream& rng) {
    if (!(std::abs(beta) <= 1.0)) throw Error(ErrorKind::InvalidParameter, "skew walk needs |beta| <= 1");
    if (n_steps < 1) throw Error(ErrorKind::InvalidParameter, "skew walk needs n_steps >= 1");
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_steps));
    const double p_up_at_zero = 0.5 * (1.0 + beta);

    Path path;
    path.dt = 1.0 / static_cast<double>(n_steps);
    path.values.reserve(n_steps + 1);
    path.brownian_increments.reserve(n_steps);
    path.qv_increments.assign(n_steps, path.dt);
    path.values.push_back(0.0);
    long long state = 0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double p_up = state == 0 ? p_up_at_zero : 0.5;
        const int step = rng.uniform() < p_up ? 1 : -1;
        state += step;
        path.brownian_increments.push_back(step * scale);
        path.values.push_back(static_cast<double>(state) * scale);
    }
    return path;
}

Path simulate_reflected_bm(double t_end, double dt, RngStream& rng) {
    if (!(dt > 0.0) || !(t_end >= dt)) {
        throw Error(ErrorKind::InvalidParameter, "need dt > 0 and t_end >= dt");
    }
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
    const double sqrt_dt = std::sqrt(dt);
    Path path;
    path.dt = dt;
    path.values.reserve(n_steps + 1);
    path.brownian_increments.reserve(n_steps);
    path.qv_increments.assign(n_steps, dt);
    path.values.push_back(0.0);
    double w = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double dB = sqrt_dt * rng.normal();
        w += dB;
        path.brownian_increments.push_back(dB);
        path.values.push_back(std::abs(w));
    }
    return path;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                try {
                    for (std::size_t i = next++; i < n; i = next++) body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = n;
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace gdrift
