#pragma once

#include "gdrift/classify.hpp"
#include "gdrift/measure.hpp"
#include "gdrift/rng.hpp"
#include "gdrift/transform.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace gdrift {

/// Piecewise-constant diffusion coefficient b.
///
/// values[i] applies on [breakpoints[i-1], breakpoints[i]) with the outer
/// intervals unbounded; point overrides replace the value at single points.
class Coefficient {
public:
    struct PointValue {
        double at;
        double value;
    };

    /// b = 1.
    Coefficient() = default;

    static Coefficient constant(double value);
    static Coefficient table(std::vector<double> breakpoints, std::vector<double> values,
                             std::vector<PointValue> points = {});
    /// b = 1_{(0, +inf)}.
    static Coefficient indicator_positive();

    double operator()(double x) const;
    /// Limits from the right and from the left, ignoring point overrides.
    double right_limit(double x) const;
    double left_limit(double x) const;

    /// "constant", "table" or "indicator_positive".
    const std::string& tag() const noexcept { return tag_; }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<PointValue>& points() const noexcept { return points_; }

private:
    std::string tag_ = "constant";
    std::vector<double> breakpoints_;
    std::vector<double> values_{1.0};
    std::vector<PointValue> points_;
};

struct SdeSpec {
    Coefficient b;
    DriftMeasure nu;
    Convention convention = Convention::Symmetric;
    double x0 = 0.0;
};

enum class PathStatusKind { Completed, Absorbed, Exploded, NoSolutionHit };
std::string_view to_string(PathStatusKind kind);

struct PathStatus {
    PathStatusKind kind = PathStatusKind::Completed;
    double at = 0.0;        // absorption / hit point; exit value for Exploded
    std::size_t step = 0;   // index into Path::values where the status took effect
};

/// A non-regular point reached while simulating, where the dispatch was re-applied.
struct PathEvent {
    std::size_t step;
    double at;
    PointClass point_class;
};

/// Uniformly gridded trajectory; t_i = i * dt.
///
/// values.size() == brownian_increments.size() + 1 == qv_increments.size() + 1.
/// Increment i belongs to the step from t_i to t_{i+1}.
struct Path {
    double dt = 0.0;
    std::vector<double> values;
    std::vector<double> brownian_increments;
    std::vector<double> qv_increments;
    PathStatus status;
    std::vector<PathEvent> events;

    std::size_t steps() const noexcept { return brownian_increments.size(); }
    double time(std::size_t i) const noexcept { return static_cast<double>(i) * dt; }
    double terminal() const { return values.back(); }
};

/// One step of the skew Brownian motion Z = B + skew * Lhat(., 0) over time dt,
/// sampled exactly: a Brownian endpoint, the event of touching 0, the local time
/// at 0 given the endpoint, and an excursion sign that is + with probability
/// (1 + skew) / 2. skew = +-1 is reflection at 0.
struct SkewStep {
    double z_end;
    double local_time;  ///< symmetric local time of Z at 0 over the step
    double dB;          ///< z_end - z - skew * local_time
};
SkewStep skew_bm_step(double z, double skew, double dt, RngStream& rng);

/// A point q of the driftless Y-equation where sigma jumps from sigma_minus to
/// sigma_plus (or a reflecting boundary, skew = +-1). Near q, Y - q = sigma(Z) Z
/// with Z skew Brownian motion of parameter
/// skew = (sigma_minus - sigma_plus) / (sigma_minus + sigma_plus).
struct SkewInterface {
    double q;
    double sigma_minus;
    double sigma_plus;
    double skew;
};

/// Simulator for one SdeSpec. Precomputes the non-regular points of the measure
/// and the drift-removing transform on every interval between them.
///
/// Between non-regular points the process is simulated as Y = G(X), a driftless
/// equation with sigma = g * b, by Euler-Maruyama. Steps next to a jump of sigma
/// or a reflecting boundary use the exact skew kernel of the nearest interface,
/// which for a reflecting boundary mirrors the overshoot of Y. Reaching a
/// non-regular point re-applies the dispatch from that point: absorbing points
/// freeze the path, no-solution points truncate it and reflecting points continue
/// the path on their admissible side.
class PathSimulator {
public:
    /// Throws Error(NoSolutionAtStart) if x0 is a no-solution point and
    /// Error(InvalidParameter) unless x_max > |x0|.
    PathSimulator(SdeSpec spec, double x_max);

    const SdeSpec& spec() const noexcept { return spec_; }
    PointClass start_class() const noexcept { return start_class_; }

    /// Throws Error(InvalidParameter) unless dt > 0 and t_end >= dt.
    Path simulate(double t_end, double dt, RngStream& rng) const;

private:
    struct NonRegularPoint {
        double at;
        PointClass point_class;
    };
    struct Region {
        double lo;
        double hi;
        bool reflect_lo;
        bool reflect_hi;
        GTransform transform;
        double y_lo;
        double y_hi;
        std::vector<SkewInterface> interfaces;  // sorted by position
    };

    SdeSpec spec_;
    double x_max_;
    PointClass start_class_;
    std::vector<NonRegularPoint> points_;
    std::vector<Region> regions_;  // regions_[i] spans (points_[i-1], points_[i])
    std::size_t start_region_ = 0;
};

Path simulate_path(const SdeSpec& spec, double t_end, double dt, RngStream& rng, double x_max);

/// Harrison-Shepp walk: +-1 steps, from 0 up with probability (1 + beta) / 2;
/// Donsker scaling (space 1/sqrt(n), time 1/n). Throws for |beta| > 1 or n_steps < 1.
Path simulate_skew_walk(double beta, std::size_t n_steps, RngStream& rng);

/// |W| for a Wiener path W started at 0.
Path simulate_reflected_bm(double t_end, double dt, RngStream& rng);

/// Runs body(i) for i in [0, n) on a pool of worker threads. The body must only
/// write to per-index state; results are then independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gdrift
