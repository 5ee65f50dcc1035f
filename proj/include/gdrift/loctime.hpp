#pragma once

#include "gdrift/measure.hpp"
#include "gdrift/simulate.hpp"

#include <span>
#include <vector>

namespace gdrift {

/// Source of the quadratic-variation increments d<X> used by the estimators.
enum class QvSource {
    Recorded,           ///< Path::qv_increments, i.e. b(X_i)^2 dt
    SquaredIncrements,  ///< (X_{i+1} - X_i)^2
};

/// Cumulative occupation estimate of L(t, y) on the path grid:
///     values[k] = (1/eps) * sum_{i<k} I(X_i) * d<X>_i,
/// with I = 1_[y, y+eps) (right), 1_(y-eps, y] (left) or 1/2 * 1_(y-eps, y+eps)
/// (symmetric).
struct LocalTimeEstimate {
    double y = 0.0;
    double epsilon = 0.0;
    Convention convention = Convention::Symmetric;
    double dt = 0.0;
    std::vector<double> values;

    double final() const { return values.back(); }
};

/// Window weight of the estimator at state x.
double window_weight(double x, double y, double epsilon, Convention conv);

/// Throws Error(InvalidParameter) for epsilon <= 0 or an empty path.
LocalTimeEstimate estimate_local_time(const Path& path, double y, Convention conv, double epsilon,
                                      QvSource qv = QvSource::Recorded);

/// True unless the estimator window misses [min X, max X] while the estimate is nonzero.
bool check_support_property(const LocalTimeEstimate& est, const Path& path);

/// Monte Carlo means (and standard errors) of c_plus * L+est(t_end, y) and
/// c_minus * L-est(t_end, y), with (c_plus, c_minus) = local_time_relation(a, conv).
struct RatioCheck {
    double lhs;
    double rhs;
    double lhs_stderr;
    double rhs_stderr;
};
RatioCheck local_time_ratio_check(std::span<const Path> paths, double y, double a, Convention conv,
                              double epsilon);

/// residual_t = X_t - x0 - sum_i b(X_i) dB_i - sum_atoms nu({y}) Lest(t, y)
///              - sum_pieces value * int_piece Lest(t, y) dy,
/// with Lest in the model's convention and the density integral done by the
/// trapezoid rule on an eps-spaced grid. Throws Error(InsufficientPathData)
/// when the Brownian increments do not match the path.
std::vector<double> tanaka_residual(const Path& path, const SdeSpec& spec, double epsilon);

}  // namespace gdrift
