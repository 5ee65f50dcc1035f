#pragma once

#include "gdrift/measure.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gdrift {

/// One-sided values of g at a point.
struct GValue {
    double right;  ///< g(x)
    double left;   ///< g(x-)
};

/// Drift-removing space transform for a measure satisfying the strict atom
/// condition.
///
/// g is the càdlàg solution of
///     g(x) = 1 - 2 * int_[0,x] F(g,y) nu(dy),   x >= 0,
///     g(x) = 1 + 2 * int_(x,0) F(g,y) nu(dy),   x <  0,
/// with F(g,y) = g(y-), g(y) or (g(y) + g(y-))/2 for the right, left and
/// symmetric local time. Between knots g is c * exp(-2 f (x - k)); crossing an
/// atom of weight a multiplies g by
///     right: 1 - 2a,   left: 1 / (1 + 2a),   symmetric: (1 - a) / (1 + a),
/// i.e. g(p) = factor * g(p-). G(x) = int_0^x g is evaluated in closed form.
class GTransform {
public:
    /// Throws Error(RequiresAtomCondition) when an atom violates the strict condition.
    GTransform(DriftMeasure nu, Convention conv);

    Convention convention() const noexcept { return conv_; }
    const DriftMeasure& measure() const noexcept { return nu_; }
    /// Atom locations of the measure (where g may jump).
    std::vector<double> breakpoints() const;

    GValue g(double x) const;
    double G(double x) const;
    /// Throws Error(OutOfRange) for non-finite y. G maps onto all of R.
    double G_inverse(double y) const;

    /// x = G^{-1}(y) together with the right value g(x), from a single segment lookup.
    struct Inverse {
        double x;
        double g;
    };
    Inverse invert(double y) const;

private:
    // j with knots_[j] <= x < knots_[j+1]; -1 on the left tail (-inf, knots_[0]).
    std::ptrdiff_t segment_of(double x) const;
    double segment_integral(std::size_t j, double h) const;

    DriftMeasure nu_;
    Convention conv_;
    std::vector<double> knots_;      // sorted; always contains 0
    std::vector<double> slope_;      // density on [knots_[j], knots_[j+1])
    std::vector<double> g_start_;    // g(knots_[j])
    std::vector<double> g_left_;     // g(knots_[j]-)
    std::vector<double> G_knot_;     // G(knots_[j])
};

/// Jump factor g(p) / g(p-) across an atom of weight `a`.
double atom_jump_factor(double a, Convention conv);
/// Strict atom condition: right a < 1/2, left a > -1/2, symmetric |a| < 1.
bool satisfies_atom_condition(double a, Convention conv);

GTransform solve_g(const DriftMeasure& nu, Convention conv);
GValue eval_g(const GTransform& gt, double x);
double eval_G(const GTransform& gt, double x);
double eval_G_inverse(const GTransform& gt, double y);

/// Maximum over the probe grid of |g(x) - rhs(x)| for the defining integral
/// equation. Atom contributions are summed exactly and density contributions
/// are integrated by adaptive Simpson (absolute tolerance 1e-10, depth cap 40).
double residual_of_integral_equation(const GTransform& gt, std::span<const double> probe_grid);

/// Adaptive Simpson quadrature of f over [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tolerance = 1e-10, int max_depth = 40);

using CoefficientFn = std::function<double(double)>;

/// sigma(y) = g(G^{-1}(y)) * b(G^{-1}(y)), using the right value g(x) at atoms.
CoefficientFn driftless_coefficient(const GTransform& gt, CoefficientFn b);

}  // namespace gdrift
