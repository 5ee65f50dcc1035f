#include "gdrift/transform.hpp"

#include "gdrift/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gdrift {

bool satisfies_atom_condition(double a, Convention conv) {
    switch (conv) {
    case Convention::Right: return a < 0.5;
    case Convention::Left: return a > -0.5;
    case Convention::Symmetric: return std::abs(a) < 1.0;
    }
    return false;
}

double atom_jump_factor(double a, Convention conv) {
    switch (conv) {
    case Convention::Right: return 1.0 - 2.0 * a;
    case Convention::Left: return 1.0 / (1.0 + 2.0 * a);
    case Convention::Symmetric: return (1.0 - a) / (1.0 + a);
    }
    return 1.0;
}

GTransform::GTransform(DriftMeasure nu, Convention conv) : nu_(std::move(nu)), conv_(conv) {
    for (const auto& atom : nu_.atoms()) {
        if (!satisfies_atom_condition(atom.weight, conv_)) {
            std::ostringstream msg;
            msg << "atom at " << atom.at << " with weight " << atom.weight
                << " violates the strict atom condition for the " << to_string(conv_)
                << " local time";
            throw Error(ErrorKind::RequiresAtomCondition, msg.str(), atom.at, atom.weight);
        }
    }

    knots_.push_back(0.0);
    for (const auto& atom : nu_.atoms()) knots_.push_back(atom.at);
    for (const auto& p : nu_.density()) {
        knots_.push_back(p.from);
        knots_.push_back(p.to);
    }
    std::sort(knots_.begin(), knots_.end());
    knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());

    const std::size_t n = knots_.size();
    slope_.resize(n);
    for (std::size_t j = 0; j < n; ++j) slope_[j] = nu_.density_at(knots_[j]);
    g_start_.assign(n, 1.0);
    g_left_.assign(n, 1.0);
    G_knot_.assign(n, 0.0);

    const auto zero = static_cast<std::size_t>(
        std::lower_bound(knots_.begin(), knots_.end(), 0.0) - knots_.begin());
    g_left_[zero] = 1.0;
    g_start_[zero] = atom_jump_factor(nu_.atom_weight(0.0), conv_);

    for (std::size_t j = zero; j + 1 < n; ++j) {
        const double width = knots_[j + 1] - knots_[j];
        g_left_[j + 1] = g_start_[j] * std::exp(-2.0 * slope_[j] * width);
        g_start_[j + 1] = atom_jump_factor(nu_.atom_weight(knots_[j + 1]), conv_) * g_left_[j + 1];
        G_knot_[j + 1] = G_knot_[j] + segment_integral(j, width);
    }
    for (std::size_t j = zero; j-- > 0;) {
        const double width = knots_[j + 1] - knots_[j];
        g_start_[j] = g_left_[j + 1] * std::exp(2.0 * slope_[j] * width);
        g_left_[j] = g_start_[j] / atom_jump_factor(nu_.atom_weight(knots_[j]), conv_);
        G_knot_[j] = G_knot_[j + 1] - segment_integral(j, width);
    }
}

std::vector<double> GTransform::breakpoints() const {
    std::vector<double> out;
    for (const auto& atom : nu_.atoms()) out.push_back(atom.at);
    return out;
}

std::ptrdiff_t GTransform::segment_of(double x) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    return static_cast<std::ptrdiff_t>(it - knots_.begin()) - 1;
}

double GTransform::segment_integral(std::size_t j, double h) const {
    const double s = slope_[j];
    const double c = g_start_[j];
    if (s == 0.0) return c * h;
    return -c * std::expm1(-2.0 * s * h) / (2.0 * s);
}

GValue GTransform::g(double x) const {
    const auto j = segment_of(x);
    if (j < 0) return {g_left_[0], g_left_[0]};
    const auto k = static_cast<std::size_t>(j);
    const double right = g_start_[k] * std::exp(-2.0 * slope_[k] * (x - knots_[k]));
    return {right, x == knots_[k] ? g_left_[k] : right};
}

double GTransform::G(double x) const {
    const auto j = segment_of(x);
    if (j < 0) return G_knot_[0] + g_left_[0] * (x - knots_[0]);
    const auto k = static_cast<std::size_t>(j);
    return G_knot_[k] + segment_integral(k, x - knots_[k]);
}

GTransform::Inverse GTransform::invert(double y) const {
    if (!std::isfinite(y)) {
        throw Error(ErrorKind::OutOfRange, "G inverse requested for a non-finite value");
    }
    auto it = std::upper_bound(G_knot_.begin(), G_knot_.end(), y);
    if (it == G_knot_.begin()) {
        return {knots_[0] + (y - G_knot_[0]) / g_left_[0], g_left_[0]};
    }
    const auto k = static_cast<std::size_t>(it - G_knot_.begin()) - 1;
    const double s = slope_[k];
    const double c = g_start_[k];
    const double d = y - G_knot_[k];
    double h = 0.0;
    if (s == 0.0) {
        h = d / c;
    } else {
        const double arg = -2.0 * s * d / c;
        h = arg > -1.0 ? -std::log1p(arg) / (2.0 * s) : knots_[k + 1] - knots_[k];
    }
    if (k + 1 < knots_.size()) h = std::min(h, knots_[k + 1] - knots_[k]);
    h = std::max(h, 0.0);
    const double x = knots_[k] + h;
    if (k + 1 < knots_.size() && x >= knots_[k + 1]) {
        // Rounding pushed x onto the next knot; report the value there.
        return {knots_[k + 1], g_start_[k + 1]};
    }
    return {x, c * std::exp(-2.0 * s * h)};
}

double GTransform::G_inverse(double y) const { return invert(y).x; }

GTransform solve_g(const DriftMeasure& nu, Convention conv) { return GTransform(nu, conv); }
GValue eval_g(const GTransform& gt, double x) { return gt.g(x); }
double eval_G(const GTransform& gt, double x) { return gt.G(x); }
double eval_G_inverse(const GTransform& gt, double y) { return gt.G_inverse(y); }

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tolerance, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tolerance) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tolerance, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tolerance, depth - 1);
}

double F_value(const GValue& v, Convention conv) {
    switch (conv) {
    case Convention::Right: return v.left;
    case Convention::Left: return v.right;
    case Convention::Symmetric: return 0.5 * (v.left + v.right);
    }
    return 0.0;
}

// int g(y) dy over [lo, hi] against the density of nu, splitting at atoms
// so every Simpson panel sees a smooth integrand.
double density_integral(const GTransform& gt, double lo, double hi) {
    if (hi <= lo) return 0.0;
    const auto& nu = gt.measure();
    auto g_right = [&gt](double y) { return gt.g(y).right; };
    double total = 0.0;
    for (const auto& piece : nu.density()) {
        const double l = std::max(lo, piece.from);
        const double r = std::min(hi, piece.to);
        if (r <= l) continue;
        std::vector<double> cuts{l};
        for (const auto& atom : nu.atoms()) {
            if (atom.at > l && atom.at < r) cuts.push_back(atom.at);
        }
        cuts.push_back(r);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            total += piece.value * adaptive_simpson(g_right, cuts[i], cuts[i + 1]);
        }
    }
    return total;
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tolerance, int max_depth) {
    if (a == b) return 0.0;
    // Evaluate strictly inside the panel ends so one-sided limits at jump points
    // do not leak in from a neighbouring piece.
    const double fa = f(a);
    const double fb = f(std::nextafter(b, a));
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tolerance, max_depth);
}

double residual_of_integral_equation(const GTransform& gt, std::span<const double> probe_grid) {
    const auto& nu = gt.measure();
    const Convention conv = gt.convention();
    double worst = 0.0;
    for (const double x : probe_grid) {
        double integral = 0.0;
        double rhs = 0.0;
        if (x >= 0.0) {
            for (const auto& atom : nu.atoms()) {
                if (atom.at >= 0.0 && atom.at <= x) integral += atom.weight * F_value(gt.g(atom.at), conv);
            }
            integral += density_integral(gt, 0.0, x);
            rhs = 1.0 - 2.0 * integral;
        } else {
            for (const auto& atom : nu.atoms()) {
                if (atom.at > x && atom.at < 0.0) integral += atom.weight * F_value(gt.g(atom.at), conv);
            }
            integral += density_integral(gt, x, 0.0);
            rhs = 1.0 + 2.0 * integral;
        }
        worst = std::max(worst, std::abs(gt.g(x).right - rhs));
    }
    return worst;
}

CoefficientFn driftless_coefficient(const GTransform& gt, CoefficientFn b) {
    return [gt, b = std::move(b)](double y) {
        const auto inv = gt.invert(y);
        return inv.g * b(inv.x);
    };
}

}  // namespace gdrift
