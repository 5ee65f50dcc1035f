#include "gdrift/loctime.hpp"

#include "gdrift/classify.hpp"
#include "gdrift/error.hpp"

#include <algorithm>
#include <cmath>

namespace gdrift {

double window_weight(double x, double y, double epsilon, Convention conv) {
    switch (conv) {
    case Convention::Right: return (x >= y && x < y + epsilon) ? 1.0 : 0.0;
    case Convention::Left: return (x > y - epsilon && x <= y) ? 1.0 : 0.0;
    case Convention::Symmetric: return (x > y - epsilon && x < y + epsilon) ? 0.5 : 0.0;
    }
    return 0.0;
}

LocalTimeEstimate estimate_local_time(const Path& path, double y, Convention conv, double epsilon,
                                      QvSource qv) {
    if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidParameter, "epsilon must be positive");
    if (path.values.empty()) throw Error(ErrorKind::InvalidParameter, "empty path");
    const std::size_t steps = path.values.size() - 1;
    if (qv == QvSource::Recorded && path.qv_increments.size() != steps) {
        throw Error(ErrorKind::InsufficientPathData, "path lacks quadratic-variation increments");
    }

    LocalTimeEstimate est{y, epsilon, conv, path.dt, {}};
    est.values.resize(steps + 1);
    est.values[0] = 0.0;
    const double inv_eps = 1.0 / epsilon;
    double acc = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double x = path.values[i];
        const double w = window_weight(x, y, epsilon, conv);
        if (w != 0.0) {
            const double d = qv == QvSource::Recorded ? path.qv_increments[i]
                                                      : (path.values[i + 1] - x) * (path.values[i + 1] - x);
            acc += w * d * inv_eps;
        }
        est.values[i + 1] = acc;
    }
    return est;
}

bool check_support_property(const LocalTimeEstimate& est, const Path& path) {
    const auto [lo_it, hi_it] = std::minmax_element(path.values.begin(), path.values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double y = est.y;
    const double eps = est.epsilon;
    bool misses = false;
    switch (est.convention) {
    case Convention::Right: misses = y + eps <= lo || y > hi; break;
    case Convention::Left: misses = y < lo || y - eps >= hi; break;
    case Convention::Symmetric: misses = y + eps <= lo || y - eps >= hi; break;
    }
    if (!misses) return true;
    return std::all_of(est.values.begin(), est.values.end(), [](double v) { return v == 0.0; });
}

RatioCheck local_time_ratio_check(std::span<const Path> paths, double y, double a, Convention conv,
                              double epsilon) {
    const auto rel = local_time_relation(a, conv);
    const std::size_t n = paths.size();
    if (n == 0) throw Error(ErrorKind::InvalidParameter, "no paths");
    double sl = 0.0, sl2 = 0.0, sr = 0.0, sr2 = 0.0;
    for (const auto& path : paths) {
        const double lp = rel.c_plus * estimate_local_time(path, y, Convention::Right, epsilon).final();
        const double lm = rel.c_minus * estimate_local_time(path, y, Convention::Left, epsilon).final();
        sl += lp;
        sl2 += lp * lp;
        sr += lm;
        sr2 += lm * lm;
    }
    const double dn = static_cast<double>(n);
    auto stderr_of = [dn](double s, double s2) {
        if (dn < 2) return 0.0;
        const double var = std::max(0.0, (s2 - s * s / dn) / (dn - 1.0));
        return std::sqrt(var / dn);
    };
    return {sl / dn, sr / dn, stderr_of(sl, sl2), stderr_of(sr, sr2)};
}

std::vector<double> tanaka_residual(const Path& path, const SdeSpec& spec, double epsilon) {
    if (path.values.empty() || path.brownian_increments.size() + 1 != path.values.size()) {
        throw Error(ErrorKind::InsufficientPathData, "path lacks the Brownian increments it was driven by");
    }
    const std::size_t n = path.values.size();
    std::vector<double> residual(n);

    double stochastic = 0.0;
    residual[0] = path.values[0] - spec.x0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        stochastic += spec.b(path.values[i]) * path.brownian_increments[i];
        residual[i + 1] = path.values[i + 1] - spec.x0 - stochastic;
    }

    for (const auto& atom : spec.nu.atoms()) {
        const auto est = estimate_local_time(path, atom.at, spec.convention, epsilon);
        for (std::size_t k = 0; k < n; ++k) residual[k] -= atom.weight * est.values[k];
    }
    for (const auto& piece : spec.nu.density()) {
        const double width = piece.to - piece.from;
        const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(width / epsilon)));
        std::vector<double> nodes(cells + 1);
        for (std::size_t j = 0; j <= cells; ++j) {
            nodes[j] = j == cells ? piece.to : piece.from + static_cast<double>(j) * epsilon;
        }
        std::vector<double> integral(n, 0.0);
        std::vector<double> previous;
        for (std::size_t j = 0; j <= cells; ++j) {
            auto current = estimate_local_time(path, nodes[j], spec.convention, epsilon).values;
            if (j > 0) {
                const double h = nodes[j] - nodes[j - 1];
                for (std::size_t k = 0; k < n; ++k) integral[k] += 0.5 * h * (previous[k] + current[k]);
            }
            previous = std::move(current);
        }
        for (std::size_t k = 0; k < n; ++k) residual[k] -= piece.value * integral[k];
    }
    return residual;
}

}  // namespace gdrift
