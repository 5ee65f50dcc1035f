#pragma once

#include <span>
#include <vector>

namespace gdrift::stats {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double stderr_mean = 0.0;
    std::size_t count = 0;
};

Moments moments(std::span<const double> xs);

struct KsResult {
    double statistic;  ///< sup |F_a - F_b|
    double p_value;    ///< asymptotic Kolmogorov tail with the Stephens correction
};

/// Two-sample Kolmogorov-Smirnov test.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_tail(double lambda);

/// Critical value of the asymptotic two-sample KS statistic at significance alpha.
double ks_critical_value(double alpha, std::size_t n, std::size_t m);

}  // namespace gdrift::stats
