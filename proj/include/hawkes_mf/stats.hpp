#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hawkes_mf::stats {

struct Summary {
    std::size_t count{0};
    double mean{0.0};
    /// Unbiased sample variance.
    double variance{0.0};
    /// Standard error of the mean.
    double se{0.0};
    /// Standard error of the variance estimate (normal-theory plus kurtosis term).
    double variance_se{0.0};
};

[[nodiscard]] Summary summarize(std::span<const double> xs);
[[nodiscard]] double quantile(std::vector<double> xs, double level);
[[nodiscard]] double median(std::vector<double> xs);

struct Correlation {
    double value{0.0};
    /// Large-sample standard error (1 - r^2) / sqrt(n - 1).
    double se{0.0};
};

[[nodiscard]] Correlation pearson(std::span<const double> xs, std::span<const double> ys);

/// Sample covariance and its standard error from the products of centred pairs.
struct CovarianceSummary {
    double value{0.0};
    double se{0.0};
};
[[nodiscard]] CovarianceSummary covariance(std::span<const double> xs, std::span<const double> ys);

struct TestResult {
    double statistic{0.0};
    double p_value{1.0};
};

/// Two-sample Kolmogorov-Smirnov with the asymptotic Kolmogorov distribution.
[[nodiscard]] TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Chi-square goodness of fit of integer counts to Poisson(mean), bins merged
/// until every expected count is at least 5.
[[nodiscard]] TestResult chi_square_poisson(std::span<const long> counts, double mean);

/// One-sided exact sign test: P(at least `negatives` of n fair coin flips).
[[nodiscard]] TestResult sign_test_negative(std::span<const double> values);

} // namespace hawkes_mf::stats
