#include "hawkes_mf/stats.hpp"

#include "hawkes_mf/errors.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <cmath>

namespace hawkes_mf::stats {

Summary summarize(std::span<const double> xs) {
    Summary s;
    s.count = xs.size();
    if (xs.empty()) {
        return s;
    }
    const auto n = static_cast<double>(xs.size());
    for (double x : xs) {
        s.mean += x;
    }
    s.mean /= n;
    if (xs.size() < 2) {
        return s;
    }
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = (x - s.mean) * (x - s.mean);
        m2 += d;
        m4 += d * d;
    }
    s.variance = m2 / (n - 1.0);
    s.se = std::sqrt(s.variance / n);
    // Var(s^2) ~ (mu4 - sigma^4 (n-3)/(n-1)) / n.
    const double mu4 = m4 / n;
    const double sigma2 = m2 / n;
    s.variance_se = std::sqrt(std::max(0.0, (mu4 - sigma2 * sigma2 * (n - 3.0) / (n - 1.0)) / n));
    return s;
}

double quantile(std::vector<double> xs, double level) {
    if (xs.empty()) {
        throw ParameterError("quantile of an empty sample");
    }
    std::sort(xs.begin(), xs.end());
    const double pos = std::clamp(level, 0.0, 1.0) * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

Correlation pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 3) {
        throw ParameterError("correlation needs two equally long samples of size >= 3");
    }
    const auto sx = summarize(xs);
    const auto sy = summarize(ys);
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - sx.mean) * (ys[i] - sy.mean);
    }
    const auto n = static_cast<double>(xs.size());
    Correlation c;
    const double denom = std::sqrt(sx.variance * sy.variance) * (n - 1.0);
    c.value = denom > 0.0 ? sxy / denom : 0.0;
    c.se = (1.0 - c.value * c.value) / std::sqrt(n - 1.0);
    return c;
}

CovarianceSummary covariance(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 3) {
        throw ParameterError("covariance needs two equally long samples of size >= 3");
    }
    const auto sx = summarize(xs);
    const auto sy = summarize(ys);
    std::vector<double> products(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        products[i] = (xs[i] - sx.mean) * (ys[i] - sy.mean);
    }
    const auto sp = summarize(products);
    const auto n = static_cast<double>(xs.size());
    return {sp.mean * n / (n - 1.0), sp.se};
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw ParameterError("Kolmogorov-Smirnov test needs two non-empty samples");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) {
            ++i;
        }
        while (j < b.size() && b[j] <= x) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double en = std::sqrt(na * nb / (na + nb));
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    // Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
    double p = 0.0;
    if (lambda < 1e-3) {
        p = 1.0;
    } else {
        double sign = 1.0;
        for (int k = 1; k <= 100; ++k) {
            const double term = sign * 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
            p += term;
            if (std::abs(term) < 1e-12 * std::abs(p) || std::abs(term) < 1e-300) {
                break;
            }
            sign = -sign;
        }
        p = std::clamp(p, 0.0, 1.0);
    }
    return {d, p};
}

TestResult chi_square_poisson(std::span<const long> counts, double mean) {
    if (counts.empty() || !(mean > 0.0)) {
        throw ParameterError("chi-square test needs counts and a positive mean");
    }
    const auto n = static_cast<double>(counts.size());
    const long top = *std::max_element(counts.begin(), counts.end());
    boost::math::poisson_distribution<double> law(mean);
    // Bins k = 0..top, the last one open on the right; merged left to right so
    // each has expected count >= 5.
    std::vector<double> observed, expected;
    double obs_acc = 0.0, exp_acc = 0.0;
    for (long k = 0; k <= top; ++k) {
        obs_acc += static_cast<double>(std::count(counts.begin(), counts.end(), k));
        double mass = boost::math::pdf(law, static_cast<double>(k));
        if (k == top) {
            mass = k == 0 ? 1.0 : boost::math::cdf(boost::math::complement(law, static_cast<double>(k - 1)));
        }
        exp_acc += n * mass;
        if (exp_acc >= 5.0 && k < top) {
            observed.push_back(obs_acc);
            expected.push_back(exp_acc);
            obs_acc = exp_acc = 0.0;
        }
    }
    if (obs_acc > 0.0 || exp_acc > 0.0) {
        if (exp_acc < 5.0 && !expected.empty()) {
            observed.back() += obs_acc;
            expected.back() += exp_acc;
        } else {
            observed.push_back(obs_acc);
            expected.push_back(exp_acc);
        }
    }
    if (expected.size() < 2) {
        return {0.0, 1.0};
    }
    double chi2 = 0.0;
    for (std::size_t b = 0; b < expected.size(); ++b) {
        chi2 += (observed[b] - expected[b]) * (observed[b] - expected[b]) / expected[b];
    }
    boost::math::chi_squared_distribution<double> ref(static_cast<double>(expected.size() - 1));
    return {chi2, boost::math::cdf(boost::math::complement(ref, chi2))};
}

TestResult sign_test_negative(std::span<const double> values) {
    std::size_t negatives = 0, used = 0;
    for (double v : values) {
        if (v != 0.0) {
            ++used;
            negatives += v < 0.0 ? 1 : 0;
        }
    }
    if (used == 0) {
        return {0.0, 1.0};
    }
    boost::math::binomial_distribution<double> law(static_cast<double>(used), 0.5);
    const double p = negatives == 0 ? 1.0
                                    : boost::math::cdf(boost::math::complement(law, static_cast<double>(negatives) - 1.0));
    return {static_cast<double>(negatives), p};
}

} // namespace hawkes_mf::stats
