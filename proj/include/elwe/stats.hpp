#pragma once
// Shared statistical helpers: summary moments, Hazen percentiles, empirical
// Wasserstein-1, histogram KL divergence, rank correlation, KS statistic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "elwe/errors.hpp"

namespace elwe::stats {

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw DomainError("mean of empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Sample standard deviation (n-1 denominator); 0 for singleton samples.
inline double stddev(const std::vector<double>& xs) {
    if (xs.empty()) throw DomainError("stddev of empty sample");
    if (xs.size() == 1) return 0.0;
    double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

// Hazen (midpoint) percentile with linear interpolation: h = p/100 * n + 0.5
// on the 1-based sorted sample, clamped to [1, n]. This is the variant under
// which [1..100] has median 50.5 and IQR exactly 50.
inline double percentile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw DomainError("percentile of empty sample");
    const double n = static_cast<double>(sorted.size());
    double h = p / 100.0 * n + 0.5;
    if (h <= 1.0) return sorted.front();
    if (h >= n) return sorted.back();
    double lo = std::floor(h);
    std::size_t i = static_cast<std::size_t>(lo);
    return sorted[i - 1] + (h - lo) * (sorted[i] - sorted[i - 1]);
}

inline double percentile(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    return percentile_sorted(xs, p);
}

// Empirical 1-D Wasserstein-1. Equal-length samples pair sorted entries
// directly; unequal lengths are quantile-resampled to the shorter length
// (midpoint quantiles), which reduces to the same pairing when lengths match.
inline double wasserstein_1d(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("wasserstein of empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t m = std::min(a.size(), b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double u = (static_cast<double>(i) + 0.5) / static_cast<double>(m) * 100.0;
        acc += std::abs(percentile_sorted(a, u) - percentile_sorted(b, u));
    }
    return acc / static_cast<double>(m);
}

// KL divergence in nats between two already-normalized mass vectors.
inline double kl_from_masses(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size() || p.empty())
        throw DomainError("kl: mass vectors must be nonempty and equally sized");
    double sp = std::accumulate(p.begin(), p.end(), 0.0);
    double sq = std::accumulate(q.begin(), q.end(), 0.0);
    if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
        throw DomainError("kl: mass vectors must each sum to 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0 || q[i] < 0.0) throw DomainError("kl: negative mass");
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) throw DomainError("kl: q vanishes where p does not");
        acc += p[i] * std::log(p[i] / q[i]);
    }
    return acc;
}

// Histogram KL: both samples binned over their common range, add-one
// smoothing on counts so empty bins stay finite. Identical samples give 0.
inline double kl_divergence(const std::vector<double>& xs, const std::vector<double>& ys,
                            std::size_t bins = 64) {
    if (xs.empty() || ys.empty()) throw DomainError("kl of empty sample");
    if (bins == 0) throw ConfigError("kl: bins must be positive");
    double lo = std::min(*std::min_element(xs.begin(), xs.end()),
                         *std::min_element(ys.begin(), ys.end()));
    double hi = std::max(*std::max_element(xs.begin(), xs.end()),
                         *std::max_element(ys.begin(), ys.end()));
    if (lo == hi) return 0.0;   // every value identical across both samples
    auto histogram = [&](const std::vector<double>& v) {
        std::vector<double> h(bins, 0.0);
        for (double x : v) {
            auto idx = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
            if (idx >= bins) idx = bins - 1;
            h[idx] += 1.0;
        }
        double total = static_cast<double>(v.size() + bins);
        for (double& c : h) c = (c + 1.0) / total;  // add-one smoothing
        return h;
    };
    return kl_from_masses(histogram(xs), histogram(ys));
}

// Spearman rank correlation (average ranks for ties).
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw DomainError("spearman needs two equally sized samples of >= 2");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
            double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    std::vector<double> rx = ranks(xs), ry = ranks(ys);
    double mx = mean(rx), my = mean(ry);
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx == 0.0 || dy == 0.0) throw DomainError("spearman: degenerate ranks");
    return num / std::sqrt(dx * dy);
}

// Kolmogorov-Smirnov statistic of a sample against a reference CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw DomainError("ks of empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = cdf(xs[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(static_cast<double>(i) / n - f));
    }
    return d;
}

} // namespace elwe::stats
