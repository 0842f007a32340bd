#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gfldpc {

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& xs) {
    if (xs.empty()) throw std::domain_error("mean_stderr: empty sample set");
    double s = 0.0;
    for (double x : xs) s += x;
    const double mean = s / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = xs.size() > 1 ? ss / static_cast<double>(xs.size() - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(xs.size())), xs.size()};
}

// batch-means standard error: split in order into nbatch contiguous batches
inline MeanStderr batch_means(const std::vector<double>& xs, std::size_t nbatch) {
    if (xs.empty()) throw std::domain_error("batch_means: empty sample set");
    nbatch = std::min(nbatch, xs.size());
    std::vector<double> bm(nbatch, 0.0);
    std::vector<std::size_t> cnt(nbatch, 0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const std::size_t b = i * nbatch / xs.size();
        bm[b] += xs[i];
        ++cnt[b];
    }
    for (std::size_t b = 0; b < nbatch; ++b) bm[b] /= static_cast<double>(cnt[b]);
    const MeanStderr of_batches = mean_stderr(bm);
    double s = 0.0;
    for (double x : xs) s += x;
    return {s / static_cast<double>(xs.size()), of_batches.stderr_, xs.size()};
}

// two-sample Kolmogorov-Smirnov distance; inputs need not be sorted
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::domain_error("ks_distance: empty sample set");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// upper critical value of the chi-square distribution (Wilson-Hilferty)
inline double chi2_critical(double dof, double z_alpha) {
    const double a = 2.0 / (9.0 * dof);
    const double t = 1.0 - a + z_alpha * std::sqrt(a);
    return dof * t * t * t;
}

}  // namespace gfldpc
