#ifndef UNCMAP_MEASURES_HPP
#define UNCMAP_MEASURES_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "uncmap/types.hpp"

namespace uncmap {

constexpr int kDefaultBins = 100;
constexpr double kKlSmoothing = 1e-3;

// Equal-width histogram over [0,1]; densities integrate to 1 under a
// left Riemann sum.
struct Histogram {
    int n_bins = kDefaultBins;
    std::vector<std::uint32_t> counts;
    std::uint64_t total = 0;

    double bin_width() const { return 1.0 / n_bins; }
    // density at bin b, counts / (T * dv)
    double density(int b) const {
        return static_cast<double>(counts[b]) / (static_cast<double>(total) * bin_width());
    }
};

inline Histogram estimate_histogram(std::span<const float> samples, int n_bins = kDefaultBins) {
    if (n_bins < 2) throw std::invalid_argument("estimate_histogram: n_bins must be >= 2");
    Histogram h;
    h.n_bins = n_bins;
    h.counts.assign(n_bins, 0);
    for (float s : samples) {
        if (!(s >= 0.0f && s <= 1.0f))
            throw std::invalid_argument("estimate_histogram: sample outside [0,1]");
        int b = static_cast<int>(s * n_bins);
        if (b >= n_bins) b = n_bins - 1;  // 1.0 lands in the last bin
        ++h.counts[b];
    }
    h.total = samples.size();
    return h;
}

// Population variance (divide by T) of the class-specific prediction
// distribution samples.
inline double distribution_variance(std::span<const float> samples) {
    const std::size_t T = samples.size();
    if (T < 2) throw std::invalid_argument("distribution_variance: need T >= 2");
    double mean = 0.0;
    for (float x : samples) mean += x;
    mean /= static_cast<double>(T);
    double acc = 0.0;
    for (float x : samples) {
        double d = x - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(T);
}

// Differential entropy of the histogram density (left Riemann sum);
// may be negative.
inline double distribution_entropy(const Histogram& h) {
    const double dv = h.bin_width();
    double acc = 0.0;
    for (int b = 0; b < h.n_bins; ++b) {
        double f = h.density(b);
        if (f > 0.0) acc -= f * std::log(f) * dv;
    }
    return acc;
}

// Bhattacharyya coefficient between two histogram densities, in [0,1].
inline double bhattacharyya(const Histogram& h1, const Histogram& h2) {
    if (h1.n_bins != h2.n_bins)
        throw std::invalid_argument("bhattacharyya: histogram bin counts differ");
    const double dv = h1.bin_width();
    double acc = 0.0;
    for (int b = 0; b < h1.n_bins; ++b)
        acc += std::sqrt(h1.density(b) * h2.density(b)) * dv;
    return acc;
}

namespace detail {
// Density with additive count smoothing so KL stays finite on
// disjoint support.
inline double smoothed_density(const Histogram& h, int b, double alpha) {
    double total = static_cast<double>(h.total) + alpha * h.n_bins;
    return (static_cast<double>(h.counts[b]) + alpha) / (total * h.bin_width());
}
}  // namespace detail

// -KL(f1||f2) - KL(f2||f1) on smoothed densities; <= 0, 0 iff identical.
inline double symmetric_negative_kl(const Histogram& h1, const Histogram& h2,
                                    double alpha = kKlSmoothing) {
    if (h1.n_bins != h2.n_bins)
        throw std::invalid_argument("symmetric_negative_kl: histogram bin counts differ");
    const double dv = h1.bin_width();
    double acc = 0.0;
    for (int b = 0; b < h1.n_bins; ++b) {
        double f1 = detail::smoothed_density(h1, b, alpha);
        double f2 = detail::smoothed_density(h2, b, alpha);
        double lr = std::log(f1 / f2);
        acc += (f1 * lr - f2 * lr) * dv;
    }
    return -acc;
}

namespace detail {
inline void check_simplex(std::span<const float> p) {
    double s = 0.0;
    for (float x : p) s += x;
    if (std::abs(s - 1.0) > kSimplexTol)
        throw std::invalid_argument("measure input off the probability simplex");
}
}  // namespace detail

// Entropy of a class-probability vector; in [0, ln C], 0 ln 0 = 0.
inline double multiclass_entropy(std::span<const float> mean_at_voxel) {
    detail::check_simplex(mean_at_voxel);
    double acc = 0.0;
    for (float p : mean_at_voxel)
        if (p > 0.0f) acc -= static_cast<double>(p) * std::log(static_cast<double>(p));
    return acc;
}

// Mutual information between the prediction and the sampled parameters:
// H(mean) minus the mean per-sample entropy. rows: T x C in row-major.
inline double mutual_information(std::span<const float> rows, std::size_t T, std::size_t C) {
    if (rows.size() != T * C)
        throw std::invalid_argument("mutual_information: rows size does not match T*C");
    double cond = 0.0;  // (1/T) sum_t sum_c p ln p
    for (std::size_t t = 0; t < T; ++t) {
        auto row = rows.subspan(t * C, C);
        detail::check_simplex(row);
        for (std::size_t c = 0; c < C; ++c) {
            double p = row[c];
            if (p > 0.0) cond += p * std::log(p);
        }
    }
    cond /= static_cast<double>(T);
    double h_mean = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
        double m = 0.0;
        for (std::size_t t = 0; t < T; ++t) m += rows[t * C + c];
        m /= static_cast<double>(T);
        if (m > 0.0) h_mean -= m * std::log(m);
    }
    return h_mean + cond;
}

}  // namespace uncmap

#endif
