#ifndef UNCMAP_SYNTH_HPP
#define UNCMAP_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "uncmap/parallel.hpp"
#include "uncmap/types.hpp"

namespace uncmap {

enum class DropoutKind { Bernoulli, Gaussian };

// Synthetic MC-dropout phantom: concentric cylinders with known labels.
struct PhantomSpec {
    Dims dims;
    std::size_t classes = 3;   // background / vessel wall / lumen
    std::size_t samples = 50;
    DropoutKind dropout = DropoutKind::Bernoulli;
    double rate = 0.3;         // dropout rate p, in (0,1)
    double sigma_logit = 1.0;  // additive logit noise scale, >= 0
    std::uint64_t seed = 0;

    void validate() const {
        if (dims.voxels() < 1 || dims.nx < 4 || dims.ny < 4 || dims.nz < 1)
            throw std::invalid_argument("PhantomSpec: degenerate dims");
        if (classes < 2) throw std::invalid_argument("PhantomSpec: need C >= 2");
        if (samples < 2) throw std::invalid_argument("PhantomSpec: need T >= 2");
        if (!(rate > 0.0 && rate < 1.0))
            throw std::invalid_argument("PhantomSpec: dropout rate outside (0,1)");
        if (sigma_logit < 0.0) throw std::invalid_argument("PhantomSpec: negative noise scale");
    }
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

// Stateless random stream keyed by (seed, t, c, v); draw order within a
// key is tracked by a counter, so parallel generation over keys is
// order-independent and deterministic.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t t, std::uint64_t c, std::uint64_t v)
        : CounterRng(prefix(seed, t, c), v) {}

    // Key prefix shared by all voxels of one (seed, t, c); hoisting it out
    // of the voxel loop gives the same keys at a quarter of the mixing.
    static std::uint64_t prefix(std::uint64_t seed, std::uint64_t t, std::uint64_t c) {
        std::uint64_t k = detail::mix64(seed);
        k = detail::mix64(k + 0x8000000000000001ULL * t);
        return detail::mix64(k + 0xA24BAED4963EE407ULL * c);
    }

    CounterRng(std::uint64_t prefix_key, std::uint64_t v) {
        key_ = detail::mix64(prefix_key + 0x9FB21C651E98DF25ULL * v);
    }

    // uniform in (0,1)
    double uniform() {
        std::uint64_t bits = detail::mix64(key_ + counter_++);
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    // standard normal (Box-Muller); the sine half of each pair is cached
    // so consecutive draws cost one (log, sincos) per two normals
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(angle);
        have_spare_ = true;
        return r * std::cos(angle);
    }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Multiplicative dropout factor: Bernoulli gives 0 w.p. p else 1/(1-p);
// Gaussian draws N(1, p/(1-p)) with the second parameter a variance.
// Both have mean 1 and variance p/(1-p).
inline double sample_dropout_factor(DropoutKind kind, double p, CounterRng& rng) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("sample_dropout_factor: p outside (0,1)");
    if (kind == DropoutKind::Bernoulli) return rng.uniform() < p ? 0.0 : 1.0 / (1.0 - p);
    return 1.0 + std::sqrt(p / (1.0 - p)) * rng.normal();
}

namespace detail {

// Signed-distance class scores for the concentric-cylinder geometry.
// Class 0 is background, classes 1..C-1 nest inward.
inline void phantom_logits(const PhantomSpec& spec, std::size_t v, std::vector<double>& out) {
    const Dims& d = spec.dims;
    std::size_t x = v % d.nx;
    std::size_t y = (v / d.nx) % d.ny;
    double cx = 0.5 * static_cast<double>(d.nx - 1);
    double cy = 0.5 * static_cast<double>(d.ny - 1);
    double r = std::hypot(static_cast<double>(x) - cx, static_cast<double>(y) - cy);

    const std::size_t C = spec.classes;
    double m = 0.5 * static_cast<double>(std::min(d.nx, d.ny));
    const double width = 1.5;  // logit decay scale, in voxels
    std::vector<double> radii(C);  // radii[c] = outer radius of class c, radii[0] unused
    for (std::size_t c = 1; c < C; ++c)
        radii[c] = 1.2 * m * static_cast<double>(C - c) / static_cast<double>(C);

    out.resize(C);
    out[0] = (r - radii[1]) / width;
    for (std::size_t c = 1; c + 1 < C; ++c)
        out[c] = std::min(radii[c] - r, r - radii[c + 1]) / width;
    out[C - 1] = (radii[C - 1] - r) / width;
}

inline void softmax(const std::vector<double>& logits, std::vector<double>& probs) {
    double top = logits[0];
    for (double z : logits) top = std::max(top, z);
    double sum = 0.0;
    probs.resize(logits.size());
    for (std::size_t c = 0; c < logits.size(); ++c) {
        probs[c] = std::exp(logits[c] - top);
        sum += probs[c];
    }
    for (double& p : probs) p /= sum;
}

}  // namespace detail

// Ground truth: noise-free argmax of class scores, ties toward class 0.
inline LabelMap phantom_labels(const PhantomSpec& spec) {
    spec.validate();
    const std::size_t V = spec.dims.voxels();
    std::vector<std::uint8_t> labels(V);
    parallel_for(V, [&](std::size_t v) {
        std::vector<double> z;
        detail::phantom_logits(spec, v, z);
        std::size_t best = 0;
        for (std::size_t c = 1; c < spec.classes; ++c)
            if (z[c] > z[best]) best = c;
        labels[v] = static_cast<std::uint8_t>(best);
    });
    return LabelMap(spec.classes, spec.dims, std::move(labels));
}

// T dropout-perturbed softmax samples per voxel; bit-identical for a
// fixed seed regardless of thread count. with_noise=false forces
// lambda=1 and sigma=0, making every sample the clean softmax.
inline SampleTensor generate_phantom_samples(const PhantomSpec& spec, bool with_noise = true) {
    spec.validate();
    const std::size_t T = spec.samples, C = spec.classes, V = spec.dims.voxels();
    std::vector<float> data(T * C * V);
    std::vector<std::uint64_t> prefixes(T * C);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t c = 0; c < C; ++c)
            prefixes[t * C + c] = CounterRng::prefix(spec.seed, t, c);
    parallel_for(V, [&](std::size_t v) {
        std::vector<double> z, zt, probs;
        detail::phantom_logits(spec, v, z);
        for (std::size_t t = 0; t < T; ++t) {
            zt = z;
            if (with_noise) {
                for (std::size_t c = 0; c < C; ++c) {
                    CounterRng rng(prefixes[t * C + c], v);
                    double lambda = sample_dropout_factor(spec.dropout, spec.rate, rng);
                    zt[c] = lambda * z[c] + spec.sigma_logit * rng.normal();
                }
            }
            detail::softmax(zt, probs);
            for (std::size_t c = 0; c < C; ++c)
                data[(t * C + c) * V + v] = static_cast<float>(probs[c]);
        }
    });
    return SampleTensor(T, C, spec.dims, std::move(data));
}

inline std::pair<SampleTensor, LabelMap> generate_phantom(const PhantomSpec& spec,
                                                          bool with_noise = true) {
    return {generate_phantom_samples(spec, with_noise), phantom_labels(spec)};
}

}  // namespace uncmap

#endif
