#ifndef UNCMAP_MAPS_HPP
#define UNCMAP_MAPS_HPP

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "uncmap/core.hpp"
#include "uncmap/measures.hpp"
#include "uncmap/parallel.hpp"
#include "uncmap/types.hpp"

namespace uncmap {

enum class DescriptionMeasure { Variance, Entropy };
enum class SimilarityMeasure { BC, KL };
enum class MultiClassMeasure { Entropy, MI };

// The ten map identities: six combined, four class-specific families.
inline const std::vector<std::string>& map_catalog() {
    static const std::vector<std::string> ids = {
        "av_variance", "av_entropy",  "sim_bc",      "sim_kl",  "mu_entropy",
        "mu_mi",       "cw_variance", "cw_entropy",  "ova_entropy", "ova_mi"};
    return ids;
}

inline bool is_combined_map(const std::string& id) {
    return id == "av_variance" || id == "av_entropy" || id == "sim_bc" ||
           id == "sim_kl" || id == "mu_entropy" || id == "mu_mi";
}

namespace detail {

inline std::vector<float> class_samples_at(const SampleTensor& s, std::size_t c, std::size_t v) {
    std::vector<float> out(s.samples());
    for (std::size_t t = 0; t < s.samples(); ++t) out[t] = s.at(t, c, v);
    return out;
}

inline double describe(const std::vector<float>& samples, DescriptionMeasure d, int n_bins) {
    if (d == DescriptionMeasure::Variance) return distribution_variance(samples);
    return distribution_entropy(estimate_histogram(samples, n_bins));
}

}  // namespace detail

// Mean of a description measure over classes, one value per voxel.
inline UncertaintyMap averaged_map(const SampleTensor& s, DescriptionMeasure d,
                                   int n_bins = kDefaultBins) {
    const std::size_t C = s.classes(), V = s.voxels();
    UncertaintyMap m;
    m.scope = MapScope::Combined;
    m.measure_id = d == DescriptionMeasure::Variance ? "av_variance" : "av_entropy";
    m.values.resize(V);
    parallel_for(V, [&](std::size_t v) {
        double acc = 0.0;
        for (std::size_t c = 0; c < C; ++c)
            acc += detail::describe(detail::class_samples_at(s, c, v), d, n_bins);
        m.values[v] = acc / static_cast<double>(C);
    });
    m.check_finite();
    return m;
}

// Similarity of the two most probable classes (by Eq. 1 mean) per voxel.
inline UncertaintyMap similarity_map(const SampleTensor& s, SimilarityMeasure sim,
                                     int n_bins = kDefaultBins, double alpha = kKlSmoothing) {
    const std::size_t C = s.classes(), T = s.samples(), V = s.voxels();
    UncertaintyMap m;
    m.scope = MapScope::Combined;
    m.measure_id = sim == SimilarityMeasure::BC ? "sim_bc" : "sim_kl";
    m.values.resize(V);
    parallel_for(V, [&](std::size_t v) {
        // top-2 classes by mean; ties break toward the lower index
        std::vector<double> mean(C, 0.0);
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t t = 0; t < T; ++t) mean[c] += s.at(t, c, v);
            mean[c] /= static_cast<double>(T);
        }
        std::size_t c1 = 0;
        for (std::size_t c = 1; c < C; ++c)
            if (mean[c] > mean[c1]) c1 = c;
        std::size_t c2 = c1 == 0 ? 1 : 0;
        for (std::size_t c = 0; c < C; ++c)
            if (c != c1 && mean[c] > mean[c2]) c2 = c;
        Histogram h1 = estimate_histogram(detail::class_samples_at(s, c1, v), n_bins);
        Histogram h2 = estimate_histogram(detail::class_samples_at(s, c2, v), n_bins);
        m.values[v] = sim == SimilarityMeasure::BC ? bhattacharyya(h1, h2)
                                                   : symmetric_negative_kl(h1, h2, alpha);
    });
    m.check_finite();
    return m;
}

// Multi-class measure applied directly to the per-voxel T x C block.
inline UncertaintyMap multiclass_map(const SampleTensor& s, MultiClassMeasure mc) {
    const std::size_t C = s.classes(), T = s.samples(), V = s.voxels();
    UncertaintyMap m;
    m.scope = MapScope::Combined;
    m.measure_id = mc == MultiClassMeasure::Entropy ? "mu_entropy" : "mu_mi";
    m.values.resize(V);
    parallel_for(V, [&](std::size_t v) {
        std::vector<float> rows(T * C);
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t c = 0; c < C; ++c) rows[t * C + c] = s.at(t, c, v);
        if (mc == MultiClassMeasure::MI) {
            m.values[v] = mutual_information(rows, T, C);
        } else {
            // entropy of the per-voxel mean, accumulated in double
            double h = 0.0;
            for (std::size_t c = 0; c < C; ++c) {
                double mean = 0.0;
                for (std::size_t t = 0; t < T; ++t) mean += rows[t * C + c];
                mean /= static_cast<double>(T);
                if (mean > 0.0) h -= mean * std::log(mean);
            }
            m.values[v] = h;
        }
    });
    m.check_finite();
    return m;
}

// Description measure of a single class's prediction distribution.
inline UncertaintyMap classwise_map(const SampleTensor& s, std::size_t c, DescriptionMeasure d,
                                    int n_bins = kDefaultBins) {
    if (c >= s.classes()) throw std::invalid_argument("classwise_map: class index out of range");
    const std::size_t V = s.voxels();
    UncertaintyMap m;
    m.scope = MapScope::ClassSpecific;
    m.class_index = c;
    m.measure_id = d == DescriptionMeasure::Variance ? "cw_variance" : "cw_entropy";
    m.values.resize(V);
    parallel_for(V, [&](std::size_t v) {
        m.values[v] = detail::describe(detail::class_samples_at(s, c, v), d, n_bins);
    });
    m.check_finite();
    return m;
}

// Multi-class measure on the binary split (y^c, 1 - y^c).
inline UncertaintyMap one_vs_all_map(const SampleTensor& s, std::size_t c, MultiClassMeasure mc) {
    if (c >= s.classes()) throw std::invalid_argument("one_vs_all_map: class index out of range");
    const std::size_t T = s.samples(), V = s.voxels();
    UncertaintyMap m;
    m.scope = MapScope::ClassSpecific;
    m.class_index = c;
    m.measure_id = mc == MultiClassMeasure::Entropy ? "ova_entropy" : "ova_mi";
    m.values.resize(V);
    parallel_for(V, [&](std::size_t v) {
        if (mc == MultiClassMeasure::Entropy) {
            double mean = 0.0;
            for (std::size_t t = 0; t < T; ++t) mean += s.at(t, c, v);
            mean /= static_cast<double>(T);
            double comp = 1.0 - mean;
            double h = 0.0;
            if (mean > 0.0) h -= mean * std::log(mean);
            if (comp > 0.0) h -= comp * std::log(comp);
            m.values[v] = h;
        } else {
            // binary mutual information on (y^c, 1 - y^c)
            double cond = 0.0, mean = 0.0;
            for (std::size_t t = 0; t < T; ++t) {
                double p = s.at(t, c, v);
                double q = 1.0 - p;
                mean += p;
                if (p > 0.0) cond += p * std::log(p);
                if (q > 0.0) cond += q * std::log(q);
            }
            cond /= static_cast<double>(T);
            mean /= static_cast<double>(T);
            double comp = 1.0 - mean;
            double h = 0.0;
            if (mean > 0.0) h -= mean * std::log(mean);
            if (comp > 0.0) h -= comp * std::log(comp);
            m.values[v] = h + cond;
        }
    });
    m.check_finite();
    return m;
}

// All ten maps in one voxel pass, sharing the per-class histograms and
// means. Values agree with the individual map functions to within
// accumulation-order rounding (only the mu_mi conditional term sums in a
// different order).
struct MapSet {
    std::vector<UncertaintyMap> combined;                     // the six combined maps
    std::vector<std::vector<UncertaintyMap>> class_specific;  // [4 families][C]
};

inline MapSet compute_all_maps(const SampleTensor& s, int n_bins = kDefaultBins,
                               double alpha = kKlSmoothing) {
    const std::size_t T = s.samples(), C = s.classes(), V = s.voxels();
    MapSet out;
    auto make = [&](const char* id, MapScope scope, std::size_t cls) {
        UncertaintyMap m;
        m.scope = scope;
        m.class_index = cls;
        m.measure_id = id;
        m.values.resize(V);
        return m;
    };
    out.combined.push_back(make("av_variance", MapScope::Combined, 0));
    out.combined.push_back(make("av_entropy", MapScope::Combined, 0));
    out.combined.push_back(make("sim_bc", MapScope::Combined, 0));
    out.combined.push_back(make("sim_kl", MapScope::Combined, 0));
    out.combined.push_back(make("mu_entropy", MapScope::Combined, 0));
    out.combined.push_back(make("mu_mi", MapScope::Combined, 0));
    const char* families[4] = {"cw_variance", "cw_entropy", "ova_entropy", "ova_mi"};
    for (const char* id : families) {
        std::vector<UncertaintyMap> per_class;
        for (std::size_t c = 0; c < C; ++c)
            per_class.push_back(make(id, MapScope::ClassSpecific, c));
        out.class_specific.push_back(std::move(per_class));
    }

    parallel_for(V, [&](std::size_t v) {
        std::vector<float> col(T);
        std::vector<Histogram> hists(C);
        std::vector<double> var(C), hent(C), mean(C), cond_binary(C);
        double cond = 0.0;  // (1/T) sum_t sum_c p ln p over all classes
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t t = 0; t < T; ++t) col[t] = s.at(t, c, v);
            var[c] = distribution_variance(col);
            hists[c] = estimate_histogram(col, n_bins);
            hent[c] = distribution_entropy(hists[c]);
            // fold the mean and both p ln p sums into one pass over t
            double m = 0.0, plp = 0.0, cb = 0.0;
            for (std::size_t t = 0; t < T; ++t) {
                double p = col[t];
                double q = 1.0 - p;
                m += p;
                if (p > 0.0) {
                    double term = p * std::log(p);
                    plp += term;
                    cb += term;
                }
                if (q > 0.0) cb += q * std::log(q);
            }
            mean[c] = m / static_cast<double>(T);
            cond_binary[c] = cb / static_cast<double>(T);
            cond += plp;
        }
        cond /= static_cast<double>(T);

        // averaged maps
        double acc_v = 0.0, acc_h = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            acc_v += var[c];
            acc_h += hent[c];
        }
        out.combined[0].values[v] = acc_v / static_cast<double>(C);
        out.combined[1].values[v] = acc_h / static_cast<double>(C);

        // similarity of the top-2 classes by mean
        std::size_t c1 = 0;
        for (std::size_t c = 1; c < C; ++c)
            if (mean[c] > mean[c1]) c1 = c;
        std::size_t c2 = c1 == 0 ? 1 : 0;
        for (std::size_t c = 0; c < C; ++c)
            if (c != c1 && mean[c] > mean[c2]) c2 = c;
        out.combined[2].values[v] = bhattacharyya(hists[c1], hists[c2]);
        out.combined[3].values[v] = symmetric_negative_kl(hists[c1], hists[c2], alpha);

        // multi-class entropy and mutual information
        double h_mean = 0.0;
        for (std::size_t c = 0; c < C; ++c)
            if (mean[c] > 0.0) h_mean -= mean[c] * std::log(mean[c]);
        out.combined[4].values[v] = h_mean;
        out.combined[5].values[v] = h_mean + cond;

        // class-specific families
        for (std::size_t c = 0; c < C; ++c) {
            out.class_specific[0][c].values[v] = var[c];
            out.class_specific[1][c].values[v] = hent[c];
            double comp = 1.0 - mean[c];
            double hb = 0.0;
            if (mean[c] > 0.0) hb -= mean[c] * std::log(mean[c]);
            if (comp > 0.0) hb -= comp * std::log(comp);
            out.class_specific[2][c].values[v] = hb;
            out.class_specific[3][c].values[v] = hb + cond_binary[c];
        }
    });

    for (auto& m : out.combined) m.check_finite();
    for (auto& fam : out.class_specific)
        for (auto& m : fam) m.check_finite();
    return out;
}

}  // namespace uncmap

#endif
