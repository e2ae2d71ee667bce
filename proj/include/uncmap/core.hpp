#ifndef UNCMAP_CORE_HPP
#define UNCMAP_CORE_HPP

#include <vector>

#include "uncmap/parallel.hpp"
#include "uncmap/types.hpp"

namespace uncmap {

// Per-voxel mean over the T dropout samples, accumulated in double.
inline MeanPrediction bayesian_average(const SampleTensor& s) {
    const std::size_t T = s.samples(), C = s.classes(), V = s.voxels();
    std::vector<float> mean(C * V);
    parallel_for(V, [&](std::size_t v) {
        for (std::size_t c = 0; c < C; ++c) {
            double acc = 0.0;
            for (std::size_t t = 0; t < T; ++t) acc += s.at(t, c, v);
            mean[c * V + v] = static_cast<float>(acc / static_cast<double>(T));
        }
    });
    return MeanPrediction(C, s.dims(), std::move(mean));
}

// Argmax over classes; ties break toward the lowest class index.
inline LabelMap predicted_labels(const MeanPrediction& m) {
    const std::size_t C = m.classes(), V = m.voxels();
    std::vector<std::uint8_t> labels(V);
    parallel_for(V, [&](std::size_t v) {
        std::size_t best = 0;
        float best_p = m.at(0, v);
        for (std::size_t c = 1; c < C; ++c) {
            float p = m.at(c, v);
            if (p > best_p) {
                best_p = p;
                best = c;
            }
        }
        labels[v] = static_cast<std::uint8_t>(best);
    });
    return LabelMap(C, m.dims(), std::move(labels));
}

}  // namespace uncmap

#endif
