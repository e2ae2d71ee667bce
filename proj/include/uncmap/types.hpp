#ifndef UNCMAP_TYPES_HPP
#define UNCMAP_TYPES_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uncmap {

constexpr double kSimplexTol = 1e-5;

struct Dims {
    std::size_t nx = 0, ny = 0, nz = 0;
    std::size_t voxels() const { return nx * ny * nz; }
    bool operator==(const Dims&) const = default;
};

// Voxel linearization: x fastest, then y, then z.
inline std::size_t voxel_index(const Dims& d, std::size_t x, std::size_t y, std::size_t z) {
    return (z * d.ny + y) * d.nx + x;
}

// T x C x V class-probability samples from MC dropout. Values are stored
// as float; all reductions accumulate in double.
class SampleTensor {
public:
    SampleTensor(std::size_t t, std::size_t c, Dims dims, std::vector<float> data)
        : t_(t), c_(c), dims_(dims), data_(std::move(data)) {
        std::size_t v = dims_.voxels();
        if (t_ < 2 || c_ < 2 || v < 1)
            throw std::invalid_argument("SampleTensor: need T >= 2, C >= 2, V >= 1");
        if (data_.size() != t_ * c_ * v)
            throw std::invalid_argument("SampleTensor: data size does not match T*C*V");
        for (float x : data_)
            if (!(x >= 0.0f && x <= 1.0f))
                throw std::invalid_argument("SampleTensor: value outside [0,1]");
        for (std::size_t t = 0; t < t_; ++t)
            for (std::size_t j = 0; j < v; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < c_; ++c) s += at(t, c, j);
                if (std::abs(s - 1.0) > kSimplexTol)
                    throw std::invalid_argument("SampleTensor: per-voxel class sum off simplex");
            }
    }

    std::size_t samples() const { return t_; }
    std::size_t classes() const { return c_; }
    std::size_t voxels() const { return dims_.voxels(); }
    const Dims& dims() const { return dims_; }

    float at(std::size_t t, std::size_t c, std::size_t v) const {
        return data_[(t * c_ + c) * dims_.voxels() + v];
    }
    const std::vector<float>& raw() const { return data_; }

private:
    std::size_t t_, c_;
    Dims dims_;
    std::vector<float> data_;
};

// Per-voxel class-probability means (Bayesian model averaging output).
class MeanPrediction {
public:
    MeanPrediction(std::size_t c, Dims dims, std::vector<float> data)
        : c_(c), dims_(dims), data_(std::move(data)) {
        std::size_t v = dims_.voxels();
        if (data_.size() != c_ * v)
            throw std::invalid_argument("MeanPrediction: data size does not match C*V");
        for (float x : data_)
            if (!(x >= 0.0f && x <= 1.0f))
                throw std::invalid_argument("MeanPrediction: value outside [0,1]");
        for (std::size_t j = 0; j < v; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < c_; ++c) s += at(c, j);
            if (std::abs(s - 1.0) > kSimplexTol)
                throw std::invalid_argument("MeanPrediction: per-voxel class sum off simplex");
        }
    }

    std::size_t classes() const { return c_; }
    std::size_t voxels() const { return dims_.voxels(); }
    const Dims& dims() const { return dims_; }
    float at(std::size_t c, std::size_t v) const { return data_[c * dims_.voxels() + v]; }
    const std::vector<float>& raw() const { return data_; }

private:
    std::size_t c_;
    Dims dims_;
    std::vector<float> data_;
};

// Ground-truth or predicted class index per voxel.
class LabelMap {
public:
    LabelMap(std::size_t c, Dims dims, std::vector<std::uint8_t> labels)
        : c_(c), dims_(dims), labels_(std::move(labels)) {
        if (labels_.size() != dims_.voxels())
            throw std::invalid_argument("LabelMap: label count does not match dims");
        for (std::uint8_t l : labels_)
            if (l >= c_) throw std::invalid_argument("LabelMap: label index >= C");
    }

    std::size_t classes() const { return c_; }
    std::size_t voxels() const { return dims_.voxels(); }
    const Dims& dims() const { return dims_; }
    std::uint8_t at(std::size_t v) const { return labels_[v]; }
    const std::vector<std::uint8_t>& raw() const { return labels_; }

private:
    std::size_t c_;
    Dims dims_;
    std::vector<std::uint8_t> labels_;
};

enum class MapScope { Combined, ClassSpecific };

// One scalar per voxel plus the identity of the measure that produced it.
struct UncertaintyMap {
    std::vector<double> values;
    MapScope scope = MapScope::Combined;
    std::size_t class_index = 0;  // meaningful only for class-specific maps
    std::string measure_id;

    void check_finite() const {
        for (double x : values)
            if (!std::isfinite(x))
                throw std::runtime_error("UncertaintyMap: non-finite value in " + measure_id);
    }
};

}  // namespace uncmap

#endif
