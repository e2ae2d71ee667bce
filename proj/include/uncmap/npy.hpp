#ifndef UNCMAP_NPY_HPP
#define UNCMAP_NPY_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "uncmap/types.hpp"

namespace uncmap {

enum class NpyErrorCode {
    FileNotFound,
    BadMagic,
    BadVersion,
    BadHeader,
    BadDtype,
    BadOrder,
    BadShape,
    Truncated,
    InvariantViolation,
};

class NpyError : public std::runtime_error {
public:
    NpyError(NpyErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    NpyErrorCode code() const { return code_; }

private:
    NpyErrorCode code_;
};

namespace npy_detail {

inline std::string shape_literal(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape.size(); ++i) os << shape[i] << ", ";
    os << ")";
    return os.str();
}

// Version 1.0, little-endian, C-order only.
inline void write_header(std::ostream& out, const std::string& descr,
                         const std::vector<std::size_t>& shape) {
    std::string dict = "{'descr': '" + descr + "', 'fortran_order': False, 'shape': " +
                       shape_literal(shape) + ", }";
    std::size_t base = 10 + dict.size() + 1;  // magic+version+len + dict + newline
    std::size_t padded = (base + 63) / 64 * 64;
    dict.append(padded - base, ' ');
    dict.push_back('\n');
    std::uint16_t hlen = static_cast<std::uint16_t>(dict.size());
    out.write("\x93NUMPY\x01\x00", 8);
    char len_le[2] = {static_cast<char>(hlen & 0xFF), static_cast<char>(hlen >> 8)};
    out.write(len_le, 2);
    out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
}

struct Header {
    std::string descr;
    std::vector<std::size_t> shape;
};

inline std::string extract_value(const std::string& dict, const std::string& key) {
    auto pos = dict.find("'" + key + "'");
    if (pos == std::string::npos)
        throw NpyError(NpyErrorCode::BadHeader, "npy: header missing key " + key);
    pos = dict.find(':', pos);
    if (pos == std::string::npos) throw NpyError(NpyErrorCode::BadHeader, "npy: malformed header");
    return dict.substr(pos + 1);
}

inline Header read_header(std::istream& in, const std::string& path) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "\x93NUMPY", 6) != 0)
        throw NpyError(NpyErrorCode::BadMagic, "npy: bad magic in " + path);
    if (magic[6] != 1 || magic[7] != 0)
        throw NpyError(NpyErrorCode::BadVersion, "npy: unsupported version in " + path);
    unsigned char len_le[2];
    in.read(reinterpret_cast<char*>(len_le), 2);
    if (!in) throw NpyError(NpyErrorCode::Truncated, "npy: truncated header in " + path);
    std::size_t hlen = len_le[0] | (static_cast<std::size_t>(len_le[1]) << 8);
    std::string dict(hlen, '\0');
    in.read(dict.data(), static_cast<std::streamsize>(hlen));
    if (!in) throw NpyError(NpyErrorCode::Truncated, "npy: truncated header in " + path);

    Header h;
    std::string descr_field = extract_value(dict, "descr");
    auto q1 = descr_field.find('\'');
    auto q2 = descr_field.find('\'', q1 + 1);
    if (q1 == std::string::npos || q2 == std::string::npos)
        throw NpyError(NpyErrorCode::BadHeader, "npy: malformed descr in " + path);
    h.descr = descr_field.substr(q1 + 1, q2 - q1 - 1);

    std::string order_field = extract_value(dict, "fortran_order");
    if (order_field.find("False") == std::string::npos)
        throw NpyError(NpyErrorCode::BadOrder, "npy: only C-order supported, in " + path);

    std::string shape_field = extract_value(dict, "shape");
    auto p1 = shape_field.find('(');
    auto p2 = shape_field.find(')');
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw NpyError(NpyErrorCode::BadHeader, "npy: malformed shape in " + path);
    std::istringstream ss(shape_field.substr(p1 + 1, p2 - p1 - 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t val = 0;
        bool any = false;
        for (char ch : tok)
            if (ch >= '0' && ch <= '9') {
                val = val * 10 + static_cast<std::size_t>(ch - '0');
                any = true;
            } else if (ch != ' ') {
                throw NpyError(NpyErrorCode::BadHeader, "npy: malformed shape in " + path);
            }
        if (any) h.shape.push_back(val);
    }
    return h;
}

template <typename T>
std::vector<T> read_payload(std::istream& in, std::size_t count, const std::string& path) {
    std::vector<T> data(count);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(count * sizeof(T)));
    if (!in) throw NpyError(NpyErrorCode::Truncated, "npy: truncated payload in " + path);
    return data;
}

}  // namespace npy_detail

// Samples: '<f4', shape (T, C, nz, ny, nx). Validates all tensor invariants.
inline SampleTensor read_sample_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NpyError(NpyErrorCode::FileNotFound, "npy: cannot open " + path);
    auto h = npy_detail::read_header(in, path);
    if (h.descr != "<f4")
        throw NpyError(NpyErrorCode::BadDtype, "npy: expected <f4 samples in " + path);
    if (h.shape.size() != 5)
        throw NpyError(NpyErrorCode::BadShape, "npy: expected rank-5 (T,C,nz,ny,nx) in " + path);
    Dims dims{h.shape[4], h.shape[3], h.shape[2]};
    std::size_t count = h.shape[0] * h.shape[1] * dims.voxels();
    auto data = npy_detail::read_payload<float>(in, count, path);
    try {
        return SampleTensor(h.shape[0], h.shape[1], dims, std::move(data));
    } catch (const std::invalid_argument& e) {
        throw NpyError(NpyErrorCode::InvariantViolation, std::string(e.what()) + " in " + path);
    }
}

// Labels: '|u1', shape (nz, ny, nx).
inline LabelMap read_label_map(const std::string& path, std::size_t classes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NpyError(NpyErrorCode::FileNotFound, "npy: cannot open " + path);
    auto h = npy_detail::read_header(in, path);
    if (h.descr != "|u1")
        throw NpyError(NpyErrorCode::BadDtype, "npy: expected |u1 labels in " + path);
    if (h.shape.size() != 3)
        throw NpyError(NpyErrorCode::BadShape, "npy: expected rank-3 (nz,ny,nx) in " + path);
    Dims dims{h.shape[2], h.shape[1], h.shape[0]};
    auto data = npy_detail::read_payload<std::uint8_t>(in, dims.voxels(), path);
    try {
        return LabelMap(classes, dims, std::move(data));
    } catch (const std::invalid_argument& e) {
        throw NpyError(NpyErrorCode::InvariantViolation, std::string(e.what()) + " in " + path);
    }
}

inline void write_sample_tensor(const std::string& path, const SampleTensor& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NpyError(NpyErrorCode::FileNotFound, "npy: cannot write " + path);
    npy_detail::write_header(out, "<f4",
                             {s.samples(), s.classes(), s.dims().nz, s.dims().ny, s.dims().nx});
    out.write(reinterpret_cast<const char*>(s.raw().data()),
              static_cast<std::streamsize>(s.raw().size() * sizeof(float)));
}

inline void write_label_map(const std::string& path, const LabelMap& l) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NpyError(NpyErrorCode::FileNotFound, "npy: cannot write " + path);
    npy_detail::write_header(out, "|u1", {l.dims().nz, l.dims().ny, l.dims().nx});
    out.write(reinterpret_cast<const char*>(l.raw().data()),
              static_cast<std::streamsize>(l.raw().size()));
}

// Uncertainty maps are written as '<f4' rank-3 volumes.
inline void write_volume_f32(const std::string& path, const Dims& dims,
                             const std::vector<double>& values) {
    if (values.size() != dims.voxels())
        throw NpyError(NpyErrorCode::BadShape, "npy: volume size does not match dims");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NpyError(NpyErrorCode::FileNotFound, "npy: cannot write " + path);
    npy_detail::write_header(out, "<f4", {dims.nz, dims.ny, dims.nx});
    std::vector<float> f(values.begin(), values.end());
    out.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size() * sizeof(float)));
}

}  // namespace uncmap

#endif
