#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "uncmap/npy.hpp"
#include "uncmap/synth.hpp"

using namespace uncmap;

namespace {

std::filesystem::path tmp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("sample tensor round trip") {
    // 2 x 2 x (1,2,2): T=2, C=2, V=4
    std::vector<float> data(2 * 2 * 4);
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t v = 0; v < 4; ++v) {
            float p = 0.1f * (v + 1) + 0.05f * t;
            data[(t * 2 + 0) * 4 + v] = p;
            data[(t * 2 + 1) * 4 + v] = 1.0f - p;
        }
    SampleTensor s(2, 2, {2, 2, 1}, data);
    auto path = tmp_file("uncmap_roundtrip.npy");
    write_sample_tensor(path.string(), s);
    auto back = read_sample_tensor(path.string());
    CHECK(back.samples() == 2);
    CHECK(back.classes() == 2);
    CHECK(back.voxels() == 4);
    CHECK(back.raw() == data);
    std::filesystem::remove(path);
}

TEST_CASE("phantom write-then-read is bit identical") {
    PhantomSpec spec;
    spec.dims = {10, 10, 2};
    spec.seed = 4;
    auto [tensor, labels] = generate_phantom(spec);
    auto ps = tmp_file("uncmap_phantom_s.npy");
    auto pl = tmp_file("uncmap_phantom_l.npy");
    write_sample_tensor(ps.string(), tensor);
    write_label_map(pl.string(), labels);
    auto s2 = read_sample_tensor(ps.string());
    auto l2 = read_label_map(pl.string(), 3);
    CHECK(s2.raw() == tensor.raw());
    CHECK(l2.raw() == labels.raw());

    // deterministic byte stream: writing again gives identical files
    auto ps2 = tmp_file("uncmap_phantom_s2.npy");
    write_sample_tensor(ps2.string(), tensor);
    CHECK(read_bytes(ps) == read_bytes(ps2));
    for (auto& p : {ps, pl, ps2}) std::filesystem::remove(p);
}

TEST_CASE("npy header is numpy v1.0 with C-order layout") {
    PhantomSpec spec;
    spec.dims = {6, 5, 2};
    spec.seed = 1;
    auto ps = tmp_file("uncmap_header.npy");
    write_sample_tensor(ps.string(), generate_phantom_samples(spec));
    std::string bytes = read_bytes(ps);
    REQUIRE(bytes.size() > 10);
    CHECK(bytes.substr(0, 6) == "\x93NUMPY");
    CHECK(bytes[6] == 1);
    CHECK(bytes[7] == 0);
    CHECK(bytes.find("'descr': '<f4'") != std::string::npos);
    CHECK(bytes.find("'fortran_order': False") != std::string::npos);
    CHECK(bytes.find("(50, 3, 2, 5, 6, )") != std::string::npos);
    std::filesystem::remove(ps);
}

TEST_CASE("reader rejects malformed files with distinct codes") {
    auto path = tmp_file("uncmap_bad.npy");

    auto write_raw = [&](const std::string& bytes) {
        std::ofstream out(path, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    };

    try {
        read_sample_tensor(tmp_file("uncmap_missing.npy").string());
        FAIL("expected NpyError");
    } catch (const NpyError& e) {
        CHECK(e.code() == NpyErrorCode::FileNotFound);
    }

    write_raw("NOTNUMPYAAAAAAAA");
    try {
        read_sample_tensor(path.string());
        FAIL("expected NpyError");
    } catch (const NpyError& e) {
        CHECK(e.code() == NpyErrorCode::BadMagic);
    }

    // labels file offered as samples: wrong dtype
    auto lp = tmp_file("uncmap_labels_as_samples.npy");
    write_label_map(lp.string(), LabelMap(2, {2, 2, 1}, {0, 1, 1, 0}));
    try {
        read_sample_tensor(lp.string());
        FAIL("expected NpyError");
    } catch (const NpyError& e) {
        CHECK(e.code() == NpyErrorCode::BadDtype);
    }

    // rank-3 float volume offered as samples: wrong rank
    auto vp = tmp_file("uncmap_vol.npy");
    write_volume_f32(vp.string(), {2, 2, 1}, {0.0, 0.0, 0.0, 0.0});
    try {
        read_sample_tensor(vp.string());
        FAIL("expected NpyError");
    } catch (const NpyError& e) {
        CHECK(e.code() == NpyErrorCode::BadShape);
    }

    for (auto& p : {path, lp, vp}) std::filesystem::remove(p);
}

TEST_CASE("reader rejects off-simplex payload") {
    auto path = tmp_file("uncmap_offsimplex.npy");
    {
        // bypass SampleTensor validation by writing the payload directly
        std::ofstream out(path, std::ios::binary);
        std::string dict =
            "{'descr': '<f4', 'fortran_order': False, 'shape': (2, 2, 1, 1, 1, ), }";
        std::size_t base = 10 + dict.size() + 1;
        std::size_t padded = (base + 63) / 64 * 64;
        dict.append(padded - base, ' ');
        dict.push_back('\n');
        std::uint16_t hlen = static_cast<std::uint16_t>(dict.size());
        out.write("\x93NUMPY\x01\x00", 8);
        char len_le[2] = {static_cast<char>(hlen & 0xFF), static_cast<char>(hlen >> 8)};
        out.write(len_le, 2);
        out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
        float vals[4] = {0.5f, 0.6f, 0.5f, 0.5f};  // voxel sum 1.1
        out.write(reinterpret_cast<const char*>(vals), sizeof(vals));
    }
    try {
        read_sample_tensor(path.string());
        FAIL("expected NpyError");
    } catch (const NpyError& e) {
        CHECK(e.code() == NpyErrorCode::InvariantViolation);
    }
    std::filesystem::remove(path);
}
