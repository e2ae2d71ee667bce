#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "uncmap/measures.hpp"

using namespace uncmap;

namespace {

std::vector<float> random_unit_samples(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    std::vector<float> out(n);
    for (auto& x : out) x = dist(rng);
    return out;
}

// independent straight-loop density oracle used against the implementation
double entropy_oracle(const Histogram& h) {
    double dv = 1.0 / h.n_bins, acc = 0.0;
    for (int b = 0; b < h.n_bins; ++b) {
        double f = h.counts[b] / (static_cast<double>(h.total) * dv);
        if (f > 0) acc -= f * std::log(f) * dv;
    }
    return acc;
}

}  // namespace

TEST_CASE("estimate_histogram boundary behaviour") {
    std::vector<float> zeros(7, 0.0f);
    auto h0 = estimate_histogram(zeros, 100);
    CHECK(h0.counts[0] == 7);
    CHECK(h0.total == 7);

    std::vector<float> ones = {1.0f, 1.0f};
    auto h1 = estimate_histogram(ones, 100);
    CHECK(h1.counts[99] == 2);  // 1.0 clamps into the last bin

    CHECK_THROWS_AS(estimate_histogram(std::vector<float>{1.5f}, 100), std::invalid_argument);
    CHECK_THROWS_AS(estimate_histogram(zeros, 1), std::invalid_argument);
}

TEST_CASE("estimate_histogram matches counting oracle on 1000 samples") {
    auto samples = random_unit_samples(1000, 3);
    auto h = estimate_histogram(samples, 100);
    std::vector<std::uint32_t> expected(100, 0);
    for (float s : samples) {
        int b = std::min(static_cast<int>(s * 100), 99);
        ++expected[b];
    }
    CHECK(h.counts == expected);
    std::uint64_t total = 0;
    for (auto c : h.counts) total += c;
    CHECK(total == 1000);
}

TEST_CASE("distribution_variance") {
    CHECK(distribution_variance(std::vector<float>{0.3f, 0.3f, 0.3f}) == 0.0);
    CHECK(distribution_variance(std::vector<float>{0.0f, 1.0f}) == 0.25);
    CHECK_THROWS_AS(distribution_variance(std::vector<float>{0.5f}), std::invalid_argument);

    auto samples = random_unit_samples(50, 17);
    double mean = 0.0;
    for (float x : samples) mean += x;
    mean /= 50.0;
    double oracle = 0.0;
    for (float x : samples) oracle += (x - mean) * (x - mean);
    oracle /= 50.0;
    CHECK(distribution_variance(samples) == Catch::Approx(oracle).margin(1e-12));
}

TEST_CASE("distribution_entropy closed forms") {
    // all mass in one of 100 bins: -ln(100)
    auto h = estimate_histogram(std::vector<float>(10, 0.005f), 100);
    CHECK(distribution_entropy(h) == Catch::Approx(-std::log(100.0)).margin(1e-12));

    // uniform over all 100 bins: density 1 everywhere, entropy 0
    std::vector<float> uniform(100);
    for (int b = 0; b < 100; ++b) uniform[b] = (b + 0.5f) / 100.0f;
    auto hu = estimate_histogram(uniform, 100);
    CHECK(distribution_entropy(hu) == Catch::Approx(0.0).margin(1e-12));

    // mass split evenly over 2 of 100 bins: -ln(50)
    std::vector<float> split(10);
    for (int i = 0; i < 5; ++i) split[i] = 0.005f;
    for (int i = 5; i < 10; ++i) split[i] = 0.505f;
    auto hs = estimate_histogram(split, 100);
    CHECK(distribution_entropy(hs) == Catch::Approx(-std::log(50.0)).margin(1e-12));
}

TEST_CASE("distribution_entropy matches oracle on random data") {
    auto h = estimate_histogram(random_unit_samples(200, 5), 100);
    CHECK(distribution_entropy(h) == Catch::Approx(entropy_oracle(h)).margin(1e-12));
}

TEST_CASE("bhattacharyya bounds and oracle") {
    auto a = random_unit_samples(50, 9);
    auto h1 = estimate_histogram(a, 100);
    CHECK(bhattacharyya(h1, h1) == Catch::Approx(1.0).margin(1e-12));

    auto lo = estimate_histogram(std::vector<float>(10, 0.1f), 100);
    auto hi = estimate_histogram(std::vector<float>(10, 0.9f), 100);
    CHECK(bhattacharyya(lo, hi) == 0.0);

    auto h2 = estimate_histogram(random_unit_samples(50, 10), 100);
    double oracle = 0.0;
    for (int b = 0; b < 100; ++b)
        oracle += std::sqrt((h1.counts[b] / 0.5) * (h2.counts[b] / 0.5)) * 0.01;
    double got = bhattacharyya(h1, h2);
    CHECK(got == Catch::Approx(oracle).margin(1e-12));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);

    auto h3 = estimate_histogram(a, 50);
    CHECK_THROWS_AS(bhattacharyya(h1, h3), std::invalid_argument);
}

TEST_CASE("symmetric_negative_kl properties and oracle") {
    auto h1 = estimate_histogram(random_unit_samples(50, 21), 100);
    auto h2 = estimate_histogram(random_unit_samples(50, 22), 100);

    CHECK(symmetric_negative_kl(h1, h1) == Catch::Approx(0.0).margin(1e-12));
    CHECK(symmetric_negative_kl(h1, h2) == symmetric_negative_kl(h2, h1));
    CHECK(symmetric_negative_kl(h1, h2) <= 0.0);

    // direct sum oracle on the smoothed densities
    const double alpha = 1e-3, dv = 0.01;
    double kl12 = 0.0, kl21 = 0.0;
    for (int b = 0; b < 100; ++b) {
        double f1 = (h1.counts[b] + alpha) / ((50.0 + 100 * alpha) * dv);
        double f2 = (h2.counts[b] + alpha) / ((50.0 + 100 * alpha) * dv);
        kl12 += f1 * std::log(f1 / f2) * dv;
        kl21 += f2 * std::log(f2 / f1) * dv;
    }
    CHECK(symmetric_negative_kl(h1, h2) == Catch::Approx(-kl12 - kl21).margin(1e-12));

    auto h3 = estimate_histogram(random_unit_samples(50, 23), 50);
    CHECK_THROWS_AS(symmetric_negative_kl(h1, h3), std::invalid_argument);
}

TEST_CASE("multiclass_entropy") {
    CHECK(multiclass_entropy(std::vector<float>{0.5f, 0.5f}) ==
          Catch::Approx(std::log(2.0)).margin(1e-7));
    CHECK(multiclass_entropy(std::vector<float>{1.0f, 0.0f, 0.0f}) == 0.0);
    double expected = -(0.7 * std::log(0.7) + 0.2 * std::log(0.2) + 0.1 * std::log(0.1));
    CHECK(multiclass_entropy(std::vector<float>{0.7f, 0.2f, 0.1f}) ==
          Catch::Approx(expected).margin(1e-7));
    CHECK_THROWS_AS(multiclass_entropy(std::vector<float>{0.7f, 0.7f}), std::invalid_argument);
}

TEST_CASE("mutual_information analytic cases and oracle") {
    // identical rows: no epistemic spread
    std::vector<float> same = {0.3f, 0.7f, 0.3f, 0.7f, 0.3f, 0.7f};
    CHECK(mutual_information(same, 3, 2) == Catch::Approx(0.0).margin(1e-7));

    // maximally split rows: MI = ln 2
    std::vector<float> split = {1.0f, 0.0f, 0.0f, 1.0f};
    CHECK(mutual_information(split, 2, 2) == Catch::Approx(std::log(2.0)).margin(1e-12));

    // random rows vs a two-term oracle
    std::mt19937 rng(33);
    std::uniform_real_distribution<double> dist(0.05, 1.0);
    const std::size_t T = 50, C = 3;
    std::vector<float> rows(T * C);
    for (std::size_t t = 0; t < T; ++t) {
        double raw[3], sum = 0.0;
        for (auto& x : raw) {
            x = dist(rng);
            sum += x;
        }
        for (std::size_t c = 0; c < C; ++c) rows[t * C + c] = static_cast<float>(raw[c] / sum);
    }
    double cond = 0.0;
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t c = 0; c < C; ++c) {
            double p = rows[t * C + c];
            if (p > 0) cond += p * std::log(p);
        }
    cond /= T;
    double h = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
        double m = 0.0;
        for (std::size_t t = 0; t < T; ++t) m += rows[t * C + c];
        m /= T;
        h -= m * std::log(m);
    }
    double mi = mutual_information(rows, T, C);
    CHECK(mi == Catch::Approx(h + cond).margin(1e-12));
    CHECK(mi >= 0.0);
    CHECK(mi <= h + 1e-9);
}

TEST_CASE("measures are invariant under sample permutation") {
    auto samples = random_unit_samples(20, 40);
    auto shuffled = samples;
    std::mt19937 rng(41);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(distribution_variance(samples) ==
          Catch::Approx(distribution_variance(shuffled)).margin(1e-12));
    CHECK(estimate_histogram(samples, 100).counts == estimate_histogram(shuffled, 100).counts);
}
