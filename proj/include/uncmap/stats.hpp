#ifndef UNCMAP_STATS_HPP
#define UNCMAP_STATS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uncmap/eval.hpp"

namespace uncmap {

// Beta(1 + k, 1 + N - k): posterior over the win proportion p_{A>B}
// under the uniform prior.
struct BetaPosterior {
    double alpha = 1.0;
    double beta = 1.0;
};

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz).
inline double beta_cf(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 1e-15, tiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b); the Beta(a,b) CDF.
inline double beta_cdf(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                   b * std::log1p(-x);
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::beta_cf(a, b, x) / a;
    return 1.0 - bt * detail::beta_cf(b, a, 1.0 - x) / b;
}

// Quantile by bracketed bisection, refined to absolute tolerance 1e-10.
inline double beta_quantile(double a, double b, double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        if (beta_cdf(a, b, mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Strict wins of A over B across paired groups; ties are not wins.
inline std::pair<std::size_t, std::size_t> count_wins(std::span<const double> values_a,
                                                      std::span<const double> values_b) {
    if (values_a.size() != values_b.size())
        throw std::invalid_argument("count_wins: length mismatch");
    std::size_t k = 0;
    for (std::size_t i = 0; i < values_a.size(); ++i) k += values_a[i] > values_b[i];
    return {k, values_a.size()};
}

inline BetaPosterior posterior(std::size_t k, std::size_t n) {
    if (k > n) throw std::invalid_argument("posterior: k > N");
    return {1.0 + static_cast<double>(k), 1.0 + static_cast<double>(n - k)};
}

// Equal-tailed credible interval [Q((1-level)/2), Q(1-(1-level)/2)].
inline std::pair<double, double> credible_interval(const BetaPosterior& p, double level = 0.95) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("credible_interval: level outside (0,1)");
    double tail = (1.0 - level) / 2.0;
    return {beta_quantile(p.alpha, p.beta, tail), beta_quantile(p.alpha, p.beta, 1.0 - tail)};
}

// (alpha-1)/(alpha+beta-2) = k/N; 0.5 when the posterior is the prior.
inline double posterior_mode(const BetaPosterior& p) {
    if (p.alpha + p.beta <= 2.0) return 0.5;
    return (p.alpha - 1.0) / (p.alpha + p.beta - 2.0);
}

struct ComparisonCell {
    std::string map_a;
    std::string map_b;
    std::size_t k = 0;
    std::size_t n = 0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    double mode = 0.5;
    bool significant = false;
};

struct ComparisonMatrix {
    std::vector<std::string> map_ids;
    std::vector<ComparisonCell> cells;  // all ordered pairs A != B
};

enum class Grouping { PerModel, PerPatient };

struct CompareOptions {
    Grouping grouping = Grouping::PerModel;
    double level = 0.95;
    int top_by_dice = 0;       // 0 = no filter; else keep top-M models by mean Dice
    double min_dice = -1.0;    // drop models whose mean Dice is below this
};

namespace detail {

// Mean class-averaged Dice per model, for the top-M / min-dice filters.
inline std::map<std::string, double> model_mean_dice(const std::vector<EvalRecord>& records) {
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& r : records) {
        if (r.metric != "dice") continue;
        auto& [sum, cnt] = acc[r.model_id];
        sum += r.value;
        ++cnt;
    }
    std::map<std::string, double> out;
    for (const auto& [id, sc] : acc) out[id] = sc.first / static_cast<double>(sc.second);
    return out;
}

}  // namespace detail

// Pairwise comparison of maps on one metric: average within each group,
// count strict wins, then Beta posterior + credible interval per pair.
inline ComparisonMatrix compare_maps(const std::vector<EvalRecord>& records,
                                     const std::string& metric, int class_index,
                                     const CompareOptions& opts = {}) {
    std::set<std::string> keep_models;
    bool filter_models = opts.top_by_dice > 0 || opts.min_dice >= 0.0;
    if (filter_models) {
        auto mean_dice = detail::model_mean_dice(records);
        if (mean_dice.empty())
            throw std::invalid_argument("compare_maps: dice filter requested but no dice records");
        std::vector<std::pair<std::string, double>> ranked(mean_dice.begin(), mean_dice.end());
        if (opts.min_dice >= 0.0)
            std::erase_if(ranked, [&](const auto& md) { return md.second < opts.min_dice; });
        // rank-10 ties break by model id (sort is id-ascending within equal dice)
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        if (opts.top_by_dice > 0 && ranked.size() > static_cast<std::size_t>(opts.top_by_dice))
            ranked.resize(opts.top_by_dice);
        for (const auto& [id, d] : ranked) keep_models.insert(id);
    }

    // cell[(group, map)] -> mean of the metric over the other axis
    std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> acc;
    std::set<std::string> maps, groups;
    for (const auto& r : records) {
        if (r.metric != metric || r.class_index != class_index) continue;
        if (filter_models && !keep_models.count(r.model_id)) continue;
        const std::string& group = opts.grouping == Grouping::PerModel ? r.model_id : r.patient_id;
        auto& [sum, cnt] = acc[{group, r.map_id}];
        sum += r.value;
        ++cnt;
        maps.insert(r.map_id);
        groups.insert(group);
    }
    if (maps.size() < 2) throw std::invalid_argument("compare_maps: fewer than two maps to compare");

    // group-averaged metric per map, groups in a fixed order
    std::map<std::string, std::vector<double>> per_map;
    for (const auto& m : maps) {
        auto& vals = per_map[m];
        vals.reserve(groups.size());
        for (const auto& g : groups) {
            auto it = acc.find({g, m});
            if (it == acc.end())
                throw std::invalid_argument("compare_maps: missing cell for group '" + g +
                                            "', map '" + m + "'");
            vals.push_back(it->second.first / static_cast<double>(it->second.second));
        }
    }

    ComparisonMatrix matrix;
    matrix.map_ids.assign(maps.begin(), maps.end());
    for (const auto& a : matrix.map_ids)
        for (const auto& b : matrix.map_ids) {
            if (a == b) continue;
            auto [k, n] = count_wins(per_map[a], per_map[b]);
            BetaPosterior post = posterior(k, n);
            auto [lo, hi] = credible_interval(post, opts.level);
            ComparisonCell cell;
            cell.map_a = a;
            cell.map_b = b;
            cell.k = k;
            cell.n = n;
            cell.ci_lo = lo;
            cell.ci_hi = hi;
            cell.mode = posterior_mode(post);
            cell.significant = (0.5 < lo) || (0.5 > hi);
            matrix.cells.push_back(cell);
        }
    return matrix;
}

// Scatter data (mode_subset, mode_full), one point per ordered pair.
inline std::vector<std::pair<double, double>> mode_correlation(const ComparisonMatrix& full,
                                                               const ComparisonMatrix& subset) {
    if (full.cells.size() != subset.cells.size())
        throw std::invalid_argument("mode_correlation: pair sets differ");
    std::vector<std::pair<double, double>> points;
    points.reserve(full.cells.size());
    for (std::size_t i = 0; i < full.cells.size(); ++i) {
        const auto& f = full.cells[i];
        const auto& s = subset.cells[i];
        if (f.map_a != s.map_a || f.map_b != s.map_b)
            throw std::invalid_argument("mode_correlation: pair sets differ");
        points.emplace_back(s.mode, f.mode);
    }
    return points;
}

}  // namespace uncmap

#endif
