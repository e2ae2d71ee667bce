#ifndef UNCMAP_EVAL_HPP
#define UNCMAP_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "uncmap/measures.hpp"
#include "uncmap/types.hpp"

namespace uncmap {

// Precision-recall points of uncertainty as a misclassification
// predictor, one point per distinct threshold.
struct PrCurve {
    std::vector<double> threshold;
    std::vector<double> recall;     // non-decreasing
    std::vector<double> precision;  // in [0,1]
};

// Filtered Dice / tpr / tnr sampled on the left-Riemann threshold grid.
struct BratsCurves {
    std::vector<double> tau;
    std::vector<double> dice;
    std::vector<double> tpr;  // non-increasing in tau
    std::vector<double> tnr;  // non-increasing in tau
};

// One scalar result per (model, patient, map, metric[, class]).
struct EvalRecord {
    std::string model_id;
    std::string patient_id;
    std::string map_id;       // empty for map-independent metrics (dice)
    std::string metric;       // auc_pr | brats_unc | dice
    int class_index = -1;     // -1 = combined
    double value = 0.0;
};

inline std::vector<bool> misclassification_mask(const LabelMap& pred, const LabelMap& gt) {
    if (pred.voxels() != gt.voxels())
        throw std::invalid_argument("misclassification_mask: size mismatch");
    std::vector<bool> mask(pred.voxels());
    for (std::size_t v = 0; v < pred.voxels(); ++v) mask[v] = pred.at(v) != gt.at(v);
    return mask;
}

// Misclassified and involving class c; all other voxels count as correct.
inline std::vector<bool> class_specific_mask(const LabelMap& pred, const LabelMap& gt,
                                             std::size_t c) {
    if (pred.voxels() != gt.voxels())
        throw std::invalid_argument("class_specific_mask: size mismatch");
    if (c >= pred.classes() || c >= gt.classes())
        throw std::invalid_argument("class_specific_mask: class index out of range");
    std::vector<bool> mask(pred.voxels());
    for (std::size_t v = 0; v < pred.voxels(); ++v)
        mask[v] = pred.at(v) != gt.at(v) && (pred.at(v) == c || gt.at(v) == c);
    return mask;
}

namespace detail {

// Filtered (Dice, tpr, tnr) at one threshold; voxels with u <= tau kept.
inline std::tuple<double, double, double> filtered_stats(
    std::span<const double> u, const std::vector<bool>& pred_c, const std::vector<bool>& gt_c,
    double tau, std::size_t tp_total, std::size_t tn_total, bool keep_all = false) {
    std::size_t tp = 0, tn = 0, p = 0, g = 0;
    for (std::size_t v = 0; v < u.size(); ++v) {
        if (!keep_all && u[v] > tau) continue;
        bool is_tp = pred_c[v] && gt_c[v];
        tp += is_tp;
        tn += !pred_c[v] && !gt_c[v];
        p += pred_c[v];
        g += gt_c[v];
    }
    double d = (p + g == 0) ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(p + g);
    double tpr =
        tp_total == 0 ? 0.0 : static_cast<double>(tp_total - tp) / static_cast<double>(tp_total);
    double tnr =
        tn_total == 0 ? 0.0 : static_cast<double>(tn_total - tn) / static_cast<double>(tn_total);
    return {d, tpr, tnr};
}

}  // namespace detail

// Full PR curve; average-precision form with no interpolation.
inline PrCurve pr_curve(std::span<const double> u, const std::vector<bool>& mask) {
    if (u.size() != mask.size()) throw std::invalid_argument("pr_curve: size mismatch");
    std::size_t positives = 0;
    for (bool b : mask) positives += b;
    if (positives == 0) throw std::invalid_argument("pr_curve: mask has no positives");

    // sort (u, positive) pairs descending; tie groups end up contiguous,
    // so within-group order is irrelevant to the counts
    std::vector<std::pair<double, bool>> order(u.size());
    for (std::size_t v = 0; v < u.size(); ++v) order[v] = {u[v], mask[v]};
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    PrCurve curve;
    std::size_t tp = 0, taken = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        double tau = order[i].first;
        std::size_t j = i;
        while (j < order.size() && order[j].first == tau) {
            tp += order[j].second;
            ++j;
        }
        taken += j - i;
        curve.threshold.push_back(tau);
        curve.recall.push_back(static_cast<double>(tp) / static_cast<double>(positives));
        curve.precision.push_back(static_cast<double>(tp) / static_cast<double>(taken));
        i = j;
    }
    return curve;
}

// Step-wise average precision: sum (R_i - R_{i-1}) * P_i, R_0 = 0.
// Depends only on the ranking of u (ties preserved).
inline double auc_pr(std::span<const double> u, const std::vector<bool>& mask) {
    PrCurve curve = pr_curve(u, mask);
    double auc = 0.0, prev_r = 0.0;
    for (std::size_t i = 0; i < curve.recall.size(); ++i) {
        auc += (curve.recall[i] - prev_r) * curve.precision[i];
        prev_r = curve.recall[i];
    }
    return auc;
}

inline double dice(const std::vector<bool>& pred_c, const std::vector<bool>& gt_c) {
    if (pred_c.size() != gt_c.size()) throw std::invalid_argument("dice: size mismatch");
    std::size_t inter = 0, p = 0, g = 0;
    for (std::size_t v = 0; v < pred_c.size(); ++v) {
        inter += pred_c[v] && gt_c[v];
        p += pred_c[v];
        g += gt_c[v];
    }
    if (p + g == 0) return 1.0;  // both empty: no disagreement
    return 2.0 * static_cast<double>(inter) / static_cast<double>(p + g);
}

// BRATS-UNC: integrate filtered Dice, 1-tnr and 1-tpr over the left-Riemann
// threshold grid, normalized by the uncertainty range so scores lie in
// [0,1] for non-normalised maps. Voxels with u <= tau are kept.
inline std::pair<double, BratsCurves> brats_unc(std::span<const double> u,
                                                const std::vector<bool>& pred_c,
                                                const std::vector<bool>& gt_c,
                                                int n_bins = kDefaultBins) {
    if (u.size() != pred_c.size() || u.size() != gt_c.size())
        throw std::invalid_argument("brats_unc: size mismatch");
    if (n_bins < 2) throw std::invalid_argument("brats_unc: n_bins must be >= 2");

    const std::size_t V = u.size();
    double lo = u[0], hi = u[0];
    for (double x : u) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    std::size_t tp_total = 0, tn_total = 0;
    for (std::size_t v = 0; v < V; ++v) {
        tp_total += pred_c[v] && gt_c[v];
        tn_total += !pred_c[v] && !gt_c[v];
    }

    const bool degenerate = (hi - lo) <= 1e-12;
    const int steps = degenerate ? 1 : n_bins;

    BratsCurves curves;
    curves.tau.resize(steps);
    curves.dice.resize(steps);
    curves.tpr.resize(steps);
    curves.tnr.resize(steps);

    double acc = 0.0;
    if (degenerate) {
        auto [d, tpr, tnr] =
            detail::filtered_stats(u, pred_c, gt_c, lo, tp_total, tn_total, /*keep_all=*/true);
        curves.tau[0] = lo;
        curves.dice[0] = d;
        curves.tpr[0] = tpr;
        curves.tnr[0] = tnr;
        acc = d + (1.0 - tnr) + (1.0 - tpr);
    } else {
        // Voxels sorted ascending by u: the kept set at tau_k is a prefix,
        // so the counts accumulate incrementally. Same u <= tau comparison
        // as the direct scan, hence identical integer counts.
        struct Entry {
            double u;
            bool pred, gt;
        };
        std::vector<Entry> order(V);
        for (std::size_t v = 0; v < V; ++v) order[v] = {u[v], pred_c[v], gt_c[v]};
        std::sort(order.begin(), order.end(),
                  [](const Entry& a, const Entry& b) { return a.u < b.u; });
        std::size_t tp = 0, tn = 0, p = 0, g = 0, next = 0;
        for (int k = 0; k < steps; ++k) {
            double tau = lo + k * (hi - lo) / n_bins;
            while (next < V && !(order[next].u > tau)) {
                const Entry& e = order[next];
                tp += e.pred && e.gt;
                tn += !e.pred && !e.gt;
                p += e.pred;
                g += e.gt;
                ++next;
            }
            double d =
                (p + g == 0) ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(p + g);
            double tpr = tp_total == 0 ? 0.0
                                       : static_cast<double>(tp_total - tp) /
                                             static_cast<double>(tp_total);
            double tnr = tn_total == 0 ? 0.0
                                       : static_cast<double>(tn_total - tn) /
                                             static_cast<double>(tn_total);
            curves.tau[k] = tau;
            curves.dice[k] = d;
            curves.tpr[k] = tpr;
            curves.tnr[k] = tnr;
            acc += d + (1.0 - tnr) + (1.0 - tpr);
        }
    }
    double score = acc / (3.0 * steps);
    return {score, curves};
}

}  // namespace uncmap

#endif
