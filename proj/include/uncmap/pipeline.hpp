#ifndef UNCMAP_PIPELINE_HPP
#define UNCMAP_PIPELINE_HPP

#include <string>
#include <vector>

#include "uncmap/core.hpp"
#include "uncmap/eval.hpp"
#include "uncmap/io.hpp"
#include "uncmap/maps.hpp"
#include "uncmap/types.hpp"

namespace uncmap {

// Computes one map by catalog id. Class-specific ids need class_index.
inline UncertaintyMap compute_map(const SampleTensor& s, const std::string& id,
                                  std::size_t class_index, const RunConfig& cfg) {
    if (id == "av_variance") return averaged_map(s, DescriptionMeasure::Variance, cfg.n_bins);
    if (id == "av_entropy") return averaged_map(s, DescriptionMeasure::Entropy, cfg.n_bins);
    if (id == "sim_bc")
        return similarity_map(s, SimilarityMeasure::BC, cfg.n_bins, cfg.smoothing_alpha);
    if (id == "sim_kl")
        return similarity_map(s, SimilarityMeasure::KL, cfg.n_bins, cfg.smoothing_alpha);
    if (id == "mu_entropy") return multiclass_map(s, MultiClassMeasure::Entropy);
    if (id == "mu_mi") return multiclass_map(s, MultiClassMeasure::MI);
    if (id == "cw_variance")
        return classwise_map(s, class_index, DescriptionMeasure::Variance, cfg.n_bins);
    if (id == "cw_entropy")
        return classwise_map(s, class_index, DescriptionMeasure::Entropy, cfg.n_bins);
    if (id == "ova_entropy") return one_vs_all_map(s, class_index, MultiClassMeasure::Entropy);
    if (id == "ova_mi") return one_vs_all_map(s, class_index, MultiClassMeasure::MI);
    throw std::invalid_argument("unknown map id: " + id);
}

// Full per-(model, patient) evaluation: AUC-PR for the six combined maps
// against the misclassification mask, AUC-PR and BRATS-UNC for the four
// class-specific families per class, and per-class Dice.
inline std::vector<EvalRecord> evaluate_all(const SampleTensor& s, const LabelMap& gt,
                                            const std::string& model_id,
                                            const std::string& patient_id, const RunConfig& cfg) {
    if (gt.voxels() != s.voxels())
        throw std::invalid_argument("evaluate_all: label volume does not match tensor dims");
    const std::size_t C = s.classes();
    MeanPrediction mean = bayesian_average(s);
    LabelMap pred = predicted_labels(mean);
    auto misclass = misclassification_mask(pred, gt);
    std::size_t misclassified = 0;
    for (bool b : misclass) misclassified += b;

    std::vector<EvalRecord> records;
    auto push = [&](const std::string& map_id, const std::string& metric, int cls, double value) {
        records.push_back({model_id, patient_id, map_id, metric, cls, value});
    };

    MapSet all = compute_all_maps(s, cfg.n_bins, cfg.smoothing_alpha);
    for (const auto& m : all.combined) {
        if (misclassified == 0) continue;  // AUC-PR undefined with no positives
        push(m.measure_id, "auc_pr", -1, auc_pr(m.values, misclass));
    }
    for (const auto& family : all.class_specific) {
        for (std::size_t c = 0; c < C; ++c) {
            const UncertaintyMap& m = family[c];
            auto cmask = class_specific_mask(pred, gt, c);
            bool any = false;
            for (bool b : cmask) any = any || b;
            if (any)
                push(m.measure_id, "auc_pr", static_cast<int>(c), auc_pr(m.values, cmask));
            std::vector<bool> pred_c(s.voxels()), gt_c(s.voxels());
            for (std::size_t v = 0; v < s.voxels(); ++v) {
                pred_c[v] = pred.at(v) == c;
                gt_c[v] = gt.at(v) == c;
            }
            auto [score, curves] = brats_unc(m.values, pred_c, gt_c, cfg.n_bins);
            push(m.measure_id, "brats_unc", static_cast<int>(c), score);
        }
    }
    for (std::size_t c = 0; c < C; ++c) {
        std::vector<bool> pred_c(s.voxels()), gt_c(s.voxels());
        for (std::size_t v = 0; v < s.voxels(); ++v) {
            pred_c[v] = pred.at(v) == c;
            gt_c[v] = gt.at(v) == c;
        }
        push("", "dice", static_cast<int>(c), dice(pred_c, gt_c));
    }
    return records;
}

}  // namespace uncmap

#endif
