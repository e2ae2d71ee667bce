// uncmap: epistemic uncertainty maps for MC-dropout segmentation,
// their evaluation, and the Bayesian pairwise comparison of maps.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uncmap/core.hpp"
#include "uncmap/io.hpp"
#include "uncmap/maps.hpp"
#include "uncmap/npy.hpp"
#include "uncmap/pipeline.hpp"
#include "uncmap/stats.hpp"
#include "uncmap/synth.hpp"

namespace {

using nlohmann::json;

uncmap::RunConfig load_config(const std::string& path) {
    uncmap::RunConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json j = json::parse(in);
    if (j.contains("n_bins")) cfg.n_bins = j["n_bins"].get<int>();
    if (j.contains("expected_samples")) cfg.expected_samples = j["expected_samples"].get<std::size_t>();
    if (j.contains("smoothing_alpha")) cfg.smoothing_alpha = j["smoothing_alpha"].get<double>();
    if (j.contains("credible_level")) cfg.credible_level = j["credible_level"].get<double>();
    if (j.contains("grouping"))
        cfg.grouping = j["grouping"].get<std::string>() == "patient" ? uncmap::Grouping::PerPatient
                                                                     : uncmap::Grouping::PerModel;
    if (j.contains("top")) cfg.top_by_dice = j["top"].get<int>();
    if (j.contains("min_dice")) cfg.min_dice = j["min_dice"].get<double>();
    if (j.contains("class_names"))
        cfg.class_names = j["class_names"].get<std::vector<std::string>>();
    cfg.validate();
    return cfg;
}

json matrix_to_json(const uncmap::ComparisonMatrix& m) {
    json j;
    j["map_ids"] = m.map_ids;
    j["cells"] = json::array();
    for (const auto& c : m.cells)
        j["cells"].push_back({{"map_a", c.map_a},
                              {"map_b", c.map_b},
                              {"k", c.k},
                              {"n", c.n},
                              {"ci_lo", c.ci_lo},
                              {"ci_hi", c.ci_hi},
                              {"mode", c.mode},
                              {"significant", c.significant}});
    return j;
}

uncmap::ComparisonMatrix matrix_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j = json::parse(in);
    uncmap::ComparisonMatrix m;
    m.map_ids = j["map_ids"].get<std::vector<std::string>>();
    for (const auto& c : j["cells"]) {
        uncmap::ComparisonCell cell;
        cell.map_a = c["map_a"].get<std::string>();
        cell.map_b = c["map_b"].get<std::string>();
        cell.k = c["k"].get<std::size_t>();
        cell.n = c["n"].get<std::size_t>();
        cell.ci_lo = c["ci_lo"].get<double>();
        cell.ci_hi = c["ci_hi"].get<double>();
        cell.mode = c["mode"].get<double>();
        cell.significant = c["significant"].get<bool>();
        m.cells.push_back(cell);
    }
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"epistemic uncertainty map toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file overriding run defaults");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a phantom sample tensor + labels");
    uncmap::PhantomSpec spec;
    spec.dims = {32, 32, 4};
    std::string dropout_kind = "bernoulli";
    std::string out_samples, out_labels;
    synth->add_option("--nx", spec.dims.nx);
    synth->add_option("--ny", spec.dims.ny);
    synth->add_option("--nz", spec.dims.nz);
    synth->add_option("--classes", spec.classes);
    synth->add_option("--samples", spec.samples, "number of MC dropout samples T");
    synth->add_option("--dropout", dropout_kind)->check(CLI::IsMember({"bernoulli", "gaussian"}));
    synth->add_option("--rate", spec.rate, "dropout rate p in (0,1)");
    synth->add_option("--sigma", spec.sigma_logit, "additive logit noise scale");
    synth->add_option("--seed", spec.seed);
    synth->add_option("--out-samples", out_samples)->required();
    synth->add_option("--out-labels", out_labels)->required();

    // maps
    auto* maps = app.add_subcommand("maps", "compute uncertainty maps to npy volumes");
    bool list_maps = false;
    std::string maps_samples, map_id = "all", map_class = "all", out_dir = ".";
    maps->add_flag("--list", list_maps, "list the ten map measure-ids");
    maps->add_option("--samples", maps_samples);
    maps->add_option("--map", map_id, "map id or 'all'");
    maps->add_option("--class", map_class, "class index or 'all' (class-specific maps)");
    maps->add_option("--out-dir", out_dir);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score all maps -> record CSV");
    std::string ev_samples, ev_labels, ev_model = "model0", ev_patient = "patient0", ev_out;
    bool ev_append = false;
    evaluate->add_option("--samples", ev_samples)->required();
    evaluate->add_option("--labels", ev_labels)->required();
    evaluate->add_option("--model-id", ev_model);
    evaluate->add_option("--patient-id", ev_patient);
    evaluate->add_option("-o,--out", ev_out)->required();
    evaluate->add_flag("--append", ev_append);

    // curves
    auto* curves = app.add_subcommand("curves", "emit PR / BRATS curve points as CSV");
    std::string cv_samples, cv_labels, cv_map = "mu_entropy", cv_pr, cv_brats;
    int cv_class = 0;
    curves->add_option("--samples", cv_samples)->required();
    curves->add_option("--labels", cv_labels)->required();
    curves->add_option("--map", cv_map);
    curves->add_option("--class", cv_class);
    curves->add_option("--out-pr", cv_pr);
    curves->add_option("--out-brats", cv_brats);

    // compare
    auto* compare = app.add_subcommand("compare", "pairwise Bayesian comparison of maps");
    std::string cp_records, cp_metric = "auc_pr", cp_grouping, cp_out, cp_json;
    int cp_class = -1, cp_top = -1;
    double cp_min_dice = -2.0;
    compare->add_option("--records", cp_records)->required();
    compare->add_option("--metric", cp_metric)->check(CLI::IsMember({"auc_pr", "brats_unc", "dice"}));
    compare->add_option("--class", cp_class, "-1 for combined maps");
    compare->add_option("--grouping", cp_grouping)->check(CLI::IsMember({"model", "patient"}));
    compare->add_option("--top", cp_top, "keep only the top-M models by mean Dice");
    compare->add_option("--min-dice", cp_min_dice, "drop models below this mean Dice");
    compare->add_option("-o,--out", cp_out, "comparison matrix CSV");
    compare->add_option("--json", cp_json, "comparison matrix JSON");

    // modes
    auto* modes = app.add_subcommand("modes", "posterior-mode correlation of two matrices");
    std::string md_full, md_subset, md_out;
    modes->add_option("--full", md_full)->required();
    modes->add_option("--subset", md_subset)->required();
    modes->add_option("-o,--out", md_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        uncmap::RunConfig cfg = load_config(config_path);

        if (*synth) {
            if (dropout_kind == "gaussian") spec.dropout = uncmap::DropoutKind::Gaussian;
            auto [tensor, labels] = uncmap::generate_phantom(spec);
            uncmap::write_sample_tensor(out_samples, tensor);
            uncmap::write_label_map(out_labels, labels);
        } else if (*maps) {
            if (list_maps) {
                for (const auto& id : uncmap::map_catalog()) std::cout << id << "\n";
                return 0;
            }
            if (maps_samples.empty()) throw std::runtime_error("maps: --samples required");
            uncmap::SampleTensor s = uncmap::read_sample_tensor(maps_samples);
            if (map_id == "all" && map_class == "all") {
                // single shared pass over the tensor for the whole catalog
                uncmap::MapSet all = uncmap::compute_all_maps(s, cfg.n_bins, cfg.smoothing_alpha);
                for (const auto& m : all.combined)
                    uncmap::write_volume_f32(out_dir + "/" + m.measure_id + ".npy", s.dims(),
                                             m.values);
                for (const auto& family : all.class_specific)
                    for (const auto& m : family)
                        uncmap::write_volume_f32(out_dir + "/" + m.measure_id + "_c" +
                                                     std::to_string(m.class_index) + ".npy",
                                                 s.dims(), m.values);
                return 0;
            }
            std::vector<std::string> ids;
            if (map_id == "all")
                ids = uncmap::map_catalog();
            else
                ids.push_back(map_id);
            for (const auto& id : ids) {
                if (uncmap::is_combined_map(id)) {
                    auto m = uncmap::compute_map(s, id, 0, cfg);
                    uncmap::write_volume_f32(out_dir + "/" + id + ".npy", s.dims(), m.values);
                } else {
                    std::vector<std::size_t> classes;
                    if (map_class == "all")
                        for (std::size_t c = 0; c < s.classes(); ++c) classes.push_back(c);
                    else
                        classes.push_back(std::stoul(map_class));
                    for (std::size_t c : classes) {
                        auto m = uncmap::compute_map(s, id, c, cfg);
                        uncmap::write_volume_f32(out_dir + "/" + id + "_c" + std::to_string(c) + ".npy",
                                                 s.dims(), m.values);
                    }
                }
            }
        } else if (*evaluate) {
            uncmap::SampleTensor s = uncmap::read_sample_tensor(ev_samples);
            uncmap::LabelMap gt = uncmap::read_label_map(ev_labels, s.classes());
            auto records = uncmap::evaluate_all(s, gt, ev_model, ev_patient, cfg);
            uncmap::write_records_csv(ev_out, records, ev_append);
        } else if (*curves) {
            uncmap::SampleTensor s = uncmap::read_sample_tensor(cv_samples);
            uncmap::LabelMap gt = uncmap::read_label_map(cv_labels, s.classes());
            uncmap::MeanPrediction mean = uncmap::bayesian_average(s);
            uncmap::LabelMap pred = uncmap::predicted_labels(mean);
            bool combined = uncmap::is_combined_map(cv_map);
            auto m = uncmap::compute_map(s, cv_map, static_cast<std::size_t>(cv_class), cfg);
            if (!cv_pr.empty()) {
                auto mask = combined
                                ? uncmap::misclassification_mask(pred, gt)
                                : uncmap::class_specific_mask(pred, gt,
                                                              static_cast<std::size_t>(cv_class));
                uncmap::write_pr_curve_csv(cv_pr, uncmap::pr_curve(m.values, mask));
            }
            if (!cv_brats.empty()) {
                if (combined)
                    throw std::runtime_error("curves: BRATS curves need a class-specific map");
                std::vector<bool> pred_c(s.voxels()), gt_c(s.voxels());
                for (std::size_t v = 0; v < s.voxels(); ++v) {
                    pred_c[v] = pred.at(v) == static_cast<std::uint8_t>(cv_class);
                    gt_c[v] = gt.at(v) == static_cast<std::uint8_t>(cv_class);
                }
                auto [score, bc] = uncmap::brats_unc(m.values, pred_c, gt_c, cfg.n_bins);
                uncmap::write_brats_curves_csv(cv_brats, bc);
            }
        } else if (*compare) {
            auto records = uncmap::read_records_csv(cp_records);
            uncmap::CompareOptions opts;
            opts.level = cfg.credible_level;
            opts.grouping = cfg.grouping;
            opts.top_by_dice = cfg.top_by_dice;
            opts.min_dice = cfg.min_dice;
            if (!cp_grouping.empty())
                opts.grouping = cp_grouping == "patient" ? uncmap::Grouping::PerPatient
                                                         : uncmap::Grouping::PerModel;
            if (cp_top >= 0) opts.top_by_dice = cp_top;
            if (cp_min_dice > -2.0) opts.min_dice = cp_min_dice;
            auto matrix = uncmap::compare_maps(records, cp_metric, cp_class, opts);
            if (!cp_out.empty()) uncmap::write_comparison_csv(cp_out, matrix);
            if (!cp_json.empty()) {
                std::ofstream out(cp_json);
                if (!out) throw std::runtime_error("cannot write " + cp_json);
                out << matrix_to_json(matrix).dump(2) << "\n";
            }
        } else if (*modes) {
            auto full = matrix_from_json(md_full);
            auto subset = matrix_from_json(md_subset);
            auto points = uncmap::mode_correlation(full, subset);
            uncmap::write_modes_csv(md_out, full, points);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
