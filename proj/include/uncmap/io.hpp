#ifndef UNCMAP_IO_HPP
#define UNCMAP_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uncmap/eval.hpp"
#include "uncmap/measures.hpp"
#include "uncmap/stats.hpp"

namespace uncmap {

struct RunConfig {
    int n_bins = kDefaultBins;
    std::size_t expected_samples = 50;
    double smoothing_alpha = kKlSmoothing;
    double credible_level = 0.95;
    Grouping grouping = Grouping::PerModel;
    int top_by_dice = 0;
    double min_dice = -1.0;
    std::vector<std::string> class_names;

    void validate() const {
        if (n_bins < 2) throw std::invalid_argument("config: n_bins must be >= 2");
        if (!(credible_level > 0.0 && credible_level < 1.0))
            throw std::invalid_argument("config: credible level outside (0,1)");
    }
};

namespace io_detail {

// shortest round-trippable decimal
inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    double back = std::strtod(buf, nullptr);
    if (back == x) {
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[32];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, x);
            if (std::strtod(shorter, nullptr) == x) return shorter;
        }
    }
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace io_detail

// Long-format record CSV: model_id,patient_id,map_id,metric,class,value
inline void write_records_csv(const std::string& path, const std::vector<EvalRecord>& records,
                              bool append = false) {
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    if (!append || out.tellp() == 0)
        out << "model_id,patient_id,map_id,metric,class,value\n";
    for (const auto& r : records)
        out << r.model_id << ',' << r.patient_id << ',' << r.map_id << ',' << r.metric << ','
            << r.class_index << ',' << io_detail::fmt(r.value) << '\n';
}

inline std::vector<EvalRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "model_id,patient_id,map_id,metric,class,value")
        throw std::runtime_error("records csv: missing or wrong header in " + path);
    std::vector<EvalRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = io_detail::split_csv_line(line);
        if (f.size() != 6)
            throw std::runtime_error("records csv: bad field count at line " +
                                     std::to_string(lineno) + " in " + path);
        EvalRecord r;
        r.model_id = f[0];
        r.patient_id = f[1];
        r.map_id = f[2];
        r.metric = f[3];
        r.class_index = std::stoi(f[4]);
        r.value = std::strtod(f[5].c_str(), nullptr);
        records.push_back(std::move(r));
    }
    return records;
}

inline void write_comparison_csv(const std::string& path, const ComparisonMatrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "map_a,map_b,k,n,ci_lo,ci_hi,mode,significant\n";
    for (const auto& c : m.cells)
        out << c.map_a << ',' << c.map_b << ',' << c.k << ',' << c.n << ','
            << io_detail::fmt(c.ci_lo) << ',' << io_detail::fmt(c.ci_hi) << ','
            << io_detail::fmt(c.mode) << ',' << (c.significant ? 1 : 0) << '\n';
}

inline void write_pr_curve_csv(const std::string& path, const PrCurve& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "threshold,recall,precision\n";
    for (std::size_t i = 0; i < curve.recall.size(); ++i)
        out << io_detail::fmt(curve.threshold[i]) << ',' << io_detail::fmt(curve.recall[i]) << ','
            << io_detail::fmt(curve.precision[i]) << '\n';
}

inline void write_brats_curves_csv(const std::string& path, const BratsCurves& curves) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "tau,dice,tpr,tnr\n";
    for (std::size_t i = 0; i < curves.tau.size(); ++i)
        out << io_detail::fmt(curves.tau[i]) << ',' << io_detail::fmt(curves.dice[i]) << ','
            << io_detail::fmt(curves.tpr[i]) << ',' << io_detail::fmt(curves.tnr[i]) << '\n';
}

inline void write_modes_csv(const std::string& path, const ComparisonMatrix& full,
                            const std::vector<std::pair<double, double>>& points) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "map_a,map_b,mode_subset,mode_full\n";
    for (std::size_t i = 0; i < points.size(); ++i)
        out << full.cells[i].map_a << ',' << full.cells[i].map_b << ','
            << io_detail::fmt(points[i].first) << ',' << io_detail::fmt(points[i].second) << '\n';
}

}  // namespace uncmap

#endif
