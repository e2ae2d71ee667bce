#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "uncmap/core.hpp"
#include "uncmap/io.hpp"
#include "uncmap/npy.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = UNCMAP_CLI_PATH;

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string cmd = kCli + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
    int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

fs::path work_dir() {
    auto dir = fs::temp_directory_path() / "uncmap_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("maps --list prints exactly the ten measure ids") {
    auto r = run("maps --list");
    CHECK(r.exit_code == 0);
    std::istringstream ss(r.output);
    std::string line;
    int n = 0;
    while (std::getline(ss, line))
        if (!line.empty()) ++n;
    CHECK(n == 10);
    CHECK(r.output.find("sim_kl") != std::string::npos);
    CHECK(r.output.find("ova_mi") != std::string::npos);
}

TEST_CASE("unknown subcommand exits 2") {
    CHECK(run("frobnicate").exit_code == 2);
    CHECK(run("synth --no-such-flag").exit_code == 2);
}

TEST_CASE("synth -> maps -> evaluate round trip") {
    auto dir = work_dir();
    auto s = (dir / "s.npy").string();
    auto l = (dir / "l.npy").string();
    auto r1 = run("synth --nx 16 --ny 16 --nz 2 --seed 11 --sigma 1.0 --out-samples " + s +
                  " --out-labels " + l);
    REQUIRE(r1.exit_code == 0);

    auto r2 = run("maps --samples " + s + " --map mu_entropy --out-dir " + dir.string());
    CHECK(r2.exit_code == 0);
    CHECK(fs::exists(dir / "mu_entropy.npy"));

    auto rec = (dir / "records.csv").string();
    auto r3 = run("evaluate --samples " + s + " --labels " + l +
                  " --model-id m0 --patient-id p0 -o " + rec);
    REQUIRE(r3.exit_code == 0);
    auto records = uncmap::read_records_csv(rec);
    CHECK(!records.empty());
    int dice_rows = 0;
    for (const auto& r : records)
        if (r.metric == "dice") ++dice_rows;
    CHECK(dice_rows == 3);
}

TEST_CASE("evaluate against its own predicted labels gives dice 1") {
    auto dir = work_dir();
    auto s = (dir / "sd.npy").string();
    auto l = (dir / "ld.npy").string();
    REQUIRE(run("synth --nx 16 --ny 16 --nz 2 --seed 2 --sigma 1.0 --out-samples " + s +
                " --out-labels " + l)
                .exit_code == 0);
    // ground truth := the tensor's own prediction
    auto tensor = uncmap::read_sample_tensor(s);
    auto pred = uncmap::predicted_labels(uncmap::bayesian_average(tensor));
    auto lp = (dir / "pred.npy").string();
    uncmap::write_label_map(lp, pred);

    auto rec = (dir / "recd.csv").string();
    REQUIRE(run("evaluate --samples " + s + " --labels " + lp + " -o " + rec).exit_code == 0);
    int dice_rows = 0;
    for (const auto& r : uncmap::read_records_csv(rec))
        if (r.metric == "dice") {
            CHECK(r.value == 1.0);
            ++dice_rows;
        }
    CHECK(dice_rows == 3);
}

TEST_CASE("compare pipeline with a crafted records CSV") {
    auto dir = work_dir();
    auto rec = (dir / "crafted.csv").string();
    std::vector<uncmap::EvalRecord> records;
    for (int m = 0; m < 144; ++m) {
        std::string id = "m" + std::to_string(m);
        records.push_back({id, "p0", "A", "auc_pr", -1, 0.9});
        records.push_back({id, "p0", "B", "auc_pr", -1, 0.1});
    }
    uncmap::write_records_csv(rec, records);

    auto out = (dir / "cmp.csv").string();
    auto js = (dir / "cmp.json").string();
    auto r = run("compare --records " + rec + " --metric auc_pr --class -1 --grouping model -o " +
                 out + " --json " + js);
    REQUIRE(r.exit_code == 0);

    std::string csv = read_bytes(out);
    std::istringstream ss(csv);
    std::string header, row;
    std::getline(ss, header);
    CHECK(header == "map_a,map_b,k,n,ci_lo,ci_hi,mode,significant");
    std::getline(ss, row);  // A vs B
    CHECK(row.find("A,B,144,144,0.9748") != std::string::npos);
    CHECK(row.back() == '1');  // significant

    // modes on (full, full) stays on y = x
    auto modes_out = (dir / "modes.csv").string();
    auto rm = run("modes --full " + js + " --subset " + js + " -o " + modes_out);
    REQUIRE(rm.exit_code == 0);
    std::istringstream ms(read_bytes(modes_out));
    std::getline(ms, header);
    CHECK(header == "map_a,map_b,mode_subset,mode_full");
    while (std::getline(ms, row)) {
        auto c1 = row.find(',', row.find(',') + 1);
        auto c2 = row.find(',', c1 + 1);
        CHECK(row.substr(c1 + 1, c2 - c1 - 1) == row.substr(c2 + 1));
    }
}

TEST_CASE("records CSV round trip preserves values exactly") {
    auto dir = work_dir();
    auto rec = (dir / "rt.csv").string();
    std::vector<uncmap::EvalRecord> records = {
        {"m0", "p0", "mu_mi", "auc_pr", -1, 0.12345678901234567},
        {"m0", "p0", "cw_entropy", "brats_unc", 2, 1.0 / 3.0},
        {"m0", "p0", "", "dice", 0, 1.0},
    };
    uncmap::write_records_csv(rec, records);
    auto back = uncmap::read_records_csv(rec);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].model_id == records[i].model_id);
        CHECK(back[i].map_id == records[i].map_id);
        CHECK(back[i].metric == records[i].metric);
        CHECK(back[i].class_index == records[i].class_index);
        CHECK(back[i].value == records[i].value);  // exact: shortest round-trip format
    }
}

TEST_CASE("config file overrides defaults") {
    auto dir = work_dir();
    auto cfgp = (dir / "cfg.json").string();
    {
        std::ofstream out(cfgp);
        out << "{\"n_bins\": 1}";  // invalid on purpose
    }
    auto s = (dir / "s.npy").string();
    auto l = (dir / "l.npy").string();
    REQUIRE(run("synth --nx 16 --ny 16 --nz 2 --out-samples " + s + " --out-labels " + l)
                .exit_code == 0);
    auto r = run("--config " + cfgp + " evaluate --samples " + s + " --labels " + l + " -o " +
                 (dir / "x.csv").string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("fixed seed output is byte-identical across thread counts") {
    auto dir = work_dir();
    auto run_with_threads = [&](const char* threads, const std::string& tag) {
        setenv("UNCMAP_THREADS", threads, 1);
        auto s = (dir / ("t" + tag + "_s.npy")).string();
        auto l = (dir / ("t" + tag + "_l.npy")).string();
        auto rec = (dir / ("t" + tag + ".csv")).string();
        REQUIRE(run("synth --nx 16 --ny 16 --nz 2 --seed 42 --out-samples " + s +
                    " --out-labels " + l)
                    .exit_code == 0);
        REQUIRE(run("evaluate --samples " + s + " --labels " + l + " -o " + rec).exit_code == 0);
        return read_bytes(s) + "|" + read_bytes(l) + "|" + read_bytes(rec);
    };
    auto one = run_with_threads("1", "1");
    auto many = run_with_threads("6", "6");
    unsetenv("UNCMAP_THREADS");
    CHECK(one == many);
}
