#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "decocrit/sweep.hpp"

using namespace decocrit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

SweepConfig tiny_config(const std::string& out_dir) {
    SweepConfig c;
    c.L_list = {4};
    c.pzz_list = {0.0, 0.2};
    c.chi_max = 64;
    c.sv_cutoff = 1e-12;
    c.sweep_tol = 1e-10;
    c.output_dir = out_dir;
    return c;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int count_lines(const fs::path& path) {
    std::ifstream in(path);
    int n = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

} // namespace

TEST_CASE("config: parsing, defaults and unknown keys") {
    Json j;
    j["L_list"] = {8, 12};
    j["pzz_list"] = {0.1};
    const SweepConfig c = SweepConfig::from_json(j);
    CHECK(c.chi_max == 300);
    CHECK(c.sv_cutoff == 1e-6);
    CHECK(c.sweep_tol == 1e-5);
    CHECK(c.J == 1.0);
    CHECK(c.constraint_mode == "critical_line");

    j["chi_mxa"] = 200;  // typo must be fatal
    CHECK_THROWS_AS(SweepConfig::from_json(j), std::invalid_argument);
}

TEST_CASE("config: validation catches inconsistent settings") {
    Json base;
    base["L_list"] = {8};
    base["pzz_list"] = {0.1};
    {
        Json j = base;
        j["constraint_mode"] = "critical_line";
        j["explicit_px_list"] = {0.1};
        CHECK_THROWS_AS(SweepConfig::from_json(j), std::invalid_argument);
    }
    {
        Json j = base;
        j["constraint_mode"] = "explicit_px";
        CHECK_THROWS_AS(SweepConfig::from_json(j), std::invalid_argument);
    }
    {
        Json j = base;
        j["constraint_mode"] = "explicit_px";
        j["explicit_px_list"] = {0.1, 0.2};  // length mismatch with pzz_list
        CHECK_THROWS_AS(SweepConfig::from_json(j), std::invalid_argument);
    }
    {
        Json j = base;
        j["pzz_list"] = {0.7};
        CHECK_THROWS_AS(SweepConfig::from_json(j), std::invalid_argument);
    }
    {
        Json j = base;
        j["observables_requested"] = {"entropy"};
        CHECK_THROWS_AS(SweepConfig::from_json(j), std::invalid_argument);
    }
}

TEST_CASE("point enumeration counts |L| x |pzz| plus jh-scan points") {
    SweepConfig c;
    c.L_list = {8, 12};
    c.pzz_list = {0.0, 0.1, 0.2};
    CHECK(enumerate_points(c).size() == 6);
    c.jh_scan = {1.1, 1.2};
    CHECK(enumerate_points(c).size() == 6 + 12);
}

TEST_CASE("run_point matches the dense oracle end to end (L=6)") {
    const OracleCheck check = oracle_check(6, 0.2, 256, 1e-12);
    CHECK(check.s2 < 1e-8);
    CHECK(check.mi < 1e-8);
    CHECK(check.czz < 1e-8);
    CHECK(check.cxx < 1e-8);
    CHECK(check.c2zz < 1e-8);
    CHECK(check.cstx < 1e-8);
    CHECK(check.chi < 1e-8);
}

TEST_CASE("rerunning a point byte-reproduces the persisted record") {
    const fs::path dir = fresh_dir("decocrit_det");
    SweepConfig c = tiny_config(dir.string());
    run_point(c, 4, 0.2, 1.0);
    const fs::path record = dir / "records" / (point_key(4, 0.2, 1.0) + ".json");
    REQUIRE(fs::exists(record));
    const std::string first = slurp(record);
    run_point(c, 4, 0.2, 1.0);
    CHECK(slurp(record) == first);
    fs::remove_all(dir);
}

TEST_CASE("record json round-trips exactly") {
    const fs::path dir = fresh_dir("decocrit_roundtrip");
    SweepConfig c = tiny_config(dir.string());
    const PointResult point = run_point(c, 4, 0.2, 1.0);
    const Json j = record_to_json(point);
    const PointResult back = record_from_json(j);
    CHECK(record_to_json(back).dump() == j.dump());
    CHECK(back.record.czz_curve == point.record.czz_curve);
    CHECK(back.record.mi_profile == point.record.mi_profile);
    CHECK(back.fits.size() == point.fits.size());
    fs::remove_all(dir);
}

TEST_CASE("run_sweep: manifest, resume and deterministic records") {
    const fs::path dir_a = fresh_dir("decocrit_sweep_a");
    SweepConfig c = tiny_config(dir_a.string());

    const SweepSummary first = run_sweep(c, 2, false);
    CHECK(first.executed == 2);
    CHECK(first.failed == 0);
    REQUIRE(fs::exists(dir_a / "manifest.json"));
    REQUIRE(fs::exists(dir_a / "records.jsonl"));
    CHECK(count_lines(dir_a / "records.jsonl") == 2);

    Json manifest = Json::parse(std::ifstream(dir_a / "manifest.json"));
    CHECK(manifest.at("points").size() == 2);
    for (const auto& [key, pt] : manifest.at("points").items())
        CHECK(pt.at("status") == "done");

    // resume: nothing re-executes
    const SweepSummary second = run_sweep(c, 1, true);
    CHECK(second.executed == 0);
    CHECK(second.skipped == 2);

    // a fresh run in a different directory produces identical records
    const fs::path dir_b = fresh_dir("decocrit_sweep_b");
    SweepConfig c2 = tiny_config(dir_b.string());
    run_sweep(c2, 1, false);
    CHECK(slurp(dir_a / "records.jsonl") == slurp(dir_b / "records.jsonl"));

    // interrupt simulation: drop one record, mark it pending, resume
    const std::string victim = point_key(4, 0.2, 1.0);
    fs::remove(dir_b / "records" / (victim + ".json"));
    {
        Json m = Json::parse(std::ifstream(dir_b / "manifest.json"));
        m["points"][victim]["status"] = "pending";
        std::ofstream(dir_b / "manifest.json") << m.dump(2);
    }
    const SweepSummary resumed = run_sweep(c2, 1, true);
    CHECK(resumed.executed == 1);
    CHECK(resumed.skipped == 1);
    CHECK(slurp(dir_a / "records.jsonl") == slurp(dir_b / "records.jsonl"));

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("emit_tables writes the documented schemas") {
    const fs::path dir = fresh_dir("decocrit_tables");
    SweepConfig c = tiny_config(dir.string());
    c.L_list = {8};  // wide enough for the default fit window [3, L-3]
    run_sweep(c, 1, false);

    const fs::path out = dir / "tables";
    const int n = emit_tables((dir / "records.jsonl").string(), out.string());
    CHECK(n == 2);

    const std::string mi = slurp(out / "mi_profile.csv");
    CHECK(mi.rfind("L,p_zz,p_x,L_A,MI2\n", 0) == 0);
    CHECK(count_lines(out / "mi_profile.csv") == 1 + 2 * 7);  // header + (L-1) rows per point

    const std::string corr = slurp(out / "corr.csv");
    CHECK(corr.rfind("L,p_zz,kind,r,value\n", 0) == 0);
    CHECK(count_lines(out / "corr.csv") == 1 + 2 * 4 * 4);  // 4 kinds, r = 1..L/2

    CHECK(slurp(out / "ceff.csv").rfind("L,p_zz,c_eff,beta1,residual_rms,window_lo,window_hi\n", 0) ==
          0);
    CHECK(count_lines(out / "ceff.csv") == 1 + 2);
    CHECK(slurp(out / "swssb.csv").rfind("L,p_zz,chi_I,chi_II\n", 0) == 0);
    CHECK(count_lines(out / "swssb.csv") == 1 + 2);
    CHECK(slurp(out / "exponents.csv")
              .rfind("L,p_zz,eta,eta_X,eta_residual_rms,eta_X_residual_rms\n", 0) == 0);
    CHECK(slurp(out / "nu.csv").rfind("p_zz,L,nu,residual_rms\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("cli: run, tables, fit and error codes") {
    const fs::path dir = fresh_dir("decocrit_cli");
    const fs::path config_path = dir / "config.json";
    {
        SweepConfig c = tiny_config((dir / "out").string());
        std::ofstream(config_path) << c.to_json().dump(2);
    }
    const std::string exe = "../tools/decocrit";

    CHECK(std::system((exe + " run --config " + config_path.string() + " --jobs 1").c_str()) == 0);
    CHECK(fs::exists(dir / "out" / "records.jsonl"));

    CHECK(std::system(
              (exe + " tables --in " + (dir / "out").string() + " --out " + (dir / "tbl").string())
                  .c_str()) == 0);
    CHECK(fs::exists(dir / "tbl" / "ceff.csv"));

    CHECK(std::system((exe + " fit --in " + (dir / "out" / "records.jsonl").string() +
                       " --kind cft_mi > /dev/null")
                          .c_str()) == 0);

    // config errors exit with 2
    {
        std::ofstream(config_path) << "{\"L_list\": [8], \"pzz_list\": [0.1], \"bogus\": 1}";
        const int rc = std::system((exe + " run --config " + config_path.string()).c_str());
        CHECK(WEXITSTATUS(rc) == 2);
    }
    fs::remove_all(dir);
}

TEST_CASE("cli: oracle-check passes at L=4") {
    const std::string exe = "../tools/decocrit";
    CHECK(std::system((exe + " oracle-check --L 4 --pzz 0.1 > /dev/null").c_str()) == 0);
}
