#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "decocrit/sweep.hpp"

// decocrit: parameter sweeps over the decohered critical Ising chain.
// Exit codes: 0 success, 1 runtime failure, 2 config error, 3 partial failures.

namespace {

int cmd_run(const std::string& config_path, int jobs, bool resume) {
    decocrit::SweepConfig config;
    try {
        config = decocrit::SweepConfig::from_file(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    const decocrit::SweepSummary summary = decocrit::run_sweep(config, jobs, resume);
    std::printf("executed %d, skipped %d, failed %d\n", summary.executed, summary.skipped,
                summary.failed);
    return summary.failed > 0 ? 3 : 0;
}

int cmd_tables(const std::string& in_dir, const std::string& out_dir) {
    const std::string records = in_dir + "/records.jsonl";
    const int n = decocrit::emit_tables(records, out_dir);
    std::printf("wrote tables for %d records to %s\n", n, out_dir.c_str());
    return 0;
}

int cmd_oracle_check(int length, double p_zz, int chi_max, double sv_cutoff) {
    const decocrit::OracleCheck check = decocrit::oracle_check(length, p_zz, chi_max, sv_cutoff);
    std::printf("max |MPS - ED| per family (L=%d, p_zz=%g):\n", length, p_zz);
    std::printf("  S2 profile   %.3e\n", check.s2);
    std::printf("  MI profile   %.3e\n", check.mi);
    std::printf("  C^I_Z        %.3e\n", check.czz);
    std::printf("  C^I_X        %.3e\n", check.cxx);
    std::printf("  C^II_ZZ      %.3e\n", check.c2zz);
    std::printf("  C^II_stX     %.3e\n", check.cstx);
    std::printf("  chi          %.3e\n", check.chi);
    const bool pass = check.max() < 1e-8;
    std::printf("%s (threshold 1e-8)\n", pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

int cmd_fit(const std::string& records_path, const std::string& kind) {
    std::ifstream in(records_path);
    if (!in) {
        std::fprintf(stderr, "cannot open %s\n", records_path.c_str());
        return 2;
    }
    std::vector<decocrit::PointResult> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) records.push_back(decocrit::record_from_json(decocrit::Json::parse(line)));
    }

    using decocrit::FitPoints;
    if (kind == "nu") {
        std::map<std::pair<double, int>, FitPoints> groups;
        for (const auto& point : records) {
            if (!point.fits.count("xi") || !point.fits.at("xi").ok) continue;
            const double delta = std::abs(point.record.jh_ratio - 1.0);
            if (delta < 1e-12) continue;
            groups[{point.record.params.p_zz, point.record.length}].emplace_back(
                delta, point.fits.at("xi").params.at("xi"));
        }
        std::printf("p_zz  L  nu  residual_rms  n\n");
        for (const auto& [group, pts] : groups) {
            if (pts.size() < 3) continue;
            const decocrit::FitResult f = decocrit::fit_nu(pts);
            std::printf("%g  %d  %.6f  %.3e  %d\n", group.first, group.second, f.params.at("nu"),
                        f.residual_rms, f.n_points);
        }
        return 0;
    }

    std::printf("key  value  stderr  residual_rms  n\n");
    for (const auto& point : records) {
        const auto& rec = point.record;
        FitPoints pts;
        decocrit::FitResult f;
        if (kind == "cft_mi") {
            for (const auto& [x, v] : rec.mi_profile) pts.emplace_back(x, v);
            if (pts.empty()) continue;
            f = decocrit::fit_cft_mi(pts, rec.length);
            if (!f.ok) {
                std::printf("%s  cft_mi failed: %s\n", point.key.c_str(), f.message.c_str());
                continue;
            }
            std::printf("%s  c_eff=%.6f  %.4f  %.3e  %d\n", point.key.c_str(),
                        f.params.at("c_eff"), f.stderrs.at("c_eff"), f.residual_rms, f.n_points);
        } else if (kind == "powerlaw") {
            for (const auto& [x, v] : rec.czz_curve) pts.emplace_back(x, v);
            if (pts.empty()) continue;
            f = decocrit::fit_powerlaw_chord(pts, rec.length);
            if (!f.ok) {
                std::printf("%s  powerlaw failed: %s\n", point.key.c_str(), f.message.c_str());
                continue;
            }
            std::printf("%s  eta=%.6f  %.4f  %.3e  %d\n", point.key.c_str(), f.params.at("eta"),
                        f.stderrs.at("eta"), f.residual_rms, f.n_points);
            FitPoints xpts;
            for (const auto& [x, v] : rec.cxx_curve) xpts.emplace_back(x, v);
            if (!xpts.empty()) {
                f = decocrit::fit_powerlaw_chord(xpts, rec.length);
                if (!f.ok) continue;
                std::printf("%s  eta_X=%.6f  %.4f  %.3e  %d\n", point.key.c_str(),
                            f.params.at("eta"), f.stderrs.at("eta"), f.residual_rms, f.n_points);
            }
        } else if (kind == "exp") {
            for (const auto& [x, v] : rec.czz_curve) pts.emplace_back(x, v);
            if (pts.empty()) continue;
            f = decocrit::fit_exp_decay(pts);
            std::printf("%s  xi=%.6f  %.4f  %.3e  %d%s\n", point.key.c_str(), f.params.at("xi"),
                        f.stderrs.count("xi") ? f.stderrs.at("xi") : 0.0, f.residual_rms,
                        f.n_points, f.ok ? "" : "  (not converged)");
        } else {
            std::fprintf(stderr, "unknown fit kind: %s\n", kind.c_str());
            return 2;
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decohered critical Ising chain: sweeps, tables and fits"};
    app.require_subcommand(1);

    std::string config_path, in_dir, out_dir, records_path, fit_kind;
    int jobs = 0;
    bool resume = false;
    int length = 6;
    double p_zz = 0.1;
    int chi_max = 256;
    double sv_cutoff = 1e-12;

    CLI::App* run = app.add_subcommand("run", "execute a sweep from a config file");
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--jobs", jobs, "concurrent points (default: all)");
    run->add_flag("--resume", resume, "skip points already done");

    CLI::App* tables = app.add_subcommand("tables", "emit CSV tables from sweep results");
    tables->add_option("--in", in_dir, "sweep output directory")->required();
    tables->add_option("--out", out_dir, "table output directory")->required();

    CLI::App* oracle = app.add_subcommand("oracle-check", "compare the MPS pipeline with the dense reference");
    oracle->add_option("--L", length, "chain length (<= 8)")->required();
    oracle->add_option("--pzz", p_zz, "decoherence strength")->required();
    oracle->add_option("--chi", chi_max, "bond dimension cap");
    oracle->add_option("--cutoff", sv_cutoff, "singular value cutoff");

    CLI::App* fit = app.add_subcommand("fit", "fit curves stored in a records.jsonl");
    fit->add_option("--in", records_path, "records.jsonl path")->required();
    fit->add_option("--kind", fit_kind, "cft_mi | powerlaw | exp | nu")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, jobs, resume);
        if (tables->parsed()) return cmd_tables(in_dir, out_dir);
        if (oracle->parsed()) return cmd_oracle_check(length, p_zz, chi_max, sv_cutoff);
        if (fit->parsed()) return cmd_fit(records_path, fit_kind);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
