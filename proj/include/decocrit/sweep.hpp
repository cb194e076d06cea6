#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decocrit/records.hpp"

// Sweep orchestration: configuration, the per-point pipeline
// (DMRG -> double -> decohere -> measure -> fit), persistence and table
// emission. Results are written one JSON file per point (atomically) plus a
// canonical records.jsonl; CSVs are derived views.

namespace decocrit {

inline constexpr const char* kArtifactVersion = "decocrit 0.1.0";

struct SweepConfig {
    std::vector<int> L_list;
    double J = 1.0;
    double h = 1.0;
    std::vector<double> pzz_list;
    std::string constraint_mode = "critical_line";  // or "explicit_px"
    std::optional<std::vector<double>> explicit_px_list;  // zipped with pzz_list
    std::vector<double> jh_scan;  // extra J/h points per (L, p_zz), for nu
    int chi_max = 300;
    double sv_cutoff = 1e-6;
    double sweep_tol = 1e-5;
    int max_sweeps = 40;
    std::uint64_t seed = 7;
    std::vector<std::string> observables_requested;  // empty = all
    std::string output_dir;

    void validate() const;
    ObservableFlags flags() const;
    Json to_json() const;

    static SweepConfig from_json(const Json& j);       // unknown keys are errors
    static SweepConfig from_file(const std::string& path);
};

struct PointSpec {
    int length = 0;
    double p_zz = 0.0;
    double jh = 1.0;
    std::string key() const { return point_key(length, p_zz, jh); }
};

std::vector<PointSpec> enumerate_points(const SweepConfig& config);

// Full pipeline for one parameter point. Persists the record under
// config.output_dir (when set) before fitting, then rewrites it with fits.
PointResult run_point(const SweepConfig& config, int length, double p_zz, double jh);

struct SweepSummary {
    int executed = 0;
    int skipped = 0;
    int failed = 0;
};

SweepSummary run_sweep(const SweepConfig& config, int jobs = 0, bool resume = false);

// CSV tables derived from records.jsonl (exact schemas documented in the
// README). Returns the number of records consumed.
int emit_tables(const std::string& records_path, const std::string& out_dir);

// MPS pipeline vs dense oracle at one point on the critical line; returns the
// largest absolute deviation per observable family.
struct OracleCheck {
    double s2 = 0.0, mi = 0.0, czz = 0.0, cxx = 0.0, c2zz = 0.0, cstx = 0.0, chi = 0.0;
    double max() const;
};

OracleCheck oracle_check(int length, double p_zz, int chi_max = 256, double sv_cutoff = 1e-12);

} // namespace decocrit
