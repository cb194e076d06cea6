#include "decocrit/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "decocrit/channels.hpp"
#include "decocrit/dmrg.hpp"
#include "decocrit/ed_oracle.hpp"

namespace decocrit {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

void SweepConfig::validate() const {
    if (L_list.empty()) throw std::invalid_argument("config: L_list must be nonempty");
    for (int l : L_list)
        if (l < 2 || l % 2 != 0)
            throw std::invalid_argument("config: L values must be even and >= 2");
    if (pzz_list.empty()) throw std::invalid_argument("config: pzz_list must be nonempty");
    for (double p : pzz_list)
        if (p < 0.0 || p > 0.5) throw std::invalid_argument("config: p_zz out of [0, 1/2]");
    if (J <= 0 || h <= 0) throw std::invalid_argument("config: J and h must be > 0");
    if (constraint_mode != "critical_line" && constraint_mode != "explicit_px")
        throw std::invalid_argument("config: constraint_mode must be critical_line or explicit_px");
    if (constraint_mode == "critical_line" && explicit_px_list.has_value())
        throw std::invalid_argument("config: critical_line forbids explicit_px_list");
    if (constraint_mode == "explicit_px") {
        if (!explicit_px_list.has_value())
            throw std::invalid_argument("config: explicit_px mode requires explicit_px_list");
        if (explicit_px_list->size() != pzz_list.size())
            throw std::invalid_argument("config: explicit_px_list must match pzz_list in length");
        for (double p : *explicit_px_list)
            if (p < 0.0 || p > 0.5) throw std::invalid_argument("config: p_x out of [0, 1/2]");
    }
    for (double r : jh_scan)
        if (r <= 0.0) throw std::invalid_argument("config: jh_scan values must be > 0");
    if (chi_max < 2) throw std::invalid_argument("config: chi_max must be >= 2");
    if (sv_cutoff < 0) throw std::invalid_argument("config: sv_cutoff must be >= 0");
    if (sweep_tol <= 0) throw std::invalid_argument("config: sweep_tol must be > 0");
    if (max_sweeps < 1) throw std::invalid_argument("config: max_sweeps must be >= 1");
    static const std::set<std::string> known_flags{"s2_profile", "mi_profile", "correlators",
                                                   "susceptibilities", "fits"};
    for (const auto& f : observables_requested)
        if (!known_flags.count(f))
            throw std::invalid_argument("config: unknown observable flag: " + f);
}

ObservableFlags SweepConfig::flags() const {
    if (observables_requested.empty()) return ObservableFlags{};
    ObservableFlags f;
    auto has = [&](const char* name) {
        return std::find(observables_requested.begin(), observables_requested.end(), name) !=
               observables_requested.end();
    };
    f.s2_profile = has("s2_profile");
    f.mi_profile = has("mi_profile");
    f.correlators = has("correlators") || has("susceptibilities");
    f.susceptibilities = has("susceptibilities");
    return f;
}

Json SweepConfig::to_json() const {
    Json j;
    j["L_list"] = L_list;
    j["J"] = J;
    j["h"] = h;
    j["pzz_list"] = pzz_list;
    j["constraint_mode"] = constraint_mode;
    if (explicit_px_list) j["explicit_px_list"] = *explicit_px_list;
    j["jh_scan"] = jh_scan;
    j["chi_max"] = chi_max;
    j["sv_cutoff"] = sv_cutoff;
    j["sweep_tol"] = sweep_tol;
    j["max_sweeps"] = max_sweeps;
    j["seed"] = seed;
    j["observables_requested"] = observables_requested;
    j["output_dir"] = output_dir;
    return j;
}

SweepConfig SweepConfig::from_json(const Json& j) {
    static const std::set<std::string> known{
        "L_list", "J", "h", "pzz_list", "constraint_mode", "explicit_px_list", "jh_scan",
        "chi_max", "sv_cutoff", "sweep_tol", "max_sweeps", "seed", "observables_requested",
        "output_dir"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw std::invalid_argument("config: unknown key: " + key);

    SweepConfig c;
    c.L_list = j.at("L_list").get<std::vector<int>>();
    c.pzz_list = j.at("pzz_list").get<std::vector<double>>();
    if (j.contains("J")) c.J = j.at("J").get<double>();
    if (j.contains("h")) c.h = j.at("h").get<double>();
    if (j.contains("constraint_mode")) c.constraint_mode = j.at("constraint_mode").get<std::string>();
    if (j.contains("explicit_px_list"))
        c.explicit_px_list = j.at("explicit_px_list").get<std::vector<double>>();
    if (j.contains("jh_scan")) c.jh_scan = j.at("jh_scan").get<std::vector<double>>();
    if (j.contains("chi_max")) c.chi_max = j.at("chi_max").get<int>();
    if (j.contains("sv_cutoff")) c.sv_cutoff = j.at("sv_cutoff").get<double>();
    if (j.contains("sweep_tol")) c.sweep_tol = j.at("sweep_tol").get<double>();
    if (j.contains("max_sweeps")) c.max_sweeps = j.at("max_sweeps").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("observables_requested"))
        c.observables_requested = j.at("observables_requested").get<std::vector<std::string>>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    c.validate();
    return c;
}

SweepConfig SweepConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: parse error: ") + e.what());
    }
    return from_json(j);
}

std::vector<PointSpec> enumerate_points(const SweepConfig& config) {
    std::vector<PointSpec> out;
    const double base_jh = config.J / config.h;
    for (int length : config.L_list) {
        for (double p_zz : config.pzz_list) {
            out.push_back(PointSpec{length, p_zz, base_jh});
            for (double jh : config.jh_scan) out.push_back(PointSpec{length, p_zz, jh});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// ground-state cache (DMRG solves shared between points of one process)
// ---------------------------------------------------------------------------

namespace {

struct GsKey {
    int length;
    double coupling_j, field_h, sv_cutoff, sweep_tol;
    int chi_max, max_sweeps;
    std::uint64_t seed;
    bool operator<(const GsKey& o) const {
        return std::tie(length, coupling_j, field_h, sv_cutoff, sweep_tol, chi_max, max_sweeps,
                        seed) < std::tie(o.length, o.coupling_j, o.field_h, o.sv_cutoff,
                                         o.sweep_tol, o.chi_max, o.max_sweeps, o.seed);
    }
};

struct GsEntry {
    std::once_flag once;
    DmrgResult result;
};

DmrgResult cached_ground_state(const GsKey& key) {
    static std::mutex map_mutex;
    static std::map<GsKey, std::shared_ptr<GsEntry>> cache;

    std::shared_ptr<GsEntry> entry;
    {
        std::lock_guard<std::mutex> lock(map_mutex);
        auto& slot = cache[key];
        if (!slot) slot = std::make_shared<GsEntry>();
        entry = slot;
    }
    std::call_once(entry->once, [&] {
        const MpoOperator mpo = build_tfim_mpo(key.length, key.coupling_j, key.field_h, true);
        DmrgSettings settings;
        settings.chi_max = key.chi_max;
        settings.sv_cutoff = key.sv_cutoff;
        settings.sweep_tol = key.sweep_tol;
        settings.max_sweeps = key.max_sweeps;
        settings.seed = key.seed;
        entry->result = ground_state(mpo, settings);
    });
    return entry->result;
}

} // namespace

// ---------------------------------------------------------------------------
// per-point pipeline
// ---------------------------------------------------------------------------

PointResult run_point(const SweepConfig& config, int length, double p_zz, double jh) {
    config.validate();
    const double coupling_j = jh * config.h;

    ChannelParams params;
    if (config.constraint_mode == "critical_line") {
        params = ChannelParams::critical_line(p_zz, coupling_j / config.h, config.h);
        params.coupling_j = coupling_j;  // keep physical J; the constraint uses J/h
    } else {
        const auto it = std::find(config.pzz_list.begin(), config.pzz_list.end(), p_zz);
        if (it == config.pzz_list.end())
            throw std::invalid_argument("run_point: p_zz not in pzz_list (explicit_px mode)");
        const double p_x = (*config.explicit_px_list)[it - config.pzz_list.begin()];
        params = ChannelParams::explicit_p(p_zz, p_x, coupling_j, config.h);
    }

    const GsKey key{length, coupling_j, config.h,       config.sv_cutoff,
                    config.sweep_tol,   config.chi_max, config.max_sweeps, config.seed};
    const DmrgResult gs = cached_ground_state(key);

    ChoiState state = double_pure_truncated(gs.state, config.chi_max, config.sv_cutoff);
    apply_decoherence(state, params);

    PointResult point;
    point.key = point_key(length, p_zz, jh);
    point.record = measure_all(state, params, config.flags());
    point.record.jh_ratio = jh;
    point.record.dmrg_energy = gs.energy;
    point.record.dmrg_converged = gs.converged;

    const bool persist = !config.output_dir.empty();
    const std::string record_path =
        persist ? (fs::path(config.output_dir) / "records" / (point.key + ".json")).string() : "";
    if (persist) {
        fs::create_directories(fs::path(config.output_dir) / "records");
        write_file_atomic(record_path, record_to_json(point).dump(2) + "\n");
    }

    const bool want_fits = config.observables_requested.empty() ||
                           std::find(config.observables_requested.begin(),
                                     config.observables_requested.end(),
                                     "fits") != config.observables_requested.end();
    if (want_fits) {
        const bool critical = std::abs(jh - 1.0) < 1e-12;
        FitPoints mi_pts, s2_pts, czz_pts, cxx_pts;
        for (const auto& [x, v] : point.record.mi_profile) mi_pts.emplace_back(x, v);
        for (const auto& [x, v] : point.record.s2_profile) s2_pts.emplace_back(x, v);
        for (const auto& [x, v] : point.record.czz_curve) czz_pts.emplace_back(x, v);
        for (const auto& [x, v] : point.record.cxx_curve) cxx_pts.emplace_back(x, v);
        if (critical) {
            if (!mi_pts.empty()) point.fits["cft_mi"] = fit_cft_mi(mi_pts, length);
            if (!s2_pts.empty()) point.fits["cft_s2"] = fit_cft_s2(s2_pts, length);
            if (!czz_pts.empty()) point.fits["eta"] = fit_powerlaw_chord(czz_pts, length);
            if (!cxx_pts.empty()) point.fits["eta_X"] = fit_powerlaw_chord(cxx_pts, length);
        } else if (!czz_pts.empty()) {
            point.fits["xi"] = fit_exp_decay(czz_pts, std::pair<double, double>(2.0, length / 2.0));
        }
    }
    if (persist) write_file_atomic(record_path, record_to_json(point).dump(2) + "\n");
    return point;
}

// ---------------------------------------------------------------------------
// sweep driver with manifest
// ---------------------------------------------------------------------------

namespace {

std::string now_iso() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

struct Manifest {
    Json doc;
    std::string path;
    std::mutex mutex;

    void flush_locked() { write_file_atomic(path, doc.dump(2) + "\n"); }

    void set_status(const std::string& key, const std::string& status, const std::string& error,
                    double truncation) {
        std::lock_guard<std::mutex> lock(mutex);
        Json& pt = doc["points"][key];
        const std::string prev = pt.contains("status") ? pt["status"].get<std::string>() : "pending";
        // monotone within a run: pending -> running -> done|failed; a resumed
        // run may retry failed points
        if (prev == "done") return;
        pt["status"] = status;
        if (!error.empty()) pt["error"] = error;
        if (truncation >= 0) pt["truncation_budget"] = truncation;
        doc["updated_at"] = now_iso();
        flush_locked();
    }
};

} // namespace

SweepSummary run_sweep(const SweepConfig& config, int jobs, bool resume) {
    config.validate();
    if (config.output_dir.empty()) throw std::invalid_argument("run_sweep: output_dir required");
    fs::create_directories(fs::path(config.output_dir) / "records");

    const std::vector<PointSpec> points = enumerate_points(config);
    const std::string manifest_path = (fs::path(config.output_dir) / "manifest.json").string();

    Manifest manifest;
    manifest.path = manifest_path;
    if (resume && fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        manifest.doc = Json::parse(in);
    } else {
        manifest.doc = Json::object();
        manifest.doc["artifact_version"] = kArtifactVersion;
        manifest.doc["config"] = config.to_json();
        manifest.doc["created_at"] = now_iso();
        manifest.doc["points"] = Json::object();
    }
    for (const auto& spec : points) {
        const std::string key = spec.key();
        if (!manifest.doc["points"].contains(key)) {
            Json pt;
            pt["L"] = spec.length;
            pt["p_zz"] = spec.p_zz;
            pt["jh"] = spec.jh;
            pt["status"] = "pending";
            manifest.doc["points"][key] = pt;
        }
    }
    {
        std::lock_guard<std::mutex> lock(manifest.mutex);
        manifest.doc["updated_at"] = now_iso();
        manifest.flush_locked();
    }

    SweepSummary summary;
    std::mutex summary_mutex;
    std::atomic<std::size_t> next{0};

    auto record_file = [&](const PointSpec& spec) {
        return (fs::path(config.output_dir) / "records" / (spec.key() + ".json")).string();
    };

    // snapshot of completed points, taken before workers start
    std::set<std::string> done_keys;
    if (resume)
        for (const auto& spec : points) {
            const std::string key = spec.key();
            const Json& pt = manifest.doc["points"][key];
            if (pt.contains("status") && pt["status"] == "done" && fs::exists(record_file(spec)))
                done_keys.insert(key);
        }

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            const PointSpec& spec = points[i];
            const std::string key = spec.key();

            if (done_keys.count(key)) {
                std::lock_guard<std::mutex> lock(summary_mutex);
                ++summary.skipped;
                continue;
            }

            manifest.set_status(key, "running", "", -1);
            try {
                const PointResult result = run_point(config, spec.length, spec.p_zz, spec.jh);
                manifest.set_status(key, "done", "", result.record.truncation_budget);
                std::lock_guard<std::mutex> lock(summary_mutex);
                ++summary.executed;
            } catch (const std::exception& e) {
                manifest.set_status(key, "failed", e.what(), -1);
                std::lock_guard<std::mutex> lock(summary_mutex);
                ++summary.failed;
            }
        }
    };

    int n_jobs = jobs;
    if (n_jobs <= 0)
        n_jobs = static_cast<int>(std::min<std::size_t>(
            points.size(), std::max(1u, std::thread::hardware_concurrency())));
    std::vector<std::thread> threads;
    for (int t = 0; t < n_jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    // canonical records.jsonl (sorted by L, p_zz, jh)
    std::vector<PointSpec> sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](const PointSpec& a, const PointSpec& b) {
        return std::tie(a.length, a.p_zz, a.jh) < std::tie(b.length, b.p_zz, b.jh);
    });
    std::ostringstream jsonl;
    for (const auto& spec : sorted) {
        const std::string file = record_file(spec);
        if (!fs::exists(file)) continue;
        std::ifstream in(file);
        Json rec = Json::parse(in);
        jsonl << rec.dump() << "\n";
    }
    write_file_atomic((fs::path(config.output_dir) / "records.jsonl").string(), jsonl.str());
    return summary;
}

// ---------------------------------------------------------------------------
// CSV tables
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

int emit_tables(const std::string& records_path, const std::string& out_dir) {
    std::ifstream in(records_path);
    if (!in) throw std::invalid_argument("emit_tables: cannot open " + records_path);
    std::vector<PointResult> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(record_from_json(Json::parse(line)));
    }
    if (records.empty()) throw std::invalid_argument("emit_tables: no records");

    std::sort(records.begin(), records.end(), [](const PointResult& a, const PointResult& b) {
        return std::tie(a.record.length, a.record.params.p_zz, a.record.jh_ratio) <
               std::tie(b.record.length, b.record.params.p_zz, b.record.jh_ratio);
    });

    fs::create_directories(out_dir);
    std::ostringstream mi_csv, ceff_csv, corr_csv, expo_csv, swssb_csv, nu_csv;
    mi_csv << "L,p_zz,p_x,L_A,MI2\n";
    ceff_csv << "L,p_zz,c_eff,beta1,residual_rms,window_lo,window_hi\n";
    corr_csv << "L,p_zz,kind,r,value\n";
    expo_csv << "L,p_zz,eta,eta_X,eta_residual_rms,eta_X_residual_rms\n";
    swssb_csv << "L,p_zz,chi_I,chi_II\n";
    nu_csv << "p_zz,L,nu,residual_rms\n";

    // xi fits grouped over the jh scan for the nu table
    std::map<std::pair<double, int>, FitPoints> xi_groups;

    int missing = 0;
    for (const PointResult& point : records) {
        const ObservableRecord& rec = point.record;
        const std::string length_str = std::to_string(rec.length);
        const std::string pzz_str = fmt(rec.params.p_zz);
        const bool critical = std::abs(rec.jh_ratio - 1.0) < 1e-12;

        if (critical) {
            for (const auto& [la, v] : rec.mi_profile)
                mi_csv << length_str << "," << pzz_str << "," << fmt(rec.params.p_x) << "," << la
                       << "," << fmt(v) << "\n";
            const std::vector<std::pair<const char*, const std::vector<std::pair<int, double>>*>>
                curves{{"CZ", &rec.czz_curve},
                       {"CX", &rec.cxx_curve},
                       {"C2ZZ", &rec.c2zz_curve},
                       {"CSTX", &rec.cstx_curve}};
            for (const auto& [kind, curve] : curves)
                for (const auto& [r, v] : *curve)
                    corr_csv << length_str << "," << pzz_str << "," << kind << "," << r << ","
                             << fmt(v) << "\n";
            swssb_csv << length_str << "," << pzz_str << "," << fmt(rec.chi_i) << ","
                      << fmt(rec.chi_ii) << "\n";

            if (point.fits.count("cft_mi") && point.fits.at("cft_mi").ok) {
                const FitResult& f = point.fits.at("cft_mi");
                ceff_csv << length_str << "," << pzz_str << "," << fmt(f.params.at("c_eff")) << ","
                         << fmt(f.params.at("beta1")) << "," << fmt(f.residual_rms) << ","
                         << fmt(f.window.first) << "," << fmt(f.window.second) << "\n";
            } else {
                ++missing;
            }
            if (point.fits.count("eta") && point.fits.at("eta").ok && point.fits.count("eta_X") &&
                point.fits.at("eta_X").ok) {
                const FitResult& fe = point.fits.at("eta");
                const FitResult& fx = point.fits.at("eta_X");
                expo_csv << length_str << "," << pzz_str << "," << fmt(fe.params.at("eta")) << ","
                         << fmt(fx.params.at("eta")) << "," << fmt(fe.residual_rms) << ","
                         << fmt(fx.residual_rms) << "\n";
            }
        } else if (point.fits.count("xi") && point.fits.at("xi").ok) {
            const double delta = std::abs(rec.jh_ratio - 1.0);
            xi_groups[{rec.params.p_zz, rec.length}].emplace_back(delta,
                                                                  point.fits.at("xi").params.at("xi"));
        }
    }

    for (const auto& [group, pts] : xi_groups) {
        if (pts.size() < 3) continue;
        const FitResult f = fit_nu(pts);
        if (!f.ok) continue;
        nu_csv << fmt(group.first) << "," << group.second << "," << fmt(f.params.at("nu")) << ","
               << fmt(f.residual_rms) << "\n";
    }

    if (missing > 0)
        std::fprintf(stderr, "emit_tables: %d records lacked a cft_mi fit\n", missing);

    write_file_atomic((fs::path(out_dir) / "mi_profile.csv").string(), mi_csv.str());
    write_file_atomic((fs::path(out_dir) / "ceff.csv").string(), ceff_csv.str());
    write_file_atomic((fs::path(out_dir) / "corr.csv").string(), corr_csv.str());
    write_file_atomic((fs::path(out_dir) / "exponents.csv").string(), expo_csv.str());
    write_file_atomic((fs::path(out_dir) / "swssb.csv").string(), swssb_csv.str());
    write_file_atomic((fs::path(out_dir) / "nu.csv").string(), nu_csv.str());
    return static_cast<int>(records.size());
}

// ---------------------------------------------------------------------------
// oracle equivalence check
// ---------------------------------------------------------------------------

double OracleCheck::max() const {
    return std::max({s2, mi, czz, cxx, c2zz, cstx, chi});
}

OracleCheck oracle_check(int length, double p_zz, int chi_max, double sv_cutoff) {
    if (length > 8) throw std::invalid_argument("oracle_check: L must be <= 8");

    // dense reference
    const auto [psi_exact, e0] = oracle::exact_ground_state(length, 1.0, 1.0, true);
    (void)e0;
    const double p_x = px_from_pzz(p_zz, 1.0);
    const oracle::DenseDensityMatrix rho_d =
        oracle::exact_apply_channel(oracle::pure_density(psi_exact), p_zz, p_x);
    ObservableRecord exact = oracle::exact_correlators(rho_d);

    // MPS pipeline
    SweepConfig config;
    config.L_list = {length};
    config.pzz_list = {p_zz};
    config.chi_max = chi_max;
    config.sv_cutoff = sv_cutoff;
    config.sweep_tol = 1e-12;
    config.max_sweeps = 60;
    const PointResult point = run_point(config, length, p_zz, 1.0);
    const ObservableRecord& mps = point.record;

    auto curve_dev = [](const std::vector<std::pair<int, double>>& a,
                        const std::vector<std::pair<int, double>>& b) {
        double dev = 0.0;
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
            dev = std::max(dev, std::abs(a[i].second - b[i].second));
        return dev;
    };

    OracleCheck check;
    check.s2 = curve_dev(mps.s2_profile, exact.s2_profile);
    check.mi = curve_dev(mps.mi_profile, exact.mi_profile);
    check.czz = curve_dev(mps.czz_curve, exact.czz_curve);
    check.cxx = curve_dev(mps.cxx_curve, exact.cxx_curve);
    check.c2zz = curve_dev(mps.c2zz_curve, exact.c2zz_curve);
    check.cstx = curve_dev(mps.cstx_curve, exact.cstx_curve);
    check.chi = std::max(std::abs(mps.chi_i - exact.chi_i), std::abs(mps.chi_ii - exact.chi_ii));
    return check;
}

} // namespace decocrit
