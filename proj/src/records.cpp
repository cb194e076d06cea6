#include "decocrit/records.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace decocrit {

namespace {

const char* kind_name(FitKind kind) {
    switch (kind) {
        case FitKind::cft_mi: return "cft_mi";
        case FitKind::cft_s2: return "cft_s2";
        case FitKind::powerlaw_chord: return "powerlaw_chord";
        case FitKind::exp_decay: return "exp_decay";
        case FitKind::nu_loglog: return "nu_loglog";
        case FitKind::qat_reference: return "qat_reference";
    }
    return "unknown";
}

FitKind kind_from_name(const std::string& name) {
    if (name == "cft_mi") return FitKind::cft_mi;
    if (name == "cft_s2") return FitKind::cft_s2;
    if (name == "powerlaw_chord") return FitKind::powerlaw_chord;
    if (name == "exp_decay") return FitKind::exp_decay;
    if (name == "nu_loglog") return FitKind::nu_loglog;
    if (name == "qat_reference") return FitKind::qat_reference;
    throw std::invalid_argument("unknown fit kind: " + name);
}

Json curve_to_json(const std::vector<std::pair<int, double>>& curve) {
    Json out = Json::array();
    for (const auto& [x, v] : curve) out.push_back(Json::array({x, v}));
    return out;
}

std::vector<std::pair<int, double>> curve_from_json(const Json& j) {
    std::vector<std::pair<int, double>> out;
    for (const auto& e : j) out.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
    return out;
}

} // namespace

std::string point_key(int length, double p_zz, double jh_ratio) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "L%d_pzz%.6f_jh%.6f", length, p_zz, jh_ratio);
    return buf;
}

Json fit_to_json(const FitResult& fit) {
    Json j;
    j["kind"] = kind_name(fit.kind);
    j["params"] = Json(std::map<std::string, double>(fit.params.begin(), fit.params.end()));
    j["stderrs"] = Json(std::map<std::string, double>(fit.stderrs.begin(), fit.stderrs.end()));
    j["residual_rms"] = fit.residual_rms;
    j["window"] = Json::array({fit.window.first, fit.window.second});
    j["n_points"] = fit.n_points;
    j["ok"] = fit.ok;
    j["message"] = fit.message;
    return j;
}

FitResult fit_from_json(const Json& j) {
    FitResult fit;
    fit.kind = kind_from_name(j.at("kind").get<std::string>());
    for (const auto& [key, value] : j.at("params").items()) fit.params[key] = value.get<double>();
    for (const auto& [key, value] : j.at("stderrs").items()) fit.stderrs[key] = value.get<double>();
    fit.residual_rms = j.at("residual_rms").get<double>();
    fit.window = {j.at("window").at(0).get<double>(), j.at("window").at(1).get<double>()};
    fit.n_points = j.at("n_points").get<int>();
    fit.ok = j.at("ok").get<bool>();
    fit.message = j.at("message").get<std::string>();
    return fit;
}

Json record_to_json(const PointResult& point) {
    const ObservableRecord& rec = point.record;
    Json j;
    j["key"] = point.key;
    j["L"] = rec.length;
    j["p_zz"] = rec.params.p_zz;
    j["p_x"] = rec.params.p_x;
    j["J"] = rec.params.coupling_j;
    j["h"] = rec.params.field_h;
    j["jh"] = rec.jh_ratio;
    j["s2_profile"] = curve_to_json(rec.s2_profile);
    j["mi_profile"] = curve_to_json(rec.mi_profile);
    j["czz"] = curve_to_json(rec.czz_curve);
    j["cxx"] = curve_to_json(rec.cxx_curve);
    j["c2zz"] = curve_to_json(rec.c2zz_curve);
    j["cstx"] = curve_to_json(rec.cstx_curve);
    j["chi_I"] = rec.chi_i;
    j["chi_II"] = rec.chi_ii;
    j["truncation_budget"] = rec.truncation_budget;
    j["dmrg_energy"] = rec.dmrg_energy;
    j["dmrg_converged"] = rec.dmrg_converged;
    Json fits = Json::object();
    for (const auto& [name, fit] : point.fits) fits[name] = fit_to_json(fit);
    j["fits"] = fits;
    return j;
}

PointResult record_from_json(const Json& j) {
    PointResult point;
    point.key = j.at("key").get<std::string>();
    ObservableRecord& rec = point.record;
    rec.length = j.at("L").get<int>();
    rec.params.p_zz = j.at("p_zz").get<double>();
    rec.params.p_x = j.at("p_x").get<double>();
    rec.params.coupling_j = j.at("J").get<double>();
    rec.params.field_h = j.at("h").get<double>();
    rec.jh_ratio = j.at("jh").get<double>();
    rec.s2_profile = curve_from_json(j.at("s2_profile"));
    rec.mi_profile = curve_from_json(j.at("mi_profile"));
    rec.czz_curve = curve_from_json(j.at("czz"));
    rec.cxx_curve = curve_from_json(j.at("cxx"));
    rec.c2zz_curve = curve_from_json(j.at("c2zz"));
    rec.cstx_curve = curve_from_json(j.at("cstx"));
    rec.chi_i = j.at("chi_I").get<double>();
    rec.chi_ii = j.at("chi_II").get<double>();
    rec.truncation_budget = j.at("truncation_budget").get<double>();
    rec.dmrg_energy = j.at("dmrg_energy").get<double>();
    rec.dmrg_converged = j.at("dmrg_converged").get<bool>();
    for (const auto& [name, fit] : j.at("fits").items()) point.fits[name] = fit_from_json(fit);
    return point;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << contents;
        if (!out) throw std::runtime_error("short write: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

} // namespace decocrit
