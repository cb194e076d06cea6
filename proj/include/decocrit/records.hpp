#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "decocrit/fits.hpp"
#include "decocrit/observables.hpp"

// JSON (de)serialization of measurement records. ordered_json keeps key
// order fixed so reruns byte-reproduce the persisted files.

namespace decocrit {

using Json = nlohmann::ordered_json;

struct PointResult {
    std::string key;
    ObservableRecord record;
    std::map<std::string, FitResult> fits;  // "cft_mi", "cft_s2", "eta", "eta_X", "xi"
};

std::string point_key(int length, double p_zz, double jh_ratio);

Json fit_to_json(const FitResult& fit);
FitResult fit_from_json(const Json& j);

Json record_to_json(const PointResult& point);
PointResult record_from_json(const Json& j);

// atomic write-then-rename
void write_file_atomic(const std::string& path, const std::string& contents);

} // namespace decocrit
