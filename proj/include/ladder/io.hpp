#pragma once

// On-disk formats: sweep / front / ladder CSVs, calibration JSON and the
// predicted-CRF JSON exchanged with the predictor component.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ladder/crf_rate_model.hpp"
#include "ladder/ground_truth.hpp"
#include "ladder/ladder_predictor.hpp"
#include "ladder/rq_model.hpp"

namespace ladder::io {

inline constexpr std::string_view kSweepHeader = "scene_id,resolution,crf,bitrate_kbps,vmaf";
inline constexpr std::string_view kLadderHeader = "scene_id,rung,resolution,crf,bitrate_kbps,vmaf";
inline constexpr int kCalibrationVersion = 1;
inline constexpr std::string_view kCalibrationFormat = "bitrate-ladder-calibration";

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

/// Scene ids are limited to [A-Za-z0-9._-] so they are safe in CSV cells and file names.
bool valid_scene_id(std::string_view id);

std::string read_text(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_text(const std::filesystem::path& path, std::string_view text);

/// Points are written in (resolution, crf) order.
std::string sweep_to_csv(const RQSweep& sweep);
RQSweep sweep_from_csv(std::string_view text);

/// Pareto-front dump: same columns as a sweep, in ascending bitrate order.
std::string front_to_csv(std::string_view scene_id, const ParetoFront& front);
std::vector<RQPoint> points_from_csv(std::string_view text, std::string* scene_id = nullptr);

std::string ladder_to_csv(std::string_view scene_id, const BitrateLadder& ladder);
BitrateLadder ladder_from_csv(std::string_view text, std::string* scene_id = nullptr);

nlohmann::json calibration_to_json(const Calibration& cal);
Calibration calibration_from_json(const nlohmann::json& doc);

nlohmann::json predicted_crfs_to_json(const PredictedCrfs& pred);
/// Strict schema check; throws ValidationError naming the offending field.
PredictedCrfs predicted_crfs_from_json(const nlohmann::json& doc);
/// Accepts a single object or an array of objects.
std::vector<PredictedCrfs> predicted_crfs_file(const std::filesystem::path& path);

}  // namespace ladder::io
