#pragma once

// Run reports: per-scene reference and predicted ladders with BD metrics,
// encode counts and HQ deltas, plus the aggregate tables and histograms.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ladder/bd_metrics.hpp"
#include "ladder/ladder_predictor.hpp"
#include "ladder/orchestrator.hpp"
#include "ladder/rq_model.hpp"

namespace ladder {

enum class Variant { kWithHq, kWithoutHq };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view text);

struct VariantReport {
    std::vector<RQPoint> rows;
    EncodeCounts counts;
    /// Empty when the reference is unavailable or either ladder has one row.
    std::optional<BDResult> bd;
    HqDelta hq_delta;
    std::optional<std::string> error;
    std::vector<std::string> warnings;

    const RQPoint* first_row() const { return rows.empty() ? nullptr : &rows.front(); }
};

struct SceneReport {
    std::string scene_id;
    /// Empty means "reference unavailable".
    std::optional<std::vector<RQPoint>> reference;
    std::optional<VariantReport> with_hq;
    std::optional<VariantReport> without_hq;
    std::vector<std::string> warnings;

    const std::optional<VariantReport>& variant(Variant v) const {
        return v == Variant::kWithHq ? with_hq : without_hq;
    }
    std::optional<VariantReport>& variant(Variant v) { return v == Variant::kWithHq ? with_hq : without_hq; }
};

struct RunReport {
    std::vector<SceneReport> scenes;  // sorted by scene id
};

bool operator==(const BDResult& a, const BDResult& b);
bool operator==(const VariantReport& a, const VariantReport& b);
bool operator==(const SceneReport& a, const SceneReport& b);
bool operator==(const RunReport& a, const RunReport& b);

/// Fills `bd` from the variant rows and the reference; explains gaps in warnings.
void compute_bd(SceneReport& scene);

struct Stat {
    int n = 0;
    std::optional<double> mean;
    std::optional<double> sd;  // sample standard deviation, needs n >= 2
};

Stat summarize(const std::vector<double>& values);

/// First rows at or above vmaf 92 vs below it, per variant.
struct HqEffectRow {
    Variant variant = Variant::kWithHq;
    bool above = true;
    Stat delta_rate_mbps;
    Stat delta_vmaf;
};

/// Four rows: with / without HQ x above / below the target.
std::vector<HqEffectRow> hq_effect(const RunReport& report);

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    std::array<int, 2> counts{};  // indexed by Variant
};

/// Fixed-width bins covering every value of both variants.
std::vector<HistogramBin> histogram(const RunReport& report, double bin_width, bool bd_rate);

ComplexityReport complexity_of(const RunReport& report, Variant variant = Variant::kWithHq);

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& doc);

struct ReportCsvs {
    std::string scenes;
    std::string ladders;
    std::string warnings;
};

ReportCsvs report_to_csvs(const RunReport& report);
RunReport report_from_csvs(const ReportCsvs& csvs);

std::string hq_effect_csv(const std::vector<HqEffectRow>& rows);
std::string histogram_csv(const std::vector<HistogramBin>& bins);

/// Run-directory file names.
std::string reference_ladder_file(std::string_view scene_id);
std::string pareto_front_file(std::string_view scene_id);
std::string predicted_ladder_file(std::string_view scene_id, Variant v);
std::string predicted_sidecar_file(std::string_view scene_id, Variant v);

/// Sidecar written next to a predicted ladder: counts, deltas, warnings, error.
nlohmann::json variant_sidecar(const std::string& scene_id, const VariantReport& v);
void apply_sidecar(const nlohmann::json& doc, VariantReport& v);

/// Collects every ladder and sidecar in `dir` and computes BD metrics.
RunReport load_run_directory(const std::filesystem::path& dir);

/// report.json, scenes.csv, ladders.csv, warnings.csv, hq_effect.csv,
/// bd_histogram.csv and delta_vmaf_histogram.csv.
void write_report(const RunReport& report, const std::filesystem::path& out_dir);

}  // namespace ladder
