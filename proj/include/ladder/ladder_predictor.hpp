#pragma once

// Predicted ladder construction: four predicted CRFs plus calibration give
// seven pre-encodes, which anchor per-resolution CRF-rate models and bitrate
// ranges; rungs are then encoded one at a time down to r_min.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ladder/crf_rate_model.hpp"
#include "ladder/ground_truth.hpp"
#include "ladder/rq_model.hpp"

namespace ladder {

enum class Provenance { kModel, kFile, kFallback };

std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view text);

struct PredictedCrfs {
    std::string scene_id;
    int crf_hq_s1 = 0;
    int crf_low_s2 = 0;
    int crf_low_s3 = 0;
    int crf_low_s4 = 0;
    Provenance provenance = Provenance::kFile;

    /// Throws ValidationError unless every CRF is in [10, 51].
    void validate() const;
    bool operator==(const PredictedCrfs&) const = default;
};

enum class JobPurpose { kHq, kLowCrossover, kHighCrossover };

std::string_view to_string(JobPurpose p);

struct PreEncodeJob {
    Resolution resolution;
    int crf;
    JobPurpose purpose;

    bool operator==(const PreEncodeJob&) const = default;
};

struct PreEncodePlan {
    /// Order: 1080p hq, 1080p high, 720p low, 720p high, 480p low, 480p high, 360p low.
    std::vector<PreEncodeJob> jobs;
    std::vector<std::string> warnings;
};

inline constexpr std::size_t kPreEncodeCount = 7;

/// Throws ValidationError naming the pair when a crossover map is missing.
PreEncodePlan plan_pre_encodes(const PredictedCrfs& pred, const Calibration& cal);

struct ResolutionRange {
    Resolution resolution = Resolution::k1080p;
    double rate_low = 0.0;   // kbps at the high-CRF end
    double rate_high = 0.0;  // kbps at the low-CRF end (HQ for 1080p)

    bool operator==(const ResolutionRange&) const = default;
};

using ResolutionRanges = std::array<ResolutionRange, 4>;

/// Repairs inverted ranges and overlaps between neighbours so the ranges are
/// ordered and disjoint except for shared boundaries.
void sanitize_ranges(ResolutionRanges& ranges, std::vector<std::string>& warnings);

struct DerivedModels {
    std::array<CrfRateModel, 4> models;
    ResolutionRanges ranges;
    std::vector<std::string> warnings;
};

/// Two-point fits for 1080p, 720p and 480p; 360p takes its slope from the
/// calibration's 480p -> 360p map and its intercept from its single point.
/// `results` are the pre-encode outcomes in plan order.
DerivedModels derive_models(const PreEncodePlan& plan, std::span<const RQPoint> results,
                            const Calibration& cal, double r_min_kbps = kDefaultRMinKbps);

/// Range containing the target (ties to the higher resolution); outside all
/// ranges, the resolution with the nearest boundary.
Resolution select_resolution(const ResolutionRanges& ranges, double target_kbps);

using EncodeFn = std::function<RQPoint(Resolution, int crf)>;
using BatchEncodeFn = std::function<std::vector<RQPoint>(std::span<const PreEncodeJob>)>;

struct EncodeCounts {
    int pre = 0;
    int rung = 0;

    int total() const { return pre + rung; }
};

struct PredictedLadder {
    BitrateLadder ladder;
    EncodeCounts counts;
    std::vector<std::string> warnings;
    /// Set when an encode failed; the ladder then holds the rungs built so far.
    std::optional<std::string> error;
};

/// Rung walk: each target is the previous rung's achieved bitrate over k.
/// Pre-encode results are reused without counting; every other encode call
/// is counted as a rung encode.
PredictedLadder build_predicted_ladder(const PreEncodePlan& plan, std::span<const RQPoint> pre_results,
                                       const DerivedModels& derived, double k, double r_min_kbps,
                                       const EncodeFn& encode);

/// First-rung CRF when no HQ prediction is used: clamp(crf - j, 10, 51).
int fallback_first_rung(int crf_low_s1_predicted, int j);

inline constexpr int kDefaultFallbackJ = 5;

struct PredictOptions {
    double k = kDefaultK;
    double r_min_kbps = kDefaultRMinKbps;
    /// Ablation: the 1080p prediction is read as CRF_low and the first rung
    /// is encoded at fallback_first_rung(crf, j) instead.
    bool no_hq = false;
    int j = kDefaultFallbackJ;
};

/// Full pipeline: plan, pre-encode (through `batch` when given), derive, walk.
PredictedLadder predict_ladder(const PredictedCrfs& pred, const Calibration& cal,
                               const PredictOptions& options, const EncodeFn& encode,
                               const BatchEncodeFn& batch = {});

struct HqDelta {
    std::optional<double> delta_rate_kbps;  // rate(first row) - rate at vmaf 92
    double delta_vmaf = 0.0;                // vmaf(first row) - 92
};

HqDelta hq_delta_report(const BitrateLadder& ladder, std::optional<double> rate_at_92_kbps);

/// Bitrate at which the given resolution's sweep curve reaches `vmaf`, by
/// monotone interpolation of log2(rate) over vmaf. Empty when out of range.
std::optional<double> rate_at_vmaf(const RQSweep& sweep, Resolution resolution, double vmaf);

}  // namespace ladder
