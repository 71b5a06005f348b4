#pragma once

// Per-resolution linear model CRF = zeta * log2(kbps) + delta, and the
// calibration maps that infer unpredicted CRFs and slopes from predicted ones.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ladder/ground_truth.hpp"
#include "ladder/rq_model.hpp"

namespace ladder {

enum class FitSource { kTwoPointExact, kLeastSquares, kZetaInferred };

std::string_view to_string(FitSource s);

struct CrfRateSample {
    int crf = 0;
    double bitrate_kbps = 0.0;
};

struct CrfRateModel {
    Resolution resolution = Resolution::k1080p;
    double zeta = 0.0;   // CRF change per doubling of bitrate
    double delta = 0.0;  // CRF at 1 kbps
    FitSource source = FitSource::kTwoPointExact;
    std::optional<double> r_squared;  // only for least-squares fits
    std::size_t samples = 0;

    /// Higher CRF must mean lower bitrate.
    bool physical() const { return zeta < 0.0; }
    double raw_crf(double bitrate_kbps) const;
    /// Inverse of raw_crf; requires zeta != 0.
    double bitrate_for_crf(double crf) const;
};

/// Ordinary least squares of crf on log2(bitrate). Exactly two samples give
/// the line through both. Throws ValidationError("underdetermined fit") with
/// fewer than two samples or when all bitrates are equal.
CrfRateModel fit_crf_rate(std::span<const CrfRateSample> samples, Resolution resolution);

/// Model with a given slope passing exactly through one anchor sample.
CrfRateModel model_from_zeta(Resolution resolution, double zeta, const CrfRateSample& anchor);

struct ClampedCrf {
    int crf = 0;
    double raw = 0.0;
    bool clamped = false;
};

/// Half-away-from-zero rounding, then clamp to [10, 51].
ClampedCrf round_and_clamp_crf(double raw);

ClampedCrf crf_for_bitrate(const CrfRateModel& model, double target_kbps);

/// y = slope * x + intercept fitted by least squares.
struct LinearMap {
    double slope = 0.0;
    double intercept = 0.0;
    std::optional<double> plcc;  // empty when either variable has zero variance
    std::size_t samples = 0;

    double operator()(double x) const { return slope * x + intercept; }
    bool operator==(const LinearMap&) const = default;
};

/// Least-squares line; nullopt with fewer than 2 samples or constant x.
std::optional<LinearMap> fit_linear_map(std::span<const double> x, std::span<const double> y);

/// Pearson correlation; nullopt when undefined.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Adjacent pair (S_i, S_i+1) for i in {0, 1, 2}; the map sends
/// crf_low(S_i+1) to crf_high(S_i).
struct ResolutionPair {
    Resolution upper;
    Resolution lower;
};

inline constexpr std::array<ResolutionPair, 3> kAdjacentPairs{{
    {Resolution::k1080p, Resolution::k720p},
    {Resolution::k720p, Resolution::k480p},
    {Resolution::k480p, Resolution::k360p},
}};

using ZetaKey = std::pair<Resolution, Resolution>;  // (from, to)
inline constexpr ZetaKey kDefaultZetaKey{Resolution::k480p, Resolution::k360p};

struct Calibration {
    std::array<std::optional<LinearMap>, 3> crossover_maps;
    std::map<ZetaKey, LinearMap> zeta_maps;

    const std::optional<LinearMap>& crossover(std::size_t pair_index) const {
        return crossover_maps.at(pair_index);
    }
    const LinearMap* zeta_map(ZetaKey key = kDefaultZetaKey) const;

    bool operator==(const Calibration&) const = default;
};

/// One scene's ground truth as calibration training data.
struct TrainingScene {
    std::string scene_id;
    CrossoverSet crossovers;
    std::array<std::optional<double>, 4> zeta;
};

/// Fits the three crossover maps and the 480p -> 360p zeta map. Throws
/// ValidationError with fewer than two scenes; maps lacking two usable
/// samples are left unavailable.
Calibration fit_calibration(std::span<const TrainingScene> training);

/// round(a * crf_low_next + b) clamped to [10, 51]. Throws ValidationError
/// naming the pair when its map is unavailable.
ClampedCrf apply_calibration_crossover(const Calibration& cal, int crf_low_next,
                                       std::size_t pair_index);

/// Ground-truth slope per resolution from the sweep points spanning its
/// front range (HQ to crf_high for 1080p).
std::array<std::optional<double>, 4> ground_truth_zetas(const RQSweep& sweep,
                                                        const CrossoverSet& crossovers,
                                                        const HQPoint& hq);

/// Convenience: sweep -> front -> crossovers, HQ and zetas.
TrainingScene training_scene_from_sweep(const RQSweep& sweep);

}  // namespace ladder
