#pragma once

// Bjontegaard deltas between two rate-quality curves using monotone
// piecewise-cubic interpolation over the overlapping interval.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ladder/rq_model.hpp"

namespace ladder {

struct RateQuality {
    double bitrate_kbps = 0.0;
    double quality = 0.0;

    bool operator==(const RateQuality&) const = default;
};

/// Ascending, strictly increasing in both bitrate and quality.
class RQAnchorSet {
public:
    /// Sorts by bitrate, keeps the best quality per bitrate, then drops points
    /// whose quality does not exceed every cheaper point. Each dropped point
    /// adds a warning. Throws ValidationError if fewer than two points remain.
    static RQAnchorSet from_points(std::span<const RateQuality> points,
                                   std::vector<std::string>* warnings = nullptr);
    static RQAnchorSet from_rows(std::span<const RQPoint> rows,
                                 std::vector<std::string>* warnings = nullptr);

    const std::vector<RateQuality>& points() const { return points_; }

private:
    std::vector<RateQuality> points_;
};

enum class BDStatus { kOk, kNoOverlap };

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

struct BDResult {
    BDStatus status = BDStatus::kOk;
    /// 100 * (2^gap - 1); positive means the test curve needs more bitrate.
    std::optional<double> bd_rate_percent;
    /// Mean log2(test rate) - log2(reference rate) over the quality overlap.
    std::optional<double> mean_log2_rate_gap;
    /// Mean test quality - reference quality over the log2-rate overlap.
    std::optional<double> bd_vmaf;
    std::optional<Interval> vmaf_overlap;
    std::optional<Interval> log2rate_overlap;
};

/// Rate difference at equal quality.
BDResult bd_rate(const RQAnchorSet& test, const RQAnchorSet& reference);

/// Quality difference at equal rate.
BDResult bd_quality(const RQAnchorSet& test, const RQAnchorSet& reference);

/// Both metrics; status is no-overlap if either overlap is empty.
BDResult bd_metrics(const RQAnchorSet& test, const RQAnchorSet& reference);

}  // namespace ladder
