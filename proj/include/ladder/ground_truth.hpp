#pragma once

// Ground-truth extraction from an exhaustive sweep: crossover CRFs per
// resolution, the HQ point, and the reference ladder walk over the front.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ladder/rq_model.hpp"

namespace ladder {

inline constexpr double kHqTargetVmaf = 92.0;
inline constexpr double kDefaultK = 2.0;
inline constexpr double kDefaultRMinKbps = 150.0;
inline constexpr double kMinK = 1.5;
inline constexpr double kMaxK = 2.0;

/// CRF span of one resolution on the front. crf_low is the high-bitrate end.
struct CrossoverRange {
    int crf_low = 0;
    int crf_high = 0;

    bool operator==(const CrossoverRange&) const = default;
};

struct CrossoverSet {
    std::array<std::optional<CrossoverRange>, 4> ranges;

    const std::optional<CrossoverRange>& operator[](Resolution r) const { return ranges[index_of(r)]; }
    std::optional<CrossoverRange>& operator[](Resolution r) { return ranges[index_of(r)]; }
    bool present(Resolution r) const { return ranges[index_of(r)].has_value(); }

    bool operator==(const CrossoverSet&) const = default;
};

struct HQPoint {
    RQPoint point;
    double target_vmaf = kHqTargetVmaf;
    /// False when no 1080p point reaches the target; point is then the max-vmaf one.
    bool reachable = true;
};

struct BitrateLadder {
    std::vector<RQPoint> rows;  // descending bitrate, first row is the top rung
    double k = kDefaultK;
    double r_min_kbps = kDefaultRMinKbps;
    std::vector<std::string> warnings;
};

/// Throws ValidationError unless k is in [1.5, 2.0] and r_min is positive.
void validate_ladder_params(double k, double r_min_kbps);

/// Per resolution: CRF of its highest-bitrate front point (crf_low) and of its
/// lowest-bitrate front point (crf_high). Resolutions absent from the front
/// are left empty.
CrossoverSet extract_crossovers(const ParetoFront& front);

/// 1080p sweep point with vmaf closest to 92, ties toward lower bitrate.
/// Throws ValidationError("missing resolution") without 1080p points.
HQPoint extract_hq_point(const RQSweep& sweep);

/// Walks down from the HQ point dividing the bitrate by k and snapping to the
/// nearest front point, until the snapped point falls below r_min.
BitrateLadder build_reference_ladder(const ParetoFront& front, const HQPoint& hq,
                                     double k = kDefaultK, double r_min_kbps = kDefaultRMinKbps);

}  // namespace ladder
