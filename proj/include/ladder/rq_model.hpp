#pragma once

// Rate-quality geometry: encode outcomes, sweeps, and the upper-left convex
// hull of a sweep in the (bitrate, vmaf) plane.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ladder {

enum class Resolution { k1080p = 0, k720p = 1, k480p = 2, k360p = 3 };

inline constexpr std::array<Resolution, 4> kResolutions{
    Resolution::k1080p, Resolution::k720p, Resolution::k480p, Resolution::k360p};

inline constexpr int kMinCrf = 10;
inline constexpr int kMaxCrf = 51;
inline constexpr int kCrfCount = kMaxCrf - kMinCrf + 1;                  // 42
inline constexpr int kExhaustiveEncodes = kCrfCount * static_cast<int>(kResolutions.size());  // 168

/// Position in kResolutions; 0 is the highest resolution.
constexpr std::size_t index_of(Resolution r) { return static_cast<std::size_t>(r); }

/// 1 for 1080p through 4 for 360p.
constexpr int rank(Resolution r) { return static_cast<int>(r) + 1; }

int width(Resolution r);
int height(Resolution r);
std::string_view label(Resolution r);
std::optional<Resolution> parse_resolution(std::string_view text);

/// One encode's outcome.
struct RQPoint {
    Resolution resolution = Resolution::k1080p;
    int crf = kMinCrf;
    double bitrate_kbps = 0.0;
    double vmaf = 0.0;

    bool operator==(const RQPoint&) const = default;
};

/// Throws ValidationError unless crf is in [10, 51], bitrate > 0 and vmaf in [0, 100].
void validate(const RQPoint& p);

bool same_encode(const RQPoint& a, const RQPoint& b);

/// All encodes of one scene. Points are kept sorted by (resolution, crf).
class RQSweep {
public:
    RQSweep() = default;
    /// Validates every point and rejects duplicate (resolution, crf) keys.
    RQSweep(std::string scene_id, std::vector<RQPoint> points);

    const std::string& scene_id() const { return scene_id_; }
    const std::vector<RQPoint>& points() const { return points_; }

    /// True when every (resolution, crf) in the 4 x 42 grid is present.
    bool is_complete() const { return points_.size() == static_cast<std::size_t>(kExhaustiveEncodes); }

    std::vector<RQPoint> at(Resolution r) const;
    std::optional<RQPoint> find(Resolution r, int crf) const;

private:
    std::string scene_id_;
    std::vector<RQPoint> points_;
};

/// Non-dominated, concave rate-quality points ordered by ascending bitrate.
class ParetoFront {
public:
    ParetoFront() = default;

    const std::vector<RQPoint>& points() const { return points_; }
    bool empty() const { return points_.empty(); }
    std::size_t size() const { return points_.size(); }

private:
    friend ParetoFront build_pareto_front(std::span<const RQPoint> points);
    explicit ParetoFront(std::vector<RQPoint> points) : points_(std::move(points)) {}

    std::vector<RQPoint> points_;
};

/// Upper-left convex hull of the points in the linear (bitrate, vmaf) plane.
///
/// Equal-bitrate points keep only the highest vmaf, dominated points are
/// dropped, and collinear hull points are retained. Every returned point is
/// one of the inputs. Throws ValidationError("empty sweep") on empty input.
ParetoFront build_pareto_front(std::span<const RQPoint> points);

/// Front point minimizing |bitrate - target|; ties go to the lower bitrate.
const RQPoint& nearest_by_bitrate(const ParetoFront& front, double target_kbps);

}  // namespace ladder
