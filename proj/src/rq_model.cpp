#include "ladder/rq_model.hpp"

#include <algorithm>
#include <cmath>

#include "ladder/error.hpp"

namespace ladder {
namespace {

struct ResolutionInfo {
    std::string_view label;
    int width;
    int height;
};

constexpr std::array<ResolutionInfo, 4> kInfo{{
    {"1080p", 1920, 1080},
    {"720p", 1280, 720},
    {"480p", 854, 480},
    {"360p", 640, 360},
}};

bool key_less(const RQPoint& a, const RQPoint& b) {
    if (a.resolution != b.resolution) return index_of(a.resolution) < index_of(b.resolution);
    return a.crf < b.crf;
}

// > 0 when b turns left of the ray o->a, i.e. a lies below segment o-b.
double cross(const RQPoint& o, const RQPoint& a, const RQPoint& b) {
    return (a.bitrate_kbps - o.bitrate_kbps) * (b.vmaf - o.vmaf) -
           (a.vmaf - o.vmaf) * (b.bitrate_kbps - o.bitrate_kbps);
}

}  // namespace

int width(Resolution r) { return kInfo[index_of(r)].width; }
int height(Resolution r) { return kInfo[index_of(r)].height; }
std::string_view label(Resolution r) { return kInfo[index_of(r)].label; }

std::optional<Resolution> parse_resolution(std::string_view text) {
    for (Resolution r : kResolutions) {
        if (label(r) == text) return r;
    }
    return std::nullopt;
}

void validate(const RQPoint& p) {
    if (p.crf < kMinCrf || p.crf > kMaxCrf) {
        throw ValidationError("crf " + std::to_string(p.crf) + " outside [10, 51]");
    }
    if (!(p.bitrate_kbps > 0.0) || !std::isfinite(p.bitrate_kbps)) {
        throw ValidationError("bitrate must be positive and finite");
    }
    if (!(p.vmaf >= 0.0 && p.vmaf <= 100.0)) {
        throw ValidationError("vmaf outside [0, 100]");
    }
}

bool same_encode(const RQPoint& a, const RQPoint& b) {
    return a.resolution == b.resolution && a.crf == b.crf;
}

RQSweep::RQSweep(std::string scene_id, std::vector<RQPoint> points)
    : scene_id_(std::move(scene_id)), points_(std::move(points)) {
    for (const RQPoint& p : points_) validate(p);
    std::sort(points_.begin(), points_.end(), key_less);
    auto dup = std::adjacent_find(points_.begin(), points_.end(), same_encode);
    if (dup != points_.end()) {
        throw ValidationError("duplicate sweep point " + std::string(label(dup->resolution)) +
                              " crf " + std::to_string(dup->crf) + " in scene " + scene_id_);
    }
}

std::vector<RQPoint> RQSweep::at(Resolution r) const {
    std::vector<RQPoint> out;
    std::copy_if(points_.begin(), points_.end(), std::back_inserter(out),
                 [r](const RQPoint& p) { return p.resolution == r; });
    return out;
}

std::optional<RQPoint> RQSweep::find(Resolution r, int crf) const {
    RQPoint key{r, crf, 0.0, 0.0};
    auto it = std::lower_bound(points_.begin(), points_.end(), key, key_less);
    if (it != points_.end() && same_encode(*it, key)) return *it;
    return std::nullopt;
}

ParetoFront build_pareto_front(std::span<const RQPoint> points) {
    if (points.empty()) throw ValidationError("empty sweep");

    // Ascending bitrate; within equal bitrate the highest vmaf comes first.
    // The remaining keys only make the choice among exact ties deterministic.
    std::vector<RQPoint> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(), [](const RQPoint& a, const RQPoint& b) {
        if (a.bitrate_kbps != b.bitrate_kbps) return a.bitrate_kbps < b.bitrate_kbps;
        if (a.vmaf != b.vmaf) return a.vmaf > b.vmaf;
        return key_less(a, b);
    });

    // Dominance filter: vmaf must strictly increase with bitrate.
    std::vector<RQPoint> candidates;
    for (const RQPoint& p : sorted) {
        if (!candidates.empty() && p.vmaf <= candidates.back().vmaf) continue;
        candidates.push_back(p);
    }

    // Upper hull by monotone chain; collinear points stay.
    std::vector<RQPoint> hull;
    for (const RQPoint& p : candidates) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) > 0.0) {
            hull.pop_back();
        }
        hull.push_back(p);
    }
    return ParetoFront(std::move(hull));
}

const RQPoint& nearest_by_bitrate(const ParetoFront& front, double target_kbps) {
    if (front.empty()) throw ValidationError("empty Pareto front");
    const auto& pts = front.points();
    auto it = std::lower_bound(pts.begin(), pts.end(), target_kbps,
                               [](const RQPoint& p, double t) { return p.bitrate_kbps < t; });
    if (it == pts.begin()) return *it;
    if (it == pts.end()) return pts.back();
    const RQPoint& above = *it;
    const RQPoint& below = *std::prev(it);
    return (above.bitrate_kbps - target_kbps) < (target_kbps - below.bitrate_kbps) ? above : below;
}

}  // namespace ladder
