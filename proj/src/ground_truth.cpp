#include "ladder/ground_truth.hpp"

#include <algorithm>
#include <cmath>

#include "ladder/error.hpp"

namespace ladder {

void validate_ladder_params(double k, double r_min_kbps) {
    if (!(k >= kMinK && k <= kMaxK)) {
        throw ValidationError("k must be in [1.5, 2.0], got " + std::to_string(k));
    }
    if (!(r_min_kbps > 0.0)) throw ValidationError("r_min must be positive");
}

CrossoverSet extract_crossovers(const ParetoFront& front) {
    if (front.empty()) throw ValidationError("empty Pareto front");
    CrossoverSet out;
    // Front is ascending in bitrate, so the first point seen for a resolution
    // is its high-CRF end and the last one its low-CRF end.
    for (const RQPoint& p : front.points()) {
        auto& slot = out[p.resolution];
        if (!slot) {
            slot = CrossoverRange{p.crf, p.crf};
        } else {
            slot->crf_low = p.crf;
        }
    }
    return out;
}

HQPoint extract_hq_point(const RQSweep& sweep) {
    const std::vector<RQPoint> top = sweep.at(Resolution::k1080p);
    if (top.empty()) throw ValidationError("missing resolution: no 1080p points in " + sweep.scene_id());

    const RQPoint* best = &top.front();
    for (const RQPoint& p : top) {
        double d = std::abs(p.vmaf - kHqTargetVmaf);
        double best_d = std::abs(best->vmaf - kHqTargetVmaf);
        if (d < best_d || (d == best_d && p.bitrate_kbps < best->bitrate_kbps)) best = &p;
    }
    bool reachable = std::any_of(top.begin(), top.end(),
                                 [](const RQPoint& p) { return p.vmaf >= kHqTargetVmaf; });
    return HQPoint{*best, kHqTargetVmaf, reachable};
}

BitrateLadder build_reference_ladder(const ParetoFront& front, const HQPoint& hq, double k,
                                     double r_min_kbps) {
    validate_ladder_params(k, r_min_kbps);
    if (front.empty()) throw ValidationError("empty Pareto front");

    BitrateLadder ladder;
    ladder.k = k;
    ladder.r_min_kbps = r_min_kbps;
    ladder.rows.push_back(hq.point);
    if (!hq.reachable) {
        ladder.warnings.push_back("HQ unreachable: top rung uses the highest-vmaf 1080p point");
    }

    const double front_min = front.points().front().bitrate_kbps;
    double target = hq.point.bitrate_kbps;
    for (;;) {
        target /= k;
        const RQPoint& pick = nearest_by_bitrate(front, target);
        if (pick.bitrate_kbps < r_min_kbps) break;

        bool repeat = pick.bitrate_kbps >= ladder.rows.back().bitrate_kbps ||
                      std::any_of(ladder.rows.begin(), ladder.rows.end(),
                                  [&](const RQPoint& r) { return same_encode(r, pick); });
        if (repeat) {
            // Snapping can no longer change once the target is below the front.
            if (target < front_min) break;
            continue;
        }
        ladder.rows.push_back(pick);
        target = pick.bitrate_kbps;
    }
    return ladder;
}

}  // namespace ladder
