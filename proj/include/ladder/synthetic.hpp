#pragma once

// Synthetic scenes whose bitrate follows the CRF-rate model exactly per
// resolution and whose quality is a logistic curve in log2(rate). Used for
// oracle tests and demos without an encoder.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ladder/rq_model.hpp"

namespace ladder {

struct SyntheticCurve {
    double zeta = -5.0;   // CRF per doubling of rate
    double delta = 80.0;  // CRF at 1 kbps
    double vmaf_ceiling = 100.0;
    double midpoint_log2 = 10.0;  // log2 kbps where vmaf reaches half the ceiling
    double spread_log2 = 1.0;
};

class SyntheticScene {
public:
    SyntheticScene(std::string scene_id, std::array<SyntheticCurve, 4> curves);

    const std::string& scene_id() const { return scene_id_; }
    const SyntheticCurve& curve(Resolution r) const { return curves_[index_of(r)]; }

    double bitrate(Resolution r, double crf) const;
    double vmaf_at_rate(Resolution r, double kbps) const;
    /// Continuous CRF at which the resolution reaches the given vmaf.
    double crf_at_vmaf(Resolution r, double vmaf) const;

    RQPoint encode(Resolution r, int crf) const;
    /// All 168 grid encodes.
    RQSweep sweep() const;

private:
    std::string scene_id_;
    std::array<SyntheticCurve, 4> curves_;
};

/// The 360p slope is planted as kSyntheticZetaSlope * zeta(480p) + kSyntheticZetaIntercept.
inline constexpr double kSyntheticZetaSlope = 0.95;
inline constexpr double kSyntheticZetaIntercept = -0.3;

/// Seeded scene: HQ between about 1.6 and 14 Mbps, quality midpoints about
/// one octave of rate apart per resolution step.
SyntheticScene make_synthetic_scene(const std::string& scene_id, std::uint64_t seed);

std::vector<SyntheticScene> make_synthetic_scenes(int count, std::uint64_t seed,
                                                  const std::string& prefix = "synthetic");

}  // namespace ladder
