#include "ladder/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace ladder {

SyntheticScene::SyntheticScene(std::string scene_id, std::array<SyntheticCurve, 4> curves)
    : scene_id_(std::move(scene_id)), curves_(curves) {}

double SyntheticScene::bitrate(Resolution r, double crf) const {
    const auto& c = curve(r);
    return std::exp2((crf - c.delta) / c.zeta);
}

double SyntheticScene::vmaf_at_rate(Resolution r, double kbps) const {
    const auto& c = curve(r);
    const double z = (std::log2(kbps) - c.midpoint_log2) / c.spread_log2;
    return std::clamp(c.vmaf_ceiling / (1.0 + std::exp(-z)), 0.0, 100.0);
}

double SyntheticScene::crf_at_vmaf(Resolution r, double vmaf) const {
    const auto& c = curve(r);
    const double log2rate = c.midpoint_log2 + c.spread_log2 * std::log(vmaf / (c.vmaf_ceiling - vmaf));
    return c.zeta * log2rate + c.delta;
}

RQPoint SyntheticScene::encode(Resolution r, int crf) const {
    const double kbps = bitrate(r, crf);
    return RQPoint{r, crf, kbps, vmaf_at_rate(r, kbps)};
}

RQSweep SyntheticScene::sweep() const {
    std::vector<RQPoint> pts;
    for (Resolution r : kResolutions) {
        for (int crf = kMinCrf; crf <= kMaxCrf; ++crf) pts.push_back(encode(r, crf));
    }
    return RQSweep(scene_id_, std::move(pts));
}

SyntheticScene make_synthetic_scene(const std::string& scene_id, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    const double complexity = uniform(0.0, 1.0);

    std::array<double, 4> zeta{};
    zeta[0] = uniform(-6.5, -4.5);
    zeta[1] = zeta[0] + uniform(-0.3, 0.3);
    zeta[2] = zeta[1] + uniform(-0.3, 0.3);
    zeta[3] = kSyntheticZetaSlope * zeta[2] + kSyntheticZetaIntercept;

    // log2 kbps at CRF 25 per resolution.
    std::array<double, 4> anchor{};
    anchor[0] = std::log2(1200.0) + 2.2 * complexity;
    anchor[1] = anchor[0] - uniform(1.0, 1.3);
    anchor[2] = anchor[1] - uniform(0.9, 1.2);
    anchor[3] = anchor[2] - uniform(0.6, 0.8);

    const double spread = uniform(0.9, 1.2);
    const std::array<double, 4> ceiling{100.0, uniform(88.0, 91.0), uniform(76.0, 80.0), uniform(66.0, 72.0)};
    const double hq_log2 = std::log2(2000.0) + 2.5 * complexity + uniform(-0.3, 0.3);

    std::array<SyntheticCurve, 4> curves{};
    for (std::size_t i = 0; i < 4; ++i) {
        curves[i].zeta = zeta[i];
        curves[i].delta = 25.0 - zeta[i] * anchor[i];
        curves[i].vmaf_ceiling = ceiling[i];
        curves[i].spread_log2 = spread * uniform(0.95, 1.05);
    }
    curves[0].midpoint_log2 = hq_log2 - curves[0].spread_log2 * std::log(92.0 / 8.0);
    curves[1].midpoint_log2 = curves[0].midpoint_log2 - uniform(1.0, 1.2);
    curves[2].midpoint_log2 = curves[1].midpoint_log2 - uniform(1.0, 1.2);
    curves[3].midpoint_log2 = curves[2].midpoint_log2 - uniform(0.6, 0.8);
    return SyntheticScene(scene_id, curves);
}

std::vector<SyntheticScene> make_synthetic_scenes(int count, std::uint64_t seed, const std::string& prefix) {
    std::vector<SyntheticScene> out;
    for (int i = 0; i < count; ++i) {
        char id[64];
        std::snprintf(id, sizeof id, "%s_%03d", prefix.c_str(), i);
        out.push_back(make_synthetic_scene(id, seed * 1000003ULL + static_cast<std::uint64_t>(i)));
    }
    return out;
}

}  // namespace ladder
