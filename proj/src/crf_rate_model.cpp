#include "ladder/crf_rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ladder/error.hpp"

namespace ladder {

std::string_view to_string(FitSource s) {
    switch (s) {
        case FitSource::kTwoPointExact: return "two-point-exact";
        case FitSource::kLeastSquares: return "least-squares";
        case FitSource::kZetaInferred: return "zeta-inferred";
    }
    return "unknown";
}

double CrfRateModel::raw_crf(double bitrate_kbps) const {
    return zeta * std::log2(bitrate_kbps) + delta;
}

double CrfRateModel::bitrate_for_crf(double crf) const {
    return std::exp2((crf - delta) / zeta);
}

CrfRateModel fit_crf_rate(std::span<const CrfRateSample> samples, Resolution resolution) {
    if (samples.size() < 2) throw ValidationError("underdetermined fit: fewer than two samples");
    for (const auto& s : samples) {
        if (!(s.bitrate_kbps > 0.0)) throw ValidationError("fit sample bitrate must be positive");
    }
    bool all_equal = std::all_of(samples.begin(), samples.end(), [&](const CrfRateSample& s) {
        return s.bitrate_kbps == samples.front().bitrate_kbps;
    });
    if (all_equal) throw ValidationError("underdetermined fit: all bitrates equal");

    CrfRateModel m;
    m.resolution = resolution;
    m.samples = samples.size();

    if (samples.size() == 2) {
        const double x0 = std::log2(samples[0].bitrate_kbps);
        const double x1 = std::log2(samples[1].bitrate_kbps);
        m.zeta = (samples[1].crf - samples[0].crf) / (x1 - x0);
        m.delta = samples[0].crf - m.zeta * x0;
        m.source = FitSource::kTwoPointExact;
        return m;
    }

    const double n = static_cast<double>(samples.size());
    double mx = 0.0, my = 0.0;
    for (const auto& s : samples) {
        mx += std::log2(s.bitrate_kbps);
        my += s.crf;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& s : samples) {
        const double dx = std::log2(s.bitrate_kbps) - mx;
        const double dy = s.crf - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    m.zeta = sxy / sxx;
    m.delta = my - m.zeta * mx;
    m.source = FitSource::kLeastSquares;

    double ss_res = 0.0;
    for (const auto& s : samples) {
        const double r = s.crf - m.raw_crf(s.bitrate_kbps);
        ss_res += r * r;
    }
    m.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return m;
}

CrfRateModel model_from_zeta(Resolution resolution, double zeta, const CrfRateSample& anchor) {
    if (!(anchor.bitrate_kbps > 0.0)) throw ValidationError("anchor bitrate must be positive");
    CrfRateModel m;
    m.resolution = resolution;
    m.zeta = zeta;
    m.delta = anchor.crf - zeta * std::log2(anchor.bitrate_kbps);
    m.source = FitSource::kZetaInferred;
    m.samples = 1;
    return m;
}

ClampedCrf round_and_clamp_crf(double raw) {
    // std::lround rounds halves away from zero.
    const long rounded = std::lround(raw);
    const long clamped = std::clamp<long>(rounded, kMinCrf, kMaxCrf);
    return ClampedCrf{static_cast<int>(clamped), raw, clamped != rounded};
}

ClampedCrf crf_for_bitrate(const CrfRateModel& model, double target_kbps) {
    if (!(target_kbps > 0.0)) throw ValidationError("target bitrate must be positive");
    const double raw = model.raw_crf(target_kbps);
    if (!std::isfinite(raw)) {
        // Overflowing targets sit beyond either end of the CRF grid.
        return ClampedCrf{raw > 0 ? kMaxCrf : kMinCrf, raw, true};
    }
    return round_and_clamp_crf(raw);
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) return std::nullopt;
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<LinearMap> fit_linear_map(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) return std::nullopt;
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) return std::nullopt;
    LinearMap map;
    map.slope = sxy / sxx;
    map.intercept = my - map.slope * mx;
    map.plcc = pearson(x, y);
    map.samples = x.size();
    return map;
}

const LinearMap* Calibration::zeta_map(ZetaKey key) const {
    auto it = zeta_maps.find(key);
    return it == zeta_maps.end() ? nullptr : &it->second;
}

Calibration fit_calibration(std::span<const TrainingScene> training) {
    if (training.size() < 2) {
        throw ValidationError("calibration needs at least two training scenes, got " +
                              std::to_string(training.size()));
    }
    Calibration cal;
    for (std::size_t i = 0; i < kAdjacentPairs.size(); ++i) {
        const auto [upper, lower] = kAdjacentPairs[i];
        std::vector<double> x, y;
        for (const auto& scene : training) {
            const auto& hi = scene.crossovers[upper];
            const auto& lo = scene.crossovers[lower];
            if (!hi || !lo) continue;
            x.push_back(lo->crf_low);
            y.push_back(hi->crf_high);
        }
        cal.crossover_maps[i] = fit_linear_map(x, y);
    }

    const auto [from, to] = kDefaultZetaKey;
    std::vector<double> zx, zy;
    for (const auto& scene : training) {
        const auto& a = scene.zeta[index_of(from)];
        const auto& b = scene.zeta[index_of(to)];
        if (!a || !b) continue;
        zx.push_back(*a);
        zy.push_back(*b);
    }
    if (auto map = fit_linear_map(zx, zy)) cal.zeta_maps.emplace(kDefaultZetaKey, *map);
    return cal;
}

ClampedCrf apply_calibration_crossover(const Calibration& cal, int crf_low_next,
                                       std::size_t pair_index) {
    if (pair_index >= kAdjacentPairs.size()) throw ValidationError("bad resolution pair index");
    const auto& map = cal.crossover(pair_index);
    if (!map) {
        const auto [upper, lower] = kAdjacentPairs[pair_index];
        throw ValidationError("calibration map unavailable for pair " + std::string(label(upper)) +
                              "/" + std::string(label(lower)));
    }
    return round_and_clamp_crf((*map)(crf_low_next));
}

std::array<std::optional<double>, 4> ground_truth_zetas(const RQSweep& sweep,
                                                        const CrossoverSet& crossovers,
                                                        const HQPoint& hq) {
    std::array<std::optional<double>, 4> out;
    for (Resolution r : kResolutions) {
        const auto& range = crossovers[r];
        if (!range) continue;
        int lo = r == Resolution::k1080p ? hq.point.crf : range->crf_low;
        int hi = range->crf_high;
        if (lo > hi) std::swap(lo, hi);
        if (lo == hi) {
            // Single-point segment: widen to the neighbouring grid CRFs.
            lo = std::max(kMinCrf, lo - 1);
            hi = std::min(kMaxCrf, hi + 1);
        }
        auto a = sweep.find(r, lo);
        auto b = sweep.find(r, hi);
        if (!a || !b || a->bitrate_kbps == b->bitrate_kbps) continue;
        const std::array<CrfRateSample, 2> samples{{{a->crf, a->bitrate_kbps}, {b->crf, b->bitrate_kbps}}};
        out[index_of(r)] = fit_crf_rate(samples, r).zeta;
    }
    return out;
}

TrainingScene training_scene_from_sweep(const RQSweep& sweep) {
    const ParetoFront front = build_pareto_front(sweep.points());
    TrainingScene scene;
    scene.scene_id = sweep.scene_id();
    scene.crossovers = extract_crossovers(front);
    scene.zeta = ground_truth_zetas(sweep, scene.crossovers, extract_hq_point(sweep));
    return scene;
}

}  // namespace ladder
