#include "ladder/ladder_predictor.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ladder/bd_metrics.hpp"
#include "ladder/error.hpp"
#include "ladder/pchip.hpp"

namespace ladder {
namespace {

constexpr int kMaxRungIterations = 64;

std::string res_name(Resolution r) { return std::string(label(r)); }

}  // namespace

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::kModel: return "model";
        case Provenance::kFile: return "file";
        case Provenance::kFallback: return "fallback";
    }
    return "unknown";
}

std::optional<Provenance> parse_provenance(std::string_view text) {
    for (Provenance p : {Provenance::kModel, Provenance::kFile, Provenance::kFallback}) {
        if (to_string(p) == text) return p;
    }
    return std::nullopt;
}

std::string_view to_string(JobPurpose p) {
    switch (p) {
        case JobPurpose::kHq: return "hq";
        case JobPurpose::kLowCrossover: return "low-crossover";
        case JobPurpose::kHighCrossover: return "high-crossover";
    }
    return "unknown";
}

void PredictedCrfs::validate() const {
    const std::array<std::pair<const char*, int>, 4> fields{{{"crf_hq_s1", crf_hq_s1},
                                                              {"crf_low_s2", crf_low_s2},
                                                              {"crf_low_s3", crf_low_s3},
                                                              {"crf_low_s4", crf_low_s4}}};
    for (const auto& [name, v] : fields) {
        if (v < kMinCrf || v > kMaxCrf) {
            throw ValidationError(std::string(name) + " = " + std::to_string(v) + " outside [10, 51]");
        }
    }
}

PreEncodePlan plan_pre_encodes(const PredictedCrfs& pred, const Calibration& cal) {
    pred.validate();
    const std::array<int, 4> low{pred.crf_hq_s1, pred.crf_low_s2, pred.crf_low_s3, pred.crf_low_s4};

    PreEncodePlan plan;
    for (std::size_t i = 0; i < kResolutions.size(); ++i) {
        const Resolution r = kResolutions[i];
        plan.jobs.push_back({r, low[i], i == 0 ? JobPurpose::kHq : JobPurpose::kLowCrossover});
        if (i + 1 == kResolutions.size()) break;

        ClampedCrf high = apply_calibration_crossover(cal, low[i + 1], i);
        if (high.clamped) {
            plan.warnings.push_back("inferred " + res_name(r) + " high CRF clamped from " +
                                    std::to_string(high.raw));
        }
        if (high.crf <= low[i]) {
            const int raised = std::min(low[i] + 1, kMaxCrf);
            plan.warnings.push_back("inferred " + res_name(r) + " high CRF " + std::to_string(high.crf) +
                                    " not above low CRF " + std::to_string(low[i]) + "; raised to " +
                                    std::to_string(raised));
            high.crf = raised;
        }
        plan.jobs.push_back({r, high.crf, JobPurpose::kHighCrossover});
    }
    return plan;
}

void sanitize_ranges(ResolutionRanges& ranges, std::vector<std::string>& warnings) {
    for (auto& r : ranges) {
        if (r.rate_low > r.rate_high) {
            warnings.push_back("inverted " + res_name(r.resolution) + " range collapsed to its upper bound");
            r.rate_low = r.rate_high;
        }
    }
    for (std::size_t i = 0; i + 1 < ranges.size(); ++i) {
        auto& upper = ranges[i];
        auto& lower = ranges[i + 1];
        if (lower.rate_high > upper.rate_low) {
            const double mid = 0.5 * (upper.rate_low + lower.rate_high);
            warnings.push_back("overlapping " + res_name(upper.resolution) + "/" +
                               res_name(lower.resolution) + " ranges split at " + std::to_string(mid) +
                               " kbps");
            upper.rate_low = mid;
            lower.rate_high = mid;
        }
    }
    // Boundaries read top-down must never increase.
    double ceiling = ranges.front().rate_high;
    bool clipped = false;
    for (auto& r : ranges) {
        for (double* b : {&r.rate_high, &r.rate_low}) {
            if (*b > ceiling) {
                *b = ceiling;
                clipped = true;
            }
            ceiling = *b;
        }
    }
    if (clipped) warnings.push_back("range boundaries clipped to restore resolution ordering");
}

DerivedModels derive_models(const PreEncodePlan& plan, std::span<const RQPoint> results,
                            const Calibration& cal, double r_min_kbps) {
    if (plan.jobs.size() != kPreEncodeCount || results.size() != kPreEncodeCount) {
        throw ValidationError("derive_models needs exactly 7 pre-encode results");
    }
    for (std::size_t i = 0; i < kPreEncodeCount; ++i) {
        const auto& job = plan.jobs[i];
        const auto& res = results[i];
        if (job.resolution != res.resolution || job.crf != res.crf) {
            throw ValidationError("pre-encode result " + std::to_string(i) + " does not match its job");
        }
        if (!(res.bitrate_kbps > 0.0)) throw ValidationError("pre-encode bitrate must be positive");
    }

    DerivedModels out;
    for (std::size_t i = 0; i < 3; ++i) {
        const RQPoint& low = results[2 * i];
        const RQPoint& high = results[2 * i + 1];
        const std::array<CrfRateSample, 2> samples{{{low.crf, low.bitrate_kbps}, {high.crf, high.bitrate_kbps}}};
        out.models[i] = fit_crf_rate(samples, kResolutions[i]);
        if (!out.models[i].physical()) {
            out.warnings.push_back(res_name(kResolutions[i]) + " CRF-rate slope is not negative");
        }
        out.ranges[i] = {kResolutions[i], high.bitrate_kbps, low.bitrate_kbps};
    }

    const LinearMap* zmap = cal.zeta_map();
    if (!zmap) throw ValidationError("calibration has no 480p -> 360p zeta map");
    const RQPoint& last = results[6];
    const double zeta = (*zmap)(out.models[index_of(Resolution::k480p)].zeta);
    out.models[3] = model_from_zeta(Resolution::k360p, zeta, {last.crf, last.bitrate_kbps});
    if (!out.models[3].physical()) out.warnings.push_back("inferred 360p CRF-rate slope is not negative");
    out.ranges[3] = {Resolution::k360p, std::min(r_min_kbps, last.bitrate_kbps), last.bitrate_kbps};

    sanitize_ranges(out.ranges, out.warnings);
    return out;
}

Resolution select_resolution(const ResolutionRanges& ranges, double target_kbps) {
    if (target_kbps >= ranges.front().rate_high) return ranges.front().resolution;
    for (const auto& r : ranges) {
        if (target_kbps >= r.rate_low && target_kbps <= r.rate_high) return r.resolution;
    }
    if (target_kbps < ranges.back().rate_low) return ranges.back().resolution;
    for (std::size_t i = 0; i + 1 < ranges.size(); ++i) {
        const auto& upper = ranges[i];
        const auto& lower = ranges[i + 1];
        if (target_kbps < upper.rate_low && target_kbps > lower.rate_high) {
            return (upper.rate_low - target_kbps) <= (target_kbps - lower.rate_high) ? upper.resolution
                                                                                     : lower.resolution;
        }
    }
    return ranges.back().resolution;
}

PredictedLadder build_predicted_ladder(const PreEncodePlan& plan, std::span<const RQPoint> pre_results,
                                       const DerivedModels& derived, double k, double r_min_kbps,
                                       const EncodeFn& encode) {
    validate_ladder_params(k, r_min_kbps);
    if (pre_results.size() != plan.jobs.size() || pre_results.empty()) {
        throw ValidationError("pre-encode results do not match the plan");
    }

    std::map<std::pair<Resolution, int>, RQPoint> cache;
    for (const RQPoint& p : pre_results) cache.emplace(std::make_pair(p.resolution, p.crf), p);

    PredictedLadder out;
    out.ladder.k = k;
    out.ladder.r_min_kbps = r_min_kbps;
    out.ladder.rows.push_back(pre_results.front());

    double target = pre_results.front().bitrate_kbps;
    if (target < r_min_kbps) return out;

    for (int iter = 0; iter < kMaxRungIterations; ++iter) {
        target /= k;
        const Resolution res = select_resolution(derived.ranges, target);
        const ResolutionRange& range = derived.ranges[index_of(res)];
        double model_target = target;
        if (res != derived.ranges.front().resolution) model_target = std::min(model_target, range.rate_high);
        if (res != derived.ranges.back().resolution) model_target = std::max(model_target, range.rate_low);
        const ClampedCrf crf = crf_for_bitrate(derived.models[index_of(res)], model_target);

        RQPoint point;
        if (auto hit = cache.find({res, crf.crf}); hit != cache.end()) {
            point = hit->second;
        } else {
            try {
                point = encode(res, crf.crf);
            } catch (const std::exception& e) {
                out.error = "encode " + res_name(res) + " crf " + std::to_string(crf.crf) + " failed: " + e.what();
                break;
            }
            ++out.counts.rung;
            cache.emplace(std::make_pair(res, crf.crf), point);
        }

        if (point.bitrate_kbps < r_min_kbps) break;
        const bool repeat = point.bitrate_kbps >= out.ladder.rows.back().bitrate_kbps ||
                            std::any_of(out.ladder.rows.begin(), out.ladder.rows.end(),
                                        [&](const RQPoint& r) { return same_encode(r, point); });
        if (repeat) {
            if (target < r_min_kbps) break;
            continue;
        }
        out.ladder.rows.push_back(point);
        target = point.bitrate_kbps;
    }
    return out;
}

int fallback_first_rung(int crf_low_s1_predicted, int j) {
    if (j < 0) throw ValidationError("j must be non-negative");
    return std::clamp(crf_low_s1_predicted - j, kMinCrf, kMaxCrf);
}

PredictedLadder predict_ladder(const PredictedCrfs& pred, const Calibration& cal,
                               const PredictOptions& options, const EncodeFn& encode,
                               const BatchEncodeFn& batch) {
    validate_ladder_params(options.k, options.r_min_kbps);
    PredictedCrfs effective = pred;
    if (options.no_hq) effective.crf_hq_s1 = fallback_first_rung(pred.crf_hq_s1, options.j);

    const PreEncodePlan plan = plan_pre_encodes(effective, cal);

    std::vector<RQPoint> results;
    if (batch) {
        results = batch(plan.jobs);
        if (results.size() != plan.jobs.size()) throw ToolError("pre-encode batch returned a short result list");
    } else {
        for (const auto& job : plan.jobs) results.push_back(encode(job.resolution, job.crf));
    }

    const DerivedModels derived = derive_models(plan, results, cal, options.r_min_kbps);
    PredictedLadder out = build_predicted_ladder(plan, results, derived, options.k, options.r_min_kbps, encode);

    std::vector<std::pair<Resolution, int>> distinct;
    for (const auto& job : plan.jobs) distinct.emplace_back(job.resolution, job.crf);
    std::sort(distinct.begin(), distinct.end());
    out.counts.pre = static_cast<int>(std::unique(distinct.begin(), distinct.end()) - distinct.begin());

    out.warnings = plan.warnings;
    out.warnings.insert(out.warnings.end(), derived.warnings.begin(), derived.warnings.end());
    if (options.no_hq) {
        out.warnings.push_back("no-HQ mode: first rung at CRF " + std::to_string(effective.crf_hq_s1));
    }
    return out;
}

HqDelta hq_delta_report(const BitrateLadder& ladder, std::optional<double> rate_at_92_kbps) {
    if (ladder.rows.empty()) throw ValidationError("empty ladder");
    const RQPoint& first = ladder.rows.front();
    HqDelta d;
    d.delta_vmaf = first.vmaf - kHqTargetVmaf;
    if (rate_at_92_kbps) d.delta_rate_kbps = first.bitrate_kbps - *rate_at_92_kbps;
    return d;
}

std::optional<double> rate_at_vmaf(const RQSweep& sweep, Resolution resolution, double vmaf) {
    const std::vector<RQPoint> pts = sweep.at(resolution);
    if (pts.size() < 2) return std::nullopt;
    RQAnchorSet set;
    try {
        set = RQAnchorSet::from_rows(pts);
    } catch (const ValidationError&) {
        return std::nullopt;
    }
    std::vector<double> q, lr;
    for (const auto& p : set.points()) {
        q.push_back(p.quality);
        lr.push_back(std::log2(p.bitrate_kbps));
    }
    if (vmaf < q.front() || vmaf > q.back()) return std::nullopt;
    return std::exp2(MonotoneCubic(q, lr)(vmaf));
}

}  // namespace ladder
