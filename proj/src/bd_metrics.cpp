#include "ladder/bd_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ladder/error.hpp"
#include "ladder/pchip.hpp"

namespace ladder {
namespace {

std::string describe(const RateQuality& p) {
    return std::to_string(p.bitrate_kbps) + " kbps / " + std::to_string(p.quality);
}

// Mean of (f_test - f_ref) over the common domain of two interpolants.
std::optional<double> mean_gap(const MonotoneCubic& test, const MonotoneCubic& ref, Interval& span) {
    span.low = std::max(test.x_min(), ref.x_min());
    span.high = std::min(test.x_max(), ref.x_max());
    if (!(span.high > span.low)) return std::nullopt;
    const double width = span.high - span.low;
    return (test.integral(span.low, span.high) - ref.integral(span.low, span.high)) / width;
}

struct Curves {
    std::vector<double> log2rate, quality;
};

Curves curves(const RQAnchorSet& set) {
    Curves c;
    for (const auto& p : set.points()) {
        c.log2rate.push_back(std::log2(p.bitrate_kbps));
        c.quality.push_back(p.quality);
    }
    return c;
}

}  // namespace

RQAnchorSet RQAnchorSet::from_points(std::span<const RateQuality> points,
                                     std::vector<std::string>* warnings) {
    std::vector<RateQuality> sorted(points.begin(), points.end());
    for (const auto& p : sorted) {
        if (!(p.bitrate_kbps > 0.0) || !std::isfinite(p.quality)) {
            throw ValidationError("anchor points need positive bitrate and finite quality");
        }
    }
    std::sort(sorted.begin(), sorted.end(), [](const RateQuality& a, const RateQuality& b) {
        if (a.bitrate_kbps != b.bitrate_kbps) return a.bitrate_kbps < b.bitrate_kbps;
        return a.quality > b.quality;
    });

    RQAnchorSet set;
    for (const auto& p : sorted) {
        if (!set.points_.empty() && p.quality <= set.points_.back().quality) {
            if (warnings) warnings->push_back("dropped non-monotone anchor " + describe(p));
            continue;
        }
        set.points_.push_back(p);
    }
    if (set.points_.size() < 2) {
        throw ValidationError("BD metrics need at least two distinct anchors per curve");
    }
    return set;
}

RQAnchorSet RQAnchorSet::from_rows(std::span<const RQPoint> rows, std::vector<std::string>* warnings) {
    std::vector<RateQuality> pts;
    pts.reserve(rows.size());
    for (const auto& r : rows) pts.push_back({r.bitrate_kbps, r.vmaf});
    return from_points(pts, warnings);
}

BDResult bd_rate(const RQAnchorSet& test, const RQAnchorSet& reference) {
    const Curves t = curves(test), r = curves(reference);
    // log2(rate) as a function of quality.
    const MonotoneCubic ft(t.quality, t.log2rate), fr(r.quality, r.log2rate);
    BDResult out;
    Interval span;
    auto gap = mean_gap(ft, fr, span);
    if (!gap) {
        out.status = BDStatus::kNoOverlap;
        return out;
    }
    out.vmaf_overlap = span;
    out.mean_log2_rate_gap = *gap;
    out.bd_rate_percent = 100.0 * (std::exp2(*gap) - 1.0);
    return out;
}

BDResult bd_quality(const RQAnchorSet& test, const RQAnchorSet& reference) {
    const Curves t = curves(test), r = curves(reference);
    const MonotoneCubic ft(t.log2rate, t.quality), fr(r.log2rate, r.quality);
    BDResult out;
    Interval span;
    auto gap = mean_gap(ft, fr, span);
    if (!gap) {
        out.status = BDStatus::kNoOverlap;
        return out;
    }
    out.log2rate_overlap = span;
    out.bd_vmaf = *gap;
    return out;
}

BDResult bd_metrics(const RQAnchorSet& test, const RQAnchorSet& reference) {
    BDResult out = bd_rate(test, reference);
    const BDResult q = bd_quality(test, reference);
    out.bd_vmaf = q.bd_vmaf;
    out.log2rate_overlap = q.log2rate_overlap;
    if (q.status == BDStatus::kNoOverlap) out.status = BDStatus::kNoOverlap;
    return out;
}

}  // namespace ladder
