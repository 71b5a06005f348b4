#include "ladder/evaluation.hpp"

#include "ladder/error.hpp"

namespace ladder {

PredictedCrfs ground_truth_predictions(const RQSweep& sweep) {
    const ParetoFront front = build_pareto_front(sweep.points());
    const CrossoverSet xs = extract_crossovers(front);
    const HQPoint hq = extract_hq_point(sweep);
    for (Resolution r : {Resolution::k720p, Resolution::k480p, Resolution::k360p}) {
        if (!xs.present(r)) {
            throw ValidationError(sweep.scene_id() + ": " + std::string(label(r)) + " absent from the front");
        }
    }
    PredictedCrfs p;
    p.scene_id = sweep.scene_id();
    p.crf_hq_s1 = hq.point.crf;
    p.crf_low_s2 = xs[Resolution::k720p]->crf_low;
    p.crf_low_s3 = xs[Resolution::k480p]->crf_low;
    p.crf_low_s4 = xs[Resolution::k360p]->crf_low;
    p.provenance = Provenance::kFile;
    return p;
}

Calibration oracle_calibration(const TrainingScene& scene) {
    Calibration cal;
    for (std::size_t i = 0; i < kAdjacentPairs.size(); ++i) {
        const auto& hi = scene.crossovers[kAdjacentPairs[i].upper];
        const auto& lo = scene.crossovers[kAdjacentPairs[i].lower];
        if (!hi || !lo) continue;
        cal.crossover_maps[i] = LinearMap{1.0, static_cast<double>(hi->crf_high - lo->crf_low), 1.0, 1};
    }
    const auto& from = scene.zeta[index_of(kDefaultZetaKey.first)];
    const auto& to = scene.zeta[index_of(kDefaultZetaKey.second)];
    if (from && to) cal.zeta_maps.emplace(kDefaultZetaKey, LinearMap{1.0, *to - *from, 1.0, 1});
    return cal;
}

EncodeFn sweep_encoder(const RQSweep& sweep) {
    return [&sweep](Resolution r, int crf) {
        auto p = sweep.find(r, crf);
        if (!p) {
            throw ToolError(sweep.scene_id() + ": no sweep point for " + std::string(label(r)) + " crf " +
                            std::to_string(crf));
        }
        return *p;
    };
}

ReferenceResult build_reference(const RQSweep& sweep, double k, double r_min_kbps) {
    ReferenceResult out;
    out.front = build_pareto_front(sweep.points());
    out.hq = extract_hq_point(sweep);
    out.ladder = build_reference_ladder(out.front, out.hq, k, r_min_kbps);
    return out;
}

SceneEvaluation evaluate_scene(const RQSweep& sweep, const PredictedCrfs& pred, const Calibration& cal,
                               const PredictOptions& options, EncodeFn encode) {
    if (!encode) encode = sweep_encoder(sweep);
    SceneEvaluation ev;
    ev.scene_id = sweep.scene_id();
    ev.reference = build_reference(sweep, options.k, options.r_min_kbps).ladder;
    ev.predicted = predict_ladder(pred, cal, options, encode);
    ev.hq_delta = hq_delta_report(ev.predicted.ladder, rate_at_vmaf(sweep, Resolution::k1080p, kHqTargetVmaf));

    if (ev.predicted.ladder.rows.size() >= 2 && ev.reference.rows.size() >= 2) {
        const auto test = RQAnchorSet::from_rows(ev.predicted.ladder.rows, &ev.warnings);
        const auto ref = RQAnchorSet::from_rows(ev.reference.rows, &ev.warnings);
        ev.bd = bd_metrics(test, ref);
    } else {
        ev.bd.status = BDStatus::kNoOverlap;
        ev.warnings.push_back("single-row ladder: BD metrics undefined");
    }
    return ev;
}

}  // namespace ladder
