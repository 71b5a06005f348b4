#pragma once

// Scene-level evaluation: reference ladder from the sweep, predicted ladder,
// BD metrics between them, encode counts and the HQ deltas.

#include <optional>
#include <string>
#include <vector>

#include "ladder/bd_metrics.hpp"
#include "ladder/crf_rate_model.hpp"
#include "ladder/ground_truth.hpp"
#include "ladder/ladder_predictor.hpp"
#include "ladder/orchestrator.hpp"
#include "ladder/rq_model.hpp"

namespace ladder {

/// The four CRFs a perfect predictor would output for this sweep: the HQ CRF
/// and the crf_low of 720p, 480p and 360p on the front. Throws
/// ValidationError if a resolution is absent from the front.
PredictedCrfs ground_truth_predictions(const RQSweep& sweep);

/// Calibration that reproduces this one scene's crossover highs and 360p
/// slope exactly (unit slope, per-scene offsets).
Calibration oracle_calibration(const TrainingScene& scene);

/// Serves encodes from a sweep; missing grid points raise ToolError.
EncodeFn sweep_encoder(const RQSweep& sweep);

struct ReferenceResult {
    ParetoFront front;
    HQPoint hq;
    BitrateLadder ladder;
};

ReferenceResult build_reference(const RQSweep& sweep, double k = kDefaultK, double r_min_kbps = kDefaultRMinKbps);

struct SceneEvaluation {
    std::string scene_id;
    BitrateLadder reference;
    PredictedLadder predicted;
    BDResult bd;
    HqDelta hq_delta;
    std::vector<std::string> warnings;

    SceneComplexity complexity() const {
        return {scene_id, predicted.counts.pre, predicted.counts.rung};
    }
};

/// Predicts with `encode` (defaults to serving from the sweep) and compares
/// against the sweep's reference ladder.
SceneEvaluation evaluate_scene(const RQSweep& sweep, const PredictedCrfs& pred, const Calibration& cal,
                               const PredictOptions& options, EncodeFn encode = {});

}  // namespace ladder
