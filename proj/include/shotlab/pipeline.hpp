#pragma once

#include "shotlab/execution.hpp"
#include "shotlab/scoring.hpp"
#include "shotlab/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace shotlab {

/// Resamples a raw session onto the shot grid and locates the impact. Throws
/// the first ingest or segmentation error (GapTooLarge, SessionTooShort,
/// NoImpactDetected, PhaseOutOfBounds).
ShotRecord prepare_shot(const RawSession& session, const PipelineConfig& cfg,
                        std::optional<Outcome> label = std::nullopt);

/// Resamples without requiring an impact; impact_index is left at 0. Used for
/// batch scoring, where impact failures are reported per shot.
ShotRecord resample_shot(const RawSession& session, const PipelineConfig& cfg,
                         std::optional<Outcome> label = std::nullopt);

struct TrainingResult {
    GroundTruthTemplate tmpl;
    OutcomeModel model;
    std::vector<FeatureVector> features;
    std::vector<double> labels;
};

/// Aligns labelled shots to the lower-median impact slot of the successes,
/// builds the template from the successes and fits the outcome model on all
/// shots' deviation features.
TrainingResult train(std::span<const ShotRecord> labelled, const PipelineConfig& cfg,
                     Execution exec = Execution::Parallel);

/// Convenience: resample + score one raw session.
ShotScore score_session(const RawSession& session, const GroundTruthTemplate& tmpl, const OutcomeModel& model,
                        const PipelineConfig& cfg);

} // namespace shotlab
