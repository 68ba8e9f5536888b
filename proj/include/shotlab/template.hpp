#pragma once

#include "shotlab/execution.hpp"
#include "shotlab/segment.hpp"
#include "shotlab/types.hpp"

#include <span>
#include <vector>

namespace shotlab {

/// Builds the optimal-shot template from the successful shots in `shots`.
///
/// Every successful shot must share grid_len and impact_index (align first
/// with align_impact). For each channel, the (grid index, value) points of all
/// shots are pooled and fitted piecewise: the grid is cut into consecutive
/// spans of fit_degree + 1 slots and each span gets its own least-squares
/// polynomial of degree min(fit_degree, span slots - 1). Pooled points are
/// sorted before accumulation, so the result does not depend on shot order.
GroundTruthTemplate build_ground_truth(std::span<const ShotRecord> shots, const PipelineConfig& cfg,
                                       Execution exec = Execution::Parallel);

/// Deviation features over the phase window, in kFeatureNames order.
FeatureVector extract_features(const ShotRecord& shot, const GroundTruthTemplate& tmpl, const PhaseWindow& phase);

/// Ordinary least squares of the 0/1 labels on the features plus an intercept.
OutcomeModel train_outcome_model(std::span<const FeatureVector> features, std::span<const double> labels);

} // namespace shotlab
