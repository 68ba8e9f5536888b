#pragma once

#include "shotlab/error.hpp"
#include "shotlab/execution.hpp"
#include "shotlab/segment.hpp"
#include "shotlab/types.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace shotlab {

/// Trapezoidal integral of |shot - template| over the phase window
/// (value x seconds).
double gap_area(std::span<const double> shot_channel, std::span<const double> template_channel,
                const PhaseWindow& phase, double dt_s);

/// Full scoring of one shot: impact detection, phase extraction, alignment to
/// the template's impact slot, deviation features, gap area and the clamped
/// model probability. Ties at the threshold classify as success.
ShotScore score_shot(const ShotRecord& shot, const GroundTruthTemplate& tmpl, const OutcomeModel& model,
                     const PipelineConfig& cfg);

struct ScoredShot {
    std::size_t input_index = 0;
    ShotScore score;
};

struct SkippedShot {
    std::size_t input_index = 0;
    ErrorKind reason = ErrorKind::NoImpactDetected;
    std::string message;
};

struct BatchSummary {
    std::size_t scored = 0;
    std::size_t skipped = 0;
    double mean_probability = 0.0;
    double success_rate = 0.0;
    FeatureVector feature_means{};
    double mean_gap_area_acc_y = 0.0;
};

struct BatchResult {
    std::vector<ScoredShot> scores;
    std::vector<SkippedShot> skipped;
    BatchSummary summary;
};

/// Scores every shot, preserving input order. Failing shots land in `skipped`
/// with their reason.
BatchResult score_batch(std::span<const ShotRecord> shots, const GroundTruthTemplate& tmpl,
                        const OutcomeModel& model, const PipelineConfig& cfg,
                        Execution exec = Execution::Parallel);

BatchSummary summarize(std::span<const ScoredShot> scores, std::size_t skipped);

/// Per-channel deviations for all six channels plus complementary-filter leg
/// angle diagnostics. Not part of the model features.
struct ShotDiagnostics {
    std::array<double, kChannelCount> rmse{};
    std::array<double, kChannelCount> peak_dev{};
    double angle_rmse_deg = 0.0;
    double angle_peak_deg = 0.0;
    PhaseWindow phase;
};

ShotDiagnostics diagnose_shot(const ShotRecord& shot, const GroundTruthTemplate& tmpl, const PipelineConfig& cfg);

} // namespace shotlab
