#pragma once

#include "shotlab/types.hpp"

#include <cstddef>
#include <span>

namespace shotlab {

/// Inclusive bounds of the shooting phase on the shot grid.
struct PhaseWindow {
    std::size_t impact_index = 0;
    std::size_t start_index = 0;
    std::size_t end_index = 0;

    std::size_t length() const { return end_index - start_index + 1; }
    bool operator==(const PhaseWindow&) const = default;
};

/// Ball-strike index: argmax of |acc_t - median(acc)| where the median is taken
/// per axis. Earliest index wins ties. Throws NoImpactDetected unless the peak
/// is positive and at least twice the median residual magnitude.
std::size_t detect_impact(std::span<const double> acc_x, std::span<const double> acc_y,
                          std::span<const double> acc_z, const PipelineConfig& cfg);
std::size_t detect_impact(const ShotRecord& shot, const PipelineConfig& cfg);

PhaseWindow phase_window(std::size_t impact_index, std::size_t grid_len, const PipelineConfig& cfg);
PhaseWindow extract_phase(const ShotRecord& shot, const PipelineConfig& cfg);

/// Shifts every channel so the impact lands on `target_index`. Vacated slots
/// hold the nearest edge value.
ShotRecord align_impact(const ShotRecord& shot, std::size_t target_index);

} // namespace shotlab
