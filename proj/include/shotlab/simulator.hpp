#pragma once

#include "shotlab/execution.hpp"
#include "shotlab/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace shotlab {

struct ShotParams {
    double velocity_scale = 1.0;  // 1.0 = optimal force
    double angle_dev_deg = 0.0;   // injected leg angular deviation
    double impact_time_s = 3.0;
    double noise_sigma = 0.0;
    double dropout_fraction = 0.0;
    std::uint64_t seed = 0;
};

// Canonical curve constants. The shapes are synthetic stand-ins for recorded
// kicks; nothing downstream depends on their absolute values.
namespace canon {
inline constexpr double kImpactPeak = 60.0;          // m/s^2 at velocity_scale 1
inline constexpr double kImpactHalfWidthSlots = 2.0; // pulse is zero two slots out
inline constexpr double kBackswingDip = -8.0;        // m/s^2 on acc_y
inline constexpr double kGravity = 9.81;
inline constexpr double kSwingPeak = 320.0;          // deg/s on gyro_z
inline constexpr double kDeviationGain = 4.0;        // deg/s of gyro_z per degree of deviation
inline constexpr double kDeviationOffsetS = 0.25;    // deviation pulse centre after impact
inline constexpr double kDeviationHalfWidthS = 1.0;
inline constexpr double kSuccessVelocityTol = 0.15;
inline constexpr double kSuccessAngleMaxDeg = 5.0;
} // namespace canon

/// Generator ground-truth rule.
Outcome label_for(const ShotParams& p);

/// Throws InvalidParams if a field is out of range for `cfg`.
void validate_params(const ShotParams& p, const PipelineConfig& cfg);

/// The leg can drift to either side; the seed picks which, so the gyro_z
/// deviation pulse is +-angle_dev_deg scaled and successes average out to the
/// undeviated swing.
double deviation_side(std::uint64_t seed);

/// Noise-free curves for `p` evaluated on the grid of `cfg`.
ChannelSet canonical_channels(const ShotParams& p, const PipelineConfig& cfg);

struct GeneratedShot {
    RawSession session;  // noisy, with dropout
    ShotRecord truth;    // noise-free curves, generator impact slot and label
    Outcome label = Outcome::Fail;
};

/// Deterministic in (p, cfg): equal inputs give equal bytes. Dropped samples
/// never include the first or last slot and never form a run longer than
/// cfg.max_gap_fill.
GeneratedShot generate_shot(const ShotParams& p, const PipelineConfig& cfg, std::string player_id = "sim");

/// Per-player attempt distribution. With probability `skill` an attempt is
/// on target (velocity within velocity_spread of 1, deviation up to
/// angle_spread); otherwise it is drawn from one of three failure modes: weak
/// strike, over-hit strike or large angular deviation.
struct PlayerProfile {
    std::string player_id;
    double skill = 0.5;
    double velocity_spread = 0.1;
    double angle_spread_deg = 4.0;
    double noise_sigma = 0.5;
    double dropout_fraction = 0.0;
    double impact_time_s = 3.0;
    int impact_jitter_slots = 0;
};

std::vector<PlayerProfile> default_profiles();
std::vector<PlayerProfile> parse_profiles(std::string_view json_text);

struct DatasetShot {
    RawSession session;
    Outcome label = Outcome::Fail;
    ShotParams params;
    std::size_t profile_index = 0;
};

/// Shot i uses profile i % profiles.size(); its parameters and noise come from
/// a seed derived from (seed, i) so the result is schedule independent.
std::vector<DatasetShot> generate_dataset(std::size_t n_shots, const std::vector<PlayerProfile>& profiles,
                                          std::uint64_t seed, const PipelineConfig& cfg,
                                          Execution exec = Execution::Parallel);

/// Parameters that generate_dataset would draw for shot `i`.
ShotParams draw_params(const PlayerProfile& profile, std::uint64_t seed, std::size_t i, const PipelineConfig& cfg);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

} // namespace shotlab
