#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shotlab {

// Canonical channel identifiers. acc_y is the shooting direction and gyro_z
// the leg's angular deviation axis; sensors mounted differently are remapped
// at ingestion.
enum class Channel : std::size_t { AccX = 0, AccY, AccZ, GyroX, GyroY, GyroZ };

inline constexpr std::size_t kChannelCount = 6;
inline constexpr std::array<Channel, kChannelCount> kAllChannels{
    Channel::AccX, Channel::AccY, Channel::AccZ, Channel::GyroX, Channel::GyroY, Channel::GyroZ};

std::string_view channel_name(Channel c);
std::optional<Channel> channel_from_name(std::string_view name);

constexpr std::size_t index(Channel c) { return static_cast<std::size_t>(c); }

using Vec3 = std::array<double, 3>;

/// One timestamped 6-axis reading. Acceleration in m/s^2, angular rate in deg/s.
struct ImuSample {
    std::int64_t t_ms = 0;
    Vec3 acc{};
    Vec3 gyro{};

    double value(Channel c) const;
    bool operator==(const ImuSample&) const = default;
};

enum class SensorSite { CalfAboveAnkle };

struct SessionMeta {
    std::string player_id;
    double distance_m = 10.0;
    double window_s = 7.0;
    double nominal_rate_hz = 7.0;
    SensorSite sensor_site = SensorSite::CalfAboveAnkle;

    bool operator==(const SessionMeta&) const = default;
};

struct RawSession {
    SessionMeta meta;
    std::vector<ImuSample> samples;

    bool operator==(const RawSession&) const = default;
};

enum class Outcome { Success, Fail };

std::string_view to_string(Outcome o);
std::optional<Outcome> outcome_from_string(std::string_view s);

using ChannelSet = std::array<std::vector<double>, kChannelCount>;

/// A resampled, fixed-length window of one kick.
struct ShotRecord {
    SessionMeta meta;
    std::size_t grid_len = 49;
    ChannelSet channels;
    std::size_t impact_index = 0;
    std::optional<Outcome> label;

    const std::vector<double>& channel(Channel c) const { return channels[index(c)]; }
    std::vector<double>& channel(Channel c) { return channels[index(c)]; }

    bool operator==(const ShotRecord&) const = default;
};

/// Fitted optimal-shot curves on the shot grid. `impact_index` is the grid
/// slot every source shot was aligned to before fitting.
struct GroundTruthTemplate {
    std::size_t grid_len = 0;
    ChannelSet channels;
    int fit_degree = 0;
    std::size_t source_count = 0;
    std::size_t impact_index = 0;

    const std::vector<double>& channel(Channel c) const { return channels[index(c)]; }

    bool operator==(const GroundTruthTemplate&) const = default;
};

inline constexpr std::size_t kFeatureCount = 4;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "rmse_acc_y", "rmse_gyro_z", "peak_dev_acc_y", "peak_dev_gyro_z"};

using FeatureVector = std::array<double, kFeatureCount>;

/// Linear-probability model over the deviation features.
struct OutcomeModel {
    std::vector<std::string> feature_names{kFeatureNames.begin(), kFeatureNames.end()};
    std::vector<double> weights;
    double intercept = 0.0;

    /// Unclamped linear response.
    double response(const FeatureVector& f) const;
    /// Response clamped to [0, 1].
    double probability(const FeatureVector& f) const;

    bool operator==(const OutcomeModel&) const = default;
};

struct ShotScore {
    double rmse_acc_y = 0.0;
    double rmse_gyro_z = 0.0;
    double peak_dev_acc_y = 0.0;
    double peak_dev_gyro_z = 0.0;
    double gap_area_acc_y = 0.0;
    double probability = 0.0;
    Outcome classified = Outcome::Fail;

    bool operator==(const ShotScore&) const = default;
};

struct PipelineConfig {
    double filter_alpha = 0.98;
    double phase_pre_s = 0.5;
    double phase_post_s = 1.0;
    int fit_degree = 5;
    double classify_threshold = 0.5;
    int max_gap_fill = 3;
    // Shot window and sampling rate. SessionMeta carries the same values for a
    // recorded session; the pipeline grid is derived from these.
    double window_s = 7.0;
    double nominal_rate_hz = 7.0;

    std::size_t grid_len() const;
    int pre_slots() const;
    int post_slots() const;
    double dt_s() const { return 1.0 / nominal_rate_hz; }
    /// Millisecond offset of grid slot k from the window origin.
    std::int64_t grid_offset_ms(std::size_t k) const;

    bool operator==(const PipelineConfig&) const = default;
};

/// Returns `cfg` unchanged when every bound holds; throws ConfigInvalid naming
/// the first violated field otherwise.
const PipelineConfig& validate_config(const PipelineConfig& cfg);

} // namespace shotlab
