#include "shotlab/types.hpp"

#include "shotlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace shotlab {

namespace {

std::string describe(ErrorKind kind, const std::string& detail)
{
    std::string msg{to_string(kind)};
    if (!detail.empty()) {
        msg += "(";
        msg += detail;
        msg += ")";
    }
    return msg;
}

constexpr std::array<std::string_view, kChannelCount> kChannelNames{
    "acc_x", "acc_y", "acc_z", "gyro_x", "gyro_y", "gyro_z"};

} // namespace

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::FrameDecode: return "FrameDecode";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::GapTooLarge: return "GapTooLarge";
    case ErrorKind::SessionTooShort: return "SessionTooShort";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorKind::NoImpactDetected: return "NoImpactDetected";
    case ErrorKind::PhaseOutOfBounds: return "PhaseOutOfBounds";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NoSuccessfulShots: return "NoSuccessfulShots";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, std::string detail)
    : std::runtime_error(describe(kind, detail)), kind_(kind), detail_(std::move(detail))
{
}

std::string_view channel_name(Channel c)
{
    return kChannelNames[index(c)];
}

std::optional<Channel> channel_from_name(std::string_view name)
{
    for (auto c : kAllChannels) {
        if (kChannelNames[index(c)] == name)
            return c;
    }
    return std::nullopt;
}

double ImuSample::value(Channel c) const
{
    const auto i = index(c);
    return i < 3 ? acc[i] : gyro[i - 3];
}

std::string_view to_string(Outcome o)
{
    return o == Outcome::Success ? "success" : "fail";
}

std::optional<Outcome> outcome_from_string(std::string_view s)
{
    if (s == "success")
        return Outcome::Success;
    if (s == "fail")
        return Outcome::Fail;
    return std::nullopt;
}

double OutcomeModel::response(const FeatureVector& f) const
{
    double y = intercept;
    for (std::size_t i = 0; i < weights.size() && i < f.size(); ++i)
        y += weights[i] * f[i];
    return y;
}

double OutcomeModel::probability(const FeatureVector& f) const
{
    return std::clamp(response(f), 0.0, 1.0);
}

std::size_t PipelineConfig::grid_len() const
{
    return static_cast<std::size_t>(std::lround(window_s * nominal_rate_hz));
}

int PipelineConfig::pre_slots() const
{
    return static_cast<int>(std::lround(phase_pre_s * nominal_rate_hz));
}

int PipelineConfig::post_slots() const
{
    return static_cast<int>(std::lround(phase_post_s * nominal_rate_hz));
}

std::int64_t PipelineConfig::grid_offset_ms(std::size_t k) const
{
    return std::llround(static_cast<double>(k) * 1000.0 / nominal_rate_hz);
}

const PipelineConfig& validate_config(const PipelineConfig& cfg)
{
    auto fail = [](const char* field) { throw Error(ErrorKind::ConfigInvalid, field); };
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };

    if (!in_unit(cfg.filter_alpha))
        fail("filter_alpha");
    if (!(cfg.phase_pre_s >= 0.0 && std::isfinite(cfg.phase_pre_s)))
        fail("phase_pre_s");
    if (!(cfg.phase_post_s >= 0.0 && std::isfinite(cfg.phase_post_s)))
        fail("phase_post_s");
    if (cfg.fit_degree < 0)
        fail("fit_degree");
    if (!in_unit(cfg.classify_threshold))
        fail("classify_threshold");
    if (cfg.max_gap_fill < 0)
        fail("max_gap_fill");
    if (!(cfg.window_s > 0.0 && std::isfinite(cfg.window_s)))
        fail("window_s");
    if (!(cfg.nominal_rate_hz > 0.0 && std::isfinite(cfg.nominal_rate_hz)))
        fail("nominal_rate_hz");
    if (cfg.grid_len() < 8)
        fail("grid_len");
    if (cfg.phase_pre_s + cfg.phase_post_s >= cfg.window_s
        || static_cast<std::size_t>(cfg.pre_slots() + cfg.post_slots()) >= cfg.grid_len())
        fail("phase window");
    return cfg;
}

} // namespace shotlab
