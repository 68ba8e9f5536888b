#include "shotlab/segment.hpp"

#include "shotlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace shotlab {

namespace {

double median(std::vector<double> v)
{
    const auto n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double upper = *mid;
    if (n % 2 == 1)
        return upper;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

} // namespace

std::size_t detect_impact(std::span<const double> acc_x, std::span<const double> acc_y,
                          std::span<const double> acc_z, const PipelineConfig&)
{
    const auto n = acc_x.size();
    if (acc_y.size() != n || acc_z.size() != n)
        throw Error(ErrorKind::LengthMismatch);
    if (n < 8)
        throw Error(ErrorKind::TooFewSamples, "impact detection needs at least 8 slots");

    const double mx = median({acc_x.begin(), acc_x.end()});
    const double my = median({acc_y.begin(), acc_y.end()});
    const double mz = median({acc_z.begin(), acc_z.end()});

    std::vector<double> residual(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double dx = acc_x[t] - mx;
        const double dy = acc_y[t] - my;
        const double dz = acc_z[t] - mz;
        residual[t] = std::sqrt(dx * dx + dy * dy + dz * dz);
    }

    std::size_t best = 0;
    for (std::size_t t = 1; t < n; ++t) {
        if (residual[t] > residual[best])
            best = t;
    }
    const double peak = residual[best];
    if (!(peak > 0.0) || peak < 2.0 * median(residual))
        throw Error(ErrorKind::NoImpactDetected);
    return best;
}

std::size_t detect_impact(const ShotRecord& shot, const PipelineConfig& cfg)
{
    return detect_impact(shot.channel(Channel::AccX), shot.channel(Channel::AccY), shot.channel(Channel::AccZ), cfg);
}

PhaseWindow phase_window(std::size_t impact_index, std::size_t grid_len, const PipelineConfig& cfg)
{
    const auto pre = static_cast<std::size_t>(cfg.pre_slots());
    const auto post = static_cast<std::size_t>(cfg.post_slots());
    if (impact_index >= grid_len || impact_index < pre || impact_index + post >= grid_len)
        throw Error(ErrorKind::PhaseOutOfBounds, std::to_string(impact_index));
    return {impact_index, impact_index - pre, impact_index + post};
}

PhaseWindow extract_phase(const ShotRecord& shot, const PipelineConfig& cfg)
{
    return phase_window(shot.impact_index, shot.grid_len, cfg);
}

ShotRecord align_impact(const ShotRecord& shot, std::size_t target_index)
{
    if (target_index >= shot.grid_len || shot.impact_index >= shot.grid_len)
        throw Error(ErrorKind::GridMismatch, "alignment target outside grid");
    ShotRecord out = shot;
    out.impact_index = target_index;
    if (target_index == shot.impact_index)
        return out;

    const auto n = static_cast<std::ptrdiff_t>(shot.grid_len);
    const auto shift = static_cast<std::ptrdiff_t>(target_index) - static_cast<std::ptrdiff_t>(shot.impact_index);
    for (auto c : kAllChannels) {
        const auto& src = shot.channel(c);
        auto& dst = out.channel(c);
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto from = std::clamp<std::ptrdiff_t>(i - shift, 0, n - 1);
            dst[static_cast<std::size_t>(i)] = src[static_cast<std::size_t>(from)];
        }
    }
    return out;
}

} // namespace shotlab
