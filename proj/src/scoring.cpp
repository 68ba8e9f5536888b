#include "shotlab/scoring.hpp"

#include "shotlab/filter.hpp"
#include "shotlab/template.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace shotlab {

namespace {

void check_grid(const ShotRecord& shot, const GroundTruthTemplate& tmpl)
{
    if (shot.grid_len != tmpl.grid_len)
        throw Error(ErrorKind::GridMismatch, "grid_len");
    for (auto c : kAllChannels) {
        if (shot.channel(c).size() != tmpl.grid_len || tmpl.channel(c).size() != tmpl.grid_len)
            throw Error(ErrorKind::GridMismatch, std::string(channel_name(c)));
    }
}

// Detects the impact, checks the phase fits around it, then moves the shot onto
// the template's impact slot.
ShotRecord locate_and_align(const ShotRecord& shot, const GroundTruthTemplate& tmpl, const PipelineConfig& cfg)
{
    check_grid(shot, tmpl);
    ShotRecord located = shot;
    located.impact_index = detect_impact(shot, cfg);
    extract_phase(located, cfg);
    return align_impact(located, tmpl.impact_index);
}

} // namespace

double gap_area(std::span<const double> shot_channel, std::span<const double> template_channel,
                const PhaseWindow& phase, double dt_s)
{
    if (shot_channel.size() != template_channel.size() || phase.end_index >= shot_channel.size()
        || phase.start_index > phase.end_index)
        throw Error(ErrorKind::GridMismatch, "gap_area");

    double area = 0.0;
    for (auto k = phase.start_index; k < phase.end_index; ++k) {
        const double a = std::abs(shot_channel[k] - template_channel[k]);
        const double b = std::abs(shot_channel[k + 1] - template_channel[k + 1]);
        area += 0.5 * (a + b) * dt_s;
    }
    return area;
}

ShotScore score_shot(const ShotRecord& shot, const GroundTruthTemplate& tmpl, const OutcomeModel& model,
                     const PipelineConfig& cfg)
{
    const auto aligned = locate_and_align(shot, tmpl, cfg);
    const auto phase = phase_window(tmpl.impact_index, tmpl.grid_len, cfg);
    const auto f = extract_features(aligned, tmpl, phase);

    ShotScore s;
    s.rmse_acc_y = f[0];
    s.rmse_gyro_z = f[1];
    s.peak_dev_acc_y = f[2];
    s.peak_dev_gyro_z = f[3];
    s.gap_area_acc_y = gap_area(aligned.channel(Channel::AccY), tmpl.channel(Channel::AccY), phase, cfg.dt_s());
    s.probability = model.probability(f);
    s.classified = s.probability >= cfg.classify_threshold ? Outcome::Success : Outcome::Fail;
    return s;
}

BatchSummary summarize(std::span<const ScoredShot> scores, std::size_t skipped)
{
    BatchSummary sum;
    sum.scored = scores.size();
    sum.skipped = skipped;
    if (scores.empty())
        return sum;

    std::size_t successes = 0;
    for (const auto& s : scores) {
        sum.mean_probability += s.score.probability;
        sum.feature_means[0] += s.score.rmse_acc_y;
        sum.feature_means[1] += s.score.rmse_gyro_z;
        sum.feature_means[2] += s.score.peak_dev_acc_y;
        sum.feature_means[3] += s.score.peak_dev_gyro_z;
        sum.mean_gap_area_acc_y += s.score.gap_area_acc_y;
        if (s.score.classified == Outcome::Success)
            ++successes;
    }
    const auto n = static_cast<double>(scores.size());
    sum.mean_probability /= n;
    for (auto& m : sum.feature_means)
        m /= n;
    sum.mean_gap_area_acc_y /= n;
    sum.success_rate = static_cast<double>(successes) / n;
    return sum;
}

BatchResult score_batch(std::span<const ShotRecord> shots, const GroundTruthTemplate& tmpl,
                        const OutcomeModel& model, const PipelineConfig& cfg, Execution exec)
{
    struct Slot {
        std::optional<ShotScore> score;
        ErrorKind reason = ErrorKind::NoImpactDetected;
        std::string message;
    };
    std::vector<Slot> slots(shots.size());

    auto run = [&](std::size_t i) {
        try {
            slots[i].score = score_shot(shots[i], tmpl, model, cfg);
        } catch (const Error& e) {
            slots[i].reason = e.kind();
            slots[i].message = e.what();
        }
    };

    const auto n = static_cast<std::ptrdiff_t>(shots.size());
    if (exec == Execution::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            run(static_cast<std::size_t>(i));
    } else {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            run(static_cast<std::size_t>(i));
    }

    BatchResult out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].score)
            out.scores.push_back({i, *slots[i].score});
        else
            out.skipped.push_back({i, slots[i].reason, std::move(slots[i].message)});
    }
    out.summary = summarize(out.scores, out.skipped.size());
    return out;
}

ShotDiagnostics diagnose_shot(const ShotRecord& shot, const GroundTruthTemplate& tmpl, const PipelineConfig& cfg)
{
    const auto aligned = locate_and_align(shot, tmpl, cfg);

    ShotDiagnostics d;
    d.phase = phase_window(tmpl.impact_index, tmpl.grid_len, cfg);
    for (auto c : kAllChannels) {
        const auto& a = aligned.channel(c);
        const auto& b = tmpl.channel(c);
        double sum_sq = 0.0;
        double peak = 0.0;
        for (auto k = d.phase.start_index; k <= d.phase.end_index; ++k) {
            const double dev = std::abs(a[k] - b[k]);
            sum_sq += dev * dev;
            peak = std::max(peak, dev);
        }
        d.rmse[index(c)] = std::sqrt(sum_sq / static_cast<double>(d.phase.length()));
        d.peak_dev[index(c)] = peak;
    }

    auto angle = [&](const ChannelSet& ch) {
        return complementary_filter(ch[index(Channel::AccX)], ch[index(Channel::AccY)], ch[index(Channel::AccZ)],
                                    ch[index(Channel::GyroZ)], cfg.dt_s(), cfg.filter_alpha)
            .values;
    };
    const auto shot_angle = angle(aligned.channels);
    const auto tmpl_angle = angle(tmpl.channels);
    double sum_sq = 0.0;
    for (auto k = d.phase.start_index; k <= d.phase.end_index; ++k) {
        const double dev = shot_angle[k] - tmpl_angle[k];
        sum_sq += dev * dev;
        d.angle_peak_deg = std::max(d.angle_peak_deg, std::abs(dev));
    }
    d.angle_rmse_deg = std::sqrt(sum_sq / static_cast<double>(d.phase.length()));
    return d;
}

} // namespace shotlab
