#include "shotlab/pipeline.hpp"

#include "shotlab/error.hpp"
#include "shotlab/ingest.hpp"
#include "shotlab/segment.hpp"
#include "shotlab/template.hpp"

#include <algorithm>

namespace shotlab {

ShotRecord resample_shot(const RawSession& session, const PipelineConfig& cfg, std::optional<Outcome> label)
{
    ShotRecord r;
    r.meta = session.meta;
    r.meta.window_s = cfg.window_s;
    r.meta.nominal_rate_hz = cfg.nominal_rate_hz;
    r.grid_len = cfg.grid_len();
    r.channels = resample_uniform(session, cfg);
    r.label = label;
    return r;
}

ShotRecord prepare_shot(const RawSession& session, const PipelineConfig& cfg, std::optional<Outcome> label)
{
    auto r = resample_shot(session, cfg, label);
    r.impact_index = detect_impact(r, cfg);
    extract_phase(r, cfg);
    return r;
}

TrainingResult train(std::span<const ShotRecord> labelled, const PipelineConfig& cfg, Execution exec)
{
    validate_config(cfg);
    std::vector<std::size_t> impacts;
    for (const auto& r : labelled) {
        if (!r.label)
            throw Error(ErrorKind::InvalidParams, "unlabelled shot in training set");
        if (*r.label == Outcome::Success)
            impacts.push_back(r.impact_index);
    }
    if (impacts.empty())
        throw Error(ErrorKind::NoSuccessfulShots);

    const auto mid = impacts.begin() + static_cast<std::ptrdiff_t>((impacts.size() - 1) / 2);
    std::nth_element(impacts.begin(), mid, impacts.end());
    const auto reference = *mid;
    const auto phase = phase_window(reference, cfg.grid_len(), cfg);

    std::vector<ShotRecord> aligned;
    aligned.reserve(labelled.size());
    for (const auto& r : labelled)
        aligned.push_back(align_impact(r, reference));

    TrainingResult out;
    out.tmpl = build_ground_truth(aligned, cfg, exec);
    out.features.resize(aligned.size());
    out.labels.resize(aligned.size());

    const auto n = static_cast<std::ptrdiff_t>(aligned.size());
    auto run = [&](std::ptrdiff_t i) {
        const auto k = static_cast<std::size_t>(i);
        out.features[k] = extract_features(aligned[k], out.tmpl, phase);
        out.labels[k] = *aligned[k].label == Outcome::Success ? 1.0 : 0.0;
    };
    if (exec == Execution::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            run(i);
    } else {
        // Grids were checked by build_ground_truth only for successes; check here
        // up front so no exception escapes the parallel region.
        for (const auto& r : aligned) {
            if (r.grid_len != out.tmpl.grid_len)
                throw Error(ErrorKind::GridMismatch, "grid_len");
            for (auto c : kAllChannels)
                if (r.channel(c).size() != out.tmpl.grid_len)
                    throw Error(ErrorKind::GridMismatch, std::string(channel_name(c)));
        }
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            run(i);
    }

    out.model = train_outcome_model(out.features, out.labels);
    return out;
}

ShotScore score_session(const RawSession& session, const GroundTruthTemplate& tmpl, const OutcomeModel& model,
                        const PipelineConfig& cfg)
{
    return score_shot(resample_shot(session, cfg), tmpl, model, cfg);
}

} // namespace shotlab
