#include "shotlab/template.hpp"

#include "shotlab/error.hpp"
#include "shotlab/lsq.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace shotlab {

namespace {

void check_grid(const ShotRecord& shot, std::size_t grid_len)
{
    if (shot.grid_len != grid_len)
        throw Error(ErrorKind::GridMismatch, "grid_len");
    for (auto c : kAllChannels) {
        if (shot.channel(c).size() != grid_len)
            throw Error(ErrorKind::GridMismatch, std::string(channel_name(c)));
    }
}

// Fits one span [first, last] of one channel and writes the curve into `out`.
void fit_span(const std::vector<const ShotRecord*>& shots, Channel ch, std::size_t first, std::size_t last,
              int degree, std::vector<double>& out)
{
    std::vector<std::pair<double, double>> points;
    points.reserve(shots.size() * (last - first + 1));
    for (const auto* s : shots) {
        const auto& values = s->channel(ch);
        for (auto k = first; k <= last; ++k)
            points.emplace_back(static_cast<double>(k), values[k]);
    }
    std::sort(points.begin(), points.end());

    std::vector<double> xs(points.size());
    std::vector<double> ys(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        xs[i] = points[i].first;
        ys[i] = points[i].second;
    }
    const int span_degree = std::min(degree, static_cast<int>(last - first));
    const auto poly = fit_polynomial_least_squares(xs, ys, span_degree);
    for (auto k = first; k <= last; ++k)
        out[k] = poly(static_cast<double>(k));
}

} // namespace

GroundTruthTemplate build_ground_truth(std::span<const ShotRecord> shots, const PipelineConfig& cfg, Execution exec)
{
    std::vector<const ShotRecord*> successes;
    for (const auto& s : shots) {
        if (s.label == Outcome::Success)
            successes.push_back(&s);
    }
    if (successes.empty())
        throw Error(ErrorKind::NoSuccessfulShots);
    if (cfg.fit_degree < 0)
        throw Error(ErrorKind::ConfigInvalid, "fit_degree");

    const auto n = successes.front()->grid_len;
    const auto impact = successes.front()->impact_index;
    for (const auto* s : successes) {
        check_grid(*s, n);
        if (s->impact_index != impact)
            throw Error(ErrorKind::GridMismatch, "impact_index");
    }

    GroundTruthTemplate t;
    t.grid_len = n;
    t.fit_degree = cfg.fit_degree;
    t.source_count = successes.size();
    t.impact_index = impact;
    for (auto& ch : t.channels)
        ch.assign(n, 0.0);

    const auto span = static_cast<std::size_t>(cfg.fit_degree) + 1;
    const auto spans_per_channel = static_cast<std::ptrdiff_t>((n + span - 1) / span);
    const auto jobs = spans_per_channel * static_cast<std::ptrdiff_t>(kChannelCount);

    auto run_job = [&](std::ptrdiff_t job) {
        const auto ch = kAllChannels[static_cast<std::size_t>(job / spans_per_channel)];
        const auto first = static_cast<std::size_t>(job % spans_per_channel) * span;
        const auto last = std::min(first + span, n) - 1;
        fit_span(successes, ch, first, last, cfg.fit_degree, t.channels[index(ch)]);
    };

    if (exec == Execution::Serial) {
        for (std::ptrdiff_t job = 0; job < jobs; ++job)
            run_job(job);
        return t;
    }

    // Each job writes a disjoint slice of one channel.
    bool failed = false;
    Error first_error(ErrorKind::RankDeficient);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t job = 0; job < jobs; ++job) {
        try {
            run_job(job);
        } catch (const Error& e) {
#pragma omp critical(shotlab_template_error)
            {
                if (!failed) {
                    failed = true;
                    first_error = e;
                }
            }
        }
    }
    if (failed)
        throw first_error;
    return t;
}

FeatureVector extract_features(const ShotRecord& shot, const GroundTruthTemplate& tmpl, const PhaseWindow& phase)
{
    check_grid(shot, tmpl.grid_len);
    if (phase.end_index >= tmpl.grid_len || phase.start_index > phase.end_index)
        throw Error(ErrorKind::GridMismatch, "phase window outside grid");

    auto deviation = [&](Channel c) {
        const auto& a = shot.channel(c);
        const auto& b = tmpl.channel(c);
        double sum_sq = 0.0;
        double peak = 0.0;
        for (auto k = phase.start_index; k <= phase.end_index; ++k) {
            const double d = std::abs(a[k] - b[k]);
            sum_sq += d * d;
            peak = std::max(peak, d);
        }
        return std::pair{std::sqrt(sum_sq / static_cast<double>(phase.length())), peak};
    };

    const auto [rmse_acc, peak_acc] = deviation(Channel::AccY);
    const auto [rmse_gyro, peak_gyro] = deviation(Channel::GyroZ);
    return {rmse_acc, rmse_gyro, peak_acc, peak_gyro};
}

OutcomeModel train_outcome_model(std::span<const FeatureVector> features, std::span<const double> labels)
{
    if (features.size() != labels.size())
        throw Error(ErrorKind::LengthMismatch);
    if (features.size() < 5)
        throw Error(ErrorKind::TooFewSamples, "outcome model needs at least 5 shots");

    bool has_zero = false;
    bool has_one = false;
    for (double y : labels) {
        if (y == 0.0)
            has_zero = true;
        else if (y == 1.0)
            has_one = true;
        else
            throw Error(ErrorKind::InvalidParams, "labels must be 0 or 1");
    }
    if (!has_zero || !has_one)
        throw Error(ErrorKind::SingleClass);

    // Design columns: [1, f_0, ..., f_3].
    constexpr std::size_t terms = kFeatureCount + 1;
    std::vector<double> gram(terms * terms, 0.0);
    std::vector<double> rhs(terms, 0.0);
    std::array<double, terms> row{};
    for (std::size_t i = 0; i < features.size(); ++i) {
        row[0] = 1.0;
        std::copy(features[i].begin(), features[i].end(), row.begin() + 1);
        for (std::size_t r = 0; r < terms; ++r) {
            rhs[r] += row[r] * labels[i];
            for (std::size_t c = 0; c < terms; ++c)
                gram[r * terms + c] += row[r] * row[c];
        }
    }
    const auto beta = solve_normal_equations(std::move(gram), std::move(rhs), terms);

    OutcomeModel m;
    m.intercept = beta[0];
    m.weights.assign(beta.begin() + 1, beta.end());
    return m;
}

} // namespace shotlab
