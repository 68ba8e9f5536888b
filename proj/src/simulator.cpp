#include "shotlab/simulator.hpp"

#include "shotlab/error.hpp"
#include "shotlab/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace shotlab {

namespace {

// Raised-cosine bump: 1 at centre, 0 at and beyond +-half_width.
double bump(double t, double centre, double half_width)
{
    const double u = (t - centre) / half_width;
    if (std::abs(u) >= 1.0)
        return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * u));
}

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Longest run of dropped slots through `i` if it were dropped as well.
int run_through(const std::vector<bool>& dropped, std::size_t i)
{
    int run = 1;
    for (auto k = i; k-- > 0 && dropped[k];)
        ++run;
    for (auto k = i + 1; k < dropped.size() && dropped[k]; ++k)
        ++run;
    return run;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    // splitmix64 finaliser over the combined key.
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double deviation_side(std::uint64_t seed)
{
    return (derive_seed(seed, 0) >> 63) != 0 ? -1.0 : 1.0;
}

Outcome label_for(const ShotParams& p)
{
    const bool force_ok = std::abs(p.velocity_scale - 1.0) <= canon::kSuccessVelocityTol;
    const bool angle_ok = p.angle_dev_deg <= canon::kSuccessAngleMaxDeg;
    return force_ok && angle_ok ? Outcome::Success : Outcome::Fail;
}

void validate_params(const ShotParams& p, const PipelineConfig& cfg)
{
    auto fail = [](const char* field) { throw Error(ErrorKind::InvalidParams, field); };
    if (!(p.velocity_scale > 0.0 && std::isfinite(p.velocity_scale)))
        fail("velocity_scale");
    if (!(p.angle_dev_deg >= 0.0 && std::isfinite(p.angle_dev_deg)))
        fail("angle_dev_deg");
    if (!(p.impact_time_s > cfg.phase_pre_s && p.impact_time_s < cfg.window_s - cfg.phase_post_s))
        fail("impact_time_s");
    if (!(p.noise_sigma >= 0.0 && std::isfinite(p.noise_sigma)))
        fail("noise_sigma");
    if (!(p.dropout_fraction >= 0.0 && p.dropout_fraction < 1.0))
        fail("dropout_fraction");
}

ChannelSet canonical_channels(const ShotParams& p, const PipelineConfig& cfg)
{
    const auto n = cfg.grid_len();
    const double slot = cfg.dt_s();
    const double ti = p.impact_time_s;
    const double side = deviation_side(p.seed);

    ChannelSet ch;
    for (auto& c : ch)
        c.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * slot;
        ch[index(Channel::AccX)][k] = 2.0 * bump(t, ti - 0.3, 1.0);
        ch[index(Channel::AccY)][k] = canon::kBackswingDip * bump(t, ti - 0.7, 0.6)
                                      + canon::kImpactPeak * p.velocity_scale
                                            * bump(t, ti, canon::kImpactHalfWidthSlots * slot);
        ch[index(Channel::AccZ)][k] = canon::kGravity;
        ch[index(Channel::GyroX)][k] = 25.0 * bump(t, ti - 0.2, 0.9);
        ch[index(Channel::GyroY)][k] = -15.0 * bump(t, ti, 0.7);
        ch[index(Channel::GyroZ)][k] = canon::kSwingPeak * bump(t, ti - 0.15, 0.8)
                                       + side * canon::kDeviationGain * p.angle_dev_deg
                                             * bump(t, ti + canon::kDeviationOffsetS, canon::kDeviationHalfWidthS);
    }
    return ch;
}

GeneratedShot generate_shot(const ShotParams& p, const PipelineConfig& cfg, std::string player_id)
{
    validate_params(p, cfg);
    const auto n = cfg.grid_len();

    GeneratedShot out;
    out.label = label_for(p);

    SessionMeta meta;
    meta.player_id = std::move(player_id);
    meta.window_s = cfg.window_s;
    meta.nominal_rate_hz = cfg.nominal_rate_hz;

    out.truth.meta = meta;
    out.truth.grid_len = n;
    out.truth.channels = canonical_channels(p, cfg);
    out.truth.impact_index = static_cast<std::size_t>(std::lround(p.impact_time_s * cfg.nominal_rate_hz));
    out.truth.label = out.label;

    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    std::vector<ImuSample> samples(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto& s = samples[k];
        s.t_ms = cfg.grid_offset_ms(k);
        for (std::size_t c = 0; c < kChannelCount; ++c) {
            double v = out.truth.channels[c][k];
            if (p.noise_sigma > 0.0)
                v += p.noise_sigma * noise(rng);
            if (c < 3)
                s.acc[c] = v;
            else
                s.gyro[c - 3] = v;
        }
    }

    std::vector<bool> dropped(n, false);
    const auto target = static_cast<std::size_t>(std::lround(p.dropout_fraction * static_cast<double>(n)));
    if (target > 0 && n > 2) {
        std::vector<std::size_t> candidates(n - 2);
        for (std::size_t i = 0; i < candidates.size(); ++i)
            candidates[i] = i + 1;
        std::shuffle(candidates.begin(), candidates.end(), rng);
        std::size_t removed = 0;
        for (auto i : candidates) {
            if (removed == target)
                break;
            if (run_through(dropped, i) > cfg.max_gap_fill)
                continue;
            dropped[i] = true;
            ++removed;
        }
    }

    out.session.meta = meta;
    out.session.samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!dropped[k])
            out.session.samples.push_back(samples[k]);
    }
    return out;
}

std::vector<PlayerProfile> default_profiles()
{
    // Mean skill 0.5, so about half of a default dataset is on target.
    return {
        {"player_1", 0.70, 0.08, 3.0, 0.3, 0.00, 3.0, 1},
        {"player_2", 0.60, 0.10, 4.0, 0.5, 0.02, 3.0, 1},
        {"player_3", 0.50, 0.10, 4.0, 0.5, 0.04, 3.0, 1},
        {"player_4", 0.40, 0.12, 4.0, 0.8, 0.04, 3.0, 1},
        {"player_5", 0.30, 0.12, 4.0, 1.0, 0.06, 3.0, 1},
    };
}

std::vector<PlayerProfile> parse_profiles(std::string_view json_text)
{
    std::vector<PlayerProfile> out;
    try {
        const auto j = json::parse(json_text);
        if (!j.is_array())
            throw Error(ErrorKind::InvalidParams, "profiles: expected an array");
        for (const auto& e : j) {
            PlayerProfile p;
            p.player_id = e.at("player_id").get<std::string>();
            p.skill = e.value("skill", p.skill);
            p.velocity_spread = e.value("velocity_spread", p.velocity_spread);
            p.angle_spread_deg = e.value("angle_spread_deg", p.angle_spread_deg);
            p.noise_sigma = e.value("noise_sigma", p.noise_sigma);
            p.dropout_fraction = e.value("dropout_fraction", p.dropout_fraction);
            p.impact_time_s = e.value("impact_time_s", p.impact_time_s);
            p.impact_jitter_slots = e.value("impact_jitter_slots", p.impact_jitter_slots);
            out.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidParams, std::string("profiles: ") + e.what());
    }
    return out;
}

ShotParams draw_params(const PlayerProfile& profile, std::uint64_t seed, std::size_t i, const PipelineConfig& cfg)
{
    std::mt19937_64 rng(derive_seed(seed, i));
    const double vs = profile.velocity_spread;
    const double as = profile.angle_spread_deg;

    ShotParams p;
    const double mode_draw = uniform(rng, 0.0, 1.0);
    const int failure_mode = std::uniform_int_distribution<int>(0, 2)(rng);
    const double v_target = vs > 0.0 ? uniform(rng, -vs, vs) : 0.0;
    const double a_target = as > 0.0 ? uniform(rng, 0.0, as) : 0.0;
    const double weak = uniform(rng, 0.40, 0.75);
    const double over = uniform(rng, 1.30, 1.60);
    const double big_angle = uniform(rng, 10.0, 25.0);
    const int jitter = profile.impact_jitter_slots > 0
                           ? std::uniform_int_distribution<int>(-profile.impact_jitter_slots,
                                                                profile.impact_jitter_slots)(rng)
                           : 0;

    p.velocity_scale = 1.0 + v_target;
    p.angle_dev_deg = a_target;
    if (mode_draw >= profile.skill) {
        if (failure_mode == 0)
            p.velocity_scale = weak;
        else if (failure_mode == 1)
            p.velocity_scale = over;
        else
            p.angle_dev_deg = big_angle;
    }

    const double slot = cfg.dt_s();
    const auto base_slot = std::lround(profile.impact_time_s * cfg.nominal_rate_hz);
    p.impact_time_s = static_cast<double>(base_slot + jitter) * slot;
    p.noise_sigma = profile.noise_sigma;
    p.dropout_fraction = profile.dropout_fraction;
    p.seed = derive_seed(seed ^ 0x5eedULL, i);
    return p;
}

std::vector<DatasetShot> generate_dataset(std::size_t n_shots, const std::vector<PlayerProfile>& profiles,
                                          std::uint64_t seed, const PipelineConfig& cfg, Execution exec)
{
    if (n_shots < 1)
        throw Error(ErrorKind::InvalidParams, "n_shots");
    if (profiles.empty())
        throw Error(ErrorKind::InvalidParams, "profiles");
    for (const auto& pr : profiles) {
        if (!(pr.skill >= 0.0 && pr.skill <= 1.0) || pr.velocity_spread < 0.0 || pr.angle_spread_deg < 0.0
            || pr.impact_jitter_slots < 0)
            throw Error(ErrorKind::InvalidParams, "profile " + pr.player_id);
    }

    std::vector<DatasetShot> out(n_shots);
    bool failed = false;
    Error first_error(ErrorKind::InvalidParams);

    auto run = [&](std::size_t i) {
        const auto pi = i % profiles.size();
        const auto params = draw_params(profiles[pi], seed, i, cfg);
        auto shot = generate_shot(params, cfg, profiles[pi].player_id);
        out[i] = {std::move(shot.session), shot.label, params, pi};
    };

    const auto n = static_cast<std::ptrdiff_t>(n_shots);
    if (exec == Execution::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            run(static_cast<std::size_t>(i));
        return out;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            run(static_cast<std::size_t>(i));
        } catch (const Error& e) {
#pragma omp critical(shotlab_dataset_error)
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
    return out;
}

} // namespace shotlab
