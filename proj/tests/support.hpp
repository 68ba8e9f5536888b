#pragma once

// Shared test helpers: session builders and the simulator-trained fixture.

#include "shotlab/error.hpp"
#include "shotlab/ingest.hpp"
#include "shotlab/pipeline.hpp"
#include "shotlab/simulator.hpp"
#include "shotlab/types.hpp"

#include <doctest.h>

#include <random>
#include <vector>

namespace shotlab::test {

inline constexpr std::uint64_t kFixtureSeed = 1;
inline constexpr std::uint64_t kHeldOutSeed = 2;
inline constexpr std::size_t kFixtureShots = 500;

// Session with one sample per grid slot, values from `f(k, channel)`.
template <typename F>
RawSession grid_session(const PipelineConfig& cfg, std::size_t slots, F&& f)
{
    RawSession s;
    s.meta.nominal_rate_hz = cfg.nominal_rate_hz;
    s.meta.window_s = cfg.window_s;
    for (std::size_t k = 0; k < slots; ++k) {
        ImuSample x;
        x.t_ms = cfg.grid_offset_ms(k);
        for (std::size_t c = 0; c < 3; ++c) {
            x.acc[c] = f(k, c);
            x.gyro[c] = f(k, c + 3);
        }
        s.samples.push_back(x);
    }
    return s;
}

inline ShotRecord record_from(const ChannelSet& ch, std::size_t impact, std::optional<Outcome> label = {})
{
    ShotRecord r;
    r.grid_len = ch[0].size();
    r.channels = ch;
    r.impact_index = impact;
    r.label = label;
    return r;
}

inline std::vector<ShotRecord> prepare_all(const std::vector<DatasetShot>& data, const PipelineConfig& cfg)
{
    std::vector<ShotRecord> out;
    for (const auto& d : data)
        out.push_back(prepare_shot(d.session, cfg, d.label));
    return out;
}

/// Template + model trained on 500 default-profile shots (seed 1).
struct Fixture {
    PipelineConfig cfg;
    TrainingResult trained;

    static const Fixture& get()
    {
        static const Fixture f = [] {
            Fixture x;
            const auto data = generate_dataset(kFixtureShots, default_profiles(), kFixtureSeed, x.cfg);
            x.trained = train(prepare_all(data, x.cfg), x.cfg);
            return x;
        }();
        return f;
    }
};

template <typename F>
ErrorKind error_kind_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected a shotlab::Error");
    return ErrorKind::Io;
}

} // namespace shotlab::test
