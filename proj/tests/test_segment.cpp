#include "support.hpp"

#include "shotlab/segment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace shotlab;
using shotlab::test::error_kind_of;

namespace {

struct Acc {
    std::vector<double> x, y, z;
};

Acc baseline(std::size_t n)
{
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 9.81)};
}

std::size_t detect(const Acc& a, const PipelineConfig& cfg = {})
{
    return detect_impact(a.x, a.y, a.z, cfg);
}

double sorted_median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Brute-force argmax of the median-centred magnitude, earliest index on ties.
std::size_t oracle_argmax(const Acc& a)
{
    const double mx = sorted_median(a.x), my = sorted_median(a.y), mz = sorted_median(a.z);
    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t t = 0; t < a.x.size(); ++t) {
        const double v = std::hypot(a.x[t] - mx, a.y[t] - my, a.z[t] - mz);
        if (v > best_v) {
            best_v = v;
            best = t;
        }
    }
    return best;
}

} // namespace

TEST_CASE("flat series has no impact")
{
    CHECK(error_kind_of([] { detect(baseline(49)); }) == ErrorKind::NoImpactDetected);
}

TEST_CASE("single dominant spike")
{
    auto a = baseline(49);
    a.y[21] = 60.0;
    CHECK(detect(a) == 21);
}

TEST_CASE("ties resolve to the earliest index")
{
    auto a = baseline(49);
    a.y[12] = 30.0;
    a.y[30] = 30.0;
    CHECK(detect(a) == 12);
}

TEST_CASE("peak must reach twice the median residual")
{
    // Every slot deviates by 1 from the per-axis median except one at 1.5.
    Acc a{std::vector<double>(49, 0.0), std::vector<double>(49, 0.0), std::vector<double>(49, 0.0)};
    for (std::size_t t = 0; t < 49; ++t)
        a.y[t] = t % 2 ? 1.0 : -1.0;
    a.y[10] = 2.5;
    CHECK(error_kind_of([&] { detect(a); }) == ErrorKind::NoImpactDetected);
}

TEST_CASE("short series are rejected")
{
    CHECK(error_kind_of([] { detect(baseline(7)); }) == ErrorKind::TooFewSamples);
}

TEST_CASE("simulator shot at 3.0 s lands on slot 21")
{
    const PipelineConfig cfg;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ShotParams p;
        p.impact_time_s = 3.0;
        p.noise_sigma = 0.5;
        p.seed = seed;
        const auto shot = generate_shot(p, cfg);
        const auto r = prepare_shot(shot.session, cfg);
        const Acc a{r.channel(Channel::AccX), r.channel(Channel::AccY), r.channel(Channel::AccZ)};
        CHECK(r.impact_index == oracle_argmax(a));
        CHECK(std::abs(static_cast<long>(r.impact_index) - 21) <= 1);
    }
}

TEST_CASE("detection is translation equivariant")
{
    std::mt19937_64 rng(17);
    std::normal_distribution<double> noise(0.0, 0.3);
    for (int iter = 0; iter < 50; ++iter) {
        auto a = baseline(49);
        for (std::size_t t = 0; t < 49; ++t) {
            a.x[t] += noise(rng);
            a.y[t] += noise(rng);
            a.z[t] += noise(rng);
        }
        const std::size_t at = 10 + static_cast<std::size_t>(iter % 20);
        auto spiked = a;
        spiked.y[at] += 55.0;
        const auto base = detect(spiked);
        CHECK(base == at);
        for (int k = -5; k <= 5; ++k) {
            // Rotate the whole series so the spike moves by k and the multiset
            // of samples (hence the medians) is unchanged.
            auto shifted = spiked;
            auto rot = [&](std::vector<double>& v) {
                if (k >= 0)
                    std::rotate(v.rbegin(), v.rbegin() + k, v.rend());
                else
                    std::rotate(v.begin(), v.begin() + (-k), v.end());
            };
            rot(shifted.x);
            rot(shifted.y);
            rot(shifted.z);
            CHECK(detect(shifted) == static_cast<std::size_t>(static_cast<long>(base) + k));
        }
    }
}

TEST_CASE("detection ignores a constant offset on every sample")
{
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> q(-64, 64);
    for (int iter = 0; iter < 100; ++iter) {
        // Dyadic values keep the offset arithmetic exact.
        Acc a{std::vector<double>(49), std::vector<double>(49), std::vector<double>(49)};
        for (std::size_t t = 0; t < 49; ++t) {
            a.x[t] = q(rng) / 16.0;
            a.y[t] = q(rng) / 16.0;
            a.z[t] = 9.75 + q(rng) / 16.0;
        }
        a.y[5 + iter % 40] += 40.0;
        const auto base = detect(a);
        const std::array<double, 3> c{q(rng) / 4.0, q(rng) / 4.0, q(rng) / 4.0};
        auto moved = a;
        for (std::size_t t = 0; t < 49; ++t) {
            moved.x[t] += c[0];
            moved.y[t] += c[1];
            moved.z[t] += c[2];
        }
        CHECK(detect(moved) == base);
    }
}

TEST_CASE("phase window bounds")
{
    const PipelineConfig cfg;
    const auto w = phase_window(21, 49, cfg);
    CHECK(w.start_index == 17);
    CHECK(w.end_index == 28);
    CHECK(w.impact_index == 21);
    CHECK(w.length() == static_cast<std::size_t>(std::lround((0.5 + 1.0) * 7)) + 1);

    CHECK(error_kind_of([&] { phase_window(2, 49, cfg); }) == ErrorKind::PhaseOutOfBounds);
    CHECK(error_kind_of([&] { phase_window(45, 49, cfg); }) == ErrorKind::PhaseOutOfBounds);

    PipelineConfig zero = cfg;
    zero.phase_pre_s = 0;
    zero.phase_post_s = 0;
    const auto single = phase_window(2, 49, zero);
    CHECK(single.start_index == 2);
    CHECK(single.end_index == 2);

    for (std::size_t i = 4; i + 7 < 49; ++i)
        CHECK(phase_window(i, 49, cfg).length() == 12);

    ShotRecord r;
    r.grid_len = 49;
    r.impact_index = 21;
    CHECK(extract_phase(r, cfg) == w);
}

TEST_CASE("impact alignment shifts channels with edge hold")
{
    ShotRecord r;
    r.grid_len = 10;
    for (auto& ch : r.channels)
        for (int k = 0; k < 10; ++k)
            ch.push_back(k);
    r.impact_index = 4;

    const auto right = align_impact(r, 6);
    CHECK(right.impact_index == 6);
    CHECK(right.channel(Channel::AccY) == std::vector<double>{0, 0, 0, 1, 2, 3, 4, 5, 6, 7});
    const auto left = align_impact(r, 3);
    CHECK(left.channel(Channel::GyroZ) == std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 9});
    CHECK(align_impact(r, 4) == r);
    CHECK(error_kind_of([&] { align_impact(r, 10); }) == ErrorKind::GridMismatch);
}
