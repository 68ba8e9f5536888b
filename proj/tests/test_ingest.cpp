#include "support.hpp"

#include <random>
#include <set>

using namespace shotlab;
using shotlab::test::error_kind_of;
using shotlab::test::grid_session;

namespace {

const std::string kHeader = std::string(kCsvHeader) + "\n";

std::size_t error_line(std::string_view text)
{
    try {
        parse_csv_log(text);
    } catch (const Error& e) {
        return std::stoul(e.detail());
    }
    FAIL("expected an error");
    return 0;
}

// Independent count of nominal slots strictly between two timestamps: slot
// times are t_a + j * period for j >= 1, accepted while within half a period
// of t_b.
std::size_t enumerate_missing(std::int64_t t_a, std::int64_t t_b, double rate)
{
    const double period_ms = 1000.0 / rate;
    std::size_t count = 0;
    for (int j = 1;; ++j) {
        const double t = static_cast<double>(t_a) + j * period_ms;
        if (t >= static_cast<double>(t_b) - period_ms / 2)
            break;
        ++count;
    }
    return count;
}

} // namespace

TEST_CASE("csv: single gravity row")
{
    const auto s = parse_csv_log(kHeader + "0,0,0,9.81,0,0,0\n");
    REQUIRE(s.samples.size() == 1);
    CHECK(s.samples[0].t_ms == 0);
    CHECK(s.samples[0].acc[2] == 9.81);
    CHECK(s.samples[0].acc[1] == 0.0);
}

TEST_CASE("csv: 7 Hz spacing rows keep file order")
{
    const auto s = parse_csv_log(kHeader + "0,1,2,3,4,5,6\n143,1,2,3,4,5,6\r\n286,1,2,3,4,5,6");
    REQUIRE(s.samples.size() == 3);
    CHECK(s.samples[1].t_ms == 143);
    CHECK(s.samples[2].t_ms == 286);
    CHECK(s.samples[2].gyro[2] == 6.0);
}

TEST_CASE("csv: errors carry the 1-based line number")
{
    CHECK(error_kind_of([&] { parse_csv_log(kHeader + "0,0,0,9.81,0,0,0\n0,0,0,9.81,0,0,0\n"); })
          == ErrorKind::NonMonotoneTime);
    CHECK(error_line(kHeader + "0,0,0,9.81,0,0,0\n0,0,0,9.81,0,0,0\n") == 3);

    CHECK(error_line("t_ms,ax,ay,az,gx,gy,gz\n0,0,0,0,0,0,0\n") == 1);
    CHECK(error_line(kHeader + "0,0,0,9.81,0,0\n") == 2);
    CHECK(error_line(kHeader + "0,0,0,9.81,0,0,0,1\n") == 2);
    CHECK(error_line(kHeader + "0,0,abc,9.81,0,0,0\n") == 2);
    CHECK(error_line(kHeader + "0,0,0,inf,0,0,0\n") == 2);
    CHECK(error_line(kHeader + "-5,0,0,0,0,0,0\n") == 2);
    CHECK(error_kind_of([&] { parse_csv_log(kHeader + "0,0,0,inf,0,0,0\n"); }) == ErrorKind::MalformedLine);

    CHECK(error_kind_of([] { parse_csv_log(""); }) == ErrorKind::EmptyFile);
    CHECK(error_kind_of([&] { parse_csv_log(kHeader); }) == ErrorKind::EmptyFile);
}

TEST_CASE("csv: write then parse is the identity (randomised)")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> step(1, 400);
    std::uniform_int_distribution<int> len(1, 80);
    std::normal_distribution<double> v(0.0, 100.0);
    for (int iter = 0; iter < 100; ++iter) {
        RawSession s;
        std::int64_t t = step(rng) - 1;
        for (int k = 0, n = len(rng); k < n; ++k) {
            ImuSample x;
            x.t_ms = t;
            t += step(rng);
            for (auto& a : x.acc)
                a = v(rng);
            for (auto& g : x.gyro)
                g = v(rng) * 1e-7;
            s.samples.push_back(x);
        }
        CHECK(parse_csv_log(write_csv_log(s)) == s);
    }
}

TEST_CASE("stream frame decoding")
{
    const auto s = parse_stream_frame(R"({"t_ms":0,"ax":0,"ay":0,"az":9.81,"gx":0,"gy":0,"gz":0})");
    CHECK(s.t_ms == 0);
    CHECK(s.acc[2] == 9.81);

    try {
        parse_stream_frame(R"({"t_ms":0,"ax":0,"ay":0,"az":9.81,"gx":0,"gy":0})");
        FAIL("expected FrameDecode");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FrameDecode);
        CHECK(e.detail() == "missing gz");
    }

    const auto x = parse_stream_frame(R"({"t_ms":143,"ax":1,"ay":2,"az":3,"gx":4,"gy":5,"gz":6,"extra":1})");
    CHECK(x.t_ms == 143);
    CHECK(x.gyro[2] == 6.0);

    CHECK(error_kind_of([] { parse_stream_frame("not json"); }) == ErrorKind::FrameDecode);
    CHECK(error_kind_of([] { parse_stream_frame(R"({"t_ms":1.5,"ax":0,"ay":0,"az":0,"gx":0,"gy":0,"gz":0})"); })
          == ErrorKind::FrameDecode);
    CHECK(error_kind_of([] { parse_stream_frame(R"({"t_ms":1,"ax":"0","ay":0,"az":0,"gx":0,"gy":0,"gz":0})"); })
          == ErrorKind::FrameDecode);
    CHECK(error_kind_of([] { parse_stream_frame(R"({"t_ms":1,"ax":1e999,"ay":0,"az":0,"gx":0,"gy":0,"gz":0})"); })
          == ErrorKind::FrameDecode);

    ImuSample y{286, {0.1, -2.5, 9.81}, {1e-9, 300.0, -0.3}};
    CHECK(parse_stream_frame(write_stream_frame(y, "p1")) == y);
}

TEST_CASE("gap detection")
{
    const PipelineConfig cfg;
    auto uniform = grid_session(cfg, 49, [](std::size_t, std::size_t) { return 1.0; });
    auto report = detect_gaps(uniform);
    CHECK(report.gaps.empty());
    CHECK(report.loss_fraction == 0.0);
    CHECK(report.expected_slots == 49);

    SUBCASE("one 429 ms jump at 7 Hz")
    {
        RawSession s;
        s.samples = {{0, {}, {}}, {143, {}, {}}, {572, {}, {}}, {715, {}, {}}};
        const auto r = detect_gaps(s);
        REQUIRE(r.gaps.size() == 1);
        CHECK(r.gaps[0].start_index == 1);
        CHECK(r.gaps[0].missing_slots == enumerate_missing(143, 572, 7.0));
        CHECK(r.gaps[0].missing_slots == 2);
    }

    SUBCASE("10 of 49 slots dropped")
    {
        std::mt19937_64 rng(5);
        std::set<std::size_t> drop;
        while (drop.size() < 10)
            drop.insert(std::uniform_int_distribution<std::size_t>(1, 47)(rng));
        RawSession s = uniform;
        s.samples.clear();
        for (std::size_t k = 0; k < 49; ++k) {
            if (!drop.count(k))
                s.samples.push_back(uniform.samples[k]);
        }
        const auto r = detect_gaps(s);
        std::size_t brute = 0;
        for (std::size_t i = 0; i + 1 < s.samples.size(); ++i)
            brute += enumerate_missing(s.samples[i].t_ms, s.samples[i + 1].t_ms, 7.0);
        CHECK(brute == 10);
        CHECK(r.missing_slots == brute);
        CHECK(r.loss_fraction == doctest::Approx(10.0 / 49.0));
        CHECK(r.loss_fraction == doctest::Approx(0.204).epsilon(0.001));
        for (std::size_t i = 1; i < r.gaps.size(); ++i)
            CHECK(r.gaps[i - 1].start_index < r.gaps[i].start_index);
    }

    SUBCASE("jitter below 1.5 periods is not a gap")
    {
        RawSession s;
        s.samples = {{0, {}, {}}, {200, {}, {}}, {340, {}, {}}};
        CHECK(detect_gaps(s).gaps.empty());
    }

    RawSession one;
    one.samples = {{0, {}, {}}};
    CHECK(error_kind_of([&] { detect_gaps(one); }) == ErrorKind::TooFewSamples);
}

TEST_CASE("resampling onto the uniform grid")
{
    const PipelineConfig cfg;
    auto value = [](std::size_t k, std::size_t c) { return std::sin(0.37 * static_cast<double>(k) + c) * 13.0; };

    SUBCASE("exact on data already on the grid")
    {
        const auto s = grid_session(cfg, 49, value);
        const auto out = resample_uniform(s, cfg);
        for (std::size_t c = 0; c < kChannelCount; ++c) {
            REQUIRE(out[c].size() == 49);
            for (std::size_t k = 0; k < 49; ++k)
                CHECK(out[c][k] == value(k, c));
        }
    }

    SUBCASE("hand linear interpolation")
    {
        // (0, 0) and (286, 2) with a hole at 143 ms.
        auto s = grid_session(cfg, 49, [](std::size_t k, std::size_t) { return 2.0 * static_cast<double>(k) / 2.0; });
        s.samples.erase(s.samples.begin() + 1);
        REQUIRE(s.samples[1].t_ms == 286);
        CHECK(s.samples[1].acc[1] == 2.0);
        const auto out = resample_uniform(s, cfg);
        CHECK(out[index(Channel::AccY)][1] == doctest::Approx(1.0).epsilon(1e-15));
    }

    SUBCASE("timestamps offset from zero anchor the grid at the first sample")
    {
        auto s = grid_session(cfg, 49, value);
        for (auto& x : s.samples)
            x.t_ms += 5000;
        const auto out = resample_uniform(s, cfg);
        CHECK(out[2][30] == value(30, 2));
    }

    SUBCASE("gap of 4 slots exceeds max_gap_fill 3")
    {
        auto s = grid_session(cfg, 49, value);
        s.samples.erase(s.samples.begin() + 10, s.samples.begin() + 14);
        try {
            resample_uniform(s, cfg);
            FAIL("expected GapTooLarge");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::GapTooLarge);
            CHECK(e.detail() == "9");
        }
        auto ok = grid_session(cfg, 49, value);
        ok.samples.erase(ok.samples.begin() + 10, ok.samples.begin() + 13);
        CHECK_NOTHROW(resample_uniform(ok, cfg));
    }

    SUBCASE("session shorter than the window")
    {
        const auto s = grid_session(cfg, 48, value);
        CHECK(error_kind_of([&] { resample_uniform(s, cfg); }) == ErrorKind::SessionTooShort);
    }

    SUBCASE("samples beyond the window are ignored, including gaps there")
    {
        auto s = grid_session(cfg, 49, value);
        const auto base = resample_uniform(s, cfg);
        s.samples.push_back({s.samples.back().t_ms + 5000, {}, {}});
        CHECK(resample_uniform(s, cfg) == base);
    }
}
