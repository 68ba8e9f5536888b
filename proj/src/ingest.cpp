#include "shotlab/ingest.hpp"

#include "shotlab/error.hpp"
#include "shotlab/json_io.hpp"

#include <charconv>
#include <cmath>

namespace shotlab {

namespace {

constexpr std::array<std::string_view, kChannelCount> kFrameKeys{"ax", "ay", "az", "gx", "gy", "gz"};

bool parse_field(std::string_view f, double& out)
{
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
    return ec == std::errc{} && ptr == f.data() + f.size() && std::isfinite(out);
}

bool parse_field(std::string_view f, std::int64_t& out)
{
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
    return ec == std::errc{} && ptr == f.data() + f.size() && out >= 0;
}

void append_number(std::string& out, double v)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

void set_value(ImuSample& s, std::size_t ch, double v)
{
    if (ch < 3)
        s.acc[ch] = v;
    else
        s.gyro[ch - 3] = v;
}

// Gap test in integer milliseconds: step > 1.5 / rate seconds.
bool is_gap(std::int64_t step_ms, double rate_hz)
{
    return static_cast<double>(step_ms) > 1500.0 / rate_hz;
}

std::size_t missing_for(std::int64_t step_ms, double rate_hz)
{
    const auto slots = std::llround(static_cast<double>(step_ms) / 1000.0 * rate_hz);
    return slots > 1 ? static_cast<std::size_t>(slots - 1) : 0;
}

} // namespace

RawSession parse_csv_log(std::string_view text, SessionMeta meta)
{
    RawSession session{std::move(meta), {}};
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool saw_header = false;

    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        auto line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);

        if (!saw_header) {
            if (line != kCsvHeader)
                throw Error(ErrorKind::MalformedLine, std::to_string(line_no));
            saw_header = true;
            continue;
        }
        if (line.empty())
            continue;

        ImuSample s;
        std::size_t field = 0;
        std::size_t start = 0;
        while (true) {
            auto comma = line.find(',', start);
            auto f = line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start);
            bool ok = false;
            if (field == 0)
                ok = parse_field(f, s.t_ms);
            else if (field <= kChannelCount) {
                double v = 0.0;
                ok = parse_field(f, v);
                set_value(s, field - 1, v);
            }
            if (!ok)
                throw Error(ErrorKind::MalformedLine, std::to_string(line_no));
            ++field;
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (field != kChannelCount + 1)
            throw Error(ErrorKind::MalformedLine, std::to_string(line_no));
        if (!session.samples.empty() && s.t_ms <= session.samples.back().t_ms)
            throw Error(ErrorKind::NonMonotoneTime, std::to_string(line_no));
        session.samples.push_back(s);
    }

    if (session.samples.empty())
        throw Error(ErrorKind::EmptyFile);
    return session;
}

std::string write_csv_log(const RawSession& session)
{
    std::string out{kCsvHeader};
    out += '\n';
    for (const auto& s : session.samples) {
        out += std::to_string(s.t_ms);
        for (auto c : kAllChannels) {
            out += ',';
            append_number(out, s.value(c));
        }
        out += '\n';
    }
    return out;
}

ImuSample parse_stream_frame(std::string_view line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception&) {
        throw Error(ErrorKind::FrameDecode, "invalid json");
    }
    if (!j.is_object())
        throw Error(ErrorKind::FrameDecode, "not an object");

    ImuSample s;
    auto t = j.find("t_ms");
    if (t == j.end())
        throw Error(ErrorKind::FrameDecode, "missing t_ms");
    if (!t->is_number_integer() || t->get<std::int64_t>() < 0)
        throw Error(ErrorKind::FrameDecode, "bad t_ms");
    s.t_ms = t->get<std::int64_t>();

    for (std::size_t ch = 0; ch < kChannelCount; ++ch) {
        const std::string key{kFrameKeys[ch]};
        auto it = j.find(key);
        if (it == j.end())
            throw Error(ErrorKind::FrameDecode, "missing " + key);
        if (!it->is_number())
            throw Error(ErrorKind::FrameDecode, "non-numeric " + key);
        const double v = it->get<double>();
        if (!std::isfinite(v))
            throw Error(ErrorKind::FrameDecode, "non-finite " + key);
        set_value(s, ch, v);
    }
    return s;
}

std::string write_stream_frame(const ImuSample& s, std::string_view player_id)
{
    ordered_json j;
    j["t_ms"] = s.t_ms;
    for (std::size_t ch = 0; ch < kChannelCount; ++ch)
        j[std::string(kFrameKeys[ch])] = s.value(kAllChannels[ch]);
    if (!player_id.empty())
        j["player_id"] = player_id;
    return j.dump();
}

GapReport detect_gaps(const RawSession& session)
{
    const auto& xs = session.samples;
    if (xs.size() < 2)
        throw Error(ErrorKind::TooFewSamples);
    const double rate = session.meta.nominal_rate_hz;

    GapReport report;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const auto step = xs[i + 1].t_ms - xs[i].t_ms;
        if (!is_gap(step, rate))
            continue;
        const auto missing = missing_for(step, rate);
        if (missing == 0)
            continue;
        report.gaps.push_back({i, missing});
        report.missing_slots += missing;
    }
    const double span_s = static_cast<double>(xs.back().t_ms - xs.front().t_ms) / 1000.0;
    report.expected_slots = static_cast<std::size_t>(std::llround(span_s * rate)) + 1;
    report.loss_fraction = static_cast<double>(report.missing_slots) / static_cast<double>(report.expected_slots);
    return report;
}

std::size_t window_last_sample(const RawSession& session, const PipelineConfig& cfg)
{
    const auto& xs = session.samples;
    const auto n = cfg.grid_len();
    if (xs.empty() || n == 0)
        throw Error(ErrorKind::SessionTooShort);
    const auto end_ms = xs.front().t_ms + cfg.grid_offset_ms(n - 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i].t_ms >= end_ms)
            return i;
    }
    throw Error(ErrorKind::SessionTooShort);
}

ChannelSet resample_uniform(const RawSession& session, const PipelineConfig& cfg)
{
    const auto& xs = session.samples;
    const auto last = window_last_sample(session, cfg);
    const double rate = cfg.nominal_rate_hz;

    for (std::size_t i = 0; i < last; ++i) {
        const auto step = xs[i + 1].t_ms - xs[i].t_ms;
        if (is_gap(step, rate) && missing_for(step, rate) > static_cast<std::size_t>(cfg.max_gap_fill))
            throw Error(ErrorKind::GapTooLarge, std::to_string(i));
    }

    const auto n = cfg.grid_len();
    ChannelSet out;
    for (auto& ch : out)
        ch.resize(n);

    const auto t0 = xs.front().t_ms;
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto g = t0 + cfg.grid_offset_ms(k);
        while (j + 1 <= last && xs[j + 1].t_ms <= g)
            ++j;
        const auto& a = xs[j];
        if (a.t_ms == g || j == last) {
            for (auto c : kAllChannels)
                out[index(c)][k] = a.value(c);
            continue;
        }
        const auto& b = xs[j + 1];
        const double w = static_cast<double>(g - a.t_ms) / static_cast<double>(b.t_ms - a.t_ms);
        for (auto c : kAllChannels) {
            const double va = a.value(c);
            out[index(c)][k] = va + (b.value(c) - va) * w;
        }
    }
    return out;
}

} // namespace shotlab
