#include "shotlab/json_io.hpp"

#include "shotlab/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace shotlab {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_real(std::string_view key, std::string_view v)
{
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
        throw Error(ErrorKind::ConfigInvalid, std::string(key));
    return out;
}

int parse_int(std::string_view key, std::string_view v)
{
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw Error(ErrorKind::ConfigInvalid, std::string(key));
    return out;
}

void check_template(const GroundTruthTemplate& t)
{
    if (t.source_count < 1)
        throw Error(ErrorKind::GridMismatch, "template source_count");
    for (auto c : kAllChannels) {
        const auto& ch = t.channel(c);
        if (ch.size() != t.grid_len)
            throw Error(ErrorKind::GridMismatch, std::string(channel_name(c)));
        for (double v : ch) {
            if (!std::isfinite(v))
                throw Error(ErrorKind::GridMismatch, std::string(channel_name(c)) + " non-finite");
        }
    }
    if (t.impact_index >= t.grid_len)
        throw Error(ErrorKind::GridMismatch, "template impact_index");
}

} // namespace

void to_json(json& j, const ImuSample& s)
{
    j = json{{"t_ms", s.t_ms}, {"acc", s.acc}, {"gyro", s.gyro}};
}

void from_json(const json& j, ImuSample& s)
{
    j.at("t_ms").get_to(s.t_ms);
    j.at("acc").get_to(s.acc);
    j.at("gyro").get_to(s.gyro);
}

void to_json(json& j, const SessionMeta& m)
{
    j = json{{"player_id", m.player_id},
             {"distance_m", m.distance_m},
             {"window_s", m.window_s},
             {"nominal_rate_hz", m.nominal_rate_hz},
             {"sensor_site", "calf-above-ankle"}};
}

void from_json(const json& j, SessionMeta& m)
{
    j.at("player_id").get_to(m.player_id);
    j.at("distance_m").get_to(m.distance_m);
    j.at("window_s").get_to(m.window_s);
    j.at("nominal_rate_hz").get_to(m.nominal_rate_hz);
    if (j.value("sensor_site", std::string{"calf-above-ankle"}) != "calf-above-ankle")
        throw Error(ErrorKind::InvalidParams, "sensor_site");
    m.sensor_site = SensorSite::CalfAboveAnkle;
}

void to_json(json& j, const RawSession& s)
{
    j = json{{"meta", s.meta}, {"samples", s.samples}};
}

void from_json(const json& j, RawSession& s)
{
    j.at("meta").get_to(s.meta);
    j.at("samples").get_to(s.samples);
}

void to_json(json& j, const ShotRecord& r)
{
    json channels = json::object();
    for (auto c : kAllChannels)
        channels[std::string(channel_name(c))] = r.channel(c);
    j = json{{"meta", r.meta},
             {"grid_len", r.grid_len},
             {"channels", channels},
             {"impact_index", r.impact_index},
             {"label", r.label ? json(to_string(*r.label)) : json(nullptr)}};
}

void from_json(const json& j, ShotRecord& r)
{
    j.at("meta").get_to(r.meta);
    j.at("grid_len").get_to(r.grid_len);
    for (auto c : kAllChannels)
        j.at("channels").at(std::string(channel_name(c))).get_to(r.channel(c));
    j.at("impact_index").get_to(r.impact_index);
    r.label.reset();
    if (auto it = j.find("label"); it != j.end() && !it->is_null())
        r.label = outcome_from_string(it->get<std::string>());
}

void to_json(json& j, const GroundTruthTemplate& t)
{
    json channels = json::object();
    for (auto c : kAllChannels)
        channels[std::string(channel_name(c))] = t.channel(c);
    j = json{{"grid_len", t.grid_len},
             {"fit_degree", t.fit_degree},
             {"source_count", t.source_count},
             {"impact_index", t.impact_index},
             {"channels", channels}};
}

void from_json(const json& j, GroundTruthTemplate& t)
{
    j.at("grid_len").get_to(t.grid_len);
    j.at("fit_degree").get_to(t.fit_degree);
    j.at("source_count").get_to(t.source_count);
    t.impact_index = j.value("impact_index", std::size_t{0});
    for (auto c : kAllChannels)
        j.at("channels").at(std::string(channel_name(c))).get_to(t.channels[index(c)]);
    check_template(t);
}

void to_json(json& j, const OutcomeModel& m)
{
    j = json{{"feature_names", m.feature_names}, {"weights", m.weights}, {"intercept", m.intercept}};
}

void from_json(const json& j, OutcomeModel& m)
{
    j.at("feature_names").get_to(m.feature_names);
    j.at("weights").get_to(m.weights);
    j.at("intercept").get_to(m.intercept);
    if (m.weights.size() != m.feature_names.size())
        throw Error(ErrorKind::InvalidParams, "weights length differs from feature_names");
    if (m.feature_names.size() != kFeatureCount)
        throw Error(ErrorKind::InvalidParams, "feature_names");
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (m.feature_names[i] != kFeatureNames[i])
            throw Error(ErrorKind::InvalidParams, "feature " + m.feature_names[i]);
        if (!std::isfinite(m.weights[i]))
            throw Error(ErrorKind::InvalidParams, "non-finite weight");
    }
    if (!std::isfinite(m.intercept))
        throw Error(ErrorKind::InvalidParams, "non-finite intercept");
}

void to_json(json& j, const ShotScore& s)
{
    j = json{{"rmse_acc_y", s.rmse_acc_y},
             {"rmse_gyro_z", s.rmse_gyro_z},
             {"peak_dev_acc_y", s.peak_dev_acc_y},
             {"peak_dev_gyro_z", s.peak_dev_gyro_z},
             {"gap_area_acc_y", s.gap_area_acc_y},
             {"probability", s.probability},
             {"classified", to_string(s.classified)}};
}

void from_json(const json& j, ShotScore& s)
{
    j.at("rmse_acc_y").get_to(s.rmse_acc_y);
    j.at("rmse_gyro_z").get_to(s.rmse_gyro_z);
    j.at("peak_dev_acc_y").get_to(s.peak_dev_acc_y);
    j.at("peak_dev_gyro_z").get_to(s.peak_dev_gyro_z);
    j.at("gap_area_acc_y").get_to(s.gap_area_acc_y);
    j.at("probability").get_to(s.probability);
    auto o = outcome_from_string(j.at("classified").get<std::string>());
    if (!o)
        throw Error(ErrorKind::InvalidParams, "classified");
    s.classified = *o;
}

void to_json(json& j, const PipelineConfig& c)
{
    j = json{{"filter_alpha", c.filter_alpha},
             {"phase_pre_s", c.phase_pre_s},
             {"phase_post_s", c.phase_post_s},
             {"fit_degree", c.fit_degree},
             {"classify_threshold", c.classify_threshold},
             {"max_gap_fill", c.max_gap_fill},
             {"window_s", c.window_s},
             {"nominal_rate_hz", c.nominal_rate_hz}};
}

void from_json(const json& j, PipelineConfig& c)
{
    j.at("filter_alpha").get_to(c.filter_alpha);
    j.at("phase_pre_s").get_to(c.phase_pre_s);
    j.at("phase_post_s").get_to(c.phase_post_s);
    j.at("fit_degree").get_to(c.fit_degree);
    j.at("classify_threshold").get_to(c.classify_threshold);
    j.at("max_gap_fill").get_to(c.max_gap_fill);
    j.at("window_s").get_to(c.window_s);
    j.at("nominal_rate_hz").get_to(c.nominal_rate_hz);
}

ordered_json score_event(const std::string& player_id, std::size_t shot_index, const ShotScore& s)
{
    ordered_json j;
    j["player_id"] = player_id;
    j["shot_index"] = shot_index;
    j["probability"] = s.probability;
    j["classified"] = to_string(s.classified);
    j["rmse_acc_y"] = s.rmse_acc_y;
    j["rmse_gyro_z"] = s.rmse_gyro_z;
    j["peak_dev_acc_y"] = s.peak_dev_acc_y;
    j["peak_dev_gyro_z"] = s.peak_dev_gyro_z;
    j["gap_area_acc_y"] = s.gap_area_acc_y;
    return j;
}

void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value)
{
    key = trim(key);
    value = trim(value);
    if (key == "filter_alpha")
        cfg.filter_alpha = parse_real(key, value);
    else if (key == "phase_pre_s")
        cfg.phase_pre_s = parse_real(key, value);
    else if (key == "phase_post_s")
        cfg.phase_post_s = parse_real(key, value);
    else if (key == "fit_degree")
        cfg.fit_degree = parse_int(key, value);
    else if (key == "classify_threshold")
        cfg.classify_threshold = parse_real(key, value);
    else if (key == "max_gap_fill")
        cfg.max_gap_fill = parse_int(key, value);
    else if (key == "window_s")
        cfg.window_s = parse_real(key, value);
    else if (key == "nominal_rate_hz")
        cfg.nominal_rate_hz = parse_real(key, value);
    else
        throw Error(ErrorKind::ConfigInvalid, "unknown key " + std::string(key));
}

PipelineConfig parse_config_text(std::string_view text, PipelineConfig base)
{
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        auto line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorKind::ConfigInvalid, "expected key = value: " + std::string(line));
        apply_config_entry(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

std::string config_to_text(const PipelineConfig& cfg)
{
    std::ostringstream os;
    os.precision(17);
    os << "filter_alpha = " << cfg.filter_alpha << '\n'
       << "phase_pre_s = " << cfg.phase_pre_s << '\n'
       << "phase_post_s = " << cfg.phase_post_s << '\n'
       << "fit_degree = " << cfg.fit_degree << '\n'
       << "classify_threshold = " << cfg.classify_threshold << '\n'
       << "max_gap_fill = " << cfg.max_gap_fill << '\n'
       << "window_s = " << cfg.window_s << '\n'
       << "nominal_rate_hz = " << cfg.nominal_rate_hz << '\n';
    return os.str();
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, std::string_view contents)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write " + p.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
        throw Error(ErrorKind::Io, "short write " + p.string());
}

GroundTruthTemplate load_template(const std::filesystem::path& p)
{
    try {
        return json::parse(read_file(p)).get<GroundTruthTemplate>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, p.string() + ": " + e.what());
    }
}

OutcomeModel load_model(const std::filesystem::path& p)
{
    try {
        return json::parse(read_file(p)).get<OutcomeModel>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, p.string() + ": " + e.what());
    }
}

PipelineConfig load_config(const std::filesystem::path& p, PipelineConfig base)
{
    return parse_config_text(read_file(p), base);
}

std::map<std::string, Outcome> parse_labels(std::string_view text)
{
    std::map<std::string, Outcome> out;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, std::string("labels: ") + e.what());
    }
    if (!j.is_object())
        throw Error(ErrorKind::Io, "labels: expected an object");
    for (auto& [k, v] : j.items()) {
        auto o = v.is_string() ? outcome_from_string(v.get<std::string>()) : std::nullopt;
        if (!o)
            throw Error(ErrorKind::Io, "labels: bad value for " + k);
        out.emplace(k, *o);
    }
    return out;
}

std::string labels_to_text(const std::map<std::string, Outcome>& labels)
{
    json j = json::object();
    for (const auto& [k, v] : labels)
        j[k] = to_string(v);
    return j.dump(1) + "\n";
}

} // namespace shotlab
