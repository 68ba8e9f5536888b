// shotlab: simulate, ingest, train, score, report, plot-data export and the
// streaming scorer.
//
// Exit codes: 0 success, 2 usage error, 1 runtime failure.

#include "shotlab/error.hpp"
#include "shotlab/ingest.hpp"
#include "shotlab/json_io.hpp"
#include "shotlab/pipeline.hpp"
#include "shotlab/scoring.hpp"
#include "shotlab/segment.hpp"
#include "shotlab/simulator.hpp"
#include "shotlab/stream.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace shotlab;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runtime failure tagged with the pipeline stage and the file involved.
struct StageError : std::runtime_error {
    StageError(const std::string& stage, const fs::path& file, const std::string& what)
        : std::runtime_error(stage + " failed for " + file.string() + ": " + what)
    {
    }
};

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int)
{
    g_stop.store(true);
}

std::string number(double v)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Natural order so shot_2 sorts before shot_10.
bool natural_less(const std::string& a, const std::string& b)
{
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
            std::size_t ie = i;
            std::size_t je = j;
            while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie])))
                ++ie;
            while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je])))
                ++je;
            auto da = a.substr(i, ie - i);
            auto db = b.substr(j, je - j);
            da.erase(0, std::min(da.find_first_not_of('0'), da.size()));
            db.erase(0, std::min(db.find_first_not_of('0'), db.size()));
            if (da.size() != db.size())
                return da.size() < db.size();
            if (da != db)
                return da < db;
            i = ie;
            j = je;
            continue;
        }
        if (a[i] != b[j])
            return a[i] < b[j];
        ++i;
        ++j;
    }
    return a.size() - i < b.size() - j;
}

std::vector<fs::path> csv_inputs(const fs::path& input)
{
    if (!fs::exists(input))
        throw Error(ErrorKind::Io, "no such file or directory: " + input.string());
    if (!fs::is_directory(input))
        return {input};
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(input)) {
        if (e.is_regular_file() && e.path().extension() == ".csv")
            out.push_back(e.path());
    }
    std::sort(out.begin(), out.end(),
              [](const fs::path& a, const fs::path& b) { return natural_less(a.filename().string(), b.filename().string()); });
    return out;
}

RawSession read_session(const fs::path& p, const PipelineConfig& cfg)
{
    SessionMeta meta;
    meta.player_id = p.stem().string();
    meta.window_s = cfg.window_s;
    meta.nominal_rate_hz = cfg.nominal_rate_hz;
    return parse_csv_log(read_file(p), meta);
}

struct ConfigFlags {
    std::string config_path;
    std::vector<std::string> overrides;

    void add_to(CLI::App* app)
    {
        app->add_option("--config", config_path, "Flat key = value pipeline config file");
        app->add_option("--set", overrides, "Override one config entry, key=value (repeatable)");
    }

    PipelineConfig resolve() const
    {
        PipelineConfig cfg;
        if (!config_path.empty())
            cfg = load_config(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw UsageError("--set expects key=value, got " + kv);
            try {
                apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
        }
        try {
            return validate_config(cfg);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
};

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
    long long n = 1000;
    std::string profiles = "default5";
    std::uint64_t seed = 7;
    std::string out_dir;
    ConfigFlags cfg;

    int run() const
    {
        if (n < 1)
            throw UsageError("--n must be at least 1");
        const auto config = cfg.resolve();
        std::vector<PlayerProfile> prof;
        if (profiles == "default5")
            prof = default_profiles();
        else
            prof = parse_profiles(read_file(profiles));

        const auto shots = generate_dataset(static_cast<std::size_t>(n), prof, seed, config);
        fs::create_directories(out_dir);
        std::map<std::string, Outcome> labels;
        for (std::size_t i = 0; i < shots.size(); ++i) {
            const auto stem = "shot_" + std::to_string(i);
            write_file(fs::path(out_dir) / (stem + ".csv"), write_csv_log(shots[i].session));
            labels.emplace(stem, shots[i].label);
        }
        write_file(fs::path(out_dir) / "labels.json", labels_to_text(labels));
        std::cerr << "wrote " << shots.size() << " sessions to " << out_dir << '\n';
        return 0;
    }
};

// ---------------------------------------------------------------- ingest

struct IngestCmd {
    std::string input;
    std::string out;
    ConfigFlags cfg;

    int run() const
    {
        const auto config = cfg.resolve();
        const auto session = read_session(input, config);
        ordered_json report;
        report["player_id"] = session.meta.player_id;
        report["samples"] = session.samples.size();
        if (session.samples.size() >= 2) {
            const auto gaps = detect_gaps(session);
            ordered_json list = ordered_json::array();
            for (const auto& g : gaps.gaps)
                list.push_back({g.start_index, g.missing_slots});
            report["gaps"] = list;
            report["loss_fraction"] = gaps.loss_fraction;
        }
        try {
            const auto shot = prepare_shot(session, config);
            report["impact_index"] = shot.impact_index;
            if (!out.empty()) {
                RawSession grid;
                grid.meta = session.meta;
                for (std::size_t k = 0; k < shot.grid_len; ++k) {
                    ImuSample s;
                    s.t_ms = config.grid_offset_ms(k);
                    for (std::size_t c = 0; c < 3; ++c) {
                        s.acc[c] = shot.channels[c][k];
                        s.gyro[c] = shot.channels[c + 3][k];
                    }
                    grid.samples.push_back(s);
                }
                write_file(out, write_csv_log(grid));
            }
        } catch (const Error& e) {
            report["error"] = e.what();
        }
        std::cout << report.dump() << '\n';
        return 0;
    }
};

// ---------------------------------------------------------------- train

struct TrainCmd {
    std::string data_dir;
    std::string labels_path;
    std::string out;
    ConfigFlags cfg;

    int run() const
    {
        const auto config = cfg.resolve();
        const auto labels = parse_labels(read_file(labels_path));
        std::vector<ShotRecord> records;
        for (const auto& file : csv_inputs(data_dir)) {
            const auto stem = file.stem().string();
            auto it = labels.find(stem);
            if (it == labels.end())
                throw StageError("labels", file, "no label for " + stem);
            RawSession session;
            try {
                session = read_session(file, config);
            } catch (const Error& e) {
                throw StageError("ingest", file, e.what());
            }
            try {
                records.push_back(prepare_shot(session, config, it->second));
            } catch (const Error& e) {
                const bool seg = e.kind() == ErrorKind::NoImpactDetected || e.kind() == ErrorKind::PhaseOutOfBounds;
                throw StageError(seg ? "segment" : "resample", file, e.what());
            }
        }
        if (records.empty())
            throw Error(ErrorKind::Io, "no CSV sessions in " + data_dir);

        TrainingResult result;
        try {
            result = train(records, config);
        } catch (const Error& e) {
            throw StageError("train", data_dir, e.what());
        }
        fs::create_directories(out);
        write_file(fs::path(out) / "template.json", json(result.tmpl).dump(1) + "\n");
        write_file(fs::path(out) / "model.json", json(result.model).dump(1) + "\n");
        std::cerr << "trained on " << records.size() << " shots (" << result.tmpl.source_count
                  << " successes); wrote " << out << "/template.json and model.json\n";
        return 0;
    }
};

// ---------------------------------------------------------------- score / report

struct LoadedInputs {
    std::vector<std::string> ids;
    std::vector<ShotRecord> records;
    std::vector<std::size_t> record_input;  // input index of each record
    std::vector<SkippedShot> skipped;       // input-level failures
};

LoadedInputs load_inputs(const fs::path& input, const PipelineConfig& cfg)
{
    LoadedInputs in;
    const auto files = csv_inputs(input);
    for (std::size_t i = 0; i < files.size(); ++i) {
        in.ids.push_back(files[i].stem().string());
        try {
            in.records.push_back(resample_shot(read_session(files[i], cfg), cfg));
            in.record_input.push_back(i);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Io)
                throw;
            in.skipped.push_back({i, e.kind(), e.what()});
        }
    }
    return in;
}

struct ScoreCmd {
    std::string input;
    std::string template_path;
    std::string model_path;
    std::string format = "json";
    std::string output;
    ConfigFlags cfg;

    int run() const
    {
        const auto config = cfg.resolve();
        const auto tmpl = load_template(template_path);
        const auto model = load_model(model_path);
        const auto in = load_inputs(input, config);
        const auto batch = score_batch(in.records, tmpl, model, config);

        std::vector<ScoredShot> scored;
        for (const auto& s : batch.scores)
            scored.push_back({in.record_input[s.input_index], s.score});
        std::vector<SkippedShot> skipped = in.skipped;
        for (const auto& s : batch.skipped)
            skipped.push_back({in.record_input[s.input_index], s.reason, s.message});
        std::sort(skipped.begin(), skipped.end(),
                  [](const auto& a, const auto& b) { return a.input_index < b.input_index; });
        const auto summary = summarize(scored, skipped.size());

        std::ostringstream os;
        ordered_json sum;
        sum["scored"] = summary.scored;
        sum["skipped"] = summary.skipped;
        sum["mean_probability"] = summary.mean_probability;
        sum["success_rate"] = summary.success_rate;
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            sum["mean_" + std::string(kFeatureNames[f])] = summary.feature_means[f];
        sum["mean_gap_area_acc_y"] = summary.mean_gap_area_acc_y;

        if (format == "json") {
            for (const auto& s : scored)
                os << score_event(in.ids[s.input_index], s.input_index, s.score).dump() << '\n';
            ordered_json wrapper;
            wrapper["summary"] = sum;
            os << wrapper.dump() << '\n';
        } else {
            os << "player_id,shot_index,probability,classified,rmse_acc_y,rmse_gyro_z,peak_dev_acc_y,"
                  "peak_dev_gyro_z,gap_area_acc_y\n";
            for (const auto& s : scored) {
                const auto& r = s.score;
                os << in.ids[s.input_index] << ',' << s.input_index << ',' << number(r.probability) << ','
                   << to_string(r.classified) << ',' << number(r.rmse_acc_y) << ',' << number(r.rmse_gyro_z) << ','
                   << number(r.peak_dev_acc_y) << ',' << number(r.peak_dev_gyro_z) << ','
                   << number(r.gap_area_acc_y) << '\n';
            }
            std::cerr << "summary " << sum.dump() << '\n';
        }

        for (const auto& s : skipped)
            std::cerr << "skipped " << in.ids[s.input_index] << ": " << to_string(s.reason) << " (" << s.message
                      << ")\n";

        if (output.empty())
            std::cout << os.str();
        else
            write_file(output, os.str());
        return 0;
    }
};

struct ReportCmd {
    std::string input;
    std::string template_path;
    ConfigFlags cfg;

    int run() const
    {
        const auto config = cfg.resolve();
        const auto tmpl = load_template(template_path);
        const auto in = load_inputs(input, config);
        for (std::size_t r = 0; r < in.records.size(); ++r) {
            const auto i = in.record_input[r];
            ordered_json j;
            j["player_id"] = in.ids[i];
            j["shot_index"] = i;
            try {
                const auto d = diagnose_shot(in.records[r], tmpl, config);
                j["phase"] = {d.phase.start_index, d.phase.end_index};
                ordered_json rmse;
                ordered_json peak;
                for (auto c : kAllChannels) {
                    rmse[std::string(channel_name(c))] = d.rmse[index(c)];
                    peak[std::string(channel_name(c))] = d.peak_dev[index(c)];
                }
                j["rmse"] = rmse;
                j["peak_dev"] = peak;
                j["angle_rmse_deg"] = d.angle_rmse_deg;
                j["angle_peak_deg"] = d.angle_peak_deg;
            } catch (const Error& e) {
                j["skipped"] = to_string(e.kind());
            }
            std::cout << j.dump() << '\n';
        }
        for (const auto& s : in.skipped)
            std::cerr << "skipped " << in.ids[s.input_index] << ": " << to_string(s.reason) << '\n';
        return 0;
    }
};

// ---------------------------------------------------------------- plotdata

struct PlotDataCmd {
    std::string shot_path;
    std::string template_path;
    std::string channel = "acc_y";
    std::string out;
    ConfigFlags cfg;

    int run() const
    {
        const auto config = cfg.resolve();
        const auto ch = channel_from_name(channel);
        if (!ch)
            throw UsageError("unknown channel " + channel);
        const auto tmpl = load_template(template_path);
        auto shot = resample_shot(read_session(shot_path, config), config);
        if (shot.grid_len != tmpl.grid_len)
            throw Error(ErrorKind::GridMismatch, "shot grid " + std::to_string(shot.grid_len) + " vs template "
                                                     + std::to_string(tmpl.grid_len));
        shot.impact_index = detect_impact(shot, config);
        const auto aligned = align_impact(shot, tmpl.impact_index);
        const auto phase = phase_window(tmpl.impact_index, tmpl.grid_len, config);

        std::ostringstream os;
        os << "t_s,shot,template,gap\n";
        const auto& a = aligned.channel(*ch);
        const auto& b = tmpl.channel(*ch);
        for (std::size_t k = 0; k < tmpl.grid_len; ++k) {
            const double t = static_cast<double>(k) * config.dt_s();
            if (k == phase.start_index)
                os << "#phase_start," << number(t) << ",,\n";
            os << number(t) << ',' << number(a[k]) << ',' << number(b[k]) << ',' << number(std::abs(a[k] - b[k]))
               << '\n';
            if (k == phase.end_index)
                os << "#phase_end," << number(t) << ",,\n";
        }
        write_file(out, os.str());
        return 0;
    }
};

// ---------------------------------------------------------------- serve / replay

struct ServeCmd {
    std::string listen = "127.0.0.1:7007";
    std::string template_path;
    std::string model_path;
    ConfigFlags cfg;

    int run() const
    {
        const auto config = cfg.resolve();
        StreamServer server(load_template(template_path), load_model(model_path), config, &std::cout);
        const auto port = server.bind(listen);
        const auto host = split_address(listen).first;

        struct sigaction sa {};
        sa.sa_handler = on_signal;
        sigemptyset(&sa.sa_mask);
        sigaction(SIGINT, &sa, nullptr);
        sigaction(SIGTERM, &sa, nullptr);

        std::cout << "listening on " << host << ':' << port << std::endl;
        server.run(g_stop);
        const auto st = server.stats();
        std::cerr << "shutdown: " << st.connections << " connections, " << st.events << " events, "
                  << st.malformed_frames << " malformed frames, " << st.discarded_sessions
                  << " discarded sessions\n";
        return 0;
    }
};

struct ReplayCmd {
    std::string connect;
    std::string input;
    std::string player_id;
    ConfigFlags cfg;

    int run() const
    {
        const auto config = cfg.resolve();
        const auto session = read_session(input, config);
        const auto id = player_id.empty() ? session.meta.player_id : player_id;
        for (const auto& line : replay_session(connect, session, id))
            std::cout << line << '\n';
        return 0;
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"IMU football-shot analysis: simulate, train, score and stream"};
    app.require_subcommand(1);

    SimulateCmd sim;
    auto* s = app.add_subcommand("simulate", "Generate a synthetic labelled dataset");
    s->add_option("--n", sim.n, "Number of shots")->required();
    s->add_option("--profiles", sim.profiles, "'default5' or a JSON profiles file");
    s->add_option("--seed", sim.seed, "Master seed");
    s->add_option("--out-dir", sim.out_dir, "Output directory")->required();
    sim.cfg.add_to(s);

    IngestCmd ing;
    auto* g = app.add_subcommand("ingest", "Parse a CSV log, report gaps and resample it");
    g->add_option("--input", ing.input, "CSV log")->required();
    g->add_option("--out", ing.out, "Write the resampled grid as CSV");
    ing.cfg.add_to(g);

    TrainCmd tr;
    auto* t = app.add_subcommand("train", "Build template.json and model.json");
    t->add_option("--data-dir", tr.data_dir, "Directory of CSV sessions")->required();
    t->add_option("--labels", tr.labels_path, "labels.json")->required();
    t->add_option("--out", tr.out, "Output directory")->required();
    tr.cfg.add_to(t);

    ScoreCmd sc;
    auto* c = app.add_subcommand("score", "Score CSV sessions against a template and model");
    c->add_option("--input", sc.input, "CSV file or directory")->required();
    c->add_option("--template", sc.template_path, "template.json")->required();
    c->add_option("--model", sc.model_path, "model.json")->required();
    c->add_option("--format", sc.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--output", sc.output, "Write records to a file instead of stdout");
    sc.cfg.add_to(c);

    ReportCmd rp;
    auto* r = app.add_subcommand("report", "Per-channel deviation and leg-angle diagnostics");
    r->add_option("--input", rp.input, "CSV file or directory")->required();
    r->add_option("--template", rp.template_path, "template.json")->required();
    rp.cfg.add_to(r);

    PlotDataCmd pd;
    auto* p = app.add_subcommand("plotdata", "Export shot vs template series for plotting");
    p->add_option("--shot", pd.shot_path, "CSV log")->required();
    p->add_option("--template", pd.template_path, "template.json")->required();
    p->add_option("--channel", pd.channel, "Channel name, e.g. acc_y");
    p->add_option("--out", pd.out, "Output CSV")->required();
    pd.cfg.add_to(p);

    ServeCmd sv;
    auto* v = app.add_subcommand("serve", "Score newline-delimited JSON frames over TCP");
    v->add_option("--listen", sv.listen, "host:port (port 0 picks a free port)");
    v->add_option("--template", sv.template_path, "template.json")->required();
    v->add_option("--model", sv.model_path, "model.json")->required();
    sv.cfg.add_to(v);

    ReplayCmd rc;
    auto* y = app.add_subcommand("replay", "Stream a CSV session to a running server");
    y->add_option("--connect", rc.connect, "host:port")->required();
    y->add_option("--input", rc.input, "CSV log")->required();
    y->add_option("--player-id", rc.player_id, "Producer tag (defaults to the file stem)");
    rc.cfg.add_to(y);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*s)
            return sim.run();
        if (*g)
            return ing.run();
        if (*t)
            return tr.run();
        if (*c)
            return sc.run();
        if (*r)
            return rp.run();
        if (*p)
            return pd.run();
        if (*v)
            return sv.run();
        if (*y)
            return rc.run();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
