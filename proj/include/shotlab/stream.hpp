#pragma once

#include "shotlab/types.hpp"

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace shotlab {

/// Per-producer scoring state. Frames accumulate until a full shot window is
/// buffered; the window is then scored exactly as the batch path would score a
/// file holding the same samples. Windows that cannot be scored (no impact,
/// gap too large, phase off the grid) slide forward one sample at a time.
class StreamSession {
public:
    StreamSession(const GroundTruthTemplate& tmpl, const OutcomeModel& model, const PipelineConfig& cfg);

    /// Feeds one frame line; returns a score event line when a shot completes.
    std::optional<std::string> feed(std::string_view line);

    std::size_t malformed_frames() const { return malformed_; }
    std::size_t events() const { return emitted_; }
    std::size_t buffered() const { return buffer_.size(); }
    const std::string& player_id() const { return player_id_; }

private:
    std::optional<std::string> try_score();

    const GroundTruthTemplate& tmpl_;
    const OutcomeModel& model_;
    const PipelineConfig& cfg_;
    std::vector<ImuSample> buffer_;
    std::string player_id_ = "stream";
    std::size_t malformed_ = 0;
    std::size_t emitted_ = 0;
};

struct StreamStats {
    std::size_t connections = 0;
    std::size_t events = 0;
    std::size_t malformed_frames = 0;
    std::size_t discarded_sessions = 0;
};

/// Newline-delimited JSON scoring service over TCP. Each producer connection
/// runs on its own thread with its own StreamSession; the template, model and
/// config are shared read-only.
class StreamServer {
public:
    StreamServer(GroundTruthTemplate tmpl, OutcomeModel model, PipelineConfig cfg, std::ostream* echo = nullptr);
    ~StreamServer();

    StreamServer(const StreamServer&) = delete;
    StreamServer& operator=(const StreamServer&) = delete;

    /// Binds "host:port" (port 0 picks a free port) and returns the bound port.
    std::uint16_t bind(const std::string& address);
    /// Accepts producers until `stop` becomes true, then closes every
    /// connection and returns.
    void run(const std::atomic<bool>& stop);

    StreamStats stats() const;

private:
    void handle(int fd);
    void emit(int fd, const std::string& line);

    GroundTruthTemplate tmpl_;
    OutcomeModel model_;
    PipelineConfig cfg_;
    std::ostream* echo_;
    int listen_fd_ = -1;

    mutable std::mutex mu_;
    StreamStats stats_;
    std::vector<int> open_fds_;
    std::vector<std::thread> workers_;
};

/// Producer side: sends every sample of `session` as frames, half-closes the
/// connection and returns the event lines received until the server closes.
std::vector<std::string> replay_session(const std::string& address, const RawSession& session,
                                        std::string_view player_id = {});

/// Splits "host:port". Throws InvalidParams on malformed input.
std::pair<std::string, std::uint16_t> split_address(const std::string& address);

} // namespace shotlab
