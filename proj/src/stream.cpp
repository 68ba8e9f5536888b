#include "shotlab/stream.hpp"

#include "shotlab/error.hpp"
#include "shotlab/ingest.hpp"
#include "shotlab/json_io.hpp"
#include "shotlab/pipeline.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <iostream>

namespace shotlab {

namespace {

constexpr std::size_t kMaxLine = 64 * 1024;

std::mutex g_log_mu;

void log_line(std::string_view level, const std::string& msg)
{
    std::lock_guard lock(g_log_mu);
    std::cerr << "[" << level << "] " << msg << '\n';
}

bool send_all(int fd, std::string_view data)
{
    while (!data.empty()) {
        const auto n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            return false;
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

// Reads newline-terminated lines from `fd`, invoking `on_line` for each. A
// trailing unterminated line is delivered at EOF.
template <typename F>
void read_lines(int fd, F&& on_line)
{
    std::string pending;
    char buf[4096];
    bool oversized = false;
    while (true) {
        const auto n = ::recv(fd, buf, sizeof buf, 0);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            break;
        }
        if (n == 0)
            break;
        pending.append(buf, static_cast<std::size_t>(n));
        std::size_t start = 0;
        while (true) {
            const auto eol = pending.find('\n', start);
            if (eol == std::string::npos)
                break;
            if (!oversized)
                on_line(std::string_view(pending).substr(start, eol - start));
            oversized = false;
            start = eol + 1;
        }
        pending.erase(0, start);
        if (pending.size() > kMaxLine) {
            // Drop the runaway line; it is reported as one malformed frame.
            on_line(std::string_view{"\x01"});
            pending.clear();
            oversized = true;
        }
    }
    if (!pending.empty() && !oversized)
        on_line(pending);
}

int connect_to(const std::string& address)
{
    const auto [host, port] = split_address(address);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const auto service = std::to_string(port);
    if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 || res == nullptr)
        throw Error(ErrorKind::Io, "cannot resolve " + address);
    int fd = -1;
    for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0)
            continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0)
            break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0)
        throw Error(ErrorKind::Io, "cannot connect to " + address);
    return fd;
}

} // namespace

std::pair<std::string, std::uint16_t> split_address(const std::string& address)
{
    const auto colon = address.rfind(':');
    if (colon == std::string::npos || colon + 1 == address.size())
        throw Error(ErrorKind::InvalidParams, "expected host:port, got " + address);
    std::string host = address.substr(0, colon);
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']')
        host = host.substr(1, host.size() - 2);
    unsigned port = 0;
    const auto* first = address.data() + colon + 1;
    const auto* last = address.data() + address.size();
    auto [ptr, ec] = std::from_chars(first, last, port);
    if (ec != std::errc{} || ptr != last || port > 65535)
        throw Error(ErrorKind::InvalidParams, "bad port in " + address);
    if (host.empty())
        host = "0.0.0.0";
    return {host, static_cast<std::uint16_t>(port)};
}

StreamSession::StreamSession(const GroundTruthTemplate& tmpl, const OutcomeModel& model, const PipelineConfig& cfg)
    : tmpl_(tmpl), model_(model), cfg_(cfg)
{
}

std::optional<std::string> StreamSession::feed(std::string_view line)
{
    if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
    if (line.empty())
        return std::nullopt;

    ImuSample s;
    try {
        s = parse_stream_frame(line);
        // The optional producer tag rides along in the frame itself.
        if (line.find("\"player_id\"") != std::string_view::npos) {
            const auto j = json::parse(line);
            if (auto it = j.find("player_id"); it != j.end() && it->is_string())
                player_id_ = it->get<std::string>();
        }
    } catch (const Error&) {
        ++malformed_;
        return std::nullopt;
    }
    if (!buffer_.empty() && s.t_ms <= buffer_.back().t_ms) {
        ++malformed_;
        return std::nullopt;
    }
    buffer_.push_back(s);
    return try_score();
}

std::optional<std::string> StreamSession::try_score()
{
    const auto n = cfg_.grid_len();
    while (!buffer_.empty() && buffer_.back().t_ms >= buffer_.front().t_ms + cfg_.grid_offset_ms(n - 1)) {
        RawSession session;
        session.meta.player_id = player_id_;
        session.samples = buffer_;
        const auto end_ms = buffer_.front().t_ms + cfg_.grid_offset_ms(n - 1);
        try {
            const auto score = score_session(session, tmpl_, model_, cfg_);
            const auto line = score_event(player_id_, emitted_++, score).dump();
            std::erase_if(buffer_, [end_ms](const ImuSample& x) { return x.t_ms <= end_ms; });
            return line;
        } catch (const Error&) {
            buffer_.erase(buffer_.begin());
        }
    }
    return std::nullopt;
}

StreamServer::StreamServer(GroundTruthTemplate tmpl, OutcomeModel model, PipelineConfig cfg, std::ostream* echo)
    : tmpl_(std::move(tmpl)), model_(std::move(model)), cfg_(cfg), echo_(echo)
{
    validate_config(cfg_);
}

StreamServer::~StreamServer()
{
    {
        std::lock_guard lock(mu_);
        for (int fd : open_fds_)
            ::shutdown(fd, SHUT_RDWR);
    }
    for (auto& t : workers_) {
        if (t.joinable())
            t.join();
    }
    if (listen_fd_ >= 0)
        ::close(listen_fd_);
}

std::uint16_t StreamServer::bind(const std::string& address)
{
    const auto [host, port] = split_address(address);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    const auto service = std::to_string(port);
    if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 || res == nullptr)
        throw Error(ErrorKind::Io, "cannot resolve " + address);

    int fd = -1;
    for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0)
            continue;
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 16) == 0)
            break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0)
        throw Error(ErrorKind::Io, "cannot bind " + address + ": " + std::strerror(errno));
    listen_fd_ = fd;

    sockaddr_storage bound{};
    socklen_t len = sizeof bound;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
    if (bound.ss_family == AF_INET6)
        return ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port);
    return ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
}

void StreamServer::run(const std::atomic<bool>& stop)
{
    if (listen_fd_ < 0)
        throw Error(ErrorKind::Io, "server not bound");
    while (!stop.load()) {
        pollfd p{listen_fd_, POLLIN, 0};
        const int r = ::poll(&p, 1, 100);
        if (r <= 0)
            continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0)
            continue;
        std::lock_guard lock(mu_);
        ++stats_.connections;
        open_fds_.push_back(fd);
        workers_.emplace_back([this, fd] { handle(fd); });
    }

    {
        std::lock_guard lock(mu_);
        for (int fd : open_fds_)
            ::shutdown(fd, SHUT_RDWR);
    }
    for (auto& t : workers_) {
        if (t.joinable())
            t.join();
    }
    workers_.clear();
}

void StreamServer::emit(int fd, const std::string& line)
{
    {
        std::lock_guard lock(mu_);
        ++stats_.events;
        if (echo_ != nullptr)
            *echo_ << line << '\n' << std::flush;
    }
    if (!send_all(fd, line + "\n"))
        log_line("warn", "producer connection dropped while sending an event");
}

void StreamServer::handle(int fd)
{
    StreamSession session(tmpl_, model_, cfg_);
    read_lines(fd, [&](std::string_view line) {
        if (auto event = session.feed(line))
            emit(fd, *event);
    });

    if (session.malformed_frames() > 0)
        log_line("warn", "producer " + session.player_id() + ": skipped "
                             + std::to_string(session.malformed_frames()) + " malformed frames");
    const bool discarded = session.buffered() > 0 && session.events() == 0;
    if (discarded)
        log_line("warn", "producer " + session.player_id() + " disconnected with "
                             + std::to_string(session.buffered()) + " samples and no complete shot; discarded");

    {
        std::lock_guard lock(mu_);
        stats_.malformed_frames += session.malformed_frames();
        if (discarded)
            ++stats_.discarded_sessions;
        std::erase(open_fds_, fd);
    }
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
}

StreamStats StreamServer::stats() const
{
    std::lock_guard lock(mu_);
    return stats_;
}

std::vector<std::string> replay_session(const std::string& address, const RawSession& session,
                                        std::string_view player_id)
{
    const int fd = connect_to(address);
    std::string payload;
    for (const auto& s : session.samples) {
        payload += write_stream_frame(s, player_id);
        payload += '\n';
    }
    const bool sent = send_all(fd, payload);
    ::shutdown(fd, SHUT_WR);

    std::vector<std::string> events;
    read_lines(fd, [&](std::string_view line) {
        if (!line.empty())
            events.emplace_back(line);
    });
    ::close(fd);
    if (!sent)
        throw Error(ErrorKind::Io, "connection closed while sending to " + address);
    return events;
}

} // namespace shotlab
