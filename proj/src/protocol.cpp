#include "greenflag/protocol.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <memory>
#include <utility>
#include <ostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "greenflag/errors.hpp"

namespace greenflag {

namespace {

using nlohmann::json;

std::string error_reply(std::string_view message) {
    return json{{"error", message}}.dump();
}

json reward_json(const RewardBreakdown& r) {
    return json{{"grid_demand", r.grid_demand},
                {"wasted", r.wasted},
                {"deadline_penalty", r.deadline_penalty},
                {"idle_penalty", r.idle_penalty},
                {"admission_penalty", r.admission_penalty},
                {"total", r.total}};
}

json metrics_json(const EpisodeMetrics& m) {
    return json{{"total_energy", m.total_energy},
                {"grid_energy", m.grid_energy},
                {"green_energy", m.green_energy},
                {"wasted_energy", m.wasted_energy},
                {"mean_round_duration", m.mean_round_duration},
                {"violations_per_worker", m.violations_per_worker},
                {"global_iterations", m.global_iterations},
                {"discounted_grid", m.discounted_grid},
                {"converged", m.converged},
                {"truncated", m.truncated}};
}

class Fd {
public:
    explicit Fd(int fd = -1) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    ~Fd() {
        if (fd_ >= 0) ::close(fd_);
    }
    int get() const noexcept { return fd_; }

private:
    int fd_;
};

[[noreturn]] void throw_errno(const std::string& what) {
    throw IoError(fmt::format("{}: {}", what, std::strerror(errno)));
}

Fd listen_on(const std::string& address) {
    if (address.rfind("unix:", 0) == 0) {
        const std::string path = address.substr(5);
        sockaddr_un addr{};
        if (path.empty() || path.size() >= sizeof(addr.sun_path)) {
            throw ConfigError(fmt::format("bad unix socket path '{}'", path));
        }
        Fd fd(::socket(AF_UNIX, SOCK_STREAM, 0));
        if (fd.get() < 0) throw_errno("socket");
        addr.sun_family = AF_UNIX;
        std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
        ::unlink(path.c_str());
        if (::bind(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
            throw_errno("bind " + path);
        }
        if (::listen(fd.get(), 1) < 0) throw_errno("listen");
        return fd;
    }

    const auto colon = address.rfind(':');
    if (colon == std::string::npos) {
        throw ConfigError(fmt::format("listen address '{}' is not host:port or unix:PATH", address));
    }
    const std::string host = address.substr(0, colon);
    const std::string port = address.substr(colon + 1);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* found = nullptr;
    if (const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), port.c_str(), &hints, &found);
        rc != 0) {
        throw ConfigError(fmt::format("cannot resolve '{}': {}", address, ::gai_strerror(rc)));
    }
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(found, &::freeaddrinfo);
    Fd fd(::socket(found->ai_family, found->ai_socktype, found->ai_protocol));
    if (fd.get() < 0) throw_errno("socket");
    const int yes = 1;
    ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    if (::bind(fd.get(), found->ai_addr, found->ai_addrlen) < 0) throw_errno("bind " + address);
    if (::listen(fd.get(), 1) < 0) throw_errno("listen");
    return fd;
}

bool send_all(int fd, std::string_view data) {
    while (!data.empty()) {
        const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

}  // namespace

ProtocolSession::ProtocolSession(ScenarioConfig config, std::vector<WeatherRecord> weather)
    : weather_(std::move(weather)), env_(std::move(config), weather_) {}

std::string ProtocolSession::handle(std::string_view line) {
    if (closed_) return error_reply("session is closed");
    json request;
    try {
        request = json::parse(line);
    } catch (const json::parse_error& e) {
        return error_reply(fmt::format("malformed JSON: {}", e.what()));
    }
    if (!request.is_object() || !request.contains("cmd") || !request["cmd"].is_string()) {
        return error_reply("request must be an object with a string \"cmd\"");
    }
    const auto cmd = request["cmd"].get<std::string>();
    try {
        if (cmd == "reset") return reset(request);
        if (cmd == "step") return step(request);
        if (cmd == "close") {
            closed_ = true;
            return json{{"ok", true}}.dump();
        }
    } catch (const std::exception& e) {
        return error_reply(e.what());
    }
    return error_reply(fmt::format("unknown cmd '{}'", cmd));
}

std::string ProtocolSession::reset(const json& request) {
    std::uint64_t seed = env_.config().seed;
    if (request.contains("seed")) {
        const auto& s = request["seed"];
        if (!s.is_number_unsigned()) {
            return error_reply("\"seed\" must be a non-negative integer");
        }
        seed = s.get<std::uint64_t>();
    }
    std::optional<ScenarioKind> kind;
    if (request.contains("scenario")) {
        const auto& s = request["scenario"];
        if (!s.is_number_integer()) return error_reply("\"scenario\" must be 1, 2 or 3");
        kind = scenario_kind_from_int(s.get<int>());
    }
    if (seeds_) seed = seeds_(resets_);
    ++resets_;
    const StateVector state = env_.reset(seed, kind);
    return json{{"state", state.values}}.dump();
}

std::string ProtocolSession::step(const json& request) {
    if (!env_.active()) {
        return error_reply(resets_ == 0 ? "step before reset" : "episode is done; reset first");
    }
    if (!request.contains("action") || !request["action"].is_array()) {
        return error_reply("\"action\" must be an array of numbers");
    }
    const auto& raw = request["action"];
    if (raw.size() != env_.action_size()) {
        return error_reply(fmt::format("action has {} entries, expected {}", raw.size(),
                                       env_.action_size()));
    }
    std::vector<double> action;
    action.reserve(raw.size());
    for (const auto& x : raw) {
        if (!x.is_number()) return error_reply("\"action\" must be an array of numbers");
        action.push_back(x.get<double>());
    }

    const StepResult r = env_.step(action);
    json info{{"round", r.outcome.round},
              {"global_error", env_.episode().global_error()},
              {"participation", r.outcome.participation},
              {"duration", r.outcome.duration},
              {"bandwidth_max", r.outcome.bandwidth_max},
              {"converged", env_.episode().converged()},
              {"truncated", env_.episode().truncated()},
              {"reward_breakdown", reward_json(r.reward)},
              {"metrics", metrics_json(r.metrics)}};
    if (r.done) {
        ++finished_;
        if (listener_) listener_(env_.episode());
    }
    return json{{"state", r.state.values}, {"reward", r.reward.total}, {"done", r.done}, {"info", info}}
        .dump();
}

void serve_stream(ProtocolSession& session, std::istream& in, std::ostream& out) {
    std::string line;
    while (!session.closed() && std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        out << session.handle(line) << '\n' << std::flush;
    }
}

void serve_listen(ProtocolSession& session, const std::string& address) {
    Fd server = listen_on(address);
    spdlog::info("waiting for an agent on {}", address);
    Fd client(::accept(server.get(), nullptr, nullptr));
    if (client.get() < 0) throw_errno("accept");

    std::string buffer;
    char chunk[4096];
    while (!session.closed()) {
        const ssize_t n = ::recv(client.get(), chunk, sizeof(chunk), 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("recv");
        }
        if (n == 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t pos;
        while (!session.closed() && (pos = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            if (!send_all(client.get(), session.handle(line) + "\n")) return;
        }
    }
    if (address.rfind("unix:", 0) == 0) ::unlink(address.substr(5).c_str());
}

}  // namespace greenflag
