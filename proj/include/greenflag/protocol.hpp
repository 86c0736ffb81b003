#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "greenflag/mdp.hpp"

namespace greenflag {

/// Line-delimited JSON front end of an Environment.
///
///   {"cmd":"reset","seed":S,"scenario":K}  -> {"state":[...]}
///   {"cmd":"step","action":[3K floats]}    -> {"state":[...],"reward":r,"done":b,"info":{...}}
///   {"cmd":"close"}                        -> {"ok":true}, session ends
///
/// "seed" and "scenario" are optional. Any malformed or out-of-order message
/// gets {"error":"..."} and the session continues.
class ProtocolSession {
public:
    using EpisodeListener = std::function<void(const Episode&)>;
    using SeedOverride = std::function<std::uint64_t(std::size_t episode_index)>;

    ProtocolSession(ScenarioConfig config, std::vector<WeatherRecord> weather);

    /// Reply to one request line, without the trailing newline.
    std::string handle(std::string_view line);

    bool closed() const noexcept { return closed_; }
    std::size_t episodes_finished() const noexcept { return finished_; }

    /// Called with the finished episode whenever a step ends one.
    void on_episode_end(EpisodeListener listener) { listener_ = std::move(listener); }

    /// Forces the seed of the i-th reset, ignoring the one in the message.
    void override_seeds(SeedOverride seeds) { seeds_ = std::move(seeds); }

private:
    std::string reset(const nlohmann::json& request);
    std::string step(const nlohmann::json& request);

    std::vector<WeatherRecord> weather_;
    Environment env_;
    EpisodeListener listener_;
    SeedOverride seeds_;
    std::size_t resets_ = 0;
    std::size_t finished_ = 0;
    bool closed_ = false;
};

/// Serves one session over a pair of streams until close or end of input.
void serve_stream(ProtocolSession& session, std::istream& in, std::ostream& out);

/// Accepts one connection on "host:port" (TCP) or "unix:/path" and serves it.
void serve_listen(ProtocolSession& session, const std::string& address);

}  // namespace greenflag
