#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace taxsim {

struct ChatRequest {
    std::string model_id;
    std::string prompt;
    double temperature = 0.7;
    int max_tokens = 512;
};

struct ChatExchange {
    std::string key;
    ChatRequest request;
    std::string response_text;
    std::string timestamp;  // ISO-8601 UTC, informational only
};

enum class GatewayMode { live, record, replay, scripted };

GatewayMode parse_gateway_mode(std::string_view text);
std::string_view to_string(GatewayMode mode);

class GatewayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Recoverable: the caller may retry or fall back.
class TransportError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

/// Fatal: a replayed run asked for something that was never recorded.
class ReplayMissError : public GatewayError {
public:
    explicit ReplayMissError(std::string key);
    [[nodiscard]] const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Hex SHA-256 over (model_id, prompt, temperature). Stable across runs and
/// platforms. max_tokens is not part of the identity.
std::string cache_key(const ChatRequest& request);

/// One chat-completion round trip. Implementations throw TransportError.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual std::string send(const ChatRequest& request) = 0;
};

/// Canned replies, either from a queue or computed per request.
class ScriptedTransport final : public ChatTransport {
public:
    using Responder = std::function<std::string(const ChatRequest&)>;

    explicit ScriptedTransport(std::vector<std::string> replies);
    explicit ScriptedTransport(Responder responder);

    std::string send(const ChatRequest& request) override;

private:
    std::mutex mutex_;
    std::deque<std::string> replies_;
    Responder responder_;
};

/// Append-only JSON-lines store of exchanges.
class ExchangeCache {
public:
    ExchangeCache() = default;

    /// Reads every record in `path`. A malformed final line (an interrupted
    /// append) is skipped; a malformed line elsewhere throws GatewayError.
    static ExchangeCache load(const std::filesystem::path& path);

    static std::string encode(const ChatExchange& exchange);
    static ChatExchange decode(std::string_view line);

    void add(ChatExchange exchange);

    /// The n-th recorded response for `key`; repeats the last one once the
    /// recorded responses are used up. Null when the key is unknown.
    [[nodiscard]] const std::string* find(const std::string& key, std::size_t occurrence) const;

    [[nodiscard]] std::size_t size() const { return count_; }

private:
    std::map<std::string, std::vector<std::string>> responses_;
    std::size_t count_ = 0;
};

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_delay{1000};
    double factor = 2.0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Uniform access to chat completions.
///
///  - live:     transport round trip with exponential backoff.
///  - record:   live, plus every exchange appended to the cache file.
///  - replay:   answers come only from the cache file; the transport is
///              never touched and a miss throws ReplayMissError.
///  - scripted: transport round trip with no retries (the transport is
///              normally a ScriptedTransport).
///
/// complete() is safe to call from several threads.
class ChatGateway {
public:
    ChatGateway(GatewayMode mode, std::unique_ptr<ChatTransport> transport,
                std::filesystem::path cache_path = {}, RetryPolicy retry = {},
                Sleeper sleeper = {});

    static std::unique_ptr<ChatGateway> scripted(std::vector<std::string> replies);
    static std::unique_ptr<ChatGateway> scripted(ScriptedTransport::Responder responder);
    static std::unique_ptr<ChatGateway> replay(const std::filesystem::path& cache_path);

    std::string complete(const ChatRequest& request);

    [[nodiscard]] GatewayMode mode() const { return mode_; }
    [[nodiscard]] std::size_t request_count() const;

private:
    std::string send_with_retry(const ChatRequest& request);

    GatewayMode mode_;
    std::unique_ptr<ChatTransport> transport_;
    std::filesystem::path cache_path_;
    RetryPolicy retry_;
    Sleeper sleeper_;

    mutable std::mutex mutex_;
    ExchangeCache cache_;
    std::map<std::string, std::size_t> replay_cursor_;
    std::ofstream cache_out_;
    std::size_t requests_ = 0;
};

}  // namespace taxsim
