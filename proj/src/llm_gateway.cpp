#include "taxsim/llm_gateway.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace taxsim {

using nlohmann::json;

GatewayMode parse_gateway_mode(std::string_view text) {
    if (text == "live") return GatewayMode::live;
    if (text == "record") return GatewayMode::record;
    if (text == "replay") return GatewayMode::replay;
    if (text == "scripted") return GatewayMode::scripted;
    throw std::invalid_argument("unknown gateway mode '" + std::string(text) + "'");
}

std::string_view to_string(GatewayMode mode) {
    switch (mode) {
        case GatewayMode::live: return "live";
        case GatewayMode::record: return "record";
        case GatewayMode::replay: return "replay";
        case GatewayMode::scripted: return "scripted";
    }
    return "unknown";
}

ReplayMissError::ReplayMissError(std::string key)
    : GatewayError("replay cache has no exchange for key " + key), key_(std::move(key)) {}

std::string cache_key(const ChatRequest& request) {
    const json identity = {{"model_id", request.model_id},
                           {"prompt", request.prompt},
                           {"temperature", request.temperature}};
    const std::string canonical = identity.dump();

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                 &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), canonical.data(), canonical.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
        throw GatewayError("sha256 failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < length; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

ScriptedTransport::ScriptedTransport(std::vector<std::string> replies)
    : replies_(replies.begin(), replies.end()) {}

ScriptedTransport::ScriptedTransport(Responder responder) : responder_(std::move(responder)) {}

std::string ScriptedTransport::send(const ChatRequest& request) {
    if (responder_) return responder_(request);
    std::lock_guard lock(mutex_);
    if (replies_.empty()) throw TransportError("scripted replies exhausted");
    std::string reply = std::move(replies_.front());
    replies_.pop_front();
    return reply;
}

std::string ExchangeCache::encode(const ChatExchange& e) {
    const json line = {{"key", e.key},
                       {"model_id", e.request.model_id},
                       {"prompt", e.request.prompt},
                       {"temperature", e.request.temperature},
                       {"max_tokens", e.request.max_tokens},
                       {"response", e.response_text},
                       {"timestamp", e.timestamp}};
    return line.dump();
}

ChatExchange ExchangeCache::decode(std::string_view line) {
    const json j = json::parse(line);
    ChatExchange e;
    e.key = j.at("key").get<std::string>();
    e.request.model_id = j.at("model_id").get<std::string>();
    e.request.prompt = j.at("prompt").get<std::string>();
    e.request.temperature = j.at("temperature").get<double>();
    e.request.max_tokens = j.value("max_tokens", 512);
    e.response_text = j.at("response").get<std::string>();
    e.timestamp = j.value("timestamp", "");
    return e;
}

ExchangeCache ExchangeCache::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GatewayError("cannot open replay cache " + path.string());

    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(std::move(line));
    }

    ExchangeCache cache;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            cache.add(decode(lines[i]));
        } catch (const json::exception& e) {
            if (i + 1 == lines.size()) break;
            throw GatewayError(path.string() + ": corrupt record on line " + std::to_string(i + 1) +
                               ": " + e.what());
        }
    }
    return cache;
}

void ExchangeCache::add(ChatExchange exchange) {
    responses_[exchange.key].push_back(std::move(exchange.response_text));
    ++count_;
}

const std::string* ExchangeCache::find(const std::string& key, std::size_t occurrence) const {
    const auto it = responses_.find(key);
    if (it == responses_.end() || it->second.empty()) return nullptr;
    return &it->second[std::min(occurrence, it->second.size() - 1)];
}

namespace {

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

ChatGateway::ChatGateway(GatewayMode mode, std::unique_ptr<ChatTransport> transport,
                         std::filesystem::path cache_path, RetryPolicy retry, Sleeper sleeper)
    : mode_(mode),
      transport_(std::move(transport)),
      cache_path_(std::move(cache_path)),
      retry_(retry),
      sleeper_(std::move(sleeper)) {
    if (retry_.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };

    switch (mode_) {
        case GatewayMode::replay:
            if (cache_path_.empty()) throw GatewayError("replay mode needs a cache path");
            cache_ = ExchangeCache::load(cache_path_);
            break;
        case GatewayMode::record:
            if (cache_path_.empty()) throw GatewayError("record mode needs a cache path");
            if (!transport_) throw GatewayError("record mode needs a transport");
            if (cache_path_.has_parent_path()) {
                std::filesystem::create_directories(cache_path_.parent_path());
            }
            cache_out_.open(cache_path_, std::ios::binary | std::ios::app);
            if (!cache_out_) throw GatewayError("cannot append to cache " + cache_path_.string());
            break;
        case GatewayMode::live:
        case GatewayMode::scripted:
            if (!transport_) throw GatewayError("gateway needs a transport");
            break;
    }
}

std::unique_ptr<ChatGateway> ChatGateway::scripted(std::vector<std::string> replies) {
    return std::make_unique<ChatGateway>(GatewayMode::scripted,
                                         std::make_unique<ScriptedTransport>(std::move(replies)));
}

std::unique_ptr<ChatGateway> ChatGateway::scripted(ScriptedTransport::Responder responder) {
    return std::make_unique<ChatGateway>(
        GatewayMode::scripted, std::make_unique<ScriptedTransport>(std::move(responder)));
}

std::unique_ptr<ChatGateway> ChatGateway::replay(const std::filesystem::path& cache_path) {
    return std::make_unique<ChatGateway>(GatewayMode::replay, nullptr, cache_path);
}

std::size_t ChatGateway::request_count() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

std::string ChatGateway::send_with_retry(const ChatRequest& request) {
    std::string last_error;
    auto delay = retry_.base_delay;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        try {
            return transport_->send(request);
        } catch (const TransportError& e) {
            last_error = e.what();
        }
        if (attempt < retry_.max_attempts) {
            sleeper_(delay);
            delay = std::chrono::milliseconds(
                static_cast<long long>(std::llround(static_cast<double>(delay.count()) * retry_.factor)));
        }
    }
    throw TransportError("chat completion failed after " + std::to_string(retry_.max_attempts) +
                         " attempts: " + last_error);
}

std::string ChatGateway::complete(const ChatRequest& request) {
    if (request.prompt.empty()) throw std::invalid_argument("chat prompt must not be empty");
    {
        std::lock_guard lock(mutex_);
        ++requests_;
    }

    switch (mode_) {
        case GatewayMode::replay: {
            const std::string key = cache_key(request);
            std::lock_guard lock(mutex_);
            const std::string* hit = cache_.find(key, replay_cursor_[key]++);
            if (!hit) throw ReplayMissError(key);
            return *hit;
        }
        case GatewayMode::scripted:
            return transport_->send(request);
        case GatewayMode::live:
            return send_with_retry(request);
        case GatewayMode::record: {
            std::string reply = send_with_retry(request);
            ChatExchange exchange{cache_key(request), request, reply, utc_now()};
            std::lock_guard lock(mutex_);
            cache_out_ << ExchangeCache::encode(exchange) << '\n';
            cache_out_.flush();
            return reply;
        }
    }
    throw GatewayError("unreachable gateway mode");
}

}  // namespace taxsim
