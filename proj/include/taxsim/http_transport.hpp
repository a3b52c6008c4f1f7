#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include "taxsim/llm_gateway.hpp"

namespace taxsim {

/// Request body for an OpenAI-compatible /chat/completions endpoint: one user
/// message, no streaming.
std::string chat_request_body(const ChatRequest& request);

/// Text of the first choice's message. Throws TransportError if the body is
/// not a chat-completion response.
std::string chat_response_text(std::string_view body);

struct HttpEndpoint {
    std::string url;  // e.g. https://api.openai.com/v1/chat/completions
    std::string api_key;
    std::chrono::seconds timeout{120};
};

class HttpChatTransport final : public ChatTransport {
public:
    explicit HttpChatTransport(HttpEndpoint endpoint);

    std::string send(const ChatRequest& request) override;

private:
    HttpEndpoint endpoint_;
    std::string origin_;  // scheme://host[:port]
    std::string path_;
};

}  // namespace taxsim
