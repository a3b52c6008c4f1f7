#include "taxsim/http_transport.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <nlohmann/json.hpp>

namespace taxsim {

using nlohmann::json;

std::string chat_request_body(const ChatRequest& request) {
    const json body = {
        {"model", request.model_id},
        {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
    return body.dump();
}

std::string chat_response_text(std::string_view body) {
    try {
        const json j = json::parse(body);
        const auto& content = j.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) throw TransportError("chat response content is not text");
        return content.get<std::string>();
    } catch (const json::exception& e) {
        throw TransportError(std::string("malformed chat response: ") + e.what());
    }
}

HttpChatTransport::HttpChatTransport(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    const auto scheme_end = endpoint_.url.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("endpoint url needs a scheme: " + endpoint_.url);
    }
    const auto path_start = endpoint_.url.find('/', scheme_end + 3);
    origin_ = endpoint_.url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : endpoint_.url.substr(path_start);
}

std::string HttpChatTransport::send(const ChatRequest& request) {
    httplib::Client client(origin_);
    client.set_connection_timeout(endpoint_.timeout);
    client.set_read_timeout(endpoint_.timeout);
    client.set_write_timeout(endpoint_.timeout);

    httplib::Headers headers;
    if (!endpoint_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
    }
    auto result = client.Post(path_, headers, chat_request_body(request), "application/json");
    if (!result) {
        throw TransportError("POST " + endpoint_.url + " failed: " + httplib::to_string(result.error()));
    }
    if (result->status != 200) {
        throw TransportError("POST " + endpoint_.url + " returned HTTP " +
                             std::to_string(result->status));
    }
    return chat_response_text(result->body);
}

}  // namespace taxsim
