#include <gtest/gtest.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <atomic>
#include <nlohmann/json.hpp>
#include <thread>

#include "taxsim/http_transport.hpp"

using namespace taxsim;
using nlohmann::json;

namespace {

/// Local chat-completions server; fails the first `failures` requests.
class FakeServer {
public:
    explicit FakeServer(int failures) : failures_(failures) {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
            ++hits;
            last_auth = req.get_header_value("Authorization");
            last_body = req.body;
            if (failures_-- > 0) {
                res.status = 500;
                return;
            }
            const auto body = json::parse(req.body);
            const std::string prompt = body["messages"][0]["content"];
            res.set_content(json{{"choices", {{{"message", {{"role", "assistant"},
                                                            {"content", "reply to " + prompt}}}}}}}
                                .dump(),
                            "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeServer() {
        server_.stop();
        thread_.join();
    }
    [[nodiscard]] std::string url() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    }

    std::atomic<int> hits{0};
    std::string last_auth;
    std::string last_body;

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> failures_;
};

}  // namespace

TEST(WireFormat, RequestBody) {
    const auto body = json::parse(chat_request_body({"qwen", "hi there", 0.2, 99}));
    EXPECT_EQ(body["model"], "qwen");
    EXPECT_EQ(body["messages"].size(), 1u);
    EXPECT_EQ(body["messages"][0]["role"], "user");
    EXPECT_EQ(body["messages"][0]["content"], "hi there");
    EXPECT_EQ(body["temperature"], 0.2);
    EXPECT_EQ(body["max_tokens"], 99);
}

TEST(WireFormat, ResponseText) {
    EXPECT_EQ(chat_response_text(R"({"choices":[{"message":{"content":"ok"}}]})"), "ok");
    EXPECT_THROW(chat_response_text(R"({"choices":[]})"), TransportError);
    EXPECT_THROW(chat_response_text("not json"), TransportError);
    EXPECT_THROW(chat_response_text(R"({"choices":[{"message":{"content":null}}]})"),
                 TransportError);
}

TEST(HttpTransport, RoundTripWithBearerToken) {
    FakeServer server(0);
    HttpChatTransport transport({server.url(), "sk-test", std::chrono::seconds(5)});
    EXPECT_EQ(transport.send({"m", "hello", 0.7, 16}), "reply to hello");
    EXPECT_EQ(server.last_auth, "Bearer sk-test");
    EXPECT_EQ(json::parse(server.last_body)["model"], "m");
}

TEST(HttpTransport, ServerErrorIsTransportError) {
    FakeServer server(1);
    HttpChatTransport transport({server.url(), "", std::chrono::seconds(5)});
    EXPECT_THROW(transport.send({"m", "hello", 0.7, 16}), TransportError);
}

TEST(HttpTransport, UnreachableHostIsTransportError) {
    HttpChatTransport transport({"http://127.0.0.1:1/v1/chat/completions", "", std::chrono::seconds(2)});
    EXPECT_THROW(transport.send({"m", "hello", 0.7, 16}), TransportError);
}

TEST(HttpTransport, GatewayRetriesServerErrors) {
    FakeServer server(2);
    std::vector<long long> sleeps;
    ChatGateway gw(GatewayMode::live,
                   std::make_unique<HttpChatTransport>(
                       HttpEndpoint{server.url(), "k", std::chrono::seconds(5)}),
                   {}, RetryPolicy{},
                   [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); });
    EXPECT_EQ(gw.complete({"m", "again", 0.7, 16}), "reply to again");
    EXPECT_EQ(server.hits.load(), 3);
    EXPECT_EQ(sleeps, (std::vector<long long>{1000, 2000}));
}

TEST(HttpTransport, RejectsUrlWithoutScheme) {
    EXPECT_THROW(HttpChatTransport({"localhost/v1", "", std::chrono::seconds(1)}),
                 std::invalid_argument);
}
