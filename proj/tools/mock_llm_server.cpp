// Serves the mock model behind a chat-completions endpoint, for trying the
// live and record modes without a real provider.

#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "mock_llm.hpp"

int main(int argc, char** argv) {
    std::string host = "127.0.0.1";
    int port = 8089;
    CLI::App app{"mock chat-completions server", "mock_llm_server"};
    app.add_option("--host", host);
    app.add_option("--port", port)->check(CLI::Range(1, 65535));
    CLI11_PARSE(app, argc, argv);

    httplib::Server server;
    server.Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.contains("messages") || body["messages"].empty()) {
            res.status = 400;
            res.set_content(R"({"error":"bad request"})", "application/json");
            return;
        }
        const std::string prompt = body["messages"].back().value("content", "");
        const double t = body.value("temperature", 1.0);
        const int seed = body.value("seed", 0);
        const nlohmann::json reply = {
            {"object", "chat.completion"},
            {"model", body.value("model", "mock")},
            {"choices", {{{"index", 0},
                          {"message", {{"role", "assistant"}, {"content", mockllm::reply(prompt, t, seed)}}},
                          {"finish_reason", "stop"}}}},
        };
        res.set_content(reply.dump(), "application/json");
    });
    std::printf("listening on http://%s:%d/v1/chat/completions\n", host.c_str(), port);
    std::fflush(stdout);
    return server.listen(host, port) ? 0 : 1;
}
