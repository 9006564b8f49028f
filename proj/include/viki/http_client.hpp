#pragma once

#include "viki/refine.hpp"
#include "viki/serialize.hpp"

#include <httplib.h>

#include <cstdlib>
#include <string>

namespace viki {

struct HttpGeneratorConfig {
    std::string host = "localhost";
    int port = 8000;
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4o";
    double temperature = 1.0;
    int timeout_seconds = 30;
    int retries = 2;
    std::string api_key_env = "VIKI_GENERATOR_API_KEY";
};

// Chat-completion-style HTTP client. Sends the prompt as a single user
// message and returns choices[0].message.content.
class HttpGenerator : public GeneratorClient {
  public:
    explicit HttpGenerator(HttpGeneratorConfig cfg) : cfg_(std::move(cfg)) {}

    std::string generate(const std::string& prompt, long seed) override {
        Json body;
        body["model"] = cfg_.model;
        body["messages"] =
            Json::array({{{"role", "user"}, {"content", prompt}}});
        body["temperature"] = cfg_.temperature;
        body["seed"] = seed;
        const std::string payload = body.dump();

        httplib::Client client(cfg_.host, cfg_.port);
        client.set_connection_timeout(cfg_.timeout_seconds);
        client.set_read_timeout(cfg_.timeout_seconds);
        httplib::Headers headers;
        if (const char* key = std::getenv(cfg_.api_key_env.c_str()))
            headers.emplace("Authorization", std::string("Bearer ") + key);

        std::string last_error = "no attempt made";
        for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
            auto res = client.Post(cfg_.path, headers, payload, "application/json");
            if (!res) {
                last_error = "connection failed";
                continue;
            }
            if (res->status != 200) {
                last_error = "HTTP status " + std::to_string(res->status);
                continue;
            }
            try {
                Json reply = Json::parse(res->body);
                return reply.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
            } catch (const std::exception& e) {
                last_error = std::string("malformed reply: ") + e.what();
            }
        }
        throw generator_error("generator request failed: " + last_error);
    }

  private:
    HttpGeneratorConfig cfg_;
};

}  // namespace viki
