#pragma once

#include "viki/grpo.hpp"
#include "viki/http_client.hpp"
#include "viki/rewards.hpp"
#include "viki/serialize.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace viki {

struct AppConfig {
    double lambda1 = default_lambda1;
    double lambda2 = default_lambda2;
    bool step_penalty = true;
    int jobs = 1;
    HttpGeneratorConfig generator;
    TrainConfig grpo;
};

inline AppConfig config_from_json(const Json& j) {
    AppConfig cfg;
    if (j.contains("rewards")) {
        const Json& r = j.at("rewards");
        cfg.lambda1 = r.value("lambda1", cfg.lambda1);
        cfg.lambda2 = r.value("lambda2", cfg.lambda2);
        if (cfg.lambda1 < 0 || cfg.lambda2 < 0)
            throw std::invalid_argument("reward weights must be >= 0");
    }
    cfg.step_penalty = j.value("step_penalty", cfg.step_penalty);
    cfg.jobs = j.value("jobs", cfg.jobs);
    if (cfg.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    if (j.contains("generator")) {
        const Json& g = j.at("generator");
        cfg.generator.host = g.value("host", cfg.generator.host);
        cfg.generator.port = g.value("port", cfg.generator.port);
        cfg.generator.path = g.value("path", cfg.generator.path);
        cfg.generator.model = g.value("model", cfg.generator.model);
        cfg.generator.temperature = g.value("temperature", cfg.generator.temperature);
        cfg.generator.timeout_seconds =
            g.value("timeout_seconds", cfg.generator.timeout_seconds);
        cfg.generator.retries = g.value("retries", cfg.generator.retries);
        if (cfg.generator.timeout_seconds <= 0 || cfg.generator.retries < 0)
            throw std::invalid_argument("invalid generator timeouts/retries");
    }
    if (j.contains("grpo")) {
        const Json& g = j.at("grpo");
        cfg.grpo.group_size = g.value("group_size", cfg.grpo.group_size);
        cfg.grpo.kl_coefficient = g.value("kl_coefficient", cfg.grpo.kl_coefficient);
        cfg.grpo.learning_rate = g.value("learning_rate", cfg.grpo.learning_rate);
        cfg.grpo.iterations = g.value("iterations", cfg.grpo.iterations);
        cfg.grpo.epsilon = g.value("epsilon", cfg.grpo.epsilon);
        cfg.grpo.seed = g.value("seed", cfg.grpo.seed);
        if (cfg.grpo.group_size < 2 || cfg.grpo.kl_coefficient < 0 ||
            cfg.grpo.epsilon <= 0)
            throw std::invalid_argument("invalid grpo config");
    }
    return cfg;
}

inline AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    Json j = Json::parse(in);
    return config_from_json(j);
}

}  // namespace viki
