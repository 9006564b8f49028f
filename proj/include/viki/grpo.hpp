#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace viki {

class unknown_task_error : public std::invalid_argument {
  public:
    explicit unknown_task_error(const std::string& task)
        : std::invalid_argument("unknown task '" + task + "'") {}
};

// Categorical policy over an enumerated candidate-answer set per task.
struct ToyPolicy {
    struct TaskHead {
        std::vector<std::string> candidates;
        std::vector<double> logits;
    };

    std::map<std::string, TaskHead> tasks;
    double temperature = 1.0;

    void add_task(const std::string& task_id, std::vector<std::string> candidates) {
        if (candidates.empty())
            throw std::invalid_argument("candidate set must be non-empty");
        TaskHead head;
        head.logits.assign(candidates.size(), 0.0);
        head.candidates = std::move(candidates);
        tasks[task_id] = std::move(head);
    }

    const TaskHead& head(const std::string& task_id) const {
        auto it = tasks.find(task_id);
        if (it == tasks.end()) throw unknown_task_error(task_id);
        return it->second;
    }
    TaskHead& head(const std::string& task_id) {
        auto it = tasks.find(task_id);
        if (it == tasks.end()) throw unknown_task_error(task_id);
        return it->second;
    }

    std::vector<double> probabilities(const std::string& task_id) const {
        const TaskHead& h = head(task_id);
        std::vector<double> p(h.logits.size());
        double mx = *std::max_element(h.logits.begin(), h.logits.end());
        double z = 0.0;
        for (std::size_t i = 0; i < h.logits.size(); ++i) {
            p[i] = std::exp((h.logits[i] - mx) / temperature);
            z += p[i];
        }
        for (double& v : p) v /= z;
        return p;
    }
};

struct Group {
    std::string task_id;
    std::vector<std::size_t> candidate_indices;  // G samples
    std::vector<double> rewards;
    std::vector<double> logp_current;
    std::vector<double> logp_reference;
};

struct TrainConfig {
    int group_size = 5;           // rollout samples per task
    double kl_coefficient = 0.01; // anchor to the post-SFT reference policy
    double learning_rate = 0.1;
    int iterations = 500;
    double epsilon = 1e-8;        // zero-variance guard for advantages
    std::uint64_t seed = 0;
};

struct CurvePoint {
    int iteration = 0;
    double mean_reward = 0.0;
    double mean_format_reward = 0.0;
    double mean_kl = 0.0;
};

namespace detail {

// Uniform double in [0,1) from the top 53 bits; keeps sampling independent of
// library distribution internals.
inline double canonical_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t sample_categorical(const std::vector<double>& probs,
                                      std::mt19937_64& rng) {
    double u = canonical_uniform(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

}  // namespace detail

// KL(p || q) for two categoricals over the same support.
inline double categorical_kl(const std::vector<double>& p,
                             const std::vector<double>& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("KL: distribution sizes differ");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) kl += p[i] * (std::log(p[i]) - std::log(q[i]));
    return std::max(0.0, kl);
}

// Gradient ascent on the summed gold-candidate log-likelihood. Returns the
// updated policy; callers snapshot the result as the KL reference.
inline ToyPolicy sft_warmup(ToyPolicy policy,
                            const std::map<std::string, std::size_t>& demos,
                            int steps, double lr) {
    for (const auto& [task, gold] : demos) {
        const auto& h = policy.head(task);
        if (gold >= h.candidates.size())
            throw std::invalid_argument("demo index out of range for task '" +
                                        task + "'");
    }
    for (int s = 0; s < steps; ++s) {
        for (const auto& [task, gold] : demos) {
            std::vector<double> p = policy.probabilities(task);
            auto& logits = policy.head(task).logits;
            for (std::size_t j = 0; j < logits.size(); ++j) {
                double grad = ((j == gold ? 1.0 : 0.0) - p[j]) / policy.temperature;
                logits[j] += lr * grad;
            }
        }
    }
    return policy;
}

inline Group sample_group(const ToyPolicy& policy, const ToyPolicy& reference,
                          const std::string& task_id, int group_size,
                          std::mt19937_64& rng) {
    if (group_size < 2) throw std::invalid_argument("group size must be >= 2");
    std::vector<double> p = policy.probabilities(task_id);
    std::vector<double> q = reference.probabilities(task_id);
    Group g;
    g.task_id = task_id;
    for (int i = 0; i < group_size; ++i) {
        std::size_t idx = detail::sample_categorical(p, rng);
        g.candidate_indices.push_back(idx);
        g.logp_current.push_back(std::log(p[idx]));
        g.logp_reference.push_back(std::log(q[idx]));
    }
    return g;
}

// A_i = (r_i - mean) / max(population std, epsilon).
inline std::vector<double> compute_advantages(const std::vector<double>& rewards,
                                              double epsilon = 1e-8) {
    if (rewards.size() < 2)
        throw std::invalid_argument("advantages need a group of >= 2");
    double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) /
                  static_cast<double>(rewards.size());
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= static_cast<double>(rewards.size());
    double denom = std::max(std::sqrt(var), epsilon);
    std::vector<double> out;
    out.reserve(rewards.size());
    for (double r : rewards) out.push_back((r - mean) / denom);
    return out;
}

// Objective for one group: sum_i A_i log pi(a_i) - lambda KL(pi || ref).
inline double grpo_objective(const ToyPolicy& policy, const ToyPolicy& reference,
                             const Group& group,
                             const std::vector<double>& advantages,
                             double lambda) {
    std::vector<double> p = policy.probabilities(group.task_id);
    std::vector<double> q = reference.probabilities(group.task_id);
    double j = 0.0;
    for (std::size_t i = 0; i < group.candidate_indices.size(); ++i)
        j += advantages[i] * std::log(p[group.candidate_indices[i]]);
    return j - lambda * categorical_kl(p, q);
}

// One gradient-ascent step on the group objective. Returns the pre-update
// objective value.
inline double grpo_step(ToyPolicy& policy, const ToyPolicy& reference,
                        const Group& group, const std::vector<double>& advantages,
                        double lambda, double lr) {
    if (advantages.size() != group.candidate_indices.size())
        throw std::invalid_argument("advantage/group size mismatch");
    std::vector<double> p = policy.probabilities(group.task_id);
    std::vector<double> q = reference.probabilities(group.task_id);
    double objective = grpo_objective(policy, reference, group, advantages, lambda);

    // d log p(a)/dz_j = (1[a=j] - p_j)/tau
    // dKL/dz_j = (p_j/tau) * ((log p_j - log q_j) - KL)
    double kl = categorical_kl(p, q);
    auto& logits = policy.head(group.task_id).logits;
    std::vector<double> grad(logits.size(), 0.0);
    for (std::size_t i = 0; i < group.candidate_indices.size(); ++i) {
        std::size_t a = group.candidate_indices[i];
        for (std::size_t j = 0; j < grad.size(); ++j)
            grad[j] += advantages[i] * (((a == j) ? 1.0 : 0.0) - p[j]) /
                       policy.temperature;
    }
    for (std::size_t j = 0; j < grad.size(); ++j)
        grad[j] -= lambda * (p[j] / policy.temperature) *
                   (std::log(p[j]) - std::log(q[j]) - kl);

    for (std::size_t j = 0; j < logits.size(); ++j) logits[j] += lr * grad[j];
    return objective;
}

// Reward hook: (task id, candidate answer text) -> (total reward, format bit).
using RewardFn =
    std::function<std::pair<double, int>(const std::string&, const std::string&)>;

struct TrainResult {
    ToyPolicy policy;
    std::vector<CurvePoint> curve;
};

inline TrainResult train(ToyPolicy policy, const std::vector<std::string>& task_ids,
                         const RewardFn& reward_fn, const TrainConfig& cfg) {
    ToyPolicy reference = policy;  // pre-training snapshot anchors the KL term
    std::mt19937_64 rng(cfg.seed);
    TrainResult result;

    for (int it = 0; it < cfg.iterations; ++it) {
        double reward_sum = 0.0, format_sum = 0.0, kl_sum = 0.0;
        std::size_t reward_count = 0;
        for (const std::string& task : task_ids) {
            Group g = sample_group(policy, reference, task, cfg.group_size, rng);
            const auto& candidates = policy.head(task).candidates;
            for (std::size_t idx : g.candidate_indices) {
                auto [total, format] = reward_fn(task, candidates[idx]);
                g.rewards.push_back(total);
                reward_sum += total;
                format_sum += format;
                ++reward_count;
            }
            std::vector<double> adv = compute_advantages(g.rewards, cfg.epsilon);
            grpo_step(policy, reference, g, adv, cfg.kl_coefficient,
                      cfg.learning_rate);
            kl_sum += categorical_kl(policy.probabilities(task),
                                     reference.probabilities(task));
        }
        CurvePoint pt;
        pt.iteration = it;
        pt.mean_reward = reward_count ? reward_sum / reward_count : 0.0;
        pt.mean_format_reward = reward_count ? format_sum / reward_count : 0.0;
        pt.mean_kl = task_ids.empty() ? 0.0 : kl_sum / task_ids.size();
        result.curve.push_back(pt);
    }
    result.policy = std::move(policy);
    return result;
}

inline std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "iteration,mean_reward,mean_format_reward,kl\n";
    char buf[128];
    for (const auto& pt : curve) {
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g\n", pt.iteration,
                      pt.mean_reward, pt.mean_format_reward, pt.mean_kl);
        out += buf;
    }
    return out;
}

}  // namespace viki
