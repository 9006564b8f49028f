#pragma once

#include "viki/domain.hpp"
#include "viki/parse.hpp"
#include "viki/serialize.hpp"
#include "viki/world.hpp"

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace viki {

class generator_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Pluggable plan generator. Implementations must be deterministic given
// (prompt, seed) and keep no cross-call state beyond configuration.
class GeneratorClient {
  public:
    virtual ~GeneratorClient() = default;
    virtual std::string generate(const std::string& prompt, long seed) = 0;
};

// Scripted generator: ordered (trigger substring, response) rules with a
// default fallback.
class MockGenerator : public GeneratorClient {
  public:
    struct Rule {
        std::string trigger;
        std::string response;
    };

    MockGenerator() = default;
    explicit MockGenerator(std::vector<Rule> rules, std::string default_response = "")
        : rules_(std::move(rules)), default_response_(std::move(default_response)) {}

    void add_rule(std::string trigger, std::string response) {
        rules_.push_back({std::move(trigger), std::move(response)});
    }
    void set_default(std::string response) { default_response_ = std::move(response); }

    std::string generate(const std::string& prompt, long) override {
        for (const auto& rule : rules_)
            if (prompt.find(rule.trigger) != std::string::npos) return rule.response;
        return default_response_;
    }

  private:
    std::vector<Rule> rules_;
    std::string default_response_;
};

inline std::string robot_description(RobotKind k) {
    switch (k) {
        case RobotKind::stompy:
            return "A bipedal robot designed for dynamic walking and stomping "
                   "tasks, featuring articulated arms.";
        case RobotKind::fetch:
            return "A wheeled robot with a flexible arm for object manipulation, "
                   "designed for mobility and dexterity.";
        case RobotKind::unitree_h1:
            return "A humanoid robot with arms and legs designed for human-like "
                   "movements and tasks.";
        case RobotKind::panda:
            return "A fixed robotic arm designed for precise and delicate "
                   "manipulation tasks.";
        case RobotKind::anymal_c:
            return "A quadrupedal robot built for navigating rough terrains and "
                   "performing complex tasks with four articulated legs.";
        case RobotKind::unitree_go2:
            return "A compact quadrupedal robot optimized for agile movement and "
                   "stability with four legs for efficient locomotion.";
    }
    return "";
}

inline std::string action_description(Primitive p) {
    switch (p) {
        case Primitive::Move:
            return "Command ['Move', 'object']: Robot R moves to the specified "
                   "object.";
        case Primitive::Open:
            return "Command ['Open', 'object']: Open the object held by the Robot "
                   "R's end effector.";
        case Primitive::Close:
            return "Command ['Close', 'object']: Close the object held by the "
                   "Robot R's end effector.";
        case Primitive::Reach:
            return "Command ['Reach', 'object']: Robot R reaches the specified "
                   "object.";
        case Primitive::Grasp:
            return "Command ['Grasp', 'object']: Robot R's end effector performs "
                   "a grasping operation on a specified object.";
        case Primitive::Place:
            return "Command ['Place', 'object']: Place the object held by the "
                   "Robot R's end effector at a specified location (the release "
                   "point, not the object itself).";
        case Primitive::Push:
            return "Command ['Push', 'object', 'R1']: Robot R pushes the object "
                   "to robot R1.";
        case Primitive::Interact:
            return "Command ['Interact', 'object']: A general interaction "
                   "operation, flexible for representing interactions with any "
                   "asset.";
    }
    return "";
}

inline const std::string& default_plan_prompt_template() {
    static const std::string tmpl =
        "You are a plan creator. I will provide you with a scene description, "
        "available robots and their action primitives, and a task description. "
        "You need to create a plan to complete the task.\n"
        "1. Create a plan to complete the task, noting:\n"
        "   - Each robot can only perform ONE action per time step.\n"
        "   - Multiple robots can work in parallel, but each robot is limited to "
        "one action at a time.\n"
        "2. You need to first provide your reasoning process within <think> and "
        "</think> tags.\n"
        "3. Your final answer must be within <answer> and </answer> tags, as a "
        "list of {\"step\": n, \"actions\": {robot: [primitive, argument]}} "
        "entries with steps numbered from 1.\n"
        "Task: {task_id}\n"
        "Scene: {scene}\n"
        "Action primitives and descriptions: {ACTION_DESCRIPTION}\n"
        "Available robot set: {robots}\n"
        "Robot characteristics: {available_robots}\n"
        "Their available operation APIs: {available_actions}\n"
        "Instruction: {instruction}\n";
    return tmpl;
}

struct AttemptLog {
    int attempt_index = 1;
    std::string prompt_used;
    std::string response;
    std::optional<Plan> parsed_plan;
    std::optional<std::string> parse_failure;
    std::optional<ExecReport> report;
    std::string feedback;
};

struct RefineConfig {
    int max_attempts = 1;
    bool feedback_enabled = true;
    std::string prompt_template = default_plan_prompt_template();
    std::vector<long> seeds;  // one per attempt; defaults to 1..max_attempts

    long seed_for(int attempt) const {
        if (attempt - 1 < static_cast<int>(seeds.size())) return seeds[attempt - 1];
        return attempt;
    }
};

namespace detail {

inline void replace_all(std::string& s, std::string_view key, std::string_view val) {
    size_t pos = 0;
    while ((pos = s.find(key, pos)) != std::string::npos) {
        s.replace(pos, key.size(), val);
        pos += val.size();
    }
}

}  // namespace detail

inline std::string render_plan_prompt(const Sample& sample,
                                      const std::string& instruction,
                                      const std::string& tmpl) {
    std::ostringstream robots, characteristics, apis, actions;
    std::set<RobotKind> kinds;
    bool first = true;
    for (const auto& r : sample.scene.robots) {
        if (!first) robots << ", ";
        robots << r.id << " (" << to_string(r.kind) << ")";
        kinds.insert(r.kind);
        first = false;
    }
    for (RobotKind k : kinds) {
        characteristics << "'" << to_string(k) << "': " << robot_description(k)
                        << "\n";
        apis << "'" << to_string(k) << "': [";
        bool f = true;
        for (Primitive p : all_primitives) {
            if (!supports_primitive(k, p)) continue;
            if (!f) apis << ", ";
            apis << "'" << to_string(p) << "'";
            f = false;
        }
        apis << "]\n";
    }
    for (Primitive p : all_primitives)
        actions << "'" << to_string(p) << "': " << action_description(p) << "\n";

    std::string out = tmpl;
    detail::replace_all(out, "{task_id}", sample.task_id);
    detail::replace_all(out, "{scene}", to_json(sample.scene).dump());
    detail::replace_all(out, "{ACTION_DESCRIPTION}", actions.str());
    detail::replace_all(out, "{robots}", robots.str());
    detail::replace_all(out, "{available_robots}", characteristics.str());
    detail::replace_all(out, "{available_actions}", apis.str());
    detail::replace_all(out, "{instruction}", instruction);
    return out;
}

struct RefineResult {
    bool success = false;
    std::optional<Plan> final_plan;
    std::vector<AttemptLog> logs;
};

// Generate -> parse -> simulate -> goal-check loop; on failure with feedback
// enabled, the checker's feedback is appended to the instruction before the
// next attempt.
inline RefineResult iterative_refine(const Sample& sample, GeneratorClient& gen,
                                     const RefineConfig& cfg) {
    RefineResult result;
    std::string instruction = sample.scene.instruction;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        AttemptLog log;
        log.attempt_index = attempt;
        log.prompt_used =
            render_plan_prompt(sample, instruction, cfg.prompt_template);
        try {
            log.response = gen.generate(log.prompt_used, cfg.seed_for(attempt));
        } catch (const std::exception& e) {
            result.logs.push_back(std::move(log));
            throw generator_error(e.what());
        }

        std::string feedback;
        try {
            TaggedResponse tagged = extract_tags(log.response);
            const std::string& answer =
                tagged.well_formed ? tagged.answer : log.response;
            log.parsed_plan = parse_plan(answer);
        } catch (const parse_error& e) {
            log.parse_failure = e.what();
            feedback = std::string("Response could not be parsed as a plan: ") +
                       e.what();
        }

        if (log.parsed_plan) {
            log.report = run_plan(sample.scene, *log.parsed_plan, sample.goals);
            if (log.report->all_goals_met()) {
                result.success = true;
                result.final_plan = log.parsed_plan;
                result.logs.push_back(std::move(log));
                return result;
            }
            feedback = make_feedback(*log.report);
        }

        if (cfg.feedback_enabled && !feedback.empty()) {
            log.feedback = feedback;
            instruction += "\nPrevious attempt failed: " + feedback;
        }
        result.logs.push_back(std::move(log));
    }
    return result;
}

// Fraction of samples solved within k attempts. Without feedback the attempts
// are independent (one seed each); with feedback they chain through
// iterative_refine.
inline double pass_at_k(const std::vector<Sample>& samples, GeneratorClient& gen,
                        int k, bool feedback, const std::vector<long>& seeds = {},
                        int jobs = 1) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    std::vector<int> solved(samples.size(), 0);

    auto eval_one = [&](std::size_t i) {
        RefineConfig cfg;
        cfg.max_attempts = k;
        cfg.feedback_enabled = feedback;
        cfg.seeds = seeds;
        try {
            if (feedback) {
                solved[i] = iterative_refine(samples[i], gen, cfg).success ? 1 : 0;
                return;
            }
            for (int attempt = 1; attempt <= k; ++attempt) {
                RefineConfig one = cfg;
                one.max_attempts = 1;
                one.seeds = {cfg.seed_for(attempt)};
                if (iterative_refine(samples[i], gen, one).success) {
                    solved[i] = 1;
                    return;
                }
            }
        } catch (const generator_error&) {
            solved[i] = 0;  // a failing client counts as a failed sample
        }
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < samples.size(); ++i) eval_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < samples.size();
                     i = next.fetch_add(1))
                    eval_one(i);
            });
        for (auto& th : pool) th.join();
    }

    if (samples.empty()) return 0.0;
    double n = 0;
    for (int s : solved) n += s;
    return n / static_cast<double>(samples.size());
}

}  // namespace viki
