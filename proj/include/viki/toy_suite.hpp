#pragma once

#include "viki/dataset.hpp"
#include "viki/grpo.hpp"
#include "viki/rewards.hpp"
#include "viki/serialize.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace viki {

// One toy planning task: an L2 sample plus a fixed candidate-answer set
// (feasible-short, feasible-long, two infeasible), the unit GRPO trains on.
struct ToyTask {
    Sample sample;
    std::vector<std::string> candidates;
    std::vector<std::optional<int>> candidate_delta_steps;  // feasible only
    std::size_t gold_index = 0;  // the feasible-short candidate
};

struct ToySuite {
    std::vector<ToyTask> tasks;

    std::vector<std::string> task_ids() const {
        std::vector<std::string> ids;
        for (const auto& t : tasks) ids.push_back(t.sample.task_id);
        return ids;
    }
};

namespace detail {

inline std::string tagged(const std::string& answer) {
    return "<think>plan</think><answer>" + answer + "</answer>";
}

// Drops the earliest Reach action (or the very first action if none), which
// breaks a Grasp/Open precondition or leaves a goal unmet.
inline Plan break_plan(const Plan& plan) {
    Plan broken = plan;
    for (auto& step : broken.steps) {
        for (auto it = step.actions.begin(); it != step.actions.end(); ++it) {
            if (it->second.primitive == Primitive::Reach) {
                step.actions.erase(it);
                return broken;
            }
        }
    }
    if (!broken.steps.empty() && !broken.steps.front().actions.empty())
        broken.steps.front().actions.erase(broken.steps.front().actions.begin());
    return broken;
}

inline Plan lengthen_plan(const Scene& scene, const Plan& plan) {
    Plan longer = plan;
    PlanStep extra;
    extra.step = longer.length() + 1;
    Action a;
    a.robot = "R1";
    a.timestep = extra.step;
    a.primitive = Primitive::Move;
    a.destination = *scene.locations.begin();
    extra.actions.emplace(a.robot, std::move(a));
    longer.steps.push_back(std::move(extra));
    return longer;
}

}  // namespace detail

inline ToySuite build_toy_suite(int n_tasks, std::uint64_t seed) {
    ToySuite suite;
    for (const Sample& s : gen_synthetic(n_tasks, seed)) {
        if (s.level != 2) continue;
        ToyTask task;
        task.sample = s;
        const Plan& gt = *s.gt_plan;

        task.candidates.push_back(detail::tagged(serialize_plan(gt)));
        task.candidate_delta_steps.emplace_back(0);
        task.gold_index = 0;

        Plan longer = detail::lengthen_plan(s.scene, gt);
        task.candidates.push_back(detail::tagged(serialize_plan(longer)));
        task.candidate_delta_steps.emplace_back(longer.length() - *s.n_gt);

        // Infeasible candidates also skip the tag protocol, so they score 0.
        task.candidates.push_back(serialize_plan(detail::break_plan(gt)));
        task.candidate_delta_steps.emplace_back(std::nullopt);
        task.candidates.push_back("no plan available for this task");
        task.candidate_delta_steps.emplace_back(std::nullopt);

        suite.tasks.push_back(std::move(task));
    }
    return suite;
}

inline ToyPolicy make_toy_policy(const ToySuite& suite) {
    ToyPolicy policy;
    for (const auto& t : suite.tasks)
        policy.add_task(t.sample.task_id, t.candidates);
    return policy;
}

inline RewardFn make_toy_reward_fn(const ToySuite& suite, bool step_penalty,
                                   double lambda1 = default_lambda1,
                                   double lambda2 = default_lambda2) {
    // Index tasks once; the returned closure is used from the training loop.
    std::map<std::string, const ToyTask*> by_id;
    for (const auto& t : suite.tasks) by_id[t.sample.task_id] = &t;
    return [by_id, step_penalty, lambda1, lambda2](
               const std::string& task_id,
               const std::string& response) -> std::pair<double, int> {
        auto it = by_id.find(task_id);
        if (it == by_id.end()) throw unknown_task_error(task_id);
        RewardBreakdown b = score_response(it->second->sample, response,
                                           step_penalty, lambda1, lambda2);
        return {b.total, b.format};
    };
}

// Mean plan-length overshoot of each task's most likely candidate; infeasible
// argmax candidates count as overshoot 0 with a failure tick.
struct ArgmaxDeltaSteps {
    double mean_delta = 0.0;
    int infeasible_argmax = 0;
};

inline ArgmaxDeltaSteps argmax_delta_steps(const ToyPolicy& policy,
                                           const ToySuite& suite) {
    ArgmaxDeltaSteps out;
    double sum = 0.0;
    for (const auto& t : suite.tasks) {
        std::vector<double> p = policy.probabilities(t.sample.task_id);
        std::size_t best =
            std::max_element(p.begin(), p.end()) - p.begin();
        if (t.candidate_delta_steps[best])
            sum += *t.candidate_delta_steps[best];
        else
            ++out.infeasible_argmax;
    }
    if (!suite.tasks.empty()) out.mean_delta = sum / suite.tasks.size();
    return out;
}

}  // namespace viki
