#pragma once

#include "viki/domain.hpp"
#include "viki/world.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace viki {

class search_budget_exceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Canonical state key for the visited set. The interaction log collapses to
// the set of interacted objects, which is all the goal checker consumes.
inline std::string state_key(const WorldState& s) {
    std::ostringstream out;
    for (const auto& [r, loc] : s.robot_location) out << r << '@' << loc << ';';
    for (const auto& [r, objs] : s.held) {
        out << r << '<';
        for (const auto& o : objs) out << o << ',';
        out << '>';
    }
    for (const auto& [r, obj] : s.reached) out << r << '~' << obj.value_or("") << ';';
    for (const auto& [o, place] : s.object_location) {
        out << o << '=';
        if (const auto* loc = std::get_if<LocationId>(&place))
            out << *loc;
        else
            out << '*' << std::get<CarriedBy>(place).robot;
        out << ';';
    }
    for (const auto& [o, open] : s.open_state) out << o << (open ? '^' : '_');
    std::set<std::string> interacted;
    for (const auto& [r, o] : s.interactions) interacted.insert(o);
    for (const auto& o : interacted) out << '!' << o;
    return out.str();
}

// Candidate actions a robot could usefully take from this state, in a fixed
// lexicographic order (primitive name, destination, extra). check_and_apply
// remains the authority on validity.
inline std::vector<Action> candidate_actions(const WorldState& s,
                                             const RobotSpec& spec,
                                             const Scene& scene) {
    std::vector<Action> out;
    const std::string& here = s.robot_location.at(spec.id);
    auto add = [&](Primitive p, const std::string& dest,
                   std::optional<std::string> extra = std::nullopt) {
        if (!supports_primitive(spec.kind, p)) return;
        Action a;
        a.robot = spec.id;
        a.primitive = p;
        a.destination = dest;
        a.extra = std::move(extra);
        out.push_back(std::move(a));
    };

    for (const auto& loc : scene.locations)
        if (loc != here) add(Primitive::Move, loc);

    for (const auto& obj : scene.objects) {
        auto eff = s.effective_object_location(obj.id);
        bool co_located = eff && *eff == here;
        bool carried = s.carried(obj.id);
        if (co_located && !carried &&
            s.reached.at(spec.id) != std::optional<std::string>(obj.id))
            add(Primitive::Reach, obj.id);
        if (co_located) add(Primitive::Interact, obj.id);
        if (co_located && !carried)
            for (const auto& other : scene.robots)
                if (other.id != spec.id) add(Primitive::Push, obj.id, other.id);
        if (obj.openable && co_located &&
            s.reached.at(spec.id) == std::optional<std::string>(obj.id)) {
            bool open = s.open_state.at(obj.id);
            add(open ? Primitive::Close : Primitive::Open, obj.id);
        }
    }

    if (auto reached = s.reached.at(spec.id);
        reached && !s.carried(*reached) &&
        static_cast<int>(s.held.at(spec.id).size()) < end_effector_count(spec.kind))
        add(Primitive::Grasp, *reached);

    if (!s.held.at(spec.id).empty()) add(Primitive::Place, here);

    auto key = [](const Action& a) {
        return std::tuple(std::string(to_string(a.primitive)), a.destination,
                          a.extra.value_or(""));
    };
    std::sort(out.begin(), out.end(),
              [&](const Action& a, const Action& b) { return key(a) < key(b); });
    return out;
}

}  // namespace detail

// Drops actions whose removal leaves the plan feasible and goal-achieving,
// so every surviving action is load-bearing. Deterministic (last step first,
// descending robot id within a step).
inline Plan prune_redundant_actions(const Scene& scene,
                                    const std::vector<Goal>& goals, Plan plan) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto sit = plan.steps.rbegin(); sit != plan.steps.rend() && !changed;
             ++sit) {
            for (auto ait = sit->actions.rbegin(); ait != sit->actions.rend();
                 ++ait) {
                Plan trial = plan;
                trial.steps[plan.steps.size() - 1 - (sit - plan.steps.rbegin())]
                    .actions.erase(ait->first);
                if (run_plan(scene, trial, goals).all_goals_met()) {
                    plan = std::move(trial);
                    changed = true;
                    break;
                }
            }
        }
    }
    return plan;
}

// Breadth-first search over joint actions; returns a shortest feasible
// goal-achieving plan or nullopt if none exists within max_steps. Ties break
// by lexicographic action order. Intended for tiny scenes only.
inline std::optional<Plan> reference_solve(const Scene& scene,
                                           const std::vector<Goal>& goals,
                                           int max_steps,
                                           std::size_t state_cap = 200000) {
    if (scene.robots.size() > 3 || scene.objects.size() > 5 || max_steps > 8)
        throw std::invalid_argument(
            "reference_solve: scene too large (<=3 robots, <=5 objects, "
            "<=8 steps)");

    auto all_met = [&](const WorldState& s) {
        for (const auto& g : goals)
            if (!goal_satisfied(s, g)) return false;
        return true;
    };

    struct Node {
        WorldState state;
        int depth;
        std::size_t parent;
        std::map<std::string, Action> joint;  // action taken to reach this node
    };

    WorldState start = WorldState::initial(scene);
    if (all_met(start)) return Plan{};

    std::vector<Node> nodes;
    nodes.push_back({start, 0, 0, {}});
    std::set<std::string> visited{detail::state_key(start)};
    std::deque<std::size_t> frontier{0};

    // Sorted robot order fixes both expansion order and within-step semantics.
    std::vector<const RobotSpec*> robots;
    for (const auto& r : scene.robots) robots.push_back(&r);
    std::sort(robots.begin(), robots.end(),
              [](const RobotSpec* a, const RobotSpec* b) { return a->id < b->id; });

    auto reconstruct = [&](std::size_t idx) {
        std::vector<std::map<std::string, Action>> joints;
        while (idx != 0) {
            joints.push_back(nodes[idx].joint);
            idx = nodes[idx].parent;
        }
        std::reverse(joints.begin(), joints.end());
        Plan plan;
        for (std::size_t i = 0; i < joints.size(); ++i) {
            PlanStep step;
            step.step = static_cast<int>(i) + 1;
            for (auto& [r, a] : joints[i]) {
                a.timestep = step.step;
                step.actions.emplace(r, a);
            }
            plan.steps.push_back(std::move(step));
        }
        return plan;
    };

    while (!frontier.empty()) {
        std::size_t cur = frontier.front();
        frontier.pop_front();
        if (nodes[cur].depth >= max_steps) continue;

        // Per-robot candidates, with "do nothing" as choice 0.
        std::vector<std::vector<std::optional<Action>>> choices;
        for (const RobotSpec* r : robots) {
            std::vector<std::optional<Action>> c{std::nullopt};
            for (auto& a : detail::candidate_actions(nodes[cur].state, *r, scene))
                c.push_back(std::move(a));
            choices.push_back(std::move(c));
        }

        std::vector<std::size_t> pick(robots.size(), 0);
        while (true) {
            // Advance odometer, skipping the all-noop joint.
            bool all_noop = true;
            for (std::size_t p : pick)
                if (p != 0) all_noop = false;
            if (!all_noop) {
                WorldState state = nodes[cur].state;
                bool ok = true;
                std::map<std::string, Action> joint;
                for (std::size_t i = 0; i < robots.size() && ok; ++i) {
                    if (pick[i] == 0) continue;
                    const Action& a = *choices[i][pick[i]];
                    ApplyResult r = check_and_apply(state, robots[i]->id, a, scene);
                    if (std::holds_alternative<ActionError>(r)) {
                        ok = false;
                    } else {
                        state = std::move(std::get<WorldState>(r));
                        joint.emplace(robots[i]->id, a);
                    }
                }
                if (ok) {
                    ++state.clock;
                    std::string key = detail::state_key(state);
                    if (visited.insert(key).second) {
                        if (visited.size() > state_cap)
                            throw search_budget_exceeded(
                                "reference_solve: state cap exceeded");
                        nodes.push_back({std::move(state), nodes[cur].depth + 1,
                                         cur, std::move(joint)});
                        if (all_met(nodes.back().state))
                            return prune_redundant_actions(
                                scene, goals, reconstruct(nodes.size() - 1));
                        frontier.push_back(nodes.size() - 1);
                    }
                }
            }
            std::size_t i = 0;
            for (; i < pick.size(); ++i) {
                if (++pick[i] < choices[i].size()) break;
                pick[i] = 0;
            }
            if (i == pick.size()) break;
        }
    }
    return std::nullopt;
}

}  // namespace viki
