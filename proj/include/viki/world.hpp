#pragma once

#include "viki/domain.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace viki {

enum class ActionErrorCode {
    UNKNOWN_ROBOT,
    UNKNOWN_OBJECT,
    PRIMITIVE_UNSUPPORTED,
    NOT_COLOCATED,
    NO_FREE_EFFECTOR,
    NOT_HOLDING,
    PRECONDITION_REACH,
    NOT_OPENABLE,
    BAD_TARGET_ROBOT,
};

inline std::string_view to_string(ActionErrorCode c) {
    switch (c) {
        case ActionErrorCode::UNKNOWN_ROBOT: return "UNKNOWN_ROBOT";
        case ActionErrorCode::UNKNOWN_OBJECT: return "UNKNOWN_OBJECT";
        case ActionErrorCode::PRIMITIVE_UNSUPPORTED: return "PRIMITIVE_UNSUPPORTED";
        case ActionErrorCode::NOT_COLOCATED: return "NOT_COLOCATED";
        case ActionErrorCode::NO_FREE_EFFECTOR: return "NO_FREE_EFFECTOR";
        case ActionErrorCode::NOT_HOLDING: return "NOT_HOLDING";
        case ActionErrorCode::PRECONDITION_REACH: return "PRECONDITION_REACH";
        case ActionErrorCode::NOT_OPENABLE: return "NOT_OPENABLE";
        case ActionErrorCode::BAD_TARGET_ROBOT: return "BAD_TARGET_ROBOT";
    }
    return "?";
}

struct ActionError {
    ActionErrorCode code;
    Action action;
    int step = 0;
};

// Either a plain location or "currently in some robot's effector".
struct CarriedBy {
    std::string robot;
    auto operator<=>(const CarriedBy&) const = default;
};
using ObjectPlace = std::variant<LocationId, CarriedBy>;

struct WorldState {
    std::map<std::string, LocationId> robot_location;
    std::map<std::string, std::vector<std::string>> held;  // grasp order, LIFO
    std::map<std::string, std::optional<std::string>> reached;
    std::map<std::string, ObjectPlace> object_location;
    std::map<std::string, bool> open_state;
    std::vector<std::pair<std::string, std::string>> interactions;  // (robot, object)
    int clock = 0;

    auto operator<=>(const WorldState&) const = default;

    static WorldState initial(const Scene& scene) {
        WorldState s;
        for (const auto& r : scene.robots) {
            s.robot_location[r.id] = r.start_location;
            s.held[r.id] = {};
            s.reached[r.id] = std::nullopt;
        }
        for (const auto& o : scene.objects) {
            s.object_location[o.id] = o.location;
            if (o.openable) s.open_state[o.id] = o.open_state;
        }
        return s;
    }

    // Carried objects share their carrier's location.
    std::optional<LocationId> effective_object_location(const std::string& obj) const {
        auto it = object_location.find(obj);
        if (it == object_location.end()) return std::nullopt;
        if (const auto* loc = std::get_if<LocationId>(&it->second)) return *loc;
        const auto& carrier = std::get<CarriedBy>(it->second).robot;
        auto rit = robot_location.find(carrier);
        if (rit == robot_location.end()) return std::nullopt;
        return rit->second;
    }

    bool carried(const std::string& obj) const {
        auto it = object_location.find(obj);
        return it != object_location.end() &&
               std::holds_alternative<CarriedBy>(it->second);
    }
};

struct ExecReport {
    bool feasible = false;
    std::optional<ActionError> failed_at;
    WorldState final_state;
    std::vector<std::pair<Goal, bool>> goal_results;  // present iff feasible

    bool all_goals_met() const {
        return feasible && std::all_of(goal_results.begin(), goal_results.end(),
                                       [](const auto& p) { return p.second; });
    }
};

using ApplyResult = std::variant<WorldState, ActionError>;

// Applies a single action of one robot, or reports the violated precondition.
// The input state is never mutated.
inline ApplyResult check_and_apply(const WorldState& state, const std::string& robot,
                                   const Action& action, const Scene& scene) {
    auto err = [&](ActionErrorCode c) {
        return ActionError{c, action, action.timestep};
    };

    const RobotSpec* spec = scene.find_robot(robot);
    if (!spec || !state.robot_location.contains(robot))
        return err(ActionErrorCode::UNKNOWN_ROBOT);
    if (!supports_primitive(spec->kind, action.primitive))
        return err(ActionErrorCode::PRIMITIVE_UNSUPPORTED);

    const LocationId& here = state.robot_location.at(robot);
    WorldState next = state;

    // Destination may name a location or an object; objects resolve to where
    // they currently are.
    auto resolve_location = [&](const std::string& dest) -> std::optional<LocationId> {
        if (scene.locations.contains(dest)) return dest;
        if (state.object_location.contains(dest))
            return state.effective_object_location(dest);
        return std::nullopt;
    };

    switch (action.primitive) {
        case Primitive::Move: {
            auto loc = resolve_location(action.destination);
            if (!loc) return err(ActionErrorCode::UNKNOWN_OBJECT);
            next.robot_location[robot] = *loc;
            next.reached[robot] = std::nullopt;
            return next;
        }
        case Primitive::Reach: {
            const std::string& obj = action.destination;
            if (!state.object_location.contains(obj))
                return err(ActionErrorCode::UNKNOWN_OBJECT);
            auto obj_loc = state.effective_object_location(obj);
            if (!obj_loc || *obj_loc != here)
                return err(ActionErrorCode::NOT_COLOCATED);
            next.reached[robot] = obj;
            return next;
        }
        case Primitive::Grasp: {
            const std::string& obj = action.destination;
            if (!state.object_location.contains(obj))
                return err(ActionErrorCode::UNKNOWN_OBJECT);
            if (state.reached.at(robot) != std::optional<std::string>(obj))
                return err(ActionErrorCode::PRECONDITION_REACH);
            if (state.carried(obj))  // already in someone's effector
                return err(ActionErrorCode::NOT_COLOCATED);
            if (static_cast<int>(state.held.at(robot).size()) >=
                end_effector_count(spec->kind))
                return err(ActionErrorCode::NO_FREE_EFFECTOR);
            next.held[robot].push_back(obj);
            next.object_location[obj] = CarriedBy{robot};
            return next;
        }
        case Primitive::Place: {
            if (state.held.at(robot).empty())
                return err(ActionErrorCode::NOT_HOLDING);
            auto loc = resolve_location(action.destination);
            if (!loc) return err(ActionErrorCode::UNKNOWN_OBJECT);
            if (*loc != here) return err(ActionErrorCode::NOT_COLOCATED);
            std::string obj = next.held[robot].back();  // LIFO release
            next.held[robot].pop_back();
            next.object_location[obj] = *loc;
            if (next.reached[robot] == std::optional<std::string>(obj))
                next.reached[robot] = std::nullopt;
            return next;
        }
        case Primitive::Open:
        case Primitive::Close: {
            const std::string& obj = action.destination;
            const SceneObject* so = scene.find_object(obj);
            if (!so || !state.object_location.contains(obj))
                return err(ActionErrorCode::UNKNOWN_OBJECT);
            if (!so->openable) return err(ActionErrorCode::NOT_OPENABLE);
            auto obj_loc = state.effective_object_location(obj);
            if (!obj_loc || *obj_loc != here)
                return err(ActionErrorCode::NOT_COLOCATED);
            if (state.reached.at(robot) != std::optional<std::string>(obj))
                return err(ActionErrorCode::PRECONDITION_REACH);
            next.open_state[obj] = action.primitive == Primitive::Open;
            return next;
        }
        case Primitive::Push: {
            const std::string& obj = action.destination;
            if (!state.object_location.contains(obj))
                return err(ActionErrorCode::UNKNOWN_OBJECT);
            if (!action.extra || !state.robot_location.contains(*action.extra))
                return err(ActionErrorCode::BAD_TARGET_ROBOT);
            if (state.carried(obj)) return err(ActionErrorCode::NOT_COLOCATED);
            auto obj_loc = state.effective_object_location(obj);
            if (!obj_loc || *obj_loc != here)
                return err(ActionErrorCode::NOT_COLOCATED);
            next.object_location[obj] = state.robot_location.at(*action.extra);
            return next;
        }
        case Primitive::Interact: {
            const std::string& obj = action.destination;
            if (!state.object_location.contains(obj))
                return err(ActionErrorCode::UNKNOWN_OBJECT);
            auto obj_loc = state.effective_object_location(obj);
            if (!obj_loc || *obj_loc != here)
                return err(ActionErrorCode::NOT_COLOCATED);
            next.interactions.emplace_back(robot, obj);
            return next;
        }
    }
    return err(ActionErrorCode::PRIMITIVE_UNSUPPORTED);
}

class unknown_id_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline bool goal_satisfied(const WorldState& state, const Goal& goal) {
    if (const auto* g = std::get_if<GoalObjectAt>(&goal)) {
        auto it = state.object_location.find(g->object);
        if (it == state.object_location.end())
            throw unknown_id_error("unknown object '" + g->object + "'");
        const auto* loc = std::get_if<LocationId>(&it->second);
        return loc && *loc == g->location;
    }
    if (const auto* g = std::get_if<GoalIsOpen>(&goal)) {
        auto it = state.open_state.find(g->object);
        if (it == state.open_state.end())
            throw unknown_id_error("object '" + g->object + "' has no open state");
        return it->second == g->open;
    }
    if (const auto* g = std::get_if<GoalInteracted>(&goal)) {
        if (!state.object_location.contains(g->object))
            throw unknown_id_error("unknown object '" + g->object + "'");
        for (const auto& [r, o] : state.interactions)
            if (o == g->object) return true;
        return false;
    }
    const auto& g = std::get<GoalHolding>(goal);
    auto it = state.held.find(g.robot);
    if (it == state.held.end())
        throw unknown_id_error("unknown robot '" + g.robot + "'");
    if (!state.object_location.contains(g.object))
        throw unknown_id_error("unknown object '" + g.object + "'");
    return std::find(it->second.begin(), it->second.end(), g.object) !=
           it->second.end();
}

inline std::vector<std::pair<Goal, bool>> goals_satisfied(
    const WorldState& state, const std::vector<Goal>& goals) {
    std::vector<std::pair<Goal, bool>> out;
    out.reserve(goals.size());
    for (const auto& g : goals) out.emplace_back(g, goal_satisfied(state, g));
    return out;
}

// Executes a parsed plan step by step; within a step robots act in ascending
// robot-id order. Stops at the first infeasible action.
inline ExecReport run_plan(const Scene& scene, const Plan& plan,
                           const std::vector<Goal>& goals = {}) {
    ExecReport report;
    WorldState state = WorldState::initial(scene);
    for (const auto& step : plan.steps) {
        for (const auto& [robot, action] : step.actions) {  // map is id-ordered
            ApplyResult r = check_and_apply(state, robot, action, scene);
            if (auto* e = std::get_if<ActionError>(&r)) {
                report.feasible = false;
                report.failed_at = *e;
                report.final_state = std::move(state);
                return report;
            }
            state = std::move(std::get<WorldState>(r));
        }
        ++state.clock;
    }
    report.feasible = true;
    report.final_state = std::move(state);
    report.goal_results = goals_satisfied(report.final_state, goals);
    return report;
}

// Deterministic feedback text for the refinement loop: names the first failed
// action, or every unmet goal. Empty iff the plan fully succeeded.
inline std::string make_feedback(const ExecReport& report) {
    std::ostringstream out;
    if (report.failed_at) {
        const ActionError& e = *report.failed_at;
        out << "Step " << e.step << ": " << e.action.robot << " cannot "
            << to_string(e.action.primitive) << " '" << e.action.destination << "'";
        switch (e.code) {
            case ActionErrorCode::PRECONDITION_REACH: out << " before Reach."; break;
            case ActionErrorCode::NOT_COLOCATED:
                out << " without being at its location."; break;
            case ActionErrorCode::NO_FREE_EFFECTOR:
                out << " with no free end effector."; break;
            case ActionErrorCode::NOT_HOLDING: out << " while holding nothing."; break;
            case ActionErrorCode::PRIMITIVE_UNSUPPORTED:
                out << " (primitive unsupported by this robot)."; break;
            case ActionErrorCode::NOT_OPENABLE: out << " (not openable)."; break;
            case ActionErrorCode::BAD_TARGET_ROBOT:
                out << " (target robot does not exist)."; break;
            case ActionErrorCode::UNKNOWN_ROBOT: out << " (unknown robot)."; break;
            case ActionErrorCode::UNKNOWN_OBJECT: out << " (unknown object)."; break;
        }
        return out.str();
    }
    bool first = true;
    for (const auto& [goal, ok] : report.goal_results) {
        if (ok) continue;
        if (!first) out << ' ';
        out << "Goal not met: " << describe(goal) << ".";
        first = false;
    }
    return out.str();
}

}  // namespace viki
