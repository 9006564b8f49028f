#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace viki {

enum class RobotKind { stompy, fetch, unitree_h1, panda, anymal_c, unitree_go2 };

enum class Primitive { Move, Open, Close, Reach, Grasp, Place, Push, Interact };

inline constexpr std::array<RobotKind, 6> all_robot_kinds = {
    RobotKind::stompy,    RobotKind::fetch,    RobotKind::unitree_h1,
    RobotKind::panda,     RobotKind::anymal_c, RobotKind::unitree_go2};

inline constexpr std::array<Primitive, 8> all_primitives = {
    Primitive::Move,  Primitive::Open,  Primitive::Close, Primitive::Reach,
    Primitive::Grasp, Primitive::Place, Primitive::Push,  Primitive::Interact};

inline std::string_view to_string(RobotKind k) {
    switch (k) {
        case RobotKind::stompy: return "stompy";
        case RobotKind::fetch: return "fetch";
        case RobotKind::unitree_h1: return "unitree_h1";
        case RobotKind::panda: return "panda";
        case RobotKind::anymal_c: return "anymal_c";
        case RobotKind::unitree_go2: return "unitree_go2";
    }
    throw std::logic_error("bad RobotKind");
}

inline std::string_view to_string(Primitive p) {
    switch (p) {
        case Primitive::Move: return "Move";
        case Primitive::Open: return "Open";
        case Primitive::Close: return "Close";
        case Primitive::Reach: return "Reach";
        case Primitive::Grasp: return "Grasp";
        case Primitive::Place: return "Place";
        case Primitive::Push: return "Push";
        case Primitive::Interact: return "Interact";
    }
    throw std::logic_error("bad Primitive");
}

inline std::optional<RobotKind> robot_kind_from_string(std::string_view s) {
    for (RobotKind k : all_robot_kinds)
        if (to_string(k) == s) return k;
    return std::nullopt;
}

inline std::optional<Primitive> primitive_from_string(std::string_view s) {
    for (Primitive p : all_primitives)
        if (to_string(p) == s) return p;
    return std::nullopt;
}

// Push takes (object, target robot); everything else takes a single argument.
inline int primitive_arity(Primitive p) { return p == Primitive::Push ? 2 : 1; }

inline bool supports_primitive(RobotKind kind, Primitive p) {
    using P = Primitive;
    switch (kind) {
        case RobotKind::panda:
            return p == P::Reach || p == P::Grasp || p == P::Place ||
                   p == P::Open || p == P::Close || p == P::Interact;
        case RobotKind::fetch:
        case RobotKind::unitree_h1:
        case RobotKind::stompy:
            return p == P::Move || p == P::Reach || p == P::Grasp ||
                   p == P::Place || p == P::Open || p == P::Close ||
                   p == P::Interact;
        case RobotKind::unitree_go2:
        case RobotKind::anymal_c:
            return p == P::Move || p == P::Push || p == P::Interact;
    }
    throw std::logic_error("bad RobotKind");
}

inline int end_effector_count(RobotKind kind) {
    switch (kind) {
        case RobotKind::panda: return 1;
        case RobotKind::fetch: return 1;
        case RobotKind::unitree_go2: return 0;
        case RobotKind::unitree_h1: return 2;
        case RobotKind::stompy: return 2;
        case RobotKind::anymal_c: return 0;
    }
    throw std::logic_error("bad RobotKind");
}

inline bool is_mobile(RobotKind kind) {
    return supports_primitive(kind, Primitive::Move);
}

using LocationId = std::string;

struct RobotSpec {
    std::string id;
    RobotKind kind = RobotKind::fetch;
    LocationId start_location;

    bool mobile() const { return is_mobile(kind); }
};

struct SceneObject {
    std::string id;
    LocationId location;
    bool openable = false;
    bool open_state = false;  // meaningful iff openable
};

struct Scene {
    std::set<LocationId> locations;
    std::vector<RobotSpec> robots;
    std::vector<SceneObject> objects;
    std::string instruction;

    const RobotSpec* find_robot(std::string_view id) const {
        for (const auto& r : robots)
            if (r.id == id) return &r;
        return nullptr;
    }
    const SceneObject* find_object(std::string_view id) const {
        for (const auto& o : objects)
            if (o.id == id) return &o;
        return nullptr;
    }
};

// Goal predicate algebra evaluated on a terminal world state.
struct GoalObjectAt {
    std::string object;
    LocationId location;
    auto operator<=>(const GoalObjectAt&) const = default;
};
struct GoalIsOpen {
    std::string object;
    bool open = true;
    auto operator<=>(const GoalIsOpen&) const = default;
};
struct GoalInteracted {
    std::string object;
    auto operator<=>(const GoalInteracted&) const = default;
};
struct GoalHolding {
    std::string robot;
    std::string object;
    auto operator<=>(const GoalHolding&) const = default;
};

using Goal = std::variant<GoalObjectAt, GoalIsOpen, GoalInteracted, GoalHolding>;

inline std::string describe(const Goal& g) {
    struct V {
        std::string operator()(const GoalObjectAt& a) const {
            return a.object + " must end at " + a.location;
        }
        std::string operator()(const GoalIsOpen& a) const {
            return a.object + " must be " + (a.open ? "open" : "closed");
        }
        std::string operator()(const GoalInteracted& a) const {
            return a.object + " must be interacted with";
        }
        std::string operator()(const GoalHolding& a) const {
            return a.robot + " must be holding " + a.object;
        }
    };
    return std::visit(V{}, g);
}

struct Action {
    std::string robot;
    int timestep = 1;
    Primitive primitive = Primitive::Move;
    std::string destination;
    std::optional<std::string> extra;  // Push target robot

    auto operator<=>(const Action&) const = default;
};

// One step = the set of actions issued at a single timestep, one per robot.
struct PlanStep {
    int step = 1;
    std::map<std::string, Action> actions;  // robot id -> action

    bool operator==(const PlanStep&) const = default;
};

struct Plan {
    std::vector<PlanStep> steps;

    int length() const { return static_cast<int>(steps.size()); }
    bool operator==(const Plan&) const = default;
};

struct Trajectory {
    std::vector<std::pair<double, double>> points;
};

struct TrajectorySet {
    std::vector<Trajectory> trajectories;  // index 0 = ego
    int image_width = 0;
    int image_height = 0;
};

struct Sample {
    std::string task_id;
    int level = 1;
    Scene scene;
    std::vector<Goal> goals;
    std::optional<std::set<RobotKind>> gt_agents;       // level 1
    std::optional<Plan> gt_plan;                        // level 2
    std::optional<int> n_gt;                            // level 2
    std::optional<TrajectorySet> gt_trajectories;       // level 3
};

struct SceneViolation {
    std::string code;
    std::string detail;
    bool operator==(const SceneViolation&) const = default;
};

inline std::vector<SceneViolation> validate_scene(const Scene& scene) {
    std::vector<SceneViolation> out;
    if (scene.robots.empty())
        out.push_back({"EmptyRobotSet", "scene declares no robots"});
    if (scene.locations.empty())
        out.push_back({"EmptyLocationSet", "scene declares no locations"});

    std::set<std::string> robot_ids;
    for (const auto& r : scene.robots) {
        if (!robot_ids.insert(r.id).second)
            out.push_back({"DuplicateRobotId", r.id});
        if (!scene.locations.contains(r.start_location))
            out.push_back({"UnknownLocation", r.start_location});
    }
    std::set<std::string> object_ids;
    for (const auto& o : scene.objects) {
        if (!object_ids.insert(o.id).second)
            out.push_back({"DuplicateObjectId", o.id});
        if (!scene.locations.contains(o.location))
            out.push_back({"UnknownLocation", o.location});
    }
    return out;
}

inline std::vector<SceneViolation> validate_goals(const Scene& scene,
                                                  const std::vector<Goal>& goals) {
    std::vector<SceneViolation> out;
    auto need_object = [&](const std::string& id) {
        if (!scene.find_object(id)) out.push_back({"UnknownObject", id});
    };
    auto need_location = [&](const std::string& id) {
        if (!scene.locations.contains(id)) out.push_back({"UnknownLocation", id});
    };
    auto need_robot = [&](const std::string& id) {
        if (!scene.find_robot(id)) out.push_back({"UnknownRobot", id});
    };
    for (const auto& g : goals) {
        if (const auto* a = std::get_if<GoalObjectAt>(&g)) {
            need_object(a->object);
            need_location(a->location);
        } else if (const auto* a = std::get_if<GoalIsOpen>(&g)) {
            need_object(a->object);
        } else if (const auto* a = std::get_if<GoalInteracted>(&g)) {
            need_object(a->object);
        } else if (const auto* a = std::get_if<GoalHolding>(&g)) {
            need_robot(a->robot);
            need_object(a->object);
        }
    }
    return out;
}

}  // namespace viki
