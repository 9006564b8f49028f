#pragma once

#include "viki/domain.hpp"
#include "viki/parse.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace viki {

// Insertion-ordered JSON keeps every serialized artifact byte-stable.
using Json = nlohmann::ordered_json;

class schema_error : public std::runtime_error {
  public:
    schema_error(const std::string& field, const std::string& what)
        : std::runtime_error(what), field_(field) {}
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

inline Json to_json(const Scene& scene) {
    Json j;
    j["locations"] = Json::array();
    for (const auto& l : scene.locations) j["locations"].push_back(l);
    j["robots"] = Json::array();
    for (const auto& r : scene.robots)
        j["robots"].push_back({{"id", r.id},
                               {"kind", std::string(to_string(r.kind))},
                               {"start_location", r.start_location}});
    j["objects"] = Json::array();
    for (const auto& o : scene.objects) {
        Json jo = {{"id", o.id}, {"location", o.location}, {"openable", o.openable}};
        if (o.openable) jo["open"] = o.open_state;
        j["objects"].push_back(std::move(jo));
    }
    j["instruction"] = scene.instruction;
    return j;
}

inline Scene scene_from_json(const Json& j) {
    Scene scene;
    if (!j.is_object()) throw schema_error("scene", "scene must be an object");
    for (const auto& l : j.value("locations", Json::array()))
        scene.locations.insert(l.get<std::string>());
    for (const auto& jr : j.value("robots", Json::array())) {
        RobotSpec r;
        r.id = jr.at("id").get<std::string>();
        auto kind = robot_kind_from_string(jr.at("kind").get<std::string>());
        if (!kind)
            throw schema_error("kind",
                               "unknown robot kind '" +
                                   jr.at("kind").get<std::string>() + "'");
        r.kind = *kind;
        r.start_location = jr.at("start_location").get<std::string>();
        scene.robots.push_back(std::move(r));
    }
    for (const auto& jo : j.value("objects", Json::array())) {
        SceneObject o;
        o.id = jo.at("id").get<std::string>();
        o.location = jo.at("location").get<std::string>();
        o.openable = jo.value("openable", false);
        o.open_state = jo.value("open", false);
        scene.objects.push_back(std::move(o));
    }
    scene.instruction = j.value("instruction", "");
    return scene;
}

inline Json to_json(const Goal& goal) {
    if (const auto* g = std::get_if<GoalObjectAt>(&goal))
        return {{"type", "object_at"}, {"object", g->object}, {"location", g->location}};
    if (const auto* g = std::get_if<GoalIsOpen>(&goal))
        return {{"type", "is_open"}, {"object", g->object}, {"open", g->open}};
    if (const auto* g = std::get_if<GoalInteracted>(&goal))
        return {{"type", "interacted"}, {"object", g->object}};
    const auto& g = std::get<GoalHolding>(goal);
    return {{"type", "holding"}, {"robot", g.robot}, {"object", g.object}};
}

inline Goal goal_from_json(const Json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "object_at")
        return GoalObjectAt{j.at("object").get<std::string>(),
                            j.at("location").get<std::string>()};
    if (type == "is_open")
        return GoalIsOpen{j.at("object").get<std::string>(), j.at("open").get<bool>()};
    if (type == "interacted") return GoalInteracted{j.at("object").get<std::string>()};
    if (type == "holding")
        return GoalHolding{j.at("robot").get<std::string>(),
                           j.at("object").get<std::string>()};
    throw schema_error("type", "unknown goal type '" + type + "'");
}

// Canonical plan text, in the answer wire format. Reparses to an equal Plan.
inline Json to_json(const Plan& plan) {
    Json j = Json::array();
    for (const auto& step : plan.steps) {
        Json actions = Json::object();
        for (const auto& [robot, a] : step.actions) {
            Json args = Json::array({std::string(to_string(a.primitive)),
                                     a.destination});
            if (a.extra) args.push_back(*a.extra);
            actions[robot] = std::move(args);
        }
        j.push_back({{"step", step.step}, {"actions", std::move(actions)}});
    }
    return j;
}

inline std::string serialize_plan(const Plan& plan) { return to_json(plan).dump(); }

inline Json to_json(const TrajectorySet& ts) {
    Json groups = Json::array();
    for (const auto& t : ts.trajectories) {
        Json pts = Json::array();
        for (const auto& [x, y] : t.points) pts.push_back({x, y});
        groups.push_back(std::move(pts));
    }
    return groups;
}

inline std::string serialize_trajectories(const TrajectorySet& ts) {
    return to_json(ts).dump();
}

inline TrajectorySet trajectories_from_json(const Json& j, int width, int height) {
    TrajectorySet ts;
    ts.image_width = width;
    ts.image_height = height;
    for (const auto& group : j) {
        Trajectory t;
        for (const auto& pt : group)
            t.points.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
        ts.trajectories.push_back(std::move(t));
    }
    return ts;
}

inline Json to_json(const Sample& s) {
    Json j;
    j["task_id"] = s.task_id;
    j["level"] = s.level;
    j["scene"] = to_json(s.scene);
    j["goals"] = Json::array();
    for (const auto& g : s.goals) j["goals"].push_back(to_json(g));
    if (s.level == 1) {
        Json agents = Json::array();
        for (RobotKind k : s.gt_agents.value())
            agents.push_back(std::string(to_string(k)));
        j["gt_agents"] = std::move(agents);
    } else if (s.level == 2) {
        j["gt_plan"] = to_json(s.gt_plan.value());
        j["n_gt"] = s.n_gt.value();
    } else {
        j["gt_trajectories"] = to_json(s.gt_trajectories.value());
        j["image_size"] = {s.gt_trajectories->image_width,
                           s.gt_trajectories->image_height};
    }
    return j;
}

inline Sample sample_from_json(const Json& j) {
    Sample s;
    s.task_id = j.at("task_id").get<std::string>();
    if (!j.contains("level")) throw schema_error("level", "missing field 'level'");
    s.level = j.at("level").get<int>();
    if (s.level < 1 || s.level > 3)
        throw schema_error("level", "level must be 1, 2 or 3");
    s.scene = scene_from_json(j.at("scene"));
    for (const auto& jg : j.value("goals", Json::array()))
        s.goals.push_back(goal_from_json(jg));
    if (s.level == 1) {
        if (!j.contains("gt_agents"))
            throw schema_error("gt_agents", "level-1 sample missing 'gt_agents'");
        std::set<RobotKind> agents;
        for (const auto& name : j.at("gt_agents")) {
            auto kind = robot_kind_from_string(name.get<std::string>());
            if (!kind)
                throw schema_error("gt_agents", "unknown robot kind '" +
                                                    name.get<std::string>() + "'");
            agents.insert(*kind);
        }
        s.gt_agents = std::move(agents);
    } else if (s.level == 2) {
        if (!j.contains("gt_plan"))
            throw schema_error("gt_plan", "level-2 sample missing 'gt_plan'");
        if (!j.contains("n_gt"))
            throw schema_error("n_gt", "level-2 sample missing 'n_gt'");
        s.gt_plan = parse_plan(j.at("gt_plan").dump());
        s.n_gt = j.at("n_gt").get<int>();
    } else {
        if (!j.contains("gt_trajectories"))
            throw schema_error("gt_trajectories",
                               "level-3 sample missing 'gt_trajectories'");
        if (!j.contains("image_size"))
            throw schema_error("image_size", "level-3 sample missing 'image_size'");
        s.gt_trajectories =
            trajectories_from_json(j.at("gt_trajectories"),
                                   j.at("image_size").at(0).get<int>(),
                                   j.at("image_size").at(1).get<int>());
    }
    return s;
}

}  // namespace viki
