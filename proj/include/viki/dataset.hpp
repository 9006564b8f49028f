#pragma once

#include "viki/domain.hpp"
#include "viki/metrics.hpp"
#include "viki/parse.hpp"
#include "viki/rewards.hpp"
#include "viki/serialize.hpp"
#include "viki/solver.hpp"
#include "viki/world.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace viki {

class io_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class dataset_error : public std::runtime_error {
  public:
    dataset_error(int line, const std::string& field, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line),
          field_(field) {}
    int line() const { return line_; }
    const std::string& field() const { return field_; }

  private:
    int line_;
    std::string field_;
};

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

inline std::vector<Sample> load_dataset(const std::string& path) {
    std::vector<Sample> samples;
    std::map<std::string, int> seen;  // task_id -> line
    int line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const std::exception& e) {
            throw dataset_error(line_no, "", std::string("invalid JSON: ") + e.what());
        }
        Sample s;
        try {
            s = sample_from_json(j);
        } catch (const schema_error& e) {
            throw dataset_error(line_no, e.field(), e.what());
        } catch (const std::exception& e) {
            throw dataset_error(line_no, "", e.what());
        }
        auto [it, inserted] = seen.emplace(s.task_id, line_no);
        if (!inserted)
            throw dataset_error(line_no, "task_id",
                                "duplicate task_id '" + s.task_id + "' (lines " +
                                    std::to_string(it->second) + " and " +
                                    std::to_string(line_no) + ")");
        samples.push_back(std::move(s));
    }
    return samples;
}

inline std::string dataset_to_jsonl(const std::vector<Sample>& samples) {
    std::string out;
    for (const auto& s : samples) {
        out += to_json(s).dump();
        out += '\n';
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << content;
}

// -------- synthetic data generation --------

namespace detail {

inline std::size_t draw(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);  // n is tiny, bias negligible
}

inline const std::vector<std::string>& location_pool() {
    static const std::vector<std::string> pool = {
        "counter", "table", "sink", "shelf", "stove", "bin", "floor"};
    return pool;
}

inline const std::vector<std::string>& object_pool() {
    static const std::vector<std::string> pool = {"apple",  "banana", "mug",
                                                  "plate",  "box",    "bottle"};
    return pool;
}

// Mobile manipulators keep generated scenes solvable.
inline const std::vector<RobotKind>& manipulator_kinds() {
    static const std::vector<RobotKind> kinds = {
        RobotKind::fetch, RobotKind::unitree_h1, RobotKind::stompy};
    return kinds;
}

struct SceneDraft {
    Scene scene;
    std::vector<Goal> goals;
};

inline SceneDraft draw_scene(std::mt19937_64& rng, int scene_index) {
    SceneDraft draft;
    Scene& scene = draft.scene;
    std::string suffix = "_s" + std::to_string(scene_index);

    std::size_t n_locations = 3 + draw(rng, 2);
    const auto& locs = location_pool();
    std::size_t loc_start = draw(rng, locs.size());
    std::vector<std::string> locations;
    for (std::size_t i = 0; i < n_locations; ++i)
        locations.push_back(locs[(loc_start + i) % locs.size()]);
    for (const auto& l : locations) scene.locations.insert(l);

    RobotSpec r1;
    r1.id = "R1";
    r1.kind = manipulator_kinds()[draw(rng, manipulator_kinds().size())];
    r1.start_location = locations[draw(rng, locations.size())];
    scene.robots.push_back(r1);
    RobotSpec r2;
    r2.id = "R2";
    r2.kind = all_robot_kinds[draw(rng, all_robot_kinds.size())];
    r2.start_location = locations[draw(rng, locations.size())];
    scene.robots.push_back(r2);

    std::size_t n_objects = 1 + draw(rng, 2);
    const auto& objs = object_pool();
    std::size_t obj_start = draw(rng, objs.size());
    for (std::size_t i = 0; i < n_objects; ++i) {
        SceneObject o;
        o.id = objs[(obj_start + i) % objs.size()] + suffix;
        o.location = locations[draw(rng, locations.size())];
        scene.objects.push_back(o);
    }
    if (draw(rng, 3) == 0) {
        SceneObject cabinet;
        cabinet.id = "cabinet" + suffix;
        cabinet.location = locations[draw(rng, locations.size())];
        cabinet.openable = true;
        cabinet.open_state = false;
        scene.objects.push_back(cabinet);
    }

    const SceneObject& target = scene.objects[draw(rng, scene.objects.size())];
    std::size_t goal_kind = draw(rng, 4);
    std::ostringstream instruction;
    if (goal_kind == 0 && !target.openable) {
        std::string dest;
        do {
            dest = locations[draw(rng, locations.size())];
        } while (dest == target.location);
        draft.goals.push_back(GoalObjectAt{target.id, dest});
        instruction << "Deliver " << target.id << " to the " << dest << ".";
    } else if (goal_kind == 1 && target.openable) {
        draft.goals.push_back(GoalIsOpen{target.id, !target.open_state});
        instruction << (target.open_state ? "Close" : "Open") << " the "
                    << target.id << ".";
    } else if (goal_kind == 2 && !target.openable) {
        draft.goals.push_back(GoalHolding{"R1", target.id});
        instruction << "Pick up " << target.id << " with R1.";
    } else {
        draft.goals.push_back(GoalInteracted{target.id});
        instruction << "Interact with " << target.id << ".";
    }
    scene.instruction = instruction.str();
    return draft;
}

inline Trajectory synth_trajectory(std::mt19937_64& rng, int width, int height,
                                   int points) {
    auto coord = [&](int span) {
        return static_cast<double>(10 + draw(rng, static_cast<std::size_t>(span - 20)));
    };
    double x0 = coord(width), y0 = coord(height);
    double x1 = coord(width), y1 = coord(height);
    double bend_x = (x0 + x1) / 2.0 + static_cast<double>(draw(rng, 41)) - 20.0;
    double bend_y = (y0 + y1) / 2.0 + static_cast<double>(draw(rng, 41)) - 20.0;
    Trajectory t;
    for (int i = 0; i < points; ++i) {
        double u = static_cast<double>(i) / static_cast<double>(points - 1);
        double x, y;
        if (u <= 0.5) {  // piecewise-linear through the bend point
            double v = u / 0.5;
            x = x0 + v * (bend_x - x0);
            y = y0 + v * (bend_y - y0);
        } else {
            double v = (u - 0.5) / 0.5;
            x = bend_x + v * (x1 - bend_x);
            y = bend_y + v * (y1 - bend_y);
        }
        t.points.emplace_back(std::round(x), std::round(y));
    }
    return t;
}

}  // namespace detail

// Deterministic desk-scale dataset: each scene yields one sample per level.
// Every L2 sample is solvable by construction, with n_gt from the oracle.
inline std::vector<Sample> gen_synthetic(int n_scenes, std::uint64_t seed,
                                         int max_plan_steps = 6,
                                         int retries_per_scene = 60) {
    if (n_scenes < 1) throw std::invalid_argument("n_scenes must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<Sample> out;

    for (int i = 0; i < n_scenes; ++i) {
        std::optional<detail::SceneDraft> draft;
        std::optional<Plan> plan;
        for (int attempt = 0; attempt < retries_per_scene && !plan; ++attempt) {
            detail::SceneDraft d = detail::draw_scene(rng, i);
            try {
                plan = reference_solve(d.scene, d.goals, max_plan_steps);
            } catch (const search_budget_exceeded&) {
                plan.reset();
            }
            if (plan && plan->length() == 0) plan.reset();  // trivially satisfied
            if (plan) draft = std::move(d);
        }
        if (!plan)
            throw search_budget_exceeded(
                "gen_synthetic: no solvable scene found within retry budget");

        char id[32];
        std::snprintf(id, sizeof(id), "scene%04d", i);

        std::set<RobotKind> used_kinds;
        for (const auto& step : plan->steps)
            for (const auto& [robot, a] : step.actions)
                used_kinds.insert(draft->scene.find_robot(robot)->kind);

        Sample l1;
        l1.task_id = std::string(id) + "_L1";
        l1.level = 1;
        l1.scene = draft->scene;
        l1.goals = draft->goals;
        l1.gt_agents = used_kinds;
        out.push_back(l1);

        Sample l2;
        l2.task_id = std::string(id) + "_L2";
        l2.level = 2;
        l2.scene = draft->scene;
        l2.goals = draft->goals;
        l2.gt_plan = *plan;
        l2.n_gt = plan->length();
        out.push_back(l2);

        Sample l3;
        l3.task_id = std::string(id) + "_L3";
        l3.level = 3;
        l3.scene = draft->scene;
        l3.goals = draft->goals;
        TrajectorySet ts;
        ts.image_width = 640;
        ts.image_height = 480;
        ts.trajectories.push_back(detail::synth_trajectory(rng, 640, 480, 5));
        ts.trajectories.push_back(detail::synth_trajectory(rng, 640, 480, 5));
        l3.gt_trajectories = std::move(ts);
        out.push_back(l3);
    }
    return out;
}

// -------- batch evaluation --------

struct EvalOptions {
    bool step_penalty = true;
    int jobs = 1;
};

struct SampleResult {
    std::string task_id;
    int level = 1;
    bool missing = false;
    bool parse_failed = false;
    std::string error;
    bool correct = false;                  // L1/L2 accuracy indicator
    std::optional<int> delta_steps;       // L2, feasible goal-achieving plans
    std::optional<double> rmse_px;        // L3 raw-pixel means over agents
    std::optional<double> hd_px;
    std::optional<double> dfd_px;
};

struct EvalReport {
    int total = 0;
    int missing = 0;
    int parse_failures = 0;
    double accuracy_pct = 0.0;             // L1 / L2
    std::optional<double> mean_delta_steps;
    std::optional<double> mean_rmse;       // L3
    std::optional<double> mean_hd;
    std::optional<double> mean_dfd;
    std::optional<double> mean_avg;
    std::vector<SampleResult> samples;
};

inline std::map<std::string, std::string> load_predictions(const std::string& path) {
    std::map<std::string, std::string> preds;
    int line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const std::exception& e) {
            throw dataset_error(line_no, "", std::string("invalid JSON: ") + e.what());
        }
        if (!j.contains("task_id") || !j.contains("response"))
            throw dataset_error(line_no, "task_id",
                                "prediction needs 'task_id' and 'response'");
        preds[j.at("task_id").get<std::string>()] =
            j.at("response").get<std::string>();
    }
    return preds;
}

namespace detail {

// Predictions may come tagged or as a bare answer.
inline std::string answer_of(const std::string& response) {
    TaggedResponse tagged = extract_tags(response);
    return tagged.well_formed ? tagged.answer : response;
}

inline SampleResult evaluate_one(const Sample& sample, const std::string* response,
                                 const EvalOptions& opts) {
    SampleResult r;
    r.task_id = sample.task_id;
    r.level = sample.level;
    if (!response) {
        r.missing = true;
        r.error = "missing prediction";
        return r;
    }
    try {
        if (sample.level == 1) {
            r.correct = parse_agent_set(answer_of(*response)) == *sample.gt_agents;
        } else if (sample.level == 2) {
            Plan plan = parse_plan(answer_of(*response));
            ExecReport report = run_plan(sample.scene, plan, sample.goals);
            bool achieved = report.all_goals_met();
            r.correct =
                achieved && (!opts.step_penalty || plan.length() <= *sample.n_gt);
            if (achieved) r.delta_steps = plan.length() - *sample.n_gt;
        } else {
            TrajectorySet pred = parse_trajectories(answer_of(*response));
            const TrajectorySet& gt = *sample.gt_trajectories;
            if (pred.trajectories.size() != gt.trajectories.size())
                throw agent_count_mismatch_error();
            double sr = 0, sh = 0, sd = 0;
            for (std::size_t k = 0; k < gt.trajectories.size(); ++k) {
                sr += rmse(pred.trajectories[k], gt.trajectories[k]);
                sh += hausdorff(pred.trajectories[k], gt.trajectories[k]);
                sd += discrete_frechet(pred.trajectories[k], gt.trajectories[k]);
            }
            double n = static_cast<double>(gt.trajectories.size());
            r.rmse_px = sr / n;
            r.hd_px = sh / n;
            r.dfd_px = sd / n;
        }
    } catch (const std::exception& e) {
        r.parse_failed = true;
        r.error = e.what();
    }
    return r;
}

}  // namespace detail

inline EvalReport evaluate(const std::vector<Sample>& samples,
                           const std::map<std::string, std::string>& predictions,
                           int level, const EvalOptions& opts = {}) {
    std::vector<const Sample*> selected;
    for (const auto& s : samples)
        if (s.level == level) selected.push_back(&s);

    EvalReport report;
    report.total = static_cast<int>(selected.size());
    report.samples.resize(selected.size());

    auto eval_one = [&](std::size_t i) {
        auto it = predictions.find(selected[i]->task_id);
        const std::string* resp = it == predictions.end() ? nullptr : &it->second;
        report.samples[i] = detail::evaluate_one(*selected[i], resp, opts);
    };
    if (opts.jobs <= 1) {
        for (std::size_t i = 0; i < selected.size(); ++i) eval_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < opts.jobs; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < selected.size();
                     i = next.fetch_add(1))
                    eval_one(i);
            });
        for (auto& th : pool) th.join();
    }

    int correct = 0, delta_n = 0, metric_n = 0;
    double delta_sum = 0, rmse_sum = 0, hd_sum = 0, dfd_sum = 0;
    for (const auto& r : report.samples) {
        report.missing += r.missing;
        report.parse_failures += r.parse_failed;
        correct += r.correct;
        if (r.delta_steps) {
            delta_sum += *r.delta_steps;
            ++delta_n;
        }
        if (r.rmse_px) {
            rmse_sum += *r.rmse_px;
            hd_sum += *r.hd_px;
            dfd_sum += *r.dfd_px;
            ++metric_n;
        }
    }
    if (report.total > 0)
        report.accuracy_pct = 100.0 * correct / static_cast<double>(report.total);
    if (delta_n > 0) report.mean_delta_steps = delta_sum / delta_n;
    if (metric_n > 0) {
        report.mean_rmse = rmse_sum / metric_n;
        report.mean_hd = hd_sum / metric_n;
        report.mean_dfd = dfd_sum / metric_n;
        report.mean_avg = (*report.mean_rmse + *report.mean_hd + *report.mean_dfd) / 3.0;
    }
    return report;
}

inline Json to_json(const EvalReport& report) {
    Json j;
    j["total"] = report.total;
    j["missing"] = report.missing;
    j["parse_failures"] = report.parse_failures;
    j["accuracy_pct"] = report.accuracy_pct;
    if (report.mean_delta_steps) j["mean_delta_steps"] = *report.mean_delta_steps;
    if (report.mean_rmse) {
        j["mean_rmse"] = *report.mean_rmse;
        j["mean_hd"] = *report.mean_hd;
        j["mean_dfd"] = *report.mean_dfd;
        j["mean_avg"] = *report.mean_avg;
    }
    j["samples"] = Json::array();
    for (const auto& r : report.samples) {
        Json js;
        js["task_id"] = r.task_id;
        js["level"] = r.level;
        if (r.missing) js["missing"] = true;
        if (r.parse_failed) js["parse_failed"] = true;
        if (!r.error.empty()) js["error"] = r.error;
        if (r.level != 3) js["correct"] = r.correct;
        if (r.delta_steps) js["delta_steps"] = *r.delta_steps;
        if (r.rmse_px) {
            js["rmse"] = *r.rmse_px;
            js["hd"] = *r.hd_px;
            js["dfd"] = *r.dfd_px;
        }
        j["samples"].push_back(std::move(js));
    }
    return j;
}

inline std::string report_to_csv(const EvalReport& report) {
    std::string out = "task_id,level,correct,delta_steps,rmse,hd,dfd,error\n";
    for (const auto& r : report.samples) {
        std::ostringstream line;
        line << r.task_id << ',' << r.level << ',' << (r.correct ? 1 : 0) << ',';
        if (r.delta_steps) line << *r.delta_steps;
        line << ',';
        if (r.rmse_px) line << *r.rmse_px;
        line << ',';
        if (r.hd_px) line << *r.hd_px;
        line << ',';
        if (r.dfd_px) line << *r.dfd_px;
        line << ',' << (r.error.empty() ? "" : "\"" + r.error + "\"") << '\n';
        out += line.str();
    }
    return out;
}

}  // namespace viki
