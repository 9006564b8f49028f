#include "viki/dataset.hpp"
#include "viki/solver.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace viki;

namespace {

Scene delivery_scene() {
    Scene s;
    s.locations = {"start", "counter", "plate"};
    s.robots.push_back({"R1", RobotKind::fetch, "start"});
    s.objects.push_back({"apple", "counter", false, false});
    return s;
}

// Every syntactically possible action for one robot, independent of the
// solver's own candidate generator. Validity is left to check_and_apply.
std::vector<Action> all_possible_actions(const Scene& scene,
                                         const std::string& robot) {
    std::vector<std::string> dests;
    for (const auto& l : scene.locations) dests.push_back(l);
    for (const auto& o : scene.objects) dests.push_back(o.id);
    std::vector<Action> out;
    for (Primitive p : all_primitives) {
        for (const auto& d : dests) {
            if (p == Primitive::Push) {
                for (const auto& r : scene.robots) {
                    Action a{robot, 1, p, d, r.id};
                    out.push_back(a);
                }
            } else {
                out.push_back(Action{robot, 1, p, d, std::nullopt});
            }
        }
    }
    return out;
}

// Exhaustive single-robot DFS: does any feasible goal-achieving action
// sequence of length <= depth exist?
bool exists_plan_within(const Scene& scene, const std::vector<Goal>& goals,
                        const WorldState& state, const std::string& robot,
                        const std::vector<Action>& moves, int depth) {
    bool met = true;
    for (const auto& g : goals)
        if (!goal_satisfied(state, g)) met = false;
    if (met) return true;
    if (depth == 0) return false;
    for (const Action& a : moves) {
        ApplyResult r = check_and_apply(state, robot, a, scene);
        if (std::holds_alternative<ActionError>(r)) continue;
        if (exists_plan_within(scene, goals, std::get<WorldState>(r), robot,
                               moves, depth - 1))
            return true;
    }
    return false;
}

}  // namespace

TEST_CASE("reference_solve finds the five-step delivery") {
    Scene scene = delivery_scene();
    std::vector<Goal> goals = {GoalObjectAt{"apple", "plate"}};
    auto plan = reference_solve(scene, goals, 8);
    REQUIRE(plan.has_value());
    CHECK(plan->length() == 5);
    CHECK(run_plan(scene, *plan, goals).all_goals_met());
}

TEST_CASE("goal satisfied in the initial state yields an empty plan") {
    Scene scene = delivery_scene();
    std::vector<Goal> goals = {GoalObjectAt{"apple", "counter"}};
    auto plan = reference_solve(scene, goals, 4);
    REQUIRE(plan.has_value());
    CHECK(plan->length() == 0);
}

TEST_CASE("unsolvable goal yields no plan") {
    // go2 has no Grasp/Place, so delivery is impossible.
    Scene scene = delivery_scene();
    scene.robots[0].kind = RobotKind::unitree_go2;
    scene.robots[0].id = "R1";
    std::vector<Goal> goals = {GoalObjectAt{"apple", "plate"}};
    CHECK_FALSE(reference_solve(scene, goals, 5).has_value());
}

TEST_CASE("size guard rejects oversized inputs") {
    Scene scene = delivery_scene();
    CHECK_THROWS_AS(reference_solve(scene, {}, 9), std::invalid_argument);
    for (int i = 0; i < 4; ++i)
        scene.robots.push_back({"X" + std::to_string(i), RobotKind::fetch,
                                "start"});
    CHECK_THROWS_AS(reference_solve(scene, {}, 4), std::invalid_argument);
}

TEST_CASE("a tight state cap raises search_budget_exceeded") {
    Scene scene = delivery_scene();
    scene.robots.push_back({"R2", RobotKind::unitree_h1, "plate"});
    std::vector<Goal> goals = {GoalObjectAt{"apple", "plate"}};
    CHECK_THROWS_AS(reference_solve(scene, goals, 8, 10),
                    search_budget_exceeded);
}

TEST_CASE("minimality against exhaustive enumeration on a tiny scene") {
    Scene scene;
    scene.locations = {"a", "b"};
    scene.robots.push_back({"R1", RobotKind::fetch, "a"});
    scene.objects.push_back({"apple", "a", false, false});
    std::vector<Goal> goals = {GoalObjectAt{"apple", "b"}};

    auto plan = reference_solve(scene, goals, 6);
    REQUIRE(plan.has_value());
    int n = plan->length();
    CHECK(n == 4);  // Reach, Grasp, Move b, Place b

    auto moves = all_possible_actions(scene, "R1");
    WorldState start = WorldState::initial(scene);
    CHECK(exists_plan_within(scene, goals, start, "R1", moves, n));
    CHECK_FALSE(exists_plan_within(scene, goals, start, "R1", moves, n - 1));
}

TEST_CASE("oracle plans are sound on random synthetic scenes") {
    for (const Sample& s : gen_synthetic(30, 2024)) {
        if (s.level != 2) continue;
        INFO(s.task_id);
        ExecReport report = run_plan(s.scene, *s.gt_plan, s.goals);
        CHECK(report.all_goals_met());
        CHECK(s.gt_plan->length() == *s.n_gt);
    }
}

TEST_CASE("reference_solve is deterministic") {
    Scene scene = delivery_scene();
    std::vector<Goal> goals = {GoalObjectAt{"apple", "plate"}};
    auto a = reference_solve(scene, goals, 8);
    auto b = reference_solve(scene, goals, 8);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(*a == *b);
}

TEST_CASE("prune_redundant_actions drops rider actions") {
    Scene scene = delivery_scene();
    std::vector<Goal> goals = {GoalObjectAt{"apple", "plate"}};
    auto plan = reference_solve(scene, goals, 8);
    REQUIRE(plan.has_value());

    // Add a harmless extra Interact and confirm pruning removes it again.
    Plan padded = *plan;
    Action extra{"R1", padded.length() + 1, Primitive::Interact, "apple",
                 std::nullopt};
    PlanStep step;
    step.step = padded.length() + 1;
    step.actions.emplace("R1", extra);
    padded.steps.push_back(step);
    REQUIRE(run_plan(scene, padded, goals).all_goals_met());

    Plan pruned = prune_redundant_actions(scene, goals, padded);
    int actions = 0;
    for (const auto& st : pruned.steps) actions += st.actions.size();
    int original = 0;
    for (const auto& st : plan->steps) original += st.actions.size();
    CHECK(actions == original);
    CHECK(run_plan(scene, pruned, goals).all_goals_met());
}

TEST_CASE("every oracle action is load-bearing") {
    for (const Sample& s : gen_synthetic(15, 7)) {
        if (s.level != 2) continue;
        const Plan& gt = *s.gt_plan;
        for (std::size_t si = 0; si < gt.steps.size(); ++si) {
            for (const auto& [robot, a] : gt.steps[si].actions) {
                Plan mutant = gt;
                mutant.steps[si].actions.erase(robot);
                INFO(s.task_id << " step " << si + 1 << " robot " << robot);
                CHECK_FALSE(run_plan(s.scene, mutant, s.goals).all_goals_met());
            }
        }
    }
}
