#include "viki/domain.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>

using namespace viki;

TEST_CASE("capability table matches the published robot APIs") {
    // Full 6x8 snapshot, keyed by (kind, primitive).
    const std::map<RobotKind, std::set<std::string>> expected = {
        {RobotKind::panda, {"Reach", "Grasp", "Place", "Open", "Close", "Interact"}},
        {RobotKind::fetch,
         {"Move", "Reach", "Grasp", "Place", "Open", "Close", "Interact"}},
        {RobotKind::unitree_go2, {"Move", "Push", "Interact"}},
        {RobotKind::unitree_h1,
         {"Move", "Reach", "Grasp", "Place", "Open", "Close", "Interact"}},
        {RobotKind::stompy,
         {"Move", "Reach", "Grasp", "Place", "Open", "Close", "Interact"}},
        {RobotKind::anymal_c, {"Move", "Push", "Interact"}},
    };
    for (RobotKind k : all_robot_kinds) {
        const auto& allowed = expected.at(k);
        for (Primitive p : all_primitives) {
            INFO(to_string(k) << " / " << to_string(p));
            CHECK(supports_primitive(k, p) ==
                  (allowed.count(std::string(to_string(p))) == 1));
        }
    }
}

TEST_CASE("capability spot checks") {
    CHECK(supports_primitive(RobotKind::anymal_c, Primitive::Push));
    CHECK_FALSE(supports_primitive(RobotKind::panda, Primitive::Move));
    CHECK_FALSE(supports_primitive(RobotKind::unitree_go2, Primitive::Grasp));
}

TEST_CASE("end effector counts") {
    CHECK(end_effector_count(RobotKind::panda) == 1);
    CHECK(end_effector_count(RobotKind::fetch) == 1);
    CHECK(end_effector_count(RobotKind::unitree_go2) == 0);
    CHECK(end_effector_count(RobotKind::unitree_h1) == 2);
    CHECK(end_effector_count(RobotKind::stompy) == 2);
    CHECK(end_effector_count(RobotKind::anymal_c) == 0);
}

TEST_CASE("primitive arity") {
    CHECK(primitive_arity(Primitive::Push) == 2);
    for (Primitive p : all_primitives)
        if (p != Primitive::Push) CHECK(primitive_arity(p) == 1);
}

TEST_CASE("panda is the only immobile kind") {
    for (RobotKind k : all_robot_kinds)
        CHECK(is_mobile(k) == (k != RobotKind::panda));
}

TEST_CASE("name round trips") {
    for (RobotKind k : all_robot_kinds)
        CHECK(robot_kind_from_string(to_string(k)) == k);
    for (Primitive p : all_primitives)
        CHECK(primitive_from_string(to_string(p)) == p);
    CHECK_FALSE(robot_kind_from_string("robocop").has_value());
    CHECK_FALSE(primitive_from_string("Fly").has_value());
}

namespace {

Scene kitchen_scene() {
    Scene s;
    s.locations = {"counter", "table"};
    s.robots.push_back({"R1", RobotKind::fetch, "counter"});
    s.robots.push_back({"R2", RobotKind::unitree_h1, "table"});
    s.objects.push_back({"apple", "counter", false, false});
    s.instruction = "move the apple";
    return s;
}

}  // namespace

TEST_CASE("validate_scene") {
    SECTION("well-formed scene has no violations") {
        CHECK(validate_scene(kitchen_scene()).empty());
    }
    SECTION("duplicate robot id") {
        Scene s = kitchen_scene();
        s.robots.push_back({"R1", RobotKind::stompy, "table"});
        auto v = validate_scene(s);
        REQUIRE(v.size() == 1);
        CHECK(v[0] == SceneViolation{"DuplicateRobotId", "R1"});
    }
    SECTION("object at undeclared location") {
        Scene s = kitchen_scene();
        s.objects.push_back({"ghost", "void", false, false});
        auto v = validate_scene(s);
        REQUIRE(v.size() == 1);
        CHECK(v[0] == SceneViolation{"UnknownLocation", "void"});
    }
    SECTION("idempotent and order-insensitive") {
        Scene s = kitchen_scene();
        s.robots.push_back({"R1", RobotKind::stompy, "table"});
        s.objects.push_back({"ghost", "void", false, false});
        auto first = validate_scene(s);
        CHECK(validate_scene(s) == first);

        Scene shuffled = s;
        std::mt19937 rng(7);
        std::shuffle(shuffled.robots.begin(), shuffled.robots.end(), rng);
        std::shuffle(shuffled.objects.begin(), shuffled.objects.end(), rng);
        auto second = validate_scene(shuffled);
        auto sort_violations = [](std::vector<SceneViolation> v) {
            std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
                return std::tie(a.code, a.detail) < std::tie(b.code, b.detail);
            });
            return v;
        };
        CHECK(sort_violations(first) == sort_violations(second));
    }
}

TEST_CASE("validate_goals flags dangling references") {
    Scene s = kitchen_scene();
    std::vector<Goal> goals = {GoalObjectAt{"apple", "table"},
                               GoalHolding{"R9", "apple"},
                               GoalInteracted{"sink"}};
    auto v = validate_goals(s, goals);
    REQUIRE(v.size() == 2);
    CHECK(v[0] == SceneViolation{"UnknownRobot", "R9"});
    CHECK(v[1] == SceneViolation{"UnknownObject", "sink"});
}
