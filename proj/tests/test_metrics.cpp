#include "viki/metrics.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace viki;

namespace {

Trajectory traj(std::initializer_list<std::pair<double, double>> pts) {
    Trajectory t;
    t.points = pts;
    return t;
}

double dist(const std::pair<double, double>& a,
            const std::pair<double, double>& b) {
    return std::hypot(a.first - b.first, a.second - b.second);
}

// Explicit enumeration of every monotone coupling path: min over paths of the
// max pair distance. Exponential, only for tiny inputs.
void enumerate_paths(const Trajectory& a, const Trajectory& b, std::size_t i,
                     std::size_t j, double running_max, double& best) {
    running_max = std::max(running_max, dist(a.points[i], b.points[j]));
    if (running_max >= best) return;
    if (i + 1 == a.points.size() && j + 1 == b.points.size()) {
        best = running_max;
        return;
    }
    if (i + 1 < a.points.size())
        enumerate_paths(a, b, i + 1, j, running_max, best);
    if (j + 1 < b.points.size())
        enumerate_paths(a, b, i, j + 1, running_max, best);
    if (i + 1 < a.points.size() && j + 1 < b.points.size())
        enumerate_paths(a, b, i + 1, j + 1, running_max, best);
}

double dfd_brute_force(const Trajectory& a, const Trajectory& b) {
    double best = std::numeric_limits<double>::infinity();
    enumerate_paths(a, b, 0, 0, 0.0, best);
    return best;
}

Trajectory random_traj(std::mt19937_64& rng, std::size_t max_len) {
    Trajectory t;
    std::size_t len = 1 + rng() % max_len;
    for (std::size_t i = 0; i < len; ++i)
        t.points.emplace_back(static_cast<double>(rng() % 1001),
                              static_cast<double>(rng() % 1001));
    return t;
}

}  // namespace

TEST_CASE("rmse hand values") {
    CHECK(rmse(traj({{1, 2}, {3, 4}}), traj({{1, 2}, {3, 4}})) == 0.0);
    CHECK_THAT(rmse(traj({{0, 0}, {3, 4}}), traj({{0, 0}, {0, 0}})),
               Catch::Matchers::WithinAbs(3.5355339, 1e-6));
    // Length mismatch: pred resamples to the gt length first.
    CHECK_THAT(rmse(traj({{0, 0}, {2, 0}, {4, 0}}), traj({{0, 0}, {4, 0}})),
               Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THROWS_AS(rmse(traj({}), traj({{0, 0}})), empty_trajectory_error);
    CHECK_THROWS_AS(rmse(traj({{0, 0}}), traj({})), empty_trajectory_error);
}

TEST_CASE("hausdorff hand values") {
    CHECK(hausdorff(traj({{0, 0}, {1, 0}}), traj({{0, 0}, {1, 0}})) == 0.0);
    CHECK_THAT(hausdorff(traj({{0, 0}, {1, 0}}), traj({{0, 0}})),
               Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(hausdorff(traj({{0, 0}}), traj({{3, 4}})),
               Catch::Matchers::WithinAbs(5.0, 1e-12));
    CHECK_THROWS_AS(hausdorff(traj({}), traj({{0, 0}})),
                    empty_trajectory_error);
}

TEST_CASE("discrete frechet hand values") {
    CHECK_THAT(discrete_frechet(traj({{0, 0}, {1, 0}, {2, 0}}),
                                traj({{0, 1}, {1, 1}, {2, 1}})),
               Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(discrete_frechet(traj({{0, 0}}), traj({{3, 4}})),
               Catch::Matchers::WithinAbs(5.0, 1e-12));
    CHECK_THROWS_AS(discrete_frechet(traj({}), traj({{0, 0}})),
                    empty_trajectory_error);
}

TEST_CASE("discrete frechet equals coupling enumeration") {
    std::mt19937_64 rng(31337);
    for (int rep = 0; rep < 300; ++rep) {
        Trajectory a = random_traj(rng, 6);
        Trajectory b = random_traj(rng, 6);
        INFO("rep " << rep);
        CHECK_THAT(discrete_frechet(a, b),
                   Catch::Matchers::WithinAbs(dfd_brute_force(a, b), 1e-9));
    }
}

TEST_CASE("normalize_distance") {
    CHECK_THAT(normalize_distance(400, 640, 480),
               Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK(normalize_distance(0, 640, 480) == 0.0);
    CHECK(normalize_distance(900, 640, 480) == 1.0);  // clamp at the diagonal
    CHECK_THROWS_AS(normalize_distance(1, 0, 480), non_positive_image_error);
    CHECK_THROWS_AS(normalize_distance(1, 640, -1), non_positive_image_error);
}

TEST_CASE("metric properties on random inputs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> shift(-500.0, 500.0);
    for (int rep = 0; rep < 200; ++rep) {
        Trajectory a = random_traj(rng, 8);
        Trajectory b = random_traj(rng, 8);

        INFO("rep " << rep);

        CHECK(rmse(a, a) == 0.0);
        CHECK(hausdorff(a, a) == 0.0);
        CHECK(discrete_frechet(a, a) == 0.0);

        CHECK_THAT(hausdorff(a, b),
                   Catch::Matchers::WithinAbs(hausdorff(b, a), 1e-12));
        CHECK_THAT(discrete_frechet(a, b),
                   Catch::Matchers::WithinAbs(discrete_frechet(b, a), 1e-12));

        // DFD dominates HD on the same point sets.
        CHECK(discrete_frechet(a, b) >= hausdorff(a, b) - 1e-12);

        double dx = shift(rng), dy = shift(rng);
        Trajectory at = a, bt = b;
        for (auto& p : at.points) {
            p.first += dx;
            p.second += dy;
        }
        for (auto& p : bt.points) {
            p.first += dx;
            p.second += dy;
        }
        CHECK_THAT(rmse(at, bt), Catch::Matchers::WithinAbs(rmse(a, b), 1e-9));
        CHECK_THAT(hausdorff(at, bt),
                   Catch::Matchers::WithinAbs(hausdorff(a, b), 1e-9));
        CHECK_THAT(discrete_frechet(at, bt),
                   Catch::Matchers::WithinAbs(discrete_frechet(a, b), 1e-9));
    }
}
