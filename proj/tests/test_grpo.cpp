#include "viki/grpo.hpp"
#include "viki/toy_suite.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace viki;

namespace {

ToyPolicy two_candidate_policy() {
    ToyPolicy p;
    p.add_task("t", {"good", "bad"});
    return p;
}

double policy_objective(const ToyPolicy& policy, const ToyPolicy& reference,
                        const Group& group, const std::vector<double>& adv,
                        double lambda) {
    return grpo_objective(policy, reference, group, adv, lambda);
}

}  // namespace

TEST_CASE("softmax probabilities are normalized") {
    ToyPolicy p;
    p.add_task("t", {"a", "b", "c"});
    p.head("t").logits = {1.5, -2.0, 0.25};
    auto probs = p.probabilities("t");
    double sum = 0;
    for (double v : probs) sum += v;
    CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THROWS_AS(p.probabilities("missing"), unknown_task_error);
}

TEST_CASE("sft_warmup hand example") {
    ToyPolicy p = two_candidate_policy();
    ToyPolicy after = sft_warmup(p, {{"t", 0}}, 1, 1.0);
    // Uniform start: gradient is (0.5, -0.5), so P(gold) = sigmoid(1).
    CHECK_THAT(after.head("t").logits[0],
               Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(after.head("t").logits[1],
               Catch::Matchers::WithinAbs(-0.5, 1e-12));
    CHECK_THAT(after.probabilities("t")[0],
               Catch::Matchers::WithinAbs(0.7310586, 1e-6));
}

TEST_CASE("sft_warmup on a saturated policy is a no-op") {
    ToyPolicy p = two_candidate_policy();
    p.head("t").logits = {20.0, 0.0};
    ToyPolicy after = sft_warmup(p, {{"t", 0}}, 1, 1.0);
    CHECK(std::abs(after.head("t").logits[0] - 20.0) < 1e-6);
    CHECK(std::abs(after.head("t").logits[1] - 0.0) < 1e-6);
}

TEST_CASE("sft_warmup drives NLL down monotonically") {
    ToySuite suite = build_toy_suite(10, 3);
    ToyPolicy policy = make_toy_policy(suite);
    std::map<std::string, std::size_t> demos;
    for (const auto& t : suite.tasks) demos[t.sample.task_id] = t.gold_index;

    auto nll = [&](const ToyPolicy& p) {
        double sum = 0;
        for (const auto& [task, gold] : demos)
            sum -= std::log(p.probabilities(task)[gold]);
        return sum;
    };
    double prev = nll(policy);
    for (int s = 0; s < 50; ++s) {
        policy = sft_warmup(std::move(policy), demos, 1, 0.5);
        double cur = nll(policy);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    CHECK_THROWS_AS(sft_warmup(two_candidate_policy(), {{"t", 5}}, 1, 1.0),
                    std::invalid_argument);
}

TEST_CASE("sample_group frequencies match the distribution") {
    ToyPolicy p;
    p.add_task("t", {"a", "b", "c", "d"});
    std::mt19937_64 rng(42);
    const int G = 4000;
    Group g = sample_group(p, p, "t", G, rng);
    std::vector<int> counts(4, 0);
    for (std::size_t idx : g.candidate_indices) ++counts[idx];
    // binomial: mean G/4, sigma = sqrt(G * 0.25 * 0.75)
    double sigma = std::sqrt(G * 0.25 * 0.75);
    for (int c : counts)
        CHECK(std::abs(c - G / 4.0) <= 3.0 * sigma);

    // A near-degenerate policy yields identical draws.
    p.head("t").logits = {50.0, 0.0, 0.0, 0.0};
    Group g2 = sample_group(p, p, "t", 5, rng);
    for (std::size_t idx : g2.candidate_indices) CHECK(idx == 0);

    CHECK_THROWS_AS(sample_group(p, p, "t", 1, rng), std::invalid_argument);
}

TEST_CASE("compute_advantages hand values") {
    auto a = compute_advantages({1, 0, 1, 0});
    REQUIRE(a.size() == 4);
    CHECK_THAT(a[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(a[1], Catch::Matchers::WithinAbs(-1.0, 1e-12));
    CHECK_THAT(a[2], Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(a[3], Catch::Matchers::WithinAbs(-1.0, 1e-12));

    auto b = compute_advantages({1, 0, 0, 0, 0});
    CHECK_THAT(b[0], Catch::Matchers::WithinAbs(2.0, 1e-12));
    for (int i = 1; i < 5; ++i)
        CHECK_THAT(b[i], Catch::Matchers::WithinAbs(-0.5, 1e-12));

    // epsilon-guarded: only floating-point residue divided by the guard
    auto zero = compute_advantages({0.7, 0.7, 0.7});
    for (double v : zero) CHECK(std::abs(v) < 1e-6);
    auto zero2 = compute_advantages({0.5, 0.5, 0.5, 0.5});
    for (double v : zero2) CHECK(v == 0.0);

    CHECK_THROWS_AS(compute_advantages({1.0}), std::invalid_argument);
}

TEST_CASE("advantage standardization properties") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> rewards;
        int g = 2 + static_cast<int>(rng() % 7);
        for (int i = 0; i < g; ++i)
            rewards.push_back(static_cast<double>(rng() % 1000) / 999.0);
        auto adv = compute_advantages(rewards);

        double mean = 0;
        for (double v : adv) mean += v;
        mean /= adv.size();
        CHECK(std::abs(mean) < 1e-12);

        double var = 0;
        for (double v : adv) var += v * v;
        var /= adv.size();
        bool degenerate = true;
        for (double r : rewards)
            if (std::abs(r - rewards[0]) > 1e-9) degenerate = false;
        if (!degenerate) CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);

        // Scaling rewards by c > 0 leaves advantages unchanged.
        std::vector<double> scaled;
        for (double r : rewards) scaled.push_back(3.7 * r);
        auto adv2 = compute_advantages(scaled);
        for (std::size_t i = 0; i < adv.size(); ++i)
            CHECK(std::abs(adv[i] - adv2[i]) < 1e-9);
    }
}

TEST_CASE("categorical KL basics") {
    std::vector<double> p = {0.7, 0.2, 0.1};
    CHECK(categorical_kl(p, p) == 0.0);
    CHECK(categorical_kl(p, {0.1, 0.2, 0.7}) > 0.0);
    CHECK_THROWS_AS(categorical_kl(p, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("grpo_step raises the probability of the rewarded candidate") {
    ToyPolicy policy = two_candidate_policy();
    ToyPolicy reference = policy;
    std::mt19937_64 rng(1);
    // Draw until the group mixes both candidates, or advantages vanish.
    Group g;
    bool both_seen = false;
    for (int tries = 0; tries < 50 && !both_seen; ++tries) {
        g = sample_group(policy, reference, "t", 4, rng);
        for (std::size_t idx : g.candidate_indices)
            if (idx != g.candidate_indices[0]) both_seen = true;
    }
    REQUIRE(both_seen);
    std::vector<double> rewards;
    for (std::size_t idx : g.candidate_indices)
        rewards.push_back(idx == 0 ? 1.0 : 0.0);
    auto adv = compute_advantages(rewards);
    double before = policy.probabilities("t")[0];
    grpo_step(policy, reference, g, adv, 0.0, 0.1);
    CHECK(policy.probabilities("t")[0] > before);
}

TEST_CASE("analytic gradient matches central finite differences") {
    std::mt19937_64 rng(55);
    const double h = 1e-5;
    for (int rep = 0; rep < 100; ++rep) {
        ToyPolicy policy;
        policy.add_task("t", {"a", "b", "c", "d", "e", "f"});
        ToyPolicy reference = policy;
        for (auto& l : policy.head("t").logits)
            l = static_cast<double>(rng() % 2001) / 1000.0 - 1.0;
        for (auto& l : reference.head("t").logits)
            l = static_cast<double>(rng() % 2001) / 1000.0 - 1.0;

        Group g = sample_group(policy, reference, "t", 5, rng);
        std::vector<double> rewards;
        for (std::size_t i = 0; i < 5; ++i)
            rewards.push_back(static_cast<double>(rng() % 1000) / 999.0);
        auto adv = compute_advantages(rewards);
        double lambda = 0.01;

        // Recover the analytic gradient from a tiny update step.
        const double lr = 1e-7;
        ToyPolicy stepped = policy;
        grpo_step(stepped, reference, g, adv, lambda, lr);
        for (std::size_t j = 0; j < 6; ++j) {
            double analytic =
                (stepped.head("t").logits[j] - policy.head("t").logits[j]) / lr;
            ToyPolicy plus = policy, minus = policy;
            plus.head("t").logits[j] += h;
            minus.head("t").logits[j] -= h;
            double numeric = (policy_objective(plus, reference, g, adv, lambda) -
                              policy_objective(minus, reference, g, adv, lambda)) /
                             (2.0 * h);
            double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
            INFO("rep " << rep << " j " << j);
            CHECK(std::abs(analytic - numeric) / scale < 1e-4);
        }
    }
}

TEST_CASE("huge KL coefficient anchors the policy to the reference") {
    ToyPolicy policy = two_candidate_policy();
    ToyPolicy reference = policy;  // identical: KL gradient must vanish
    std::mt19937_64 rng(2);
    Group g = sample_group(policy, reference, "t", 4, rng);
    std::vector<double> adv = {0, 0, 0, 0};  // isolate the KL term
    grpo_step(policy, reference, g, adv, 1e6, 0.1);
    for (double l : policy.head("t").logits) CHECK(std::abs(l) < 1e-9);
}

TEST_CASE("constant rewards leave training a no-op") {
    ToySuite suite = build_toy_suite(3, 1);
    ToyPolicy policy = make_toy_policy(suite);
    TrainConfig cfg;
    cfg.iterations = 20;
    cfg.seed = 5;
    RewardFn constant = [](const std::string&, const std::string&) {
        return std::pair<double, int>{0.5, 1};
    };
    TrainResult r = train(policy, suite.task_ids(), constant, cfg);
    for (const auto& t : suite.tasks)
        for (double l : r.policy.head(t.sample.task_id).logits)
            CHECK(std::abs(l) < 1e-6);
}

TEST_CASE("training curve export") {
    std::vector<CurvePoint> curve = {{0, 0.25, 0.5, 0.0}, {1, 0.5, 0.75, 0.01}};
    std::string csv = curve_to_csv(curve);
    CHECK(csv.rfind("iteration,mean_reward,mean_format_reward,kl\n", 0) == 0);
    CHECK(csv.find("0,0.25,0.5,0") != std::string::npos);
    CHECK(csv.find("1,0.5,0.75,0.01") != std::string::npos);
}
