// Command-line surface: dataset generation, plan checking, response scoring,
// batch evaluation, pass@k refinement runs, and the toy GRPO demo.

#include "viki/config.hpp"
#include "viki/dataset.hpp"
#include "viki/http_client.hpp"
#include "viki/refine.hpp"
#include "viki/toy_suite.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailures = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw viki::io_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const viki::Sample& find_sample(const std::vector<viki::Sample>& samples,
                                const std::string& task_id) {
    for (const auto& s : samples)
        if (s.task_id == task_id) return s;
    throw viki::io_error("task '" + task_id + "' not found in dataset");
}

viki::Json exec_report_json(const viki::ExecReport& report) {
    viki::Json j;
    j["feasible"] = report.feasible;
    if (report.failed_at) {
        const auto& e = *report.failed_at;
        j["failed_at"] = {{"step", e.step},
                          {"robot", e.action.robot},
                          {"primitive", std::string(to_string(e.action.primitive))},
                          {"destination", e.action.destination},
                          {"code", std::string(to_string(e.code))}};
    }
    j["goals"] = viki::Json::array();
    for (const auto& [goal, ok] : report.goal_results)
        j["goals"].push_back({{"goal", viki::to_json(goal)}, {"satisfied", ok}});
    j["feedback"] = viki::make_feedback(report);
    return j;
}

std::unique_ptr<viki::GeneratorClient> make_generator(
    const std::string& mock_rules_path, bool use_http, const viki::AppConfig& cfg) {
    if (!mock_rules_path.empty()) {
        viki::Json j = viki::Json::parse(read_file(mock_rules_path));
        std::vector<viki::MockGenerator::Rule> rules;
        for (const auto& r : j.value("rules", viki::Json::array()))
            rules.push_back({r.at("trigger").get<std::string>(),
                             r.at("response").get<std::string>()});
        return std::make_unique<viki::MockGenerator>(std::move(rules),
                                                     j.value("default", ""));
    }
    if (use_http) return std::make_unique<viki::HttpGenerator>(cfg.generator);
    throw viki::io_error("specify --mock <rules.json> or --http");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification and reward toolkit for embodied multi-agent plans"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    int gen_scenes = 10;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "dataset.jsonl";
    gen->add_option("--scenes", gen_scenes, "number of scenes")
        ->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "rng seed");
    gen->add_option("--out", gen_out, "output JSONL path");

    // check
    auto* check = app.add_subcommand("check", "execute a plan against a scene");
    std::string check_dataset, check_task, check_plan;
    check->add_option("--dataset", check_dataset)->required();
    check->add_option("--task-id", check_task)->required();
    check->add_option("--plan", check_plan, "file holding the plan answer text")
        ->required();

    // score
    auto* score = app.add_subcommand("score", "reward breakdown for one response");
    std::string score_dataset, score_task, score_response_path;
    std::string score_penalty = "on";
    score->add_option("--dataset", score_dataset)->required();
    score->add_option("--task-id", score_task)->required();
    score->add_option("--response", score_response_path, "file with raw response")
        ->required();
    score->add_option("--step-penalty", score_penalty)
        ->check(CLI::IsMember({"on", "off"}));

    // eval
    auto* eval = app.add_subcommand("eval", "batch evaluation");
    std::string eval_dataset, eval_preds, eval_report, eval_csv;
    int eval_level = 2, eval_jobs = 0;
    std::string eval_penalty = "on";
    eval->add_option("--dataset", eval_dataset)->required();
    eval->add_option("--predictions", eval_preds)->required();
    eval->add_option("--level", eval_level)->check(CLI::Range(1, 3));
    eval->add_option("--step-penalty", eval_penalty)
        ->check(CLI::IsMember({"on", "off"}));
    eval->add_option("--jobs", eval_jobs, "parallel workers");
    eval->add_option("--report", eval_report, "write full JSON report here");
    eval->add_option("--csv", eval_csv, "write per-sample CSV here");

    // refine
    auto* refine = app.add_subcommand("refine", "pass@k / pass@k_fb runs");
    std::string refine_dataset, refine_mock;
    bool refine_http = false;
    int refine_k = 3, refine_jobs = 0;
    std::string refine_feedback = "off";
    long refine_seed = 1;
    refine->add_option("--dataset", refine_dataset)->required();
    refine->add_option("--k", refine_k)->check(CLI::PositiveNumber);
    refine->add_option("--feedback", refine_feedback)
        ->check(CLI::IsMember({"on", "off"}));
    refine->add_option("--seed", refine_seed, "base seed for attempt seeds");
    refine->add_option("--jobs", refine_jobs);
    refine->add_option("--mock", refine_mock, "scripted generator rules JSON");
    refine->add_flag("--http", refine_http, "use the HTTP generator from config");

    // grpo-demo
    auto* demo = app.add_subcommand("grpo-demo", "toy GRPO training run");
    int demo_tasks = 10;
    std::uint64_t demo_seed = 0;
    int demo_iterations = 0;
    std::string demo_penalty = "on", demo_sft = "off";
    std::string demo_curve = "curve.csv";
    demo->add_option("--tasks", demo_tasks)->check(CLI::PositiveNumber);
    demo->add_option("--seed", demo_seed);
    demo->add_option("--iterations", demo_iterations, "override config iterations");
    demo->add_option("--step-penalty", demo_penalty)
        ->check(CLI::IsMember({"on", "off"}));
    demo->add_option("--sft", demo_sft, "SFT warmup before GRPO")
        ->check(CLI::IsMember({"on", "off"}));
    demo->add_option("--curve", demo_curve, "reward-curve CSV output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        viki::AppConfig cfg;
        if (!config_path.empty()) cfg = viki::load_config(config_path);

        if (*gen) {
            auto samples = viki::gen_synthetic(gen_scenes, gen_seed);
            viki::write_file(gen_out, viki::dataset_to_jsonl(samples));
            std::cout << "wrote " << samples.size() << " samples to " << gen_out
                      << "\n";
            return kExitOk;
        }

        if (*check) {
            auto samples = viki::load_dataset(check_dataset);
            const viki::Sample& sample = find_sample(samples, check_task);
            viki::Plan plan = viki::parse_plan(read_file(check_plan));
            viki::ExecReport report =
                viki::run_plan(sample.scene, plan, sample.goals);
            std::cout << exec_report_json(report).dump(2) << "\n";
            return report.all_goals_met() ? kExitOk : kExitFailures;
        }

        if (*score) {
            auto samples = viki::load_dataset(score_dataset);
            const viki::Sample& sample = find_sample(samples, score_task);
            viki::RewardBreakdown b = viki::score_response(
                sample, read_file(score_response_path), score_penalty == "on",
                cfg.lambda1, cfg.lambda2);
            viki::Json j = {{"format", b.format},
                            {"accuracy", b.accuracy},
                            {"total", b.total},
                            {"lambda1", b.lambda1},
                            {"lambda2", b.lambda2}};
            std::cout << j.dump(2) << "\n";
            return kExitOk;
        }

        if (*eval) {
            auto samples = viki::load_dataset(eval_dataset);
            auto preds = viki::load_predictions(eval_preds);
            viki::EvalOptions opts;
            opts.step_penalty = eval_penalty == "on";
            opts.jobs = eval_jobs > 0 ? eval_jobs : cfg.jobs;
            viki::EvalReport report =
                viki::evaluate(samples, preds, eval_level, opts);
            viki::Json j = viki::to_json(report);
            if (!eval_report.empty()) viki::write_file(eval_report, j.dump(2));
            if (!eval_csv.empty())
                viki::write_file(eval_csv, viki::report_to_csv(report));
            j.erase("samples");
            std::cout << j.dump(2) << "\n";
            return (report.missing > 0 || report.parse_failures > 0)
                       ? kExitFailures
                       : kExitOk;
        }

        if (*refine) {
            auto all = viki::load_dataset(refine_dataset);
            std::vector<viki::Sample> samples;
            for (auto& s : all)
                if (s.level == 2) samples.push_back(std::move(s));
            auto gen_client = make_generator(refine_mock, refine_http, cfg);
            std::vector<long> seeds;
            for (int i = 0; i < refine_k; ++i) seeds.push_back(refine_seed + i);
            double rate = viki::pass_at_k(samples, *gen_client, refine_k,
                                          refine_feedback == "on", seeds,
                                          refine_jobs > 0 ? refine_jobs : cfg.jobs);
            viki::Json j = {{"k", refine_k},
                            {"feedback", refine_feedback == "on"},
                            {"samples", samples.size()},
                            {"pass_rate", rate}};
            std::cout << j.dump(2) << "\n";
            return kExitOk;
        }

        if (*demo) {
            viki::ToySuite suite = viki::build_toy_suite(demo_tasks, demo_seed);
            viki::ToyPolicy policy = viki::make_toy_policy(suite);
            viki::TrainConfig tc = cfg.grpo;
            tc.seed = demo_seed;
            if (demo_iterations > 0) tc.iterations = demo_iterations;
            if (demo_sft == "on") {
                std::map<std::string, std::size_t> demos;
                for (const auto& t : suite.tasks)
                    demos[t.sample.task_id] = t.gold_index;
                policy = viki::sft_warmup(std::move(policy), demos, 20, 0.5);
            }
            viki::RewardFn reward_fn = viki::make_toy_reward_fn(
                suite, demo_penalty == "on", cfg.lambda1, cfg.lambda2);
            viki::TrainResult result =
                viki::train(std::move(policy), suite.task_ids(), reward_fn, tc);
            viki::write_file(demo_curve, viki::curve_to_csv(result.curve));
            viki::ArgmaxDeltaSteps delta =
                viki::argmax_delta_steps(result.policy, suite);
            viki::Json j = {
                {"iterations", tc.iterations},
                {"final_mean_reward", result.curve.back().mean_reward},
                {"argmax_mean_delta_steps", delta.mean_delta},
                {"infeasible_argmax", delta.infeasible_argmax},
                {"curve", demo_curve}};
            std::cout << j.dump(2) << "\n";
            return kExitOk;
        }
    } catch (const viki::dataset_error& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const viki::schema_error& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const viki::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
