#pragma once

#include "viki/domain.hpp"
#include "viki/metrics.hpp"
#include "viki/parse.hpp"
#include "viki/world.hpp"

#include <set>
#include <stdexcept>
#include <string_view>

namespace viki {

inline constexpr double default_lambda1 = 0.1;  // format weight
inline constexpr double default_lambda2 = 0.9;  // accuracy weight

struct RewardBreakdown {
    int format = 0;          // 0 or 1
    double accuracy = 0.0;   // in [0,1]
    double total = 0.0;
    double lambda1 = default_lambda1;
    double lambda2 = default_lambda2;
};

class agent_count_mismatch_error : public std::invalid_argument {
  public:
    agent_count_mismatch_error()
        : std::invalid_argument("predicted and ground-truth agent counts differ") {}
};

inline int format_reward(std::string_view text) {
    return extract_tags(text).well_formed ? 1 : 0;
}

inline int activation_reward(const std::set<RobotKind>& pred,
                             const std::set<RobotKind>& gt) {
    return pred == gt ? 1 : 0;
}

// Binary planning reward: the plan must execute feasibly and satisfy every
// goal; with the step penalty on it must additionally be no longer than the
// ground-truth plan.
inline int planning_reward(const Scene& scene, const std::vector<Goal>& goals,
                           const Plan& plan, int n_gt, bool step_penalty) {
    ExecReport report = run_plan(scene, plan, goals);
    if (!report.all_goals_met()) return 0;
    if (step_penalty && plan.length() > n_gt) return 0;
    return 1;
}

// Mean of 1 - d_hat over the three distance kernels and all K index-matched
// agents.
inline double perception_reward(const TrajectorySet& pred, const TrajectorySet& gt) {
    if (pred.trajectories.size() != gt.trajectories.size())
        throw agent_count_mismatch_error();
    double sum = 0.0;
    for (std::size_t k = 0; k < gt.trajectories.size(); ++k) {
        const Trajectory& p = pred.trajectories[k];
        const Trajectory& g = gt.trajectories[k];
        sum += 1.0 - normalize_distance(rmse(p, g), gt.image_width, gt.image_height);
        sum += 1.0 -
               normalize_distance(hausdorff(p, g), gt.image_width, gt.image_height);
        sum += 1.0 - normalize_distance(discrete_frechet(p, g), gt.image_width,
                                        gt.image_height);
    }
    return sum / (3.0 * static_cast<double>(gt.trajectories.size()));
}

inline double total_reward(int format, double accuracy,
                           double lambda1 = default_lambda1,
                           double lambda2 = default_lambda2) {
    return lambda1 * format + lambda2 * accuracy;
}

inline RewardBreakdown make_breakdown(int format, double accuracy,
                                      double lambda1 = default_lambda1,
                                      double lambda2 = default_lambda2) {
    RewardBreakdown b;
    b.format = format;
    b.accuracy = accuracy;
    b.lambda1 = lambda1;
    b.lambda2 = lambda2;
    b.total = total_reward(format, accuracy, lambda1, lambda2);
    return b;
}

// Scores one raw model response against a sample's ground truth. The accuracy
// term requires a well-formed tag protocol; a malformed or unparseable answer
// scores accuracy 0 rather than erroring.
inline RewardBreakdown score_response(const Sample& sample,
                                      std::string_view response,
                                      bool step_penalty = true,
                                      double lambda1 = default_lambda1,
                                      double lambda2 = default_lambda2) {
    TaggedResponse tagged = extract_tags(response);
    double accuracy = 0.0;
    if (tagged.well_formed) {
        try {
            if (sample.level == 1) {
                accuracy = activation_reward(parse_agent_set(tagged.answer),
                                             sample.gt_agents.value());
            } else if (sample.level == 2) {
                accuracy = planning_reward(sample.scene, sample.goals,
                                           parse_plan(tagged.answer),
                                           sample.n_gt.value(), step_penalty);
            } else {
                TrajectorySet pred = parse_trajectories(tagged.answer);
                pred.image_width = sample.gt_trajectories->image_width;
                pred.image_height = sample.gt_trajectories->image_height;
                accuracy = perception_reward(pred, *sample.gt_trajectories);
            }
        } catch (const parse_error&) {
            accuracy = 0.0;
        } catch (const agent_count_mismatch_error&) {
            accuracy = 0.0;
        }
    }
    return make_breakdown(tagged.well_formed ? 1 : 0, accuracy, lambda1, lambda2);
}

}  // namespace viki
