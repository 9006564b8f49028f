#pragma once

#include "viki/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace viki {

class empty_trajectory_error : public std::invalid_argument {
  public:
    empty_trajectory_error() : std::invalid_argument("empty trajectory") {}
};

class non_positive_image_error : public std::invalid_argument {
  public:
    non_positive_image_error()
        : std::invalid_argument("image dimensions must be positive") {}
};

namespace detail {

inline double point_dist(const std::pair<double, double>& a,
                         const std::pair<double, double>& b) {
    return std::hypot(a.first - b.first, a.second - b.second);
}

// Index-uniform linear interpolation to n points.
inline std::vector<std::pair<double, double>> resample(
    const std::vector<std::pair<double, double>>& pts, std::size_t n) {
    if (pts.size() == n) return pts;
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    if (n == 1 || pts.size() == 1) {
        out.assign(n, pts.front());
        return out;
    }
    double scale = static_cast<double>(pts.size() - 1) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) * scale;
        std::size_t lo = static_cast<std::size_t>(t);
        if (lo >= pts.size() - 1) {
            out.push_back(pts.back());
            continue;
        }
        double frac = t - static_cast<double>(lo);
        out.emplace_back(pts[lo].first + frac * (pts[lo + 1].first - pts[lo].first),
                         pts[lo].second + frac * (pts[lo + 1].second - pts[lo].second));
    }
    return out;
}

inline double directed_hausdorff(const Trajectory& a, const Trajectory& b) {
    double worst = 0.0;
    for (const auto& p : a.points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : b.points) best = std::min(best, point_dist(p, q));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace detail

// RMSE over |gt| index-matched point pairs; a length-mismatched prediction is
// first resampled to the ground-truth length.
inline double rmse(const Trajectory& pred, const Trajectory& gt) {
    if (pred.points.empty() || gt.points.empty()) throw empty_trajectory_error();
    auto p = detail::resample(pred.points, gt.points.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < gt.points.size(); ++i) {
        double d = detail::point_dist(p[i], gt.points[i]);
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(gt.points.size()));
}

inline double hausdorff(const Trajectory& a, const Trajectory& b) {
    if (a.points.empty() || b.points.empty()) throw empty_trajectory_error();
    return std::max(detail::directed_hausdorff(a, b),
                    detail::directed_hausdorff(b, a));
}

// Discrete Fréchet distance: the classic dynamic program over the coupling
// lattice (min over monotone couplings of the max pair distance).
inline double discrete_frechet(const Trajectory& a, const Trajectory& b) {
    if (a.points.empty() || b.points.empty()) throw empty_trajectory_error();
    const std::size_t n = a.points.size(), m = b.points.size();
    std::vector<double> prev(m), cur(m);
    for (std::size_t j = 0; j < m; ++j) {
        double d = detail::point_dist(a.points[0], b.points[j]);
        prev[j] = j == 0 ? d : std::max(prev[j - 1], d);
    }
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double d = detail::point_dist(a.points[i], b.points[j]);
            double reach = j == 0 ? prev[0]
                                  : std::min({prev[j], prev[j - 1], cur[j - 1]});
            cur[j] = std::max(reach, d);
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

// Maps a pixel distance into [0,1] by the image diagonal, clamped at 1.
inline double normalize_distance(double d, int image_width, int image_height) {
    if (image_width <= 0 || image_height <= 0) throw non_positive_image_error();
    double diag = std::hypot(static_cast<double>(image_width),
                             static_cast<double>(image_height));
    return std::min(1.0, d / diag);
}

}  // namespace viki
