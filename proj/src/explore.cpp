#include "tofslam/explore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tofslam {

std::vector<HoughLine> hough_lines(std::span<const Vec2> points, const HoughConfig& cfg) {
    if (!(cfg.rho_step > 0.0) || !(cfg.theta_step > 0.0)) {
        throw std::invalid_argument("hough: bin sizes must be positive");
    }
    const int n_theta = static_cast<int>(std::ceil(kPi / cfg.theta_step - 1e-9));
    double r_max = 0.0;
    for (const Vec2& p : points) r_max = std::max(r_max, norm(p));
    const int rho_offset = static_cast<int>(std::ceil(r_max / cfg.rho_step)) + 1;
    const int n_rho = 2 * rho_offset + 1;

    std::vector<double> cs(static_cast<std::size_t>(n_theta)), sn(cs.size());
    for (int t = 0; t < n_theta; ++t) {
        cs[static_cast<std::size_t>(t)] = std::cos((t + 0.5) * cfg.theta_step);
        sn[static_cast<std::size_t>(t)] = std::sin((t + 0.5) * cfg.theta_step);
    }

    std::vector<Vec2> remaining(points.begin(), points.end());
    std::vector<HoughLine> lines;
    std::vector<int> acc(static_cast<std::size_t>(n_theta * n_rho));
    while (static_cast<int>(lines.size()) < cfg.max_lines &&
           static_cast<int>(remaining.size()) >= cfg.min_votes) {
        std::fill(acc.begin(), acc.end(), 0);
        for (const Vec2& p : remaining) {
            for (int t = 0; t < n_theta; ++t) {
                const double rho = p.x * cs[static_cast<std::size_t>(t)] + p.y * sn[static_cast<std::size_t>(t)];
                const int r = static_cast<int>(std::floor(rho / cfg.rho_step)) + rho_offset;
                ++acc[static_cast<std::size_t>(t * n_rho + r)];
            }
        }
        const auto peak = std::max_element(acc.begin(), acc.end());
        if (*peak < cfg.min_votes) break;
        const auto idx = static_cast<int>(peak - acc.begin());
        HoughLine line;
        line.theta = (idx / n_rho + 0.5) * cfg.theta_step;
        line.rho = (idx % n_rho - rho_offset + 0.5) * cfg.rho_step;
        line.votes = *peak;
        lines.push_back(line);
        const double c = std::cos(line.theta), s = std::sin(line.theta);
        std::erase_if(remaining, [&](const Vec2& p) {
            return std::abs(p.x * c + p.y * s - line.rho) <= cfg.inlier_distance;
        });
    }
    return lines;
}

bool detect_corner(std::span<const Vec2> local_points, const HoughConfig& cfg) {
    std::vector<Vec2> near;
    for (const Vec2& p : local_points) {
        if (norm(p) <= cfg.max_range) near.push_back(p);
    }
    if (near.size() < cfg.min_points) return false;
    const auto lines = hough_lines(near, cfg);
    for (std::size_t a = 0; a < lines.size(); ++a) {
        for (std::size_t b = a + 1; b < lines.size(); ++b) {
            double d = std::abs(lines[a].theta - lines[b].theta);
            d = std::min(d, kPi - d);
            if (d >= cfg.min_corner_angle - 1e-12) return true;
        }
    }
    return false;
}

bool detect_corner(const ScanFrame& local_frame, const HoughConfig& cfg) {
    return detect_corner(std::span<const Vec2>(local_frame.points), cfg);
}

const char* to_string(FollowCommand c) {
    switch (c) {
        case FollowCommand::forward: return "forward";
        case FollowCommand::turn_left: return "turn-left";
        case FollowCommand::turn_right: return "turn-right";
        case FollowCommand::land: return "land";
    }
    return "?";
}

namespace {

double min_distance(const FrameRows& rows, int sensor, int first_col, int last_col) {
    double best = std::numeric_limits<double>::infinity();
    if (sensor < 0 || static_cast<std::size_t>(sensor) >= rows.size()) return best;
    for (const auto& z : rows[static_cast<std::size_t>(sensor)]) {
        if (z.column >= first_col && z.column <= last_col) best = std::min(best, z.distance);
    }
    return best;
}

}  // namespace

FollowCommand wall_follow_step(const FrameRows& rows, const FollowerConfig& cfg) {
    const bool front = min_distance(rows, cfg.front_sensor, 2, 5) < cfg.front_blocked;
    if (!front) return FollowCommand::forward;
    const bool left = min_distance(rows, cfg.left_sensor, 3, 4) < cfg.side_wall;
    if (!left) return FollowCommand::turn_left;
    const bool right = min_distance(rows, cfg.right_sensor, 3, 4) < cfg.side_wall;
    if (!right) return FollowCommand::turn_right;
    return FollowCommand::land;
}

}  // namespace tofslam
