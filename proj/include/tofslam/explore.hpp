#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tofslam/scan.hpp"

namespace tofslam {

struct HoughConfig {
    double rho_step = 0.05;              // meters
    double theta_step = deg2rad(5.0);    // radians
    int min_votes = 5;
    double inlier_distance = 0.05;       // meters; points this close to a found line are removed
    double min_corner_angle = deg2rad(30.0);
    double max_range = 1.2;              // meters; farther points are ignored
    std::size_t min_points = 5;
    int max_lines = 4;
};

/// Line x cos(theta) + y sin(theta) = rho, theta in [0, pi).
struct HoughLine {
    double theta = 0.0;
    double rho = 0.0;
    int votes = 0;
};

/// Peaks of the (rho, theta) accumulator, strongest first. After each peak the points within
/// inlier_distance of it are removed and the accumulator is rebuilt.
std::vector<HoughLine> hough_lines(std::span<const Vec2> points, const HoughConfig& cfg = {});

/// True when two detected lines meet at min_corner_angle or more. Points are in the robot
/// frame. Fewer than min_points usable points never count as a corner.
bool detect_corner(std::span<const Vec2> local_points, const HoughConfig& cfg = {});
bool detect_corner(const ScanFrame& local_frame, const HoughConfig& cfg = {});

enum class FollowCommand { forward, turn_left, turn_right, land };

const char* to_string(FollowCommand c);

struct FollowerConfig {
    double front_blocked = 0.7;  // meters, zones 2..5 of the front sensor
    double side_wall = 1.0;      // meters, zones 3..4 of a side sensor
    int front_sensor = 0;
    int left_sensor = 1;
    int right_sensor = 3;
};

/// Forward while the way ahead is clear; at a frontal wall turn left if the left is open,
/// otherwise right, and land in a dead end.
FollowCommand wall_follow_step(const FrameRows& rows, const FollowerConfig& cfg = {});

}  // namespace tofslam
