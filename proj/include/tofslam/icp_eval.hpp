#pragma once

#include <cstdint>

#include "tofslam/icp.hpp"
#include "tofslam/maze.hpp"

namespace tofslam {

/// A 1 m wide corridor turning 90 degrees: the square [0, 1] x [0, 1] is the corner, with arms
/// of the given length leaving towards -x and +y.
Maze corner_maze(double arm_length = 3.0);

struct CornerTrialOptions {
    Vec2 position{0.5, 0.5};     // first scan pose
    double offset = 0.3;          // meters, pose error of the second scan
    double rotation = deg2rad(30.0);
    bool zone_quantization = true;
    double arm_length = 3.0;
    IcpOptions icp{};
};

struct CornerTrial {
    Rigid2 applied{};   // error applied to the second scan's poses
    IcpResult icp;
    double e_t = 0.0;   // meters, residual translation error at the second scan pose
    double e_r = 0.0;   // radians, residual heading error
    std::size_t src_points = 0;
    std::size_t dst_points = 0;
};

/// Two 45 degree scans at the corner. The second is taken a few centimeters away with a
/// seeded heading, and its poses are displaced by `offset` in a random direction and rotated
/// by +-`rotation` about the scan pose. ICP aligns the second scan onto the first; the errors
/// measure how far the result is from undoing the displacement.
CornerTrial run_corner_trial(std::uint64_t seed, const CornerTrialOptions& opts = {});

}  // namespace tofslam
