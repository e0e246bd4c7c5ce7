#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "tofslam/pose_graph.hpp"

namespace tofslam {

/// Ground truth, drifted estimate and loop closures of a generated pose graph.
struct SyntheticGraph {
    std::vector<Pose2> truth;
    std::vector<Pose2> poses;
    std::vector<Edge> lc_edges;
    std::vector<std::size_t> scan_pose_ids;
};

/// Loop-closure endpoints used by the solver benchmark: the last n poses (N-1, N-2, ...)
/// are each tied back to pose 0, as when a loop is closed at the takeoff point.
std::vector<std::pair<std::size_t, std::size_t>> benchmark_lc_pairs(std::size_t poses,
                                                                    std::size_t closures);

/// Straight chain with unit spacing and consistent closures between the given pairs.
SyntheticGraph chain_graph(std::size_t poses,
                           const std::vector<std::pair<std::size_t, std::size_t>>& lc_pairs);

struct SquareLoopOptions {
    std::size_t poses = 2000;
    double side = 4.0;     // meters
    int laps = 3;
    std::size_t closures = 4;
    double scale_error = -0.03;       // relative error of forward odometry
    double step_noise = 0.001;        // meters per step, per axis
    double heading_noise = 0.002;     // radians per step
    double closure_noise = 0.005;     // meters / radians on closure measurements
    std::uint64_t seed = 1;
};

/// Counter-clockwise square corridor flown for several laps. Closures tie corners of the
/// later laps to the same corner of the first lap; the closure ends are the scan poses.
SyntheticGraph square_loop_graph(const SquareLoopOptions& opts);

}  // namespace tofslam
