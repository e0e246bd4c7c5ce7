#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tofslam/pose_graph.hpp"

namespace tofslam {

class EnvironmentTooLarge : public GraphError {
public:
    EnvironmentTooLarge() : GraphError("environment too large") {}
};

struct HierarchicalConfig {
    double d_min = 0.3;                 // meters; 0 keeps every pose
    double dpsi_min = deg2rad(30.0);    // radians
    std::size_t max_sparse_poses = 440;
    int iterations = 3;
    unsigned workers = 1;

    void validate() const;
};

/// Ids of the sparse graph, ascending. Poses are taken chronologically whenever the distance
/// to the last taken pose exceeds d_min or the heading change exceeds dpsi_min. Pose 0, the
/// last pose and every id in `required` are always members. Throws EnvironmentTooLarge when
/// the result has more than max_sparse_poses members.
std::vector<std::size_t> build_sparse_graph(std::span<const Pose2> poses,
                                            std::span<const std::size_t> required,
                                            const HierarchicalConfig& cfg);

/// Synthetic closure for the subgraph spanning members k < l: an edge from local node
/// `last` to local node `first` measuring odometry_edge(x_l_opt, x_k_opt).
Edge subgraph_constraint(const Pose2& x_k_opt, const Pose2& x_l_opt, std::size_t first,
                         std::size_t last);

struct HierarchicalReport {
    std::vector<std::size_t> members;
    GaussNewtonReport sparse;
    std::size_t subgraphs = 0;
    std::size_t largest_subgraph = 0;
};

/// Two-level optimization. The sparse graph is solved with the loop-closure edges; then each
/// stretch between consecutive members is rigidly moved onto its optimized first member and
/// solved with the synthetic closure. Members take their sparse-graph values, the poses in
/// between take their subgraph values, and pose 0 is left untouched.
HierarchicalReport hierarchical_optimize(std::vector<Pose2>& x, std::span<const Edge> lc_edges,
                                         std::span<const std::size_t> scan_pose_ids,
                                         const HierarchicalConfig& cfg = {});

HierarchicalReport optimize_hierarchical(PoseGraph& graph, const HierarchicalConfig& cfg = {});

}  // namespace tofslam
