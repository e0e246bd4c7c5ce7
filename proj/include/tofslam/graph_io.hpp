#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "tofslam/pose_graph.hpp"

namespace tofslam {

/// Plain-text pose graph:
///   VERTEX id x y psi
///   EDGE i j zx zy zpsi omega
/// Vertex ids must be 0..N-1 in order. Blank lines and lines starting with '#' are skipped.
struct GraphFile {
    std::vector<Pose2> poses;
    std::vector<Edge> edges;
};

void write_graph(std::ostream& os, std::span<const Pose2> poses, std::span<const Edge> edges);

/// Throws GraphError naming the offending line.
GraphFile read_graph(std::istream& is);

}  // namespace tofslam
