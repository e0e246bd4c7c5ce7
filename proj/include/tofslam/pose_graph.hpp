#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tofslam/geometry.hpp"
#include "tofslam/scan.hpp"
#include "tofslam/sparse.hpp"

namespace tofslam {

inline constexpr double kOdometryOmega = 1.0;
inline constexpr double kLoopClosureOmega = 20.0;

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Relative pose of x_j expressed in the frame of x_i.
struct Measurement {
    double x = 0.0;
    double y = 0.0;
    double psi = 0.0;

    friend bool operator==(const Measurement&, const Measurement&) = default;
};

enum class EdgeKind { odometry, loop_closure };

/// Constraint between two poses, weighted by omega * I3. Indices refer to positions in the
/// pose vector being optimized.
struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    Measurement z{};
    EdgeKind kind = EdgeKind::odometry;
    double omega = kOdometryOmega;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// One row of the graph table.
struct GraphEntry {
    std::int32_t pose_id = 0;
    std::int32_t timestamp = 0;  // milliseconds
    Pose2 pose{};
    TofRows tof{};

    friend bool operator==(const GraphEntry&, const GraphEntry&) = default;
};

/// The graph table plus the loop-closure edges and the scan poses recorded so far.
/// Odometry edges are not stored: they are recomputed from the current poses whenever the
/// graph is optimized.
class PoseGraph {
public:
    /// Requires pose_id == size() and a timestamp no earlier than the previous one.
    void append(const GraphEntry& entry);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<GraphEntry>& entries() const { return entries_; }
    const GraphEntry& entry(std::size_t id) const;

    std::vector<Pose2> poses() const;
    void set_poses(std::span<const Pose2> poses);

    /// Requires both ids present and from < to.
    void add_lc_edge(const Edge& edge);
    const std::vector<Edge>& lc_edges() const { return lc_edges_; }
    void clear_lc_edges() { lc_edges_.clear(); }

    void add_scan_pose(std::size_t id);
    const std::vector<std::size_t>& scan_pose_ids() const { return scan_pose_ids_; }

private:
    std::vector<GraphEntry> entries_;
    std::vector<Edge> lc_edges_;
    std::vector<std::size_t> scan_pose_ids_;
};

/// z = (R(-psi_i) (t_j - t_i), psi_j - psi_i).
Measurement odometry_edge(const Pose2& xi, const Pose2& xj);

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

/// Error e = z - zhat(x_i, x_j) with a normalized heading term, and its Jacobians
/// A = de/dx_i, B = de/dx_j.
struct EdgeLinearization {
    Vec3 e{};
    Mat3 a{};
    Mat3 b{};
};

EdgeLinearization linearize_edge(const Measurement& z, const Pose2& xi, const Pose2& xj);

/// Odometry edges between consecutive poses, followed by the given extra edges.
std::vector<Edge> build_edges(std::span<const Pose2> poses, std::span<const Edge> extra);

struct LinearSystem {
    CsrLower h;
    std::vector<double> b;
};

/// H and b of the linearized problem, with I3 added to the first diagonal block. Only the
/// structurally nonzero entries of each 3x3 block are stored.
LinearSystem assemble(std::span<const Pose2> x, std::span<const Edge> edges);

/// Sum of e^T Omega e over all edges.
double objective(std::span<const Pose2> x, std::span<const Edge> edges);

struct GaussNewtonOptions {
    int iterations = 3;
    unsigned workers = 1;
    bool reorder = true;  // solve with the RCM-permuted system
};

struct GaussNewtonReport {
    std::vector<double> max_step;   // max |dx| of each iteration
    std::vector<double> objective;  // before the first iteration and after each one
    std::size_t nnz_h = 0;
    std::size_t nnz_l = 0;
    bool objective_increased = false;
};

/// Runs Gauss-Newton iterations in place. Headings are renormalized after each update.
GaussNewtonReport gauss_newton(std::vector<Pose2>& x, std::span<const Edge> edges,
                               const GaussNewtonOptions& opts = {});

/// Optimizes every pose of the graph table against its odometry and loop-closure edges.
GaussNewtonReport optimize(PoseGraph& graph, const GaussNewtonOptions& opts = {});

}  // namespace tofslam
