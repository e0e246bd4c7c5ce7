#include "tofslam/hierarchical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tofslam/parallel.hpp"

namespace tofslam {

void HierarchicalConfig::validate() const {
    if (!(d_min >= 0.0) || !std::isfinite(d_min)) {
        throw GraphError("hierarchical: d_min must be a non-negative distance");
    }
    if (!(dpsi_min >= 0.0) || !std::isfinite(dpsi_min)) {
        throw GraphError("hierarchical: dpsi_min must be a non-negative angle");
    }
    if (max_sparse_poses < 2 || max_sparse_poses > 440) {
        throw GraphError("hierarchical: max_sparse_poses must lie in [2, 440]");
    }
    if (iterations < 1) {
        throw GraphError("hierarchical: iterations must be positive");
    }
}

std::vector<std::size_t> build_sparse_graph(std::span<const Pose2> poses,
                                            std::span<const std::size_t> required,
                                            const HierarchicalConfig& cfg) {
    cfg.validate();
    if (poses.empty()) throw GraphError("hierarchical: empty graph");
    std::vector<bool> take(poses.size(), false);
    take.front() = true;
    take.back() = true;
    std::size_t last = 0;
    for (std::size_t k = 1; k < poses.size(); ++k) {
        const double d = norm(poses[k].position() - poses[last].position());
        const double dpsi = std::abs(angle_norm(poses[k].psi - poses[last].psi));
        if (cfg.d_min == 0.0 || d > cfg.d_min || dpsi > cfg.dpsi_min) {
            take[k] = true;
            last = k;
        }
    }
    for (std::size_t id : required) {
        if (id >= poses.size()) {
            throw GraphError("hierarchical: required pose " + std::to_string(id) + " not in graph");
        }
        take[id] = true;
    }
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < take.size(); ++k) {
        if (take[k]) members.push_back(k);
    }
    if (members.size() > cfg.max_sparse_poses) throw EnvironmentTooLarge();
    return members;
}

Edge subgraph_constraint(const Pose2& x_k_opt, const Pose2& x_l_opt, std::size_t first,
                         std::size_t last) {
    return {last, first, odometry_edge(x_l_opt, x_k_opt), EdgeKind::loop_closure, kLoopClosureOmega};
}

HierarchicalReport hierarchical_optimize(std::vector<Pose2>& x, std::span<const Edge> lc_edges,
                                         std::span<const std::size_t> scan_pose_ids,
                                         const HierarchicalConfig& cfg) {
    std::vector<std::size_t> required(scan_pose_ids.begin(), scan_pose_ids.end());
    for (const auto& e : lc_edges) {
        if (e.from >= x.size() || e.to >= x.size()) {
            throw GraphError("hierarchical: loop closure references a missing pose");
        }
        required.push_back(e.from);
        required.push_back(e.to);
    }

    HierarchicalReport report;
    report.members = build_sparse_graph(x, required, cfg);
    const auto& members = report.members;

    std::vector<std::size_t> local(x.size(), 0);
    std::vector<Pose2> sparse;
    sparse.reserve(members.size());
    for (std::size_t m = 0; m < members.size(); ++m) {
        local[members[m]] = m;
        sparse.push_back(x[members[m]]);
    }
    std::vector<Edge> sparse_lc;
    for (const auto& e : lc_edges) {
        Edge r = e;
        r.from = local[e.from];
        r.to = local[e.to];
        sparse_lc.push_back(r);
    }
    GaussNewtonOptions gn;
    gn.iterations = cfg.iterations;
    gn.workers = cfg.workers;
    report.sparse = gauss_newton(sparse, build_edges(sparse, sparse_lc), gn);

    // Subgraphs between consecutive members; each writes only its interior poses.
    std::vector<Pose2> corrected = x;
    for (std::size_t m = 1; m < members.size(); ++m) corrected[members[m]] = sparse[m];

    std::vector<std::size_t> spans;
    for (std::size_t m = 0; m + 1 < members.size(); ++m) {
        const std::size_t len = members[m + 1] - members[m] + 1;
        if (len > cfg.max_sparse_poses) throw EnvironmentTooLarge();
        report.largest_subgraph = std::max(report.largest_subgraph, len);
        if (len > 2) spans.push_back(m);
    }
    report.subgraphs = members.empty() ? 0 : members.size() - 1;

    GaussNewtonOptions sub_gn;
    sub_gn.iterations = cfg.iterations;
    parallel_chunks(spans.size(), cfg.workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            const std::size_t m = spans[s];
            const std::size_t k = members[m];
            const std::size_t l = members[m + 1];
            const Rigid2 offset = compose(Rigid2::from_pose(sparse[m]), Rigid2::from_pose(x[k]).inverse());
            std::vector<Pose2> sub;
            sub.reserve(l - k + 1);
            for (std::size_t id = k; id <= l; ++id) sub.push_back(offset.apply(x[id]));
            sub.front() = sparse[m];
            const std::vector<Edge> closure{subgraph_constraint(sparse[m], sparse[m + 1], 0, l - k)};
            gauss_newton(sub, build_edges(sub, closure), sub_gn);
            for (std::size_t id = k + 1; id < l; ++id) corrected[id] = sub[id - k];
        }
    });
    x = std::move(corrected);
    return report;
}

HierarchicalReport optimize_hierarchical(PoseGraph& graph, const HierarchicalConfig& cfg) {
    auto x = graph.poses();
    auto report = hierarchical_optimize(x, graph.lc_edges(), graph.scan_pose_ids(), cfg);
    graph.set_poses(x);
    return report;
}

}  // namespace tofslam
