#include "tofslam/pose_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

namespace tofslam {

void PoseGraph::append(const GraphEntry& entry) {
    if (entry.pose_id != static_cast<std::int32_t>(entries_.size())) {
        throw GraphError("graph: expected pose id " + std::to_string(entries_.size()) + ", got " +
                         std::to_string(entry.pose_id));
    }
    if (!entries_.empty() && entry.timestamp < entries_.back().timestamp) {
        throw GraphError("graph: timestamp goes backwards at pose " + std::to_string(entry.pose_id));
    }
    entries_.push_back(entry);
}

const GraphEntry& PoseGraph::entry(std::size_t id) const {
    if (id >= entries_.size()) {
        throw GraphError("graph: no pose with id " + std::to_string(id));
    }
    return entries_[id];
}

std::vector<Pose2> PoseGraph::poses() const {
    std::vector<Pose2> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.pose);
    return out;
}

void PoseGraph::set_poses(std::span<const Pose2> poses) {
    if (poses.size() != entries_.size()) {
        throw GraphError("graph: pose count mismatch");
    }
    for (std::size_t k = 0; k < poses.size(); ++k) entries_[k].pose = poses[k];
}

void PoseGraph::add_lc_edge(const Edge& edge) {
    if (edge.from >= edge.to || edge.to >= entries_.size()) {
        throw GraphError("graph: loop closure (" + std::to_string(edge.from) + ", " +
                         std::to_string(edge.to) + ") does not reference two stored poses in order");
    }
    lc_edges_.push_back(edge);
}

void PoseGraph::add_scan_pose(std::size_t id) {
    if (id >= entries_.size()) {
        throw GraphError("graph: scan pose " + std::to_string(id) + " not stored");
    }
    scan_pose_ids_.push_back(id);
}

Measurement odometry_edge(const Pose2& xi, const Pose2& xj) {
    const Vec2 d = rot2(-xi.psi) * (xj.position() - xi.position());
    return {d.x, d.y, angle_norm(xj.psi - xi.psi)};
}

EdgeLinearization linearize_edge(const Measurement& z, const Pose2& xi, const Pose2& xj) {
    const double c = std::cos(xi.psi);
    const double s = std::sin(xi.psi);
    const double dx = xj.x - xi.x;
    const double dy = xj.y - xi.y;
    const double zx = c * dx + s * dy;
    const double zy = -s * dx + c * dy;

    EdgeLinearization out;
    out.e = {z.x - zx, z.y - zy, angle_norm(z.psi - (xj.psi - xi.psi))};
    out.a = {{{c, s, s * dx - c * dy}, {-s, c, c * dx + s * dy}, {0.0, 0.0, 1.0}}};
    out.b = {{{-c, -s, 0.0}, {s, -c, 0.0}, {0.0, 0.0, -1.0}}};
    return out;
}

std::vector<Edge> build_edges(std::span<const Pose2> poses, std::span<const Edge> extra) {
    std::vector<Edge> edges;
    edges.reserve(poses.size() + extra.size());
    for (std::size_t i = 0; i + 1 < poses.size(); ++i) {
        edges.push_back({i, i + 1, odometry_edge(poses[i], poses[i + 1]), EdgeKind::odometry,
                         kOdometryOmega});
    }
    edges.insert(edges.end(), extra.begin(), extra.end());
    return edges;
}

namespace {

using Mask = std::uint16_t;

constexpr Mask bit(int r, int c) { return static_cast<Mask>(1u << (3 * r + c)); }

// Diagonal block: A^T A and B^T B share this lower pattern; the (1, 0) entry cancels exactly.
constexpr Mask kDiagonalMask = bit(0, 0) | bit(1, 1) | bit(2, 0) | bit(2, 1) | bit(2, 2);
// B^T A, stored below the diagonal for an edge i -> j with i < j.
constexpr Mask kForwardMask = bit(0, 0) | bit(0, 2) | bit(1, 1) | bit(1, 2) | bit(2, 2);
// A^T B, stored below the diagonal for an edge i -> j with i > j.
constexpr Mask kBackwardMask = bit(0, 0) | bit(1, 1) | bit(2, 0) | bit(2, 1) | bit(2, 2);

Mat3 product_t(const Mat3& p, const Mat3& q, double w) {
    Mat3 out{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            double sum = 0.0;
            for (int k = 0; k < 3; ++k) sum += p[k][r] * q[k][c];
            out[r][c] = w * sum;
        }
    }
    return out;
}

void check_edges(std::size_t n, std::span<const Edge> edges) {
    for (const auto& e : edges) {
        if (e.from >= n || e.to >= n || e.from == e.to) {
            throw GraphError("assemble: edge (" + std::to_string(e.from) + ", " +
                             std::to_string(e.to) + ") references a missing pose");
        }
        if (!(e.omega > 0.0) || !std::isfinite(e.omega)) {
            throw GraphError("assemble: edge weight must be positive");
        }
    }
}

// Structure of H: for each block row, the lower blocks present with their masks.
CsrLower block_pattern(std::size_t n, std::span<const Edge> edges) {
    std::vector<std::vector<std::pair<std::size_t, Mask>>> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i].emplace_back(i, kDiagonalMask);
    for (const auto& e : edges) {
        const std::size_t hi = std::max(e.from, e.to);
        const std::size_t lo = std::min(e.from, e.to);
        rows[hi].emplace_back(lo, e.from < e.to ? kForwardMask : kBackwardMask);
    }
    CsrLower h(3 * n);
    std::vector<std::pair<std::size_t, Mask>> merged;
    for (std::size_t bi = 0; bi < n; ++bi) {
        auto& row = rows[bi];
        std::sort(row.begin(), row.end());
        merged.clear();
        for (const auto& [col, mask] : row) {
            if (!merged.empty() && merged.back().first == col) {
                merged.back().second |= mask;
            } else {
                merged.emplace_back(col, mask);
            }
        }
        for (int r = 0; r < 3; ++r) {
            for (const auto& [bj, mask] : merged) {
                for (int c = 0; c < 3; ++c) {
                    if ((mask & bit(r, c)) == 0) continue;
                    if (bj == bi && c > r) continue;
                    h.insert(3 * bi + static_cast<std::size_t>(r), 3 * bj + static_cast<std::size_t>(c),
                             0.0);
                }
            }
        }
    }
    h.finalize();
    return h;
}

void add_block(CsrLower& h, std::size_t bi, std::size_t bj, const Mat3& m, Mask mask) {
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            if ((mask & bit(r, c)) == 0) continue;
            if (bi == bj && c > r) continue;
            h.add_to(3 * bi + static_cast<std::size_t>(r), 3 * bj + static_cast<std::size_t>(c),
                     m[r][c]);
        }
    }
}

}  // namespace

LinearSystem assemble(std::span<const Pose2> x, std::span<const Edge> edges) {
    if (x.empty()) throw GraphError("assemble: empty graph");
    check_edges(x.size(), edges);
    LinearSystem sys{block_pattern(x.size(), edges), std::vector<double>(3 * x.size(), 0.0)};
    auto& h = sys.h;
    for (std::size_t k = 0; k < 3; ++k) h.add_to(k, k, 1.0);

    for (const auto& edge : edges) {
        const std::size_t i = edge.from;
        const std::size_t j = edge.to;
        const auto lin = linearize_edge(edge.z, x[i], x[j]);
        const double w = edge.omega;
        add_block(h, i, i, product_t(lin.a, lin.a, w), kDiagonalMask);
        add_block(h, j, j, product_t(lin.b, lin.b, w), kDiagonalMask);
        if (i < j) {
            add_block(h, j, i, product_t(lin.b, lin.a, w), kForwardMask);
        } else {
            add_block(h, i, j, product_t(lin.a, lin.b, w), kBackwardMask);
        }
        for (int r = 0; r < 3; ++r) {
            double bi = 0.0, bj = 0.0;
            for (int k = 0; k < 3; ++k) {
                bi += lin.a[k][r] * lin.e[k];
                bj += lin.b[k][r] * lin.e[k];
            }
            sys.b[3 * i + static_cast<std::size_t>(r)] += w * bi;
            sys.b[3 * j + static_cast<std::size_t>(r)] += w * bj;
        }
    }
    return sys;
}

double objective(std::span<const Pose2> x, std::span<const Edge> edges) {
    check_edges(x.size(), edges);
    double sum = 0.0;
    for (const auto& edge : edges) {
        const auto lin = linearize_edge(edge.z, x[edge.from], x[edge.to]);
        sum += edge.omega * (lin.e[0] * lin.e[0] + lin.e[1] * lin.e[1] + lin.e[2] * lin.e[2]);
    }
    return sum;
}

GaussNewtonReport gauss_newton(std::vector<Pose2>& x, std::span<const Edge> edges,
                               const GaussNewtonOptions& opts) {
    if (x.empty()) throw GraphError("gauss_newton: empty graph");
    if (opts.iterations < 0) throw GraphError("gauss_newton: negative iteration count");
    GaussNewtonReport report;
    report.objective.push_back(objective(x, edges));

    Permutation perm;
    CsrLower l;
    for (int it = 0; it < opts.iterations; ++it) {
        LinearSystem sys = assemble(x, edges);
        if (it == 0) {
            perm = opts.reorder ? rcm(sys.h) : Permutation::identity(sys.h.dim());
        }
        CsrLower hp = opts.reorder ? permute(sys.h, perm) : std::move(sys.h);
        if (it == 0) {
            l = symbolic_cholesky(hp);
            report.nnz_h = hp.nnz();
            report.nnz_l = l.nnz();
        }
        cholesky_crout(hp, l, opts.workers);

        std::vector<double> rhs = permute_vector(sys.b, perm);
        for (double& v : rhs) v = -v;
        const auto y = solve_lower(l, rhs);
        const auto dx = unpermute_vector(solve_upper_transposed(l, y), perm);

        double max_step = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            x[k] = Pose2(x[k].x + dx[3 * k], x[k].y + dx[3 * k + 1], x[k].psi + dx[3 * k + 2]);
            for (std::size_t c = 0; c < 3; ++c) max_step = std::max(max_step, std::abs(dx[3 * k + c]));
        }
        report.max_step.push_back(max_step);
        report.objective.push_back(objective(x, edges));
        if (report.objective.back() > report.objective[report.objective.size() - 2]) {
            report.objective_increased = true;
        }
    }
    return report;
}

GaussNewtonReport optimize(PoseGraph& graph, const GaussNewtonOptions& opts) {
    auto x = graph.poses();
    const auto edges = build_edges(x, graph.lc_edges());
    auto report = gauss_newton(x, edges, opts);
    graph.set_poses(x);
    return report;
}

}  // namespace tofslam
