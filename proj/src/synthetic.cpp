#include "tofslam/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tofslam {

std::vector<std::pair<std::size_t, std::size_t>> benchmark_lc_pairs(std::size_t poses,
                                                                    std::size_t closures) {
    if (poses < closures + 2) {
        throw std::invalid_argument("benchmark graph needs more poses than loop closures");
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 1; k <= closures; ++k) pairs.emplace_back(0, poses - k);
    return pairs;
}

SyntheticGraph chain_graph(std::size_t poses,
                           const std::vector<std::pair<std::size_t, std::size_t>>& lc_pairs) {
    SyntheticGraph g;
    for (std::size_t k = 0; k < poses; ++k) g.truth.emplace_back(static_cast<double>(k), 0.0, 0.0);
    g.poses = g.truth;
    for (auto [i, j] : lc_pairs) {
        if (i >= j || j >= poses) throw std::invalid_argument("chain_graph: bad closure pair");
        g.lc_edges.push_back({i, j, odometry_edge(g.truth[i], g.truth[j]), EdgeKind::loop_closure,
                              kLoopClosureOmega});
    }
    return g;
}

SyntheticGraph square_loop_graph(const SquareLoopOptions& opts) {
    if (opts.poses < 2 || opts.laps < 1 || !(opts.side > 0.0)) {
        throw std::invalid_argument("square_loop_graph: invalid options");
    }
    SyntheticGraph g;
    const double length = 4.0 * opts.side * opts.laps;
    const double step = length / static_cast<double>(opts.poses - 1);
    const Vec2 corners[4] = {{0, 0}, {opts.side, 0}, {opts.side, opts.side}, {0, opts.side}};
    for (std::size_t k = 0; k < opts.poses; ++k) {
        const double s = std::min(step * static_cast<double>(k), length);
        const auto leg = std::min(static_cast<long>(s / opts.side), 4L * opts.laps - 1);
        const int side = static_cast<int>(leg % 4);
        const double along = s - static_cast<double>(leg) * opts.side;
        const double psi = side * kPi / 2.0;
        const Vec2 p = corners[side] + along * Vec2{std::cos(psi), std::sin(psi)};
        g.truth.emplace_back(p.x, p.y, psi);
    }

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> step_noise(0.0, opts.step_noise);
    std::normal_distribution<double> heading_noise(0.0, opts.heading_noise);
    std::normal_distribution<double> closure_noise(0.0, opts.closure_noise);
    g.poses.push_back(g.truth.front());
    for (std::size_t k = 1; k < opts.poses; ++k) {
        const Measurement z = odometry_edge(g.truth[k - 1], g.truth[k]);
        const Vec2 d{z.x * (1.0 + opts.scale_error) + step_noise(rng), z.y + step_noise(rng)};
        const Pose2& p = g.poses.back();
        const Vec2 t = p.position() + rot2(p.psi) * d;
        g.poses.emplace_back(t.x, t.y, p.psi + z.psi + heading_noise(rng));
    }

    // Corner poses of every lap, then closures from later laps back to the first.
    const auto corner_index = [&](int lap, int corner) {
        const double s = (4.0 * lap + corner) * opts.side;
        return std::min(static_cast<std::size_t>(std::lround(s / step)), opts.poses - 1);
    };
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (int lap = 1; lap < opts.laps; ++lap) {
        for (int corner = 0; corner < 4; ++corner) {
            candidates.emplace_back(corner_index(0, corner), corner_index(lap, corner));
        }
    }
    if (opts.closures > candidates.size()) {
        throw std::invalid_argument("square_loop_graph: more closures than revisited corners");
    }
    for (std::size_t c = 0; c < opts.closures; ++c) {
        const auto [i, j] = candidates[c * candidates.size() / opts.closures];
        Measurement z = odometry_edge(g.truth[i], g.truth[j]);
        z.x += closure_noise(rng);
        z.y += closure_noise(rng);
        z.psi = angle_norm(z.psi + closure_noise(rng));
        g.lc_edges.push_back({i, j, z, EdgeKind::loop_closure, kLoopClosureOmega});
        g.scan_pose_ids.push_back(i);
        g.scan_pose_ids.push_back(j);
    }
    return g;
}

}  // namespace tofslam
