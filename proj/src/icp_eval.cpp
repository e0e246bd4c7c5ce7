#include "tofslam/icp_eval.hpp"

#include <cmath>
#include <random>

#include "tofslam/sim.hpp"

namespace tofslam {

Maze corner_maze(double arm_length) {
    if (!(arm_length > 0.0)) throw MazeError("corner maze needs a positive arm length");
    Maze m;
    m.name = "corner";
    m.walls = {{{-arm_length, 0}, {1, 0}},
               {{1, 0}, {1, 1 + arm_length}},
               {{-arm_length, 1}, {0, 1}},
               {{0, 1}, {0, 1 + arm_length}}};
    m.takeoff = Pose2(0.5, 0.5, 0.0);
    return m;
}

namespace {

Scan take_scan(const Maze& maze, const Pose2& truth, const Rigid2& error, const TofSimOptions& tof,
               std::mt19937_64& rng) {
    const auto geom = quad_deck();
    const ScanConfig cfg{};
    const double step = cfg.spin_angle / (cfg.frames_per_scan - 1);
    std::vector<FrameInput> frames;
    for (int k = 0; k < cfg.frames_per_scan; ++k) {
        const Pose2 t(truth.x, truth.y, truth.psi + k * step);
        frames.push_back({error.apply(t), simulate_rows(t, maze, geom, tof, rng)});
    }
    return assemble_scan(frames, geom, cfg);
}

}  // namespace

CornerTrial run_corner_trial(std::uint64_t seed, const CornerTrialOptions& opts) {
    const Maze maze = corner_maze(opts.arm_length);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Pose2 first(opts.position.x, opts.position.y, 0.0);
    const Pose2 second(first.x + 0.05 * (unit(rng) - 0.5), first.y + 0.05 * (unit(rng) - 0.5),
                       0.3 * unit(rng));
    const double phi = 2.0 * kPi * unit(rng);
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    const Vec2 c = second.position();

    CornerTrial t;
    // Rotate about the scan pose, then shift.
    t.applied = compose(Rigid2{0.0, c + opts.offset * Vec2{std::cos(phi), std::sin(phi)}},
                        compose(Rigid2{sign * opts.rotation, {}}, Rigid2{0.0, {-c.x, -c.y}}));
    TofSimOptions tof;
    tof.zone_quantization = opts.zone_quantization;
    const Scan dst = take_scan(maze, first, Rigid2::identity(), tof, rng);
    const Scan src = take_scan(maze, second, t.applied, tof, rng);
    t.src_points = src.points.size();
    t.dst_points = dst.points.size();
    t.icp = icp_align(src.points, dst.points, opts.icp);

    const Rigid2 residual = compose(t.icp.transform, t.applied);
    t.e_t = norm(residual.apply(c) - c);
    t.e_r = std::abs(angle_norm(residual.rotation));
    return t;
}

}  // namespace tofslam
