#include "tofslam/sim.hpp"

#include <cmath>
#include <stdexcept>

namespace tofslam {

std::vector<TofMatrix> raycast_tof(const Pose2& truth, const Maze& maze,
                                   std::span<const SensorGeometry> geometry,
                                   const TofSimOptions& opts, std::mt19937_64& rng) {
    if (!in_free_space(maze, truth.position())) {
        throw MazeError("raycast_tof: pose (" + std::to_string(truth.x) + ", " +
                        std::to_string(truth.y) + ") is outside free space");
    }
    std::uniform_real_distribution<double> sub_ray(-0.5, 0.5);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<TofMatrix> out;
    out.reserve(geometry.size());
    for (const auto& g : geometry) {
        const double axis = truth.psi + g.mount_angle;
        const Vec2 origin = truth.position() + rot2(axis) * g.offset;
        const double zone_width = g.fov / kTofGrid;
        TofMatrix m;
        for (int r = 0; r < kTofGrid; ++r) {
            for (int c = 0; c < kTofGrid; ++c) {
                double theta = g.zone_angles[static_cast<std::size_t>(c)];
                if (opts.zone_quantization) theta += sub_ray(rng) * zone_width;
                const double n = opts.range_noise_std > 0.0 ? opts.range_noise_std * noise(rng) : 0.0;
                const auto hit = cast_ray(maze, origin, {std::cos(axis + theta), std::sin(axis + theta)});
                const auto ur = static_cast<std::size_t>(r);
                const auto uc = static_cast<std::size_t>(c);
                if (!hit || *hit > kMaxTofRange) continue;
                const double d = *hit * std::cos(theta) + n;
                const long mm = std::lround(d * 1000.0);
                if (mm < 1 || mm > kMaxTofMillimeters) continue;
                m.millimeters[ur][uc] = static_cast<int>(mm);
                m.valid[ur][uc] = true;
            }
        }
        out.push_back(m);
    }
    return out;
}

FrameRows simulate_rows(const Pose2& truth, const Maze& maze,
                        std::span<const SensorGeometry> geometry, const TofSimOptions& opts,
                        std::mt19937_64& rng) {
    FrameRows rows;
    for (const auto& m : raycast_tof(truth, maze, geometry, opts, rng)) {
        rows.push_back(reduce_tof_matrix(m));
    }
    return rows;
}

DriftSimulator::DriftSimulator(const DriftModel& model) : model_(model), rng_(model.seed) {
    if (!(model.scale_forward > 0.0) || model.velocity_noise_std < 0.0 ||
        model.yaw_rate_noise_std < 0.0) {
        throw std::invalid_argument("drift model: scale must be positive and noise non-negative");
    }
}

OdometryReading DriftSimulator::measure(const MotionCommand& cmd) {
    OdometryReading r;
    r.velocity.x = cmd.forward * model_.scale_forward + model_.velocity_noise_std * unit_(rng_);
    r.velocity.y = model_.velocity_noise_std * unit_(rng_);
    r.yaw_rate = cmd.yaw_rate + model_.yaw_rate_bias + model_.yaw_rate_noise_std * unit_(rng_);
    return r;
}

Pose2 advance_truth(const Pose2& truth, const MotionCommand& cmd, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    const Vec2 p = truth.position() + rot2(truth.psi) * Vec2{cmd.forward * dt, 0.0};
    return {p.x, p.y, truth.psi + cmd.yaw_rate * dt};
}

Pose2 integrate_odometry(const Pose2& estimate, const OdometryReading& reading, double dt,
                         double correction) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    const Vec2 p = estimate.position() + rot2(estimate.psi) * (correction * dt * reading.velocity);
    return {p.x, p.y, estimate.psi + reading.yaw_rate * dt};
}

OdometryStep step_odometry(const OdometryStep& state, const MotionCommand& cmd,
                           DriftSimulator& drift, double dt, double correction) {
    return {advance_truth(state.truth, cmd, dt),
            integrate_odometry(state.estimate, drift.measure(cmd), dt, correction)};
}

}  // namespace tofslam
