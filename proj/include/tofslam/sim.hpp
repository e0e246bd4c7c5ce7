#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tofslam/maze.hpp"
#include "tofslam/scan.hpp"

namespace tofslam {

struct TofSimOptions {
    /// Each pixel reports the hit of a random ray inside its zone instead of the zone's center
    /// ray, while the projection still assumes the center angle.
    bool zone_quantization = true;
    double range_noise_std = 0.0;  // meters
};

/// Simulated 8x8 readings of every sensor at the true pose. Walls are vertical, so all rows see
/// the same geometry; rows differ only through quantization and noise. A pixel reports the
/// hit's component along the sensor axis and is invalid when the hit is farther than 4 m.
/// Throws MazeError when the pose is not in free space.
std::vector<TofMatrix> raycast_tof(const Pose2& truth, const Maze& maze,
                                   std::span<const SensorGeometry> geometry,
                                   const TofSimOptions& opts, std::mt19937_64& rng);

/// Reduced rows of raycast_tof, as fed to the scan model.
FrameRows simulate_rows(const Pose2& truth, const Maze& maze,
                        std::span<const SensorGeometry> geometry, const TofSimOptions& opts,
                        std::mt19937_64& rng);

struct DriftModel {
    double scale_forward = 1.11;       // optical-flow overestimate of forward motion
    double velocity_noise_std = 0.03;  // m/s per body axis
    double yaw_rate_noise_std = 0.01;  // rad/s
    double yaw_rate_bias = 0.003;      // rad/s, constant gyro offset
    std::uint64_t seed = 1;
};

/// Body-frame velocity command.
struct MotionCommand {
    double forward = 0.0;   // m/s
    double yaw_rate = 0.0;  // rad/s
};

/// What the onboard state estimator reports for one command.
struct OdometryReading {
    Vec2 velocity{};        // body frame, m/s
    double yaw_rate = 0.0;  // rad/s
};

class DriftSimulator {
public:
    explicit DriftSimulator(const DriftModel& model);

    OdometryReading measure(const MotionCommand& cmd);

private:
    DriftModel model_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> unit_{0.0, 1.0};
};

/// Exact motion: translate along the heading, then rotate.
Pose2 advance_truth(const Pose2& truth, const MotionCommand& cmd, double dt);

/// Dead reckoning with a translation correction factor (0.9 cancels the default 1.11 scale).
Pose2 integrate_odometry(const Pose2& estimate, const OdometryReading& reading, double dt,
                         double correction = 1.0);

struct OdometryStep {
    Pose2 truth;
    Pose2 estimate;
};

OdometryStep step_odometry(const OdometryStep& state, const MotionCommand& cmd,
                           DriftSimulator& drift, double dt, double correction = 1.0);

}  // namespace tofslam
