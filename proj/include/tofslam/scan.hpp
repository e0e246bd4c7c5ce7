#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tofslam/geometry.hpp"

namespace tofslam {

inline constexpr int kTofGrid = 8;
inline constexpr int kMaxTofMillimeters = 4000;
inline constexpr double kMaxTofRange = 4.0;

/// One 8x8 reading of a multizone ToF sensor. Rows are elevation, columns azimuth.
struct TofMatrix {
    std::array<std::array<int, kTofGrid>, kTofGrid> millimeters{};
    std::array<std::array<bool, kTofGrid>, kTofGrid> valid{};

    static TofMatrix uniform(int mm);
};

/// A planar reading for one zone column, in meters.
struct ZoneReading {
    int column = 0;
    double distance = 0.0;

    friend bool operator==(const ZoneReading&, const ZoneReading&) = default;
};

/// The planar row of one sensor: valid columns only, ascending column index.
using ReducedRow = std::vector<ZoneReading>;

/// Reduced rows of every sensor for one time step, indexed by sensor.
using FrameRows = std::vector<ReducedRow>;

/// Collapses an 8x8 matrix into a single row. The top and bottom two rows are dropped and
/// each column keeps the median of its valid middle pixels (mean of the two central values
/// for even counts). Columns without a valid middle pixel are omitted. Valid pixels outside
/// [1, 4000] mm are ignored.
ReducedRow reduce_tof_matrix(const TofMatrix& m);

struct SensorGeometry {
    Vec2 offset{};              // body frame, meters
    double mount_angle = 0.0;   // gamma, radians
    std::array<double, kTofGrid> zone_angles{};
    double fov = deg2rad(45.0);

    /// Zone centers theta_b = ((b - 3.5) / 8) * fov.
    static SensorGeometry with_uniform_zones(double mount_angle, Vec2 offset,
                                             double fov = deg2rad(45.0));
    void validate() const;
};

/// Four sensors facing front, left, back and right.
std::vector<SensorGeometry> quad_deck(double radial_offset = 0.02);

struct ScanConfig {
    int n_sensors = 4;
    int n_zones = 8;
    int frames_per_scan = 20;
    double frame_rate = 7.5;
    double spin_angle = deg2rad(45.0);

    int capacity() const { return frames_per_scan * n_sensors * n_zones; }
};

struct ScanFrame {
    std::vector<Vec2> points;
};

struct Scan {
    std::vector<Vec2> points;
    Pose2 origin_pose{};

    bool degenerate() const { return points.empty(); }
};

struct FrameInput {
    Pose2 pose{};
    FrameRows rows;
};

/// Projects reduced rows taken at `pose` into world-frame points:
/// p = (x, y) + R(psi + gamma) (d + o_x, tan(theta) d + o_y).
ScanFrame project_frame(const Pose2& pose, const FrameRows& rows,
                        std::span<const SensorGeometry> geometry);

/// Stacks up to frames_per_scan projected frames. The scan pose is the first frame's pose.
Scan assemble_scan(std::span<const FrameInput> frames, std::span<const SensorGeometry> geometry,
                   const ScanConfig& cfg);

/// Wire representation of FrameRows: 4 sensors x 8 zones, millimeters, 0 = invalid.
using TofRows = std::array<std::array<std::int16_t, kTofGrid>, 4>;

TofRows rows_to_millimeters(const FrameRows& rows);
FrameRows rows_from_millimeters(const TofRows& rows);

}  // namespace tofslam
