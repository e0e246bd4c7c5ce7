#include "tofslam/scan.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tofslam {

namespace {

constexpr int kFirstMiddleRow = 2;
constexpr int kLastMiddleRow = 5;

double median_of(std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) {
        return v[n / 2];
    }
    return 0.5 * (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2]));
}

}  // namespace

TofMatrix TofMatrix::uniform(int mm) {
    TofMatrix m;
    for (auto& row : m.millimeters) row.fill(mm);
    for (auto& row : m.valid) row.fill(true);
    return m;
}

ReducedRow reduce_tof_matrix(const TofMatrix& m) {
    ReducedRow out;
    std::vector<int> column;
    column.reserve(4);
    for (int c = 0; c < kTofGrid; ++c) {
        column.clear();
        for (int r = kFirstMiddleRow; r <= kLastMiddleRow; ++r) {
            const int mm = m.millimeters[r][c];
            if (m.valid[r][c] && mm >= 1 && mm <= kMaxTofMillimeters) {
                column.push_back(mm);
            }
        }
        if (!column.empty()) {
            out.push_back({c, median_of(column) / 1000.0});
        }
    }
    return out;
}

SensorGeometry SensorGeometry::with_uniform_zones(double mount_angle, Vec2 offset, double fov) {
    SensorGeometry g;
    g.offset = offset;
    g.mount_angle = mount_angle;
    g.fov = fov;
    for (int b = 0; b < kTofGrid; ++b) {
        g.zone_angles[static_cast<std::size_t>(b)] = ((b - 3.5) / kTofGrid) * fov;
    }
    return g;
}

void SensorGeometry::validate() const {
    for (int b = 0; b < kTofGrid; ++b) {
        const double a = zone_angles[static_cast<std::size_t>(b)];
        if (std::abs(a) >= fov / 2.0) {
            throw std::invalid_argument("sensor geometry: zone angle outside field of view");
        }
        if (b > 0 && a <= zone_angles[static_cast<std::size_t>(b - 1)]) {
            throw std::invalid_argument("sensor geometry: zone angles not increasing");
        }
        if (std::abs(a + zone_angles[static_cast<std::size_t>(kTofGrid - 1 - b)]) > 1e-12) {
            throw std::invalid_argument("sensor geometry: zone angles not symmetric");
        }
    }
}

std::vector<SensorGeometry> quad_deck(double radial_offset) {
    // Offsets are along each sensor's own axis, as they enter the projection.
    return {
        SensorGeometry::with_uniform_zones(0.0, {radial_offset, 0.0}),
        SensorGeometry::with_uniform_zones(kPi / 2.0, {radial_offset, 0.0}),
        SensorGeometry::with_uniform_zones(kPi, {radial_offset, 0.0}),
        SensorGeometry::with_uniform_zones(-kPi / 2.0, {radial_offset, 0.0}),
    };
}

ScanFrame project_frame(const Pose2& pose, const FrameRows& rows,
                        std::span<const SensorGeometry> geometry) {
    if (!std::isfinite(pose.x) || !std::isfinite(pose.y) || !std::isfinite(pose.psi)) {
        throw std::invalid_argument("project_frame: non-finite pose");
    }
    if (rows.size() > geometry.size()) {
        throw std::invalid_argument("project_frame: more sensor rows than sensors");
    }
    ScanFrame frame;
    const Vec2 origin = pose.position();
    for (std::size_t s = 0; s < rows.size(); ++s) {
        const SensorGeometry& g = geometry[s];
        const Mat2 r = rot2(pose.psi + g.mount_angle);
        for (const ZoneReading& z : rows[s]) {
            if (z.column < 0 || z.column >= kTofGrid) {
                throw std::invalid_argument("project_frame: zone column out of range");
            }
            if (!(z.distance > 0.0 && z.distance <= kMaxTofRange)) {
                throw std::invalid_argument("project_frame: distance outside (0, 4] m");
            }
            const double theta = g.zone_angles[static_cast<std::size_t>(z.column)];
            const Vec2 local{z.distance + g.offset.x, std::tan(theta) * z.distance + g.offset.y};
            frame.points.push_back(origin + r * local);
        }
    }
    return frame;
}

Scan assemble_scan(std::span<const FrameInput> frames, std::span<const SensorGeometry> geometry,
                   const ScanConfig& cfg) {
    if (frames.empty()) {
        throw std::invalid_argument("assemble_scan: empty frame sequence");
    }
    if (static_cast<int>(frames.size()) > cfg.frames_per_scan) {
        throw std::invalid_argument("assemble_scan: more than " +
                                    std::to_string(cfg.frames_per_scan) + " frames");
    }
    Scan scan;
    scan.origin_pose = frames.front().pose;
    scan.points.reserve(static_cast<std::size_t>(cfg.capacity()));
    for (const FrameInput& f : frames) {
        ScanFrame pf = project_frame(f.pose, f.rows, geometry);
        scan.points.insert(scan.points.end(), pf.points.begin(), pf.points.end());
    }
    if (static_cast<int>(scan.points.size()) > cfg.capacity()) {
        throw std::invalid_argument("assemble_scan: scan exceeds capacity");
    }
    return scan;
}

TofRows rows_to_millimeters(const FrameRows& rows) {
    if (rows.size() > 4) {
        throw std::invalid_argument("rows_to_millimeters: at most 4 sensors");
    }
    TofRows out{};
    for (std::size_t s = 0; s < rows.size(); ++s) {
        for (const ZoneReading& z : rows[s]) {
            const long mm = std::lround(z.distance * 1000.0);
            out[s][static_cast<std::size_t>(z.column)] =
                static_cast<std::int16_t>(std::clamp<long>(mm, 1, kMaxTofMillimeters));
        }
    }
    return out;
}

FrameRows rows_from_millimeters(const TofRows& rows) {
    FrameRows out(rows.size());
    for (std::size_t s = 0; s < rows.size(); ++s) {
        for (int c = 0; c < kTofGrid; ++c) {
            const int mm = rows[s][static_cast<std::size_t>(c)];
            if (mm > 0) {
                out[s].push_back({c, mm / 1000.0});
            }
        }
    }
    return out;
}

}  // namespace tofslam
