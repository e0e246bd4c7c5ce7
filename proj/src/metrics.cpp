#include "tofslam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace tofslam {

double positioning_rmse(std::span<const Pose2> traj, std::span<const Pose2> gt) {
    if (traj.size() != gt.size()) throw std::invalid_argument("positioning_rmse: length mismatch");
    if (traj.empty()) throw std::invalid_argument("positioning_rmse: empty trajectory");
    double s = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) s += squared_norm(traj[k].position() - gt[k].position());
    return std::sqrt(s / static_cast<double>(traj.size()));
}

double pooled_correlation(std::span<const Pose2> a, std::span<const Pose2> b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("pooled_correlation: trajectories must be non-empty and aligned");
    }
    std::vector<double> u, v;
    u.reserve(2 * a.size());
    v.reserve(2 * a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        u.insert(u.end(), {a[k].x, a[k].y});
        v.insert(v.end(), {b[k].x, b[k].y});
    }
    const double n = static_cast<double>(u.size());
    const double mu = std::accumulate(u.begin(), u.end(), 0.0) / n;
    const double mv = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double suv = 0.0, suu = 0.0, svv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        suv += (u[k] - mu) * (v[k] - mv);
        suu += (u[k] - mu) * (u[k] - mu);
        svv += (v[k] - mv) * (v[k] - mv);
    }
    return suv / std::sqrt(suu * svv);
}

std::vector<Vec2> dense_map(std::span<const GraphEntry> entries, std::span<const Pose2> poses,
                            std::span<const SensorGeometry> geometry) {
    if (entries.size() != poses.size()) throw std::invalid_argument("dense_map: one pose per entry");
    std::vector<Vec2> points;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto frame = project_frame(poses[k], rows_from_millimeters(entries[k].tof), geometry);
        points.insert(points.end(), frame.points.begin(), frame.points.end());
    }
    return points;
}

double mapping_rmse(std::span<const Vec2> points, std::span<const Segment> walls) {
    if (points.empty() || walls.empty()) throw std::invalid_argument("mapping_rmse: empty input");
    double s = 0.0;
    for (const Vec2& p : points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& w : walls) {
            const Vec2 e = w.b - w.a;
            best = std::min(best, std::abs(cross(e, p - w.a)) / norm(e));
        }
        s += best * best;
    }
    return std::sqrt(s / static_cast<double>(points.size()));
}

std::size_t OccupancyGrid::occupied_count() const {
    return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

OccupancyGrid rasterize_occupancy(std::span<const Vec2> points, double resolution) {
    if (!(resolution > 0.0)) throw std::invalid_argument("occupancy: resolution must be positive");
    if (points.empty()) throw std::invalid_argument("occupancy: empty map");
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi{-lo.x, -lo.y};
    for (const Vec2& p : points) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    OccupancyGrid g;
    g.resolution = resolution;
    g.origin = {lo.x - resolution, lo.y - resolution};
    const auto cell = [&](double v, double o) { return static_cast<int>(std::floor((v - o) / resolution)); };
    g.width = cell(hi.x, g.origin.x) + 2;
    g.height = cell(hi.y, g.origin.y) + 2;
    g.cells.assign(static_cast<std::size_t>(g.width) * static_cast<std::size_t>(g.height), 0);
    for (const Vec2& p : points) {
        const int ix = cell(p.x, g.origin.x);
        const int iy = cell(p.y, g.origin.y);
        g.cells[static_cast<std::size_t>(iy) * static_cast<std::size_t>(g.width) +
                static_cast<std::size_t>(ix)] = 1;
    }
    return g;
}

void write_pgm(std::ostream& os, const OccupancyGrid& grid) {
    os << "P5\n" << grid.width << ' ' << grid.height << "\n255\n";
    for (int iy = grid.height - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < grid.width; ++ix) os.put(grid.occupied(ix, iy) ? '\0' : '\xff');
    }
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

void write_svg(std::ostream& os, std::span<const Segment> walls,
               std::span<const SvgTrajectory> trajectories, std::span<const Vec2> points) {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    const auto grow = [&](Vec2 p) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    };
    for (const auto& w : walls) {
        grow(w.a);
        grow(w.b);
    }
    for (const auto& t : trajectories) {
        for (const auto& p : t.poses) grow(p.position());
    }
    for (const auto& p : points) grow(p);
    if (!(x1 >= x0)) {
        x0 = y0 = 0.0;
        x1 = y1 = 1.0;
    }
    const double pad = 0.25;
    const double scale = 100.0;  // pixels per meter
    const double w = (x1 - x0 + 2 * pad) * scale;
    const double h = (y1 - y0 + 2 * pad) * scale;
    const auto px = [&](double x) { return fmt((x - x0 + pad) * scale); };
    const auto py = [&](double y) { return fmt((y1 - y + pad) * scale); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
       << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& s : walls) {
        os << "<line x1=\"" << px(s.a.x) << "\" y1=\"" << py(s.a.y) << "\" x2=\"" << px(s.b.x)
           << "\" y2=\"" << py(s.b.y) << "\" stroke=\"#888888\" stroke-width=\"4\"/>\n";
    }
    for (const auto& p : points) {
        os << "<circle cx=\"" << px(p.x) << "\" cy=\"" << py(p.y)
           << "\" r=\"0.8\" fill=\"#3060c0\" fill-opacity=\"0.4\"/>\n";
    }
    for (const auto& t : trajectories) {
        os << "<polyline fill=\"none\" stroke=\"" << t.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < t.poses.size(); ++k) {
            os << (k ? " " : "") << px(t.poses[k].x) << ',' << py(t.poses[k].y);
        }
        os << "\"><title>" << t.label << "</title></polyline>\n";
    }
    os << "</svg>\n";
}

void write_points_csv(std::ostream& os, std::span<const Vec2> points) {
    os << "x,y\n";
    for (const auto& p : points) os << fmt(p.x) << ',' << fmt(p.y) << '\n';
}

void write_trajectory_csv(std::ostream& os, std::span<const Pose2> truth,
                          std::span<const Pose2> poses) {
    if (truth.size() != poses.size()) throw std::invalid_argument("trajectory csv: length mismatch");
    os << "id,truth_x,truth_y,truth_psi,x,y,psi\n";
    for (std::size_t k = 0; k < poses.size(); ++k) {
        os << k << ',' << fmt(truth[k].x) << ',' << fmt(truth[k].y) << ',' << fmt(truth[k].psi) << ','
           << fmt(poses[k].x) << ',' << fmt(poses[k].y) << ',' << fmt(poses[k].psi) << '\n';
    }
}

}  // namespace tofslam
