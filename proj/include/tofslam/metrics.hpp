#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tofslam/maze.hpp"
#include "tofslam/pose_graph.hpp"

namespace tofslam {

/// sqrt(mean ||(x, y) - (x, y)_gt||^2); headings are ignored.
double positioning_rmse(std::span<const Pose2> traj, std::span<const Pose2> gt);

/// Pearson correlation of the x and y components of both trajectories pooled into one series.
double pooled_correlation(std::span<const Pose2> a, std::span<const Pose2> b);

/// Every stored ToF row projected from the given poses (one pose per entry).
std::vector<Vec2> dense_map(std::span<const GraphEntry> entries, std::span<const Pose2> poses,
                            std::span<const SensorGeometry> geometry);

/// RMSE of each point's distance to the nearest infinite line through a wall segment.
double mapping_rmse(std::span<const Vec2> points, std::span<const Segment> walls);

struct OccupancyGrid {
    double resolution = 0.0;
    Vec2 origin{};         // lower-left corner of cell (0, 0)
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> cells;  // row-major from the bottom row, 1 = occupied

    bool occupied(int ix, int iy) const {
        return cells[static_cast<std::size_t>(iy) * static_cast<std::size_t>(width) +
                     static_cast<std::size_t>(ix)] != 0;
    }
    std::size_t occupied_count() const;
};

/// Cell (floor((x - ox) / r), floor((y - oy) / r)) is occupied when a point falls in it. The
/// grid spans the points' bounding box padded by one cell on every side.
OccupancyGrid rasterize_occupancy(std::span<const Vec2> points, double resolution);

/// Binary PGM (P5): occupied cells black, free white, top row first.
void write_pgm(std::ostream& os, const OccupancyGrid& grid);

struct SvgTrajectory {
    std::vector<Pose2> poses;
    std::string color;
    std::string label;
};

/// Walls in grey, then each trajectory as a polyline in the given color.
void write_svg(std::ostream& os, std::span<const Segment> walls,
               std::span<const SvgTrajectory> trajectories, std::span<const Vec2> points = {});

/// "x,y" per line.
void write_points_csv(std::ostream& os, std::span<const Vec2> points);

/// "id,truth_x,truth_y,truth_psi,x,y,psi" per line.
void write_trajectory_csv(std::ostream& os, std::span<const Pose2> truth,
                          std::span<const Pose2> poses);

}  // namespace tofslam
