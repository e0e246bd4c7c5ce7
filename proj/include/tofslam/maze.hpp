#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tofslam/geometry.hpp"

namespace tofslam {

class MazeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Segment {
    Vec2 a{};
    Vec2 b{};

    double length() const { return norm(b - a); }
};

/// Line-segment world. Walls are vertical panels, so a 2D segment set describes them fully.
struct Maze {
    std::string name;
    std::vector<Segment> walls;
    Pose2 takeoff{};

    /// Throws MazeError on an empty wall list or a zero-length segment.
    void validate() const;
};

/// {"name": ..., "walls": [[x1, y1, x2, y2], ...], "takeoff": {"x": .., "y": .., "psi": ..}}
/// The takeoff pose is optional and defaults to the origin.
Maze parse_maze(const std::string& json_text);
Maze load_maze(const std::string& path);
std::string maze_to_json(const Maze& maze);

/// Closed rectangular corridor: an outer box with a centered inner block. Takeoff sits in the
/// middle of the corridor near the lower-left corner, facing +x.
Maze square_loop_maze(double outer, double inner, const std::string& name = "square-loop");

/// Distance along the unit direction `dir` from `origin` to the first wall, if any.
std::optional<double> cast_ray(const Maze& maze, Vec2 origin, Vec2 dir);

/// Euclidean distance from p to the closest wall segment.
double distance_to_walls(const Maze& maze, Vec2 p);

/// Inside the bounding box of the walls and more than `clearance` from every wall.
bool in_free_space(const Maze& maze, Vec2 p, double clearance = 0.05);

}  // namespace tofslam
