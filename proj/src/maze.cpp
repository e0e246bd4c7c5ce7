#include "tofslam/maze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace tofslam {

void Maze::validate() const {
    if (walls.empty()) throw MazeError("maze '" + name + "' has no walls");
    for (std::size_t k = 0; k < walls.size(); ++k) {
        const auto& w = walls[k];
        if (!std::isfinite(w.a.x) || !std::isfinite(w.a.y) || !std::isfinite(w.b.x) ||
            !std::isfinite(w.b.y)) {
            throw MazeError("maze '" + name + "': wall " + std::to_string(k) + " is not finite");
        }
        if (!(w.length() > 0.0)) {
            throw MazeError("maze '" + name + "': wall " + std::to_string(k) + " has zero length");
        }
    }
}

Maze parse_maze(const std::string& json_text) {
    Maze m;
    try {
        const auto j = nlohmann::json::parse(json_text);
        m.name = j.value("name", std::string{});
        for (const auto& w : j.at("walls")) {
            if (!w.is_array() || w.size() != 4) throw MazeError("a wall must be [x1, y1, x2, y2]");
            m.walls.push_back({{w[0].get<double>(), w[1].get<double>()},
                               {w[2].get<double>(), w[3].get<double>()}});
        }
        if (j.contains("takeoff")) {
            const auto& t = j.at("takeoff");
            m.takeoff = Pose2(t.at("x").get<double>(), t.at("y").get<double>(),
                              t.value("psi", 0.0));
        }
    } catch (const nlohmann::json::exception& e) {
        throw MazeError(std::string("maze json: ") + e.what());
    }
    m.validate();
    return m;
}

Maze load_maze(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MazeError("cannot open maze file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_maze(ss.str());
}

std::string maze_to_json(const Maze& maze) {
    nlohmann::ordered_json j;
    j["name"] = maze.name;
    j["walls"] = nlohmann::ordered_json::array();
    for (const auto& w : maze.walls) j["walls"].push_back({w.a.x, w.a.y, w.b.x, w.b.y});
    j["takeoff"] = {{"x", maze.takeoff.x}, {"y", maze.takeoff.y}, {"psi", maze.takeoff.psi}};
    return j.dump(2) + "\n";
}

Maze square_loop_maze(double outer, double inner, const std::string& name) {
    if (!(outer > inner) || !(inner > 0.0)) {
        throw MazeError("square loop maze needs outer > inner > 0");
    }
    const double lo = (outer - inner) / 2.0;
    const double hi = lo + inner;
    Maze m;
    m.name = name;
    m.walls = {
        {{0, 0}, {outer, 0}}, {{outer, 0}, {outer, outer}},
        {{outer, outer}, {0, outer}}, {{0, outer}, {0, 0}},
        {{lo, lo}, {hi, lo}}, {{hi, lo}, {hi, hi}},
        {{hi, hi}, {lo, hi}}, {{lo, hi}, {lo, lo}},
    };
    m.takeoff = Pose2(lo / 2.0, lo / 2.0, 0.0);
    return m;
}

std::optional<double> cast_ray(const Maze& maze, Vec2 origin, Vec2 dir) {
    std::optional<double> best;
    for (const auto& w : maze.walls) {
        const Vec2 e = w.b - w.a;
        const double den = cross(dir, e);
        if (den == 0.0) continue;
        const Vec2 ao = w.a - origin;
        const double t = cross(ao, e) / den;
        const double s = cross(ao, dir) / den;
        if (t >= 0.0 && s >= 0.0 && s <= 1.0 && (!best || t < *best)) best = t;
    }
    return best;
}

double distance_to_walls(const Maze& maze, Vec2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : maze.walls) {
        const Vec2 e = w.b - w.a;
        const double s = std::clamp(dot(p - w.a, e) / squared_norm(e), 0.0, 1.0);
        best = std::min(best, norm(p - (w.a + s * e)));
    }
    return best;
}

bool in_free_space(const Maze& maze, Vec2 p, double clearance) {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    for (const auto& w : maze.walls) {
        for (const Vec2& v : {w.a, w.b}) {
            x0 = std::min(x0, v.x);
            y0 = std::min(y0, v.y);
            x1 = std::max(x1, v.x);
            y1 = std::max(y1, v.y);
        }
    }
    if (p.x <= x0 || p.x >= x1 || p.y <= y0 || p.y >= y1) return false;
    return distance_to_walls(maze, p) > clearance;
}

}  // namespace tofslam
