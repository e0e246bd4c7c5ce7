#include "tofslam/graph_io.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace tofslam {

void write_graph(std::ostream& os, std::span<const Pose2> poses, std::span<const Edge> edges) {
    const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t k = 0; k < poses.size(); ++k) {
        os << "VERTEX " << k << ' ' << poses[k].x << ' ' << poses[k].y << ' ' << poses[k].psi << '\n';
    }
    for (const auto& e : edges) {
        os << "EDGE " << e.from << ' ' << e.to << ' ' << e.z.x << ' ' << e.z.y << ' ' << e.z.psi << ' '
           << e.omega << '\n';
    }
    os.precision(old_precision);
}

GraphFile read_graph(std::istream& is) {
    GraphFile g;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) {
        throw GraphError("graph file line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(is, line)) {
        ++line_no;
        std::istringstream in(line);
        std::string tag;
        if (!(in >> tag) || tag[0] == '#') continue;
        if (tag == "VERTEX") {
            std::size_t id = 0;
            double x = 0, y = 0, psi = 0;
            if (!(in >> id >> x >> y >> psi)) fail("malformed VERTEX");
            if (id != g.poses.size()) fail("vertex ids must be consecutive from 0");
            if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(psi)) fail("non-finite pose");
            g.poses.emplace_back(x, y, psi);
        } else if (tag == "EDGE") {
            Edge e;
            if (!(in >> e.from >> e.to >> e.z.x >> e.z.y >> e.z.psi >> e.omega)) fail("malformed EDGE");
            if (!(e.omega > 0.0)) fail("edge weight must be positive");
            e.kind = (e.to == e.from + 1 && e.omega == kOdometryOmega) ? EdgeKind::odometry
                                                                        : EdgeKind::loop_closure;
            g.edges.push_back(e);
        } else {
            fail("unknown record '" + tag + "'");
        }
        std::string extra;
        if (in >> extra) fail("trailing data");
    }
    for (const auto& e : g.edges) {
        if (e.from >= g.poses.size() || e.to >= g.poses.size() || e.from == e.to) {
            throw GraphError("graph file: edge (" + std::to_string(e.from) + ", " +
                             std::to_string(e.to) + ") references a missing vertex");
        }
    }
    return g;
}

}  // namespace tofslam
