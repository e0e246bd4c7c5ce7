#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tofslam/metrics.hpp"

using namespace tofslam;

TEST(Metrics, PositioningRmseByHand) {
    const std::vector<Pose2> gt = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    const std::vector<Pose2> est = {{0, 0, 1}, {1, 0.3, 0}, {2, -0.4, 0}, {3.5, 0, 2}};
    EXPECT_NEAR(positioning_rmse(est, gt), std::sqrt((0.09 + 0.16 + 0.25) / 4), 1e-15);
    EXPECT_EQ(positioning_rmse(gt, gt), 0.0);
    EXPECT_THROW(positioning_rmse(std::span(est).first(2), gt), std::invalid_argument);
    EXPECT_THROW(positioning_rmse({}, {}), std::invalid_argument);
}

TEST(Metrics, PooledCorrelation) {
    std::vector<Pose2> a, b, c;
    for (int k = 0; k < 50; ++k) {
        a.emplace_back(k * 0.1, std::sin(k * 0.2), 0.0);
        b.emplace_back(2.0 * k * 0.1 + 1.0, 2.0 * std::sin(k * 0.2) + 1.0, 0.5);
        c.emplace_back(-k * 0.1, -std::sin(k * 0.2), 0.0);
    }
    EXPECT_NEAR(pooled_correlation(a, a), 1.0, 1e-12);
    EXPECT_NEAR(pooled_correlation(a, b), 1.0, 1e-12);
    EXPECT_NEAR(pooled_correlation(a, c), -1.0, 1e-12);
}

TEST(Metrics, MappingRmseUsesInfiniteLines) {
    const std::vector<Segment> walls = {{{0, 0}, {1, 0}}, {{0, 2}, {0, 3}}};
    // (5, 0.1) is far from the first segment but 0.1 from its extension.
    const std::vector<Vec2> pts = {{0.5, 0.2}, {5.0, 0.1}, {-0.3, 2.5}, {0.1, 10.0}};
    EXPECT_NEAR(mapping_rmse(pts, walls), std::sqrt((0.04 + 0.01 + 0.09 + 0.01) / 4), 1e-15);
    EXPECT_EQ(mapping_rmse(std::vector<Vec2>{{7, 0}, {0, -4}}, walls), 0.0);
    EXPECT_THROW(mapping_rmse({}, walls), std::invalid_argument);
}

TEST(Metrics, RigidInvariance) {
    const Rigid2 t{0.7, {1.5, -2.0}};
    std::vector<Pose2> a, b;
    std::vector<Vec2> pts;
    std::vector<Segment> walls = {{{0, 0}, {4, 0}}, {{4, 0}, {4, 3}}, {{1, 1}, {2, 2}}};
    for (int k = 0; k < 30; ++k) {
        a.emplace_back(0.1 * k, std::cos(0.3 * k), 0.0);
        b.emplace_back(0.1 * k + 0.05 * std::sin(k), std::cos(0.3 * k) - 0.02 * k, 0.0);
        pts.push_back({0.13 * k, 0.05 * std::sin(1.7 * k)});
    }
    std::vector<Pose2> ta, tb;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ta.push_back(t.apply(a[k]));
        tb.push_back(t.apply(b[k]));
    }
    std::vector<Vec2> tp;
    for (auto p : pts) tp.push_back(t.apply(p));
    std::vector<Segment> tw;
    for (auto w : walls) tw.push_back({t.apply(w.a), t.apply(w.b)});
    EXPECT_NEAR(positioning_rmse(ta, tb), positioning_rmse(a, b), 1e-12);
    EXPECT_NEAR(mapping_rmse(tp, tw), mapping_rmse(pts, walls), 1e-12);
}

TEST(Metrics, DenseMapProjectsEveryRow) {
    const auto geom = quad_deck();
    GraphEntry e{};
    for (auto& row : e.tof) row.fill(1000);
    e.tof[2].fill(0);
    const std::vector<GraphEntry> entries = {e, e};
    const std::vector<Pose2> poses = {{0, 0, 0}, {1, 0, kPi / 2}};
    const auto pts = dense_map(entries, poses, geom);
    ASSERT_EQ(pts.size(), 48u);
    // Front sensor, zone 4 of the first entry: 1.02 m ahead, tan(theta) m to the side.
    const double theta = geom[0].zone_angles[4];
    EXPECT_NEAR(pts[4].x, 1.02, 1e-12);
    EXPECT_NEAR(pts[4].y, std::tan(theta), 1e-12);
    EXPECT_THROW(dense_map(entries, std::span(poses).first(1), geom), std::invalid_argument);
}

TEST(Metrics, OccupancyGrid) {
    const std::vector<Vec2> pts = {{0.0, 0.0}, {0.12, 0.0}, {0.12, 0.07}, {0.01, 0.01}};
    const auto g = rasterize_occupancy(pts, 0.05);
    EXPECT_EQ(g.origin, (Vec2{-0.05, -0.05}));
    EXPECT_EQ(g.width, 5);   // cells -1..3 in x
    EXPECT_EQ(g.height, 4);  // cells -1..2 in y
    EXPECT_EQ(g.occupied_count(), 3u);
    EXPECT_TRUE(g.occupied(1, 1));
    EXPECT_TRUE(g.occupied(3, 1));
    EXPECT_TRUE(g.occupied(3, 2));
    EXPECT_FALSE(g.occupied(0, 0));

    std::ostringstream os;
    write_pgm(os, g);
    const std::string s = os.str();
    const std::string header = "P5\n5 4\n255\n";
    ASSERT_EQ(s.size(), header.size() + 20);
    EXPECT_EQ(s.substr(0, header.size()), header);
    // Top row first: row iy = 2 has its occupied cell at ix = 3.
    EXPECT_EQ(static_cast<unsigned char>(s[header.size() + 5 + 3]), 0);
    EXPECT_EQ(static_cast<unsigned char>(s[header.size() + 5 + 2]), 255);
    EXPECT_THROW(rasterize_occupancy(pts, 0.0), std::invalid_argument);
}

TEST(Metrics, TextOutputs) {
    std::ostringstream csv;
    write_points_csv(csv, std::vector<Vec2>{{1, 2}, {-0.5, 0.25}});
    EXPECT_EQ(csv.str(), "x,y\n1.0000,2.0000\n-0.5000,0.2500\n");

    std::ostringstream traj;
    write_trajectory_csv(traj, std::vector<Pose2>{{0, 0, 0}}, std::vector<Pose2>{{1, 2, 0.5}});
    EXPECT_EQ(traj.str(), "id,truth_x,truth_y,truth_psi,x,y,psi\n0,0.0000,0.0000,0.0000,1.0000,2.0000,0.5000\n");

    const std::vector<Segment> walls = {{{0, 0}, {1, 0}}};
    const std::vector<SvgTrajectory> trajs = {{{{0, 0, 0}, {1, 1, 0}}, "red", "truth"}};
    std::ostringstream svg;
    write_svg(svg, walls, trajs);
    const std::string s = svg.str();
    EXPECT_NE(s.find("<svg"), std::string::npos);
    EXPECT_NE(s.find("stroke=\"red\""), std::string::npos);
    EXPECT_NE(s.find("<title>truth</title>"), std::string::npos);
    EXPECT_NE(s.find("</svg>"), std::string::npos);
}
