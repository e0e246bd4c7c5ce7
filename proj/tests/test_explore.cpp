#include <gtest/gtest.h>

#include <cmath>

#include "tofslam/explore.hpp"

using namespace tofslam;

namespace {

std::vector<Vec2> segment_points(Vec2 a, Vec2 b, int n) {
    std::vector<Vec2> pts;
    for (int k = 0; k < n; ++k) pts.push_back(a + (static_cast<double>(k) / (n - 1)) * (b - a));
    return pts;
}

ReducedRow uniform_row(double d) {
    ReducedRow row;
    for (int c = 0; c < 8; ++c) row.push_back({c, d});
    return row;
}

FrameRows rows(double front, double left, double back, double right) {
    return {uniform_row(front), uniform_row(left), uniform_row(back), uniform_row(right)};
}

}  // namespace

TEST(Hough, CollinearPointsAreNotACorner) {
    const auto pts = segment_points({0.5, -0.5}, {0.5, 0.5}, 32);
    const auto lines = hough_lines(pts);
    ASSERT_EQ(lines.size(), 1u);
    EXPECT_GE(lines[0].votes, 16);  // bins are centered half a step off the axes
    EXPECT_NEAR(lines[0].rho, 0.5, 0.05);
    EXPECT_FALSE(detect_corner(pts));
}

TEST(Hough, LShapeIsACorner) {
    auto pts = segment_points({0.6, 0.0}, {0.6, 1.0}, 16);
    const auto b = segment_points({-0.4, 0.0}, {0.6, 0.0}, 16);
    pts.insert(pts.end(), b.begin(), b.end());
    const auto lines = hough_lines(pts);
    ASSERT_GE(lines.size(), 2u);
    double d = std::abs(lines[0].theta - lines[1].theta);
    d = std::min(d, kPi - d);
    EXPECT_NEAR(d, kPi / 2, deg2rad(5.0));
    EXPECT_TRUE(detect_corner(pts));
    EXPECT_TRUE(detect_corner(ScanFrame{pts}));
}

TEST(Hough, TwentyDegreesIsNotACorner) {
    const Vec2 v{0.3, -0.4};
    auto pts = segment_points(v, v + 0.8 * Vec2{std::cos(deg2rad(80.0)), std::sin(deg2rad(80.0))}, 16);
    const auto b = segment_points(v, v + 0.8 * Vec2{std::cos(deg2rad(100.0)), std::sin(deg2rad(100.0))}, 16);
    pts.insert(pts.end(), b.begin(), b.end());
    EXPECT_FALSE(detect_corner(pts));
}

TEST(Hough, FewOrDistantPointsAreNotACorner) {
    EXPECT_FALSE(detect_corner(std::vector<Vec2>{{0.5, 0}, {0.5, 0.1}, {0, 0.5}, {0.1, 0.5}}));
    // An L shape beyond the range gate is ignored.
    auto pts = segment_points({2.0, 0.0}, {2.0, 1.0}, 16);
    const auto b = segment_points({1.0, 0.0}, {2.0, 0.0}, 16);
    pts.insert(pts.end(), b.begin(), b.end());
    for (auto& p : pts) p = p + Vec2{0.0, 0.5};
    EXPECT_FALSE(detect_corner(pts));
    HoughConfig wide;
    wide.max_range = 5.0;
    EXPECT_TRUE(detect_corner(pts, wide));
}

TEST(Follower, Decisions) {
    EXPECT_EQ(wall_follow_step(rows(2.0, 0.5, 2.0, 0.5)), FollowCommand::forward);
    EXPECT_EQ(wall_follow_step(rows(0.5, 2.0, 2.0, 2.0)), FollowCommand::turn_left);
    EXPECT_EQ(wall_follow_step(rows(0.5, 0.5, 2.0, 2.0)), FollowCommand::turn_right);
    EXPECT_EQ(wall_follow_step(rows(0.5, 0.5, 2.0, 0.5)), FollowCommand::land);
    EXPECT_EQ(wall_follow_step(FrameRows{{}, {}, {}, {}}), FollowCommand::forward);
}

TEST(Follower, UsesCentralZonesOnly) {
    // Close readings in the outer front zones do not block the way ahead.
    auto r = rows(2.0, 2.0, 2.0, 2.0);
    for (int c : {0, 1, 6, 7}) r[0][static_cast<std::size_t>(c)].distance = 0.3;
    EXPECT_EQ(wall_follow_step(r), FollowCommand::forward);
    r[0][2].distance = 0.69;
    EXPECT_EQ(wall_follow_step(r), FollowCommand::turn_left);
    // A left wall only in the outer side zones does not count.
    for (int c : {0, 1, 2, 5, 6, 7}) r[1][static_cast<std::size_t>(c)].distance = 0.3;
    EXPECT_EQ(wall_follow_step(r), FollowCommand::turn_left);
    r[1][4].distance = 0.9;
    EXPECT_EQ(wall_follow_step(r), FollowCommand::turn_right);
    EXPECT_STREQ(to_string(FollowCommand::turn_right), "turn-right");
}
