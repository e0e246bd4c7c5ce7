#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "tofslam/icp.hpp"

using namespace tofslam;

namespace {

std::vector<Vec2> transformed(const std::vector<Vec2>& pts, const Rigid2& t) {
    std::vector<Vec2> out;
    for (const auto& p : pts) out.push_back(t.apply(p));
    return out;
}

// Irregular blob of points so that nearest neighbours are unambiguous.
std::vector<Vec2> random_cloud(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<Vec2> pts;
    for (std::size_t k = 0; k < n; ++k) pts.push_back({u(rng), u(rng)});
    return pts;
}

// Two walls meeting at a right angle, sampled densely.
std::vector<Vec2> corner_cloud() {
    std::vector<Vec2> pts;
    for (int k = 0; k <= 60; ++k) pts.push_back({0.02 * k, 0.0});
    for (int k = 1; k <= 60; ++k) pts.push_back({0.0, 0.02 * k});
    for (int k = 0; k <= 30; ++k) pts.push_back({1.2, 0.5 + 0.02 * k});
    return pts;
}

// Elongated Gaussian cloud centered on the origin: enough structure for point-to-point ICP
// to lock onto the true pairing from 30 degrees away.
std::vector<Vec2> elongated_cloud(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> along(0.0, 1.0);
    std::normal_distribution<double> across(0.0, 0.3);
    std::vector<Vec2> pts;
    Vec2 mean{};
    for (std::size_t k = 0; k < n; ++k) {
        pts.push_back({along(rng), across(rng)});
        mean = mean + pts.back();
    }
    for (auto& p : pts) p = p - (1.0 / static_cast<double>(n)) * mean;
    return pts;
}

}  // namespace

TEST(FindCorrespondences, IdenticalScans) {
    const std::vector<Vec2> s{{0, 0}, {1, 0}, {0, 1}};
    const auto m = find_correspondences(s, s);
    EXPECT_EQ(m, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(FindCorrespondences, NearestWins) {
    const std::vector<Vec2> src{{0, 0}};
    const std::vector<Vec2> dst{{1, 0}, {0, 2}};
    EXPECT_EQ(find_correspondences(src, dst)[0], 0u);
}

TEST(FindCorrespondences, TieGoesToLowestIndex) {
    const std::vector<Vec2> src{{0, 0}};
    const std::vector<Vec2> dst{{1, 0}, {-1, 0}};
    EXPECT_EQ(find_correspondences(src, dst)[0], 0u);
    const std::vector<Vec2> dst2{{0, 3}, {-1, 0}, {1, 0}};
    EXPECT_EQ(find_correspondences(src, dst2)[0], 1u);
}

TEST(FindCorrespondences, MatchesBruteForceOracle) {
    const auto src = random_cloud(300, 1);
    const auto dst = random_cloud(280, 2);
    const auto m = find_correspondences(src, dst);
    for (std::size_t i = 0; i < src.size(); ++i) {
        double best = 1e300;
        for (const auto& q : dst) best = std::min(best, squared_norm(src[i] - q));
        EXPECT_EQ(squared_norm(src[i] - dst[m[i]]), best);
    }
}

TEST(FindCorrespondences, WorkerCountDoesNotChangeResult) {
    const auto src = random_cloud(500, 3);
    const auto dst = random_cloud(500, 4);
    const auto serial = find_correspondences(src, dst, 1);
    for (unsigned w : {2u, 3u, 7u}) EXPECT_EQ(find_correspondences(src, dst, w), serial);
}

TEST(FindCorrespondences, RejectsEmpty) {
    const std::vector<Vec2> none;
    const std::vector<Vec2> one{{0, 0}};
    EXPECT_THROW(find_correspondences(none, one), std::invalid_argument);
    EXPECT_THROW(find_correspondences(one, none), std::invalid_argument);
}

TEST(OptimalTransform, IdentityPairs) {
    const auto pts = random_cloud(20, 5);
    const Rigid2 t = optimal_transform(pts, pts);
    EXPECT_NEAR(t.rotation, 0.0, 1e-12);
    EXPECT_NEAR(t.translation.x, 0.0, 1e-12);
    EXPECT_NEAR(t.translation.y, 0.0, 1e-12);
}

TEST(OptimalTransform, QuarterTurnAboutOrigin) {
    const auto pts = random_cloud(20, 6);
    const Rigid2 t = optimal_transform(pts, transformed(pts, {kPi / 2, {0, 0}}));
    EXPECT_NEAR(t.rotation, kPi / 2, 1e-9);
    EXPECT_NEAR(t.translation.x, 0.0, 1e-9);
    EXPECT_NEAR(t.translation.y, 0.0, 1e-9);
}

TEST(OptimalTransform, PureTranslation) {
    const auto pts = random_cloud(20, 7);
    const Rigid2 t = optimal_transform(pts, transformed(pts, {0.0, {1, 2}}));
    EXPECT_NEAR(t.rotation, 0.0, 1e-12);
    EXPECT_NEAR(t.translation.x, 1.0, 1e-12);
    EXPECT_NEAR(t.translation.y, 2.0, 1e-12);
}

TEST(OptimalTransform, MinimizesSquaredResidual) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 0.05);
    const auto src = random_cloud(50, 9);
    auto dst = transformed(src, {0.4, {0.3, -0.2}});
    for (auto& q : dst) q = q + Vec2{noise(rng), noise(rng)};
    const Rigid2 t = optimal_transform(src, dst);
    auto cost = [&](const Rigid2& r) {
        double s = 0.0;
        for (std::size_t i = 0; i < src.size(); ++i) s += squared_norm(dst[i] - r.apply(src[i]));
        return s;
    };
    const double best = cost(t);
    for (double dr : {-1e-4, 1e-4}) EXPECT_GT(cost({t.rotation + dr, t.translation}), best);
    for (double d : {-1e-4, 1e-4}) {
        EXPECT_GT(cost({t.rotation, t.translation + Vec2{d, 0}}), best);
        EXPECT_GT(cost({t.rotation, t.translation + Vec2{0, d}}), best);
    }
}

TEST(OptimalTransform, DegenerateInputs) {
    const std::vector<Vec2> same{{1, 1}, {1, 1}, {1, 1}};
    const std::vector<Vec2> other{{0, 0}, {1, 0}, {2, 0}};
    EXPECT_THROW(optimal_transform(same, other), DegenerateAlignment);
    const std::vector<Vec2> single{{0, 0}};
    EXPECT_THROW(optimal_transform(single, single), DegenerateAlignment);
    EXPECT_THROW(optimal_transform(other, same), DegenerateAlignment);
    EXPECT_THROW(optimal_transform(other, single), std::invalid_argument);
}

TEST(IcpAlign, RecoversKnownTransform) {
    const auto src = elongated_cloud(80, 1);
    const Rigid2 truth{deg2rad(30.0), {0.3 * std::cos(0.7), 0.3 * std::sin(0.7)}};
    const auto dst = transformed(src, truth);
    const auto r = icp_align(src, dst);
    EXPECT_LT(std::abs(angle_norm(r.transform.rotation - truth.rotation)), 1e-6);
    EXPECT_LT(norm(r.transform.translation - truth.translation), 1e-6);
    EXPECT_EQ(r.iterations_run, 25);
    EXPECT_LT(r.e_icp, 1e-9);
}

TEST(IcpAlign, IdenticalScans) {
    const auto pts = random_cloud(40, 10);
    const auto r = icp_align(pts, pts);
    EXPECT_EQ(r.transform.rotation, 0.0);
    EXPECT_EQ(r.transform.translation, (Vec2{0, 0}));
    EXPECT_EQ(r.e_icp, 0.0);
    EXPECT_EQ(r.iterations_run, 25);
    ASSERT_TRUE(r.settled_at.has_value());
    EXPECT_EQ(*r.settled_at, 1);
}

TEST(IcpAlign, FixedPointAfterConvergence) {
    const auto src = corner_cloud();
    const auto dst = transformed(src, {0.1, {0.05, -0.02}});
    IcpOptions opts;
    opts.early_exit_step = 0.0;
    const auto r = icp_align(src, dst, opts);
    const auto again = icp_align(transformed(src, r.transform), dst, opts);
    EXPECT_LT(std::abs(again.transform.rotation), 1e-12);
    EXPECT_LT(norm(again.transform.translation), 1e-12);
}

TEST(IcpAlign, ErrorNonIncreasingOnRigidInstances) {
    for (unsigned seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> ang(-0.3, 0.3);
        std::uniform_real_distribution<double> off(-0.15, 0.15);
        const auto src = corner_cloud();
        const auto dst = transformed(src, {ang(rng), {off(rng), off(rng)}});
        IcpOptions opts;
        opts.early_exit_step = 0.0;
        const auto r = icp_align(src, dst, opts);
        for (std::size_t k = 1; k < r.e_icp_history.size(); ++k) {
            EXPECT_LE(r.e_icp_history[k], r.e_icp_history[k - 1] + 1e-12) << "seed " << seed;
        }
    }
}

TEST(IcpAlign, IndependentOfSourceOrder) {
    const auto src = corner_cloud();
    const auto dst = transformed(src, {0.2, {0.1, 0.1}});
    auto reversed = src;
    std::reverse(reversed.begin(), reversed.end());
    const auto a = icp_align(src, dst);
    const auto b = icp_align(reversed, dst);
    EXPECT_NEAR(a.transform.rotation, b.transform.rotation, 1e-12);
    EXPECT_NEAR(a.transform.translation.x, b.transform.translation.x, 1e-12);
    EXPECT_NEAR(a.transform.translation.y, b.transform.translation.y, 1e-12);
    EXPECT_NEAR(a.e_icp, b.e_icp, 1e-12);
}

TEST(IcpAlign, WorkerCountBitIdentical) {
    const auto src = random_cloud(400, 11);
    const auto dst = transformed(random_cloud(400, 11), {0.05, {0.02, 0.01}});
    IcpOptions serial;
    IcpOptions parallel;
    parallel.workers = 4;
    const auto a = icp_align(src, dst, serial);
    const auto b = icp_align(src, dst, parallel);
    EXPECT_EQ(a.transform.rotation, b.transform.rotation);
    EXPECT_EQ(a.transform.translation, b.transform.translation);
    EXPECT_EQ(a.e_icp_history, b.e_icp_history);
}

TEST(IcpAlign, RejectsTinyScans) {
    const std::vector<Vec2> one{{0, 0}};
    const auto many = random_cloud(5, 12);
    EXPECT_THROW(icp_align(one, many), std::invalid_argument);
    IcpOptions bad;
    bad.iterations = 0;
    EXPECT_THROW(icp_align(many, many, bad), std::invalid_argument);
}
