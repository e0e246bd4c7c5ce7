#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "tofslam/scan.hpp"

using namespace tofslam;

namespace {

SensorGeometry bare(double gamma) {
    return SensorGeometry::with_uniform_zones(gamma, {0.0, 0.0});
}

// Geometry whose zone 0 points straight along the sensor axis.
SensorGeometry axis_zone(double gamma) {
    SensorGeometry g = bare(gamma);
    g.zone_angles[0] = 0.0;
    return g;
}

}  // namespace

TEST(ReduceTofMatrix, UniformMatrix) {
    const auto row = reduce_tof_matrix(TofMatrix::uniform(1000));
    ASSERT_EQ(row.size(), 8u);
    for (int c = 0; c < 8; ++c) {
        EXPECT_EQ(row[static_cast<std::size_t>(c)].column, c);
        EXPECT_DOUBLE_EQ(row[static_cast<std::size_t>(c)].distance, 1.0);
    }
}

TEST(ReduceTofMatrix, EvenMedianIsMeanOfMiddlePair) {
    TofMatrix m = TofMatrix::uniform(500);
    m.millimeters[2][3] = 4000;
    m.millimeters[3][3] = 1000;
    m.millimeters[4][3] = 3000;
    m.millimeters[5][3] = 2000;
    const auto row = reduce_tof_matrix(m);
    EXPECT_DOUBLE_EQ(row[3].distance, 2.5);
}

TEST(ReduceTofMatrix, IgnoresOuterRows) {
    TofMatrix m = TofMatrix::uniform(1000);
    for (int c = 0; c < 8; ++c) {
        m.millimeters[0][c] = 3000;
        m.millimeters[1][c] = 3000;
        m.millimeters[6][c] = 3000;
        m.millimeters[7][c] = 3000;
    }
    for (const auto& z : reduce_tof_matrix(m)) EXPECT_DOUBLE_EQ(z.distance, 1.0);
}

TEST(ReduceTofMatrix, InvalidColumnOmitted) {
    TofMatrix m = TofMatrix::uniform(1000);
    for (int r = 2; r <= 5; ++r) m.valid[r][6] = false;
    const auto row = reduce_tof_matrix(m);
    ASSERT_EQ(row.size(), 7u);
    EXPECT_TRUE(std::none_of(row.begin(), row.end(), [](const ZoneReading& z) { return z.column == 6; }));
}

TEST(ReduceTofMatrix, PartialValidityUsesValidSubset) {
    TofMatrix m = TofMatrix::uniform(1000);
    m.valid[2][0] = false;
    m.millimeters[3][0] = 1200;
    m.millimeters[4][0] = 1500;
    m.millimeters[5][0] = 1800;
    EXPECT_DOUBLE_EQ(reduce_tof_matrix(m)[0].distance, 1.5);
}

TEST(ReduceTofMatrix, OutOfRangePixelsIgnored) {
    TofMatrix m = TofMatrix::uniform(1000);
    for (int r = 2; r <= 5; ++r) m.millimeters[r][1] = 5000;
    m.millimeters[2][2] = 0;
    const auto row = reduce_tof_matrix(m);
    ASSERT_EQ(row.size(), 7u);
    EXPECT_DOUBLE_EQ(row[1].distance, 1.0);
    EXPECT_EQ(row[1].column, 2);
}

TEST(ReduceTofMatrix, MiddleRowOrderDoesNotMatter) {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> mm(1, 4000);
    std::bernoulli_distribution valid(0.7);
    for (int trial = 0; trial < 200; ++trial) {
        TofMatrix m;
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c) {
                m.millimeters[r][c] = mm(rng);
                m.valid[r][c] = valid(rng);
            }
        }
        TofMatrix shuffled = m;
        std::array<int, 4> order{2, 3, 4, 5};
        std::shuffle(order.begin(), order.end(), rng);
        for (int k = 0; k < 4; ++k) {
            shuffled.millimeters[2 + k] = m.millimeters[order[static_cast<std::size_t>(k)]];
            shuffled.valid[2 + k] = m.valid[order[static_cast<std::size_t>(k)]];
        }
        EXPECT_EQ(reduce_tof_matrix(m), reduce_tof_matrix(shuffled));
    }
}

TEST(SensorGeometry, UniformZonesAreValid) {
    const auto g = bare(0.0);
    EXPECT_NO_THROW(g.validate());
    EXPECT_NEAR(g.zone_angles[0], -3.5 / 8 * deg2rad(45.0), 1e-15);
    EXPECT_NEAR(g.zone_angles[7], 3.5 / 8 * deg2rad(45.0), 1e-15);
}

TEST(SensorGeometry, RejectsBadZones) {
    auto g = bare(0.0);
    g.zone_angles[7] = deg2rad(30.0);
    EXPECT_THROW(g.validate(), std::invalid_argument);
    g = bare(0.0);
    std::swap(g.zone_angles[2], g.zone_angles[3]);
    EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(ProjectFrame, ForwardSensorAtOrigin) {
    const std::vector<SensorGeometry> geom{axis_zone(0.0)};
    const auto f = project_frame(Pose2(0, 0, 0), {{{0, 1.0}}}, geom);
    ASSERT_EQ(f.points.size(), 1u);
    EXPECT_NEAR(f.points[0].x, 1.0, 1e-15);
    EXPECT_NEAR(f.points[0].y, 0.0, 1e-15);
}

TEST(ProjectFrame, RotatedPose) {
    const std::vector<SensorGeometry> geom{axis_zone(0.0)};
    const auto f = project_frame(Pose2(0, 0, kPi / 2), {{{0, 1.0}}}, geom);
    EXPECT_NEAR(f.points[0].x, 0.0, 1e-15);
    EXPECT_NEAR(f.points[0].y, 1.0, 1e-15);
}

TEST(ProjectFrame, RightSensor) {
    const std::vector<SensorGeometry> geom{axis_zone(-kPi / 2)};
    const auto f = project_frame(Pose2(2, 3, 0), {{{0, 1.0}}}, geom);
    EXPECT_NEAR(f.points[0].x, 2.0, 1e-15);
    EXPECT_NEAR(f.points[0].y, 2.0, 1e-15);
}

TEST(ProjectFrame, ZoneAngleAndOffset) {
    SensorGeometry g = SensorGeometry::with_uniform_zones(0.0, {0.02, 0.01});
    const std::vector<SensorGeometry> geom{g};
    const double d = 1.5;
    const auto f = project_frame(Pose2(0, 0, 0), {{{7, d}}}, geom);
    EXPECT_NEAR(f.points[0].x, d + 0.02, 1e-15);
    EXPECT_NEAR(f.points[0].y, std::tan(g.zone_angles[7]) * d + 0.01, 1e-15);
}

TEST(ProjectFrame, RejectsBadInput) {
    const auto geom = quad_deck();
    EXPECT_THROW(project_frame(Pose2(std::nan(""), 0, 0), {{{0, 1.0}}}, geom), std::invalid_argument);
    EXPECT_THROW(project_frame(Pose2(0, 0, 0), {{{0, 4.5}}}, geom), std::invalid_argument);
    EXPECT_THROW(project_frame(Pose2(0, 0, 0), {{{0, 0.0}}}, geom), std::invalid_argument);
    EXPECT_THROW(project_frame(Pose2(0, 0, 0), {{{8, 1.0}}}, geom), std::invalid_argument);
}

TEST(ProjectFrame, EquivariantUnderRigidMotion) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_real_distribution<double> d(0.05, 4.0);
    const auto geom = quad_deck();
    for (int trial = 0; trial < 100; ++trial) {
        FrameRows rows(4);
        for (int s = 0; s < 4; ++s) {
            for (int c = 0; c < 8; ++c) rows[static_cast<std::size_t>(s)].push_back({c, d(rng)});
        }
        const Pose2 p(u(rng), u(rng), u(rng));
        const Rigid2 t{u(rng), {u(rng), u(rng)}};
        const auto moved = project_frame(t.apply(p), rows, geom);
        const auto base = project_frame(p, rows, geom);
        ASSERT_EQ(moved.points.size(), base.points.size());
        for (std::size_t k = 0; k < base.points.size(); ++k) {
            const Vec2 q = t.apply(base.points[k]);
            EXPECT_NEAR(moved.points[k].x, q.x, 1e-9);
            EXPECT_NEAR(moved.points[k].y, q.y, 1e-9);
        }
    }
}

TEST(AssembleScan, FullScanHas640Points) {
    const auto geom = quad_deck();
    const ScanConfig cfg;
    const FrameRows rows(4, reduce_tof_matrix(TofMatrix::uniform(1000)));
    std::vector<FrameInput> frames;
    for (int k = 0; k < cfg.frames_per_scan; ++k) {
        frames.push_back({Pose2(0, 0, k * cfg.spin_angle / 19), rows});
    }
    const Scan s = assemble_scan(frames, geom, cfg);
    EXPECT_EQ(s.points.size(), 640u);
    EXPECT_EQ(cfg.capacity(), 640);
    EXPECT_EQ(s.origin_pose, frames.front().pose);
}

TEST(AssembleScan, SingleReading) {
    const auto geom = quad_deck();
    const std::vector<FrameInput> frames{{Pose2(1, 1, 0), {{}, {{4, 2.0}}, {}, {}}}};
    const Scan s = assemble_scan(frames, geom, ScanConfig{});
    EXPECT_EQ(s.points.size(), 1u);
    EXPECT_FALSE(s.degenerate());
}

TEST(AssembleScan, AllInvalidIsDegenerate) {
    const auto geom = quad_deck();
    TofMatrix blank;
    const FrameRows rows(4, reduce_tof_matrix(blank));
    const std::vector<FrameInput> frames(5, FrameInput{Pose2(), rows});
    const Scan s = assemble_scan(frames, geom, ScanConfig{});
    EXPECT_TRUE(s.degenerate());
}

TEST(AssembleScan, RejectsEmptyAndOverlong) {
    const auto geom = quad_deck();
    EXPECT_THROW(assemble_scan(std::vector<FrameInput>{}, geom, ScanConfig{}), std::invalid_argument);
    const std::vector<FrameInput> frames(21, FrameInput{});
    EXPECT_THROW(assemble_scan(frames, geom, ScanConfig{}), std::invalid_argument);
}

TEST(TofRows, MillimeterRoundTrip) {
    FrameRows rows(4);
    rows[0] = {{0, 1.2344}, {5, 3.9996}};
    rows[3] = {{7, 0.0004}};
    const TofRows mm = rows_to_millimeters(rows);
    EXPECT_EQ(mm[0][0], 1234);
    EXPECT_EQ(mm[0][5], 4000);
    EXPECT_EQ(mm[3][7], 1);
    EXPECT_EQ(mm[1][0], 0);
    const FrameRows back = rows_from_millimeters(mm);
    ASSERT_EQ(back.size(), 4u);
    ASSERT_EQ(back[0].size(), 2u);
    EXPECT_DOUBLE_EQ(back[0][0].distance, 1.234);
    EXPECT_TRUE(back[1].empty());
    EXPECT_EQ(back[3][0].column, 7);
}
