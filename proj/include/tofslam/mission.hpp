#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tofslam/engine.hpp"
#include "tofslam/explore.hpp"
#include "tofslam/sim.hpp"

namespace tofslam {

enum class SlamMode { none, nanoslam, one_lc };

const char* to_string(SlamMode m);
SlamMode parse_slam_mode(const std::string& s);

struct MissionConfig {
    SlamMode mode = SlamMode::nanoslam;
    double velocity = 0.5;              // m/s
    double frame_rate = 7.5;            // Hz
    double ref_scan_min_dist = 1.2;     // m from the last scan
    double revisit_radius = 0.6;        // m to a stored scan pose
    double lc_min_dist = 1.0;           // m from the last scan
    double odometry_correction = 0.9;   // applied to measured translation
    int laps = 3;
    double landing_radius = 0.5;        // m from takeoff once the laps are flown
    int turn_ticks = 6;                 // per 90 degree turn
    int return_ticks = 3;               // back to the pre-scan heading
    int max_ticks = 20000;
    std::uint64_t seed = 1;             // ToF quantization and noise
    TofSimOptions tof{};
    FollowerConfig follower{};
    HoughConfig hough{};
    ScanConfig scan{};
    double sensor_offset = 0.02;

    void validate() const;
};

struct ScanEvent {
    std::size_t first_id = 0;
    bool loop_closure = false;
    std::size_t reference_id = 0;  // paired reference scan for LC scans
};

struct MissionResult {
    std::vector<std::string> log;       // JSON lines
    std::vector<Pose2> truth;           // per graph entry
    std::vector<Pose2> estimate;        // per graph entry, as sent
    std::vector<Pose2> odometry;        // per graph entry, dead reckoning never corrected
    std::vector<Pose2> optimized;       // engine poses at the end
    std::vector<GraphEntry> entries;    // engine table at the end
    std::vector<Edge> lc_edges;         // engine loop closures at the end
    std::vector<ScanEvent> scans;
    std::size_t lc_accepted = 0;
    std::size_t lc_rejected = 0;
    std::size_t max_lc_edges = 0;
    int ticks = 0;
    bool landed = false;
    bool aborted = false;
    std::string abort_reason;
};

/// Engine settings for a mission mode (none maps to the default engine, which is never asked
/// to close loops).
EngineConfig engine_config_for(SlamMode mode, unsigned workers = 1);

/// Flies the maze from its takeoff pose at frame_rate Hz. Every tick sends the estimated pose
/// and ToF rows to the engine. Reference scans are taken at corners at least
/// ref_scan_min_dist from the last scan. Coming within revisit_radius of a stored scan pose,
/// at least lc_min_dist from the last scan, arms a loop-closure scan that starts as soon as
/// the estimate stops getting closer to that scan pose. After a loop closure the engine
/// optimizes and the mission refreshes its pose and scan poses. Ground truth never reaches
/// the engine. Throws std::invalid_argument when a loop-closing mode does not match the
/// engine's mode.
MissionResult run_mission(const Maze& maze, const MissionConfig& cfg, const DriftModel& drift,
                          Companion& engine);

}  // namespace tofslam
