#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tofslam/maze.hpp"
#include "tofslam/mission.hpp"

namespace tofslam {

/// Everything that determines a run. Worker count and output directory do not affect results.
struct RunManifest {
    std::string maze;                 // path to a maze JSON file
    std::optional<std::uint64_t> seed;
    std::vector<SlamMode> modes = {SlamMode::none, SlamMode::nanoslam, SlamMode::one_lc};
    MissionConfig mission{};
    DriftModel drift{};
    unsigned workers = 1;
    std::string out_dir;

    /// Throws std::invalid_argument when the seed or maze is missing.
    void validate() const;
};

/// Reads a manifest: {"maze", "seed", "modes": [..] or "all", "workers", "out",
/// "mission": {...}, "drift": {...}}. Missing fields keep their defaults.
RunManifest parse_manifest(const std::string& json_text);
std::string manifest_to_json(const RunManifest& m);

/// "all" or a single mode name.
std::vector<SlamMode> parse_modes(const std::string& s);

struct ModeMetrics {
    SlamMode mode = SlamMode::none;
    double rmse_odometry = 0.0;       // dead reckoning
    double rmse_online = 0.0;         // estimates as sent, including online corrections
    double rmse_optimized = 0.0;      // engine poses at landing
    double mapping_rmse_odometry = 0.0;
    double mapping_rmse_optimized = 0.0;
    std::size_t entries = 0;
    std::size_t map_points = 0;
    std::size_t lc_accepted = 0;
    std::size_t lc_rejected = 0;
    std::size_t max_lc_edges = 0;
    int ticks = 0;
    bool landed = false;
    bool aborted = false;
    std::string abort_reason;
};

struct ModeRun {
    ModeMetrics metrics;
    MissionResult result;
};

ModeMetrics compute_metrics(SlamMode mode, const Maze& maze, const MissionResult& r,
                            const MissionConfig& cfg);

/// One mission per mode on the same seed, in memory.
std::vector<ModeRun> run_modes(const Maze& maze, const RunManifest& manifest);

std::string metrics_to_json(const std::string& maze_name, std::uint64_t seed,
                            const std::vector<ModeRun>& runs);

/// Writes metrics.json and, per mode, mission.jsonl, trajectory.csv, odometry.csv, map.csv,
/// occupancy_0.075.pgm, occupancy_0.050.pgm, trajectories.svg and graph.txt.
void write_run_artifacts(const Maze& maze, const RunManifest& manifest,
                         const std::vector<ModeRun>& runs);

/// Loads the maze, runs every mode and writes the artifacts when out_dir is set.
std::vector<ModeRun> cmd_run(const RunManifest& manifest);

struct BenchRow {
    std::size_t poses = 0;
    std::size_t closures = 0;
    std::size_t nnz_h = 0;
    std::size_t nnz_l = 0;
    std::size_t nnz_lp = 0;
    double assembly_ms = 0.0;
    double rcm_ms = 0.0;
    double cholesky_ms = 0.0;  // permuted system
    double solve_ms = 0.0;
};

struct QuadraticFit {
    double a = 0.0, b = 0.0, c = 0.0;  // y = a x^2 + b x + c
    double r2 = 0.0;
};

QuadraticFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y);

/// Chain graphs with benchmark loop closures; each timing is the minimum over `repeats`.
std::vector<BenchRow> run_bench(const std::vector<std::size_t>& sizes, std::size_t closures,
                                unsigned workers = 1, int repeats = 5);

}  // namespace tofslam
