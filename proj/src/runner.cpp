#include "tofslam/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "tofslam/graph_io.hpp"
#include "tofslam/metrics.hpp"
#include "tofslam/synthetic.hpp"

namespace tofslam {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kDriftSeedMix = 0x9e3779b97f4a7c15ULL;

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
            allowed.end()) {
            throw std::invalid_argument(std::string("manifest: unknown key '") + key + "' in " + where);
        }
    }
}

}  // namespace

void RunManifest::validate() const {
    if (maze.empty()) throw std::invalid_argument("manifest: maze path is required");
    if (!seed) throw std::invalid_argument("manifest: seed is required");
    if (modes.empty()) throw std::invalid_argument("manifest: no modes selected");
    if (workers < 1) throw std::invalid_argument("manifest: workers must be at least 1");
    mission.validate();
}

std::vector<SlamMode> parse_modes(const std::string& s) {
    if (s == "all") return {SlamMode::none, SlamMode::nanoslam, SlamMode::one_lc};
    return {parse_slam_mode(s)};
}

RunManifest parse_manifest(const std::string& json_text) {
    RunManifest m;
    try {
        const json j = json::parse(json_text);
        check_keys(j, {"maze", "seed", "modes", "workers", "out", "mission", "drift"}, "manifest");
        read_field(j, "maze", m.maze);
        if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("modes")) {
            const auto& modes = j.at("modes");
            if (modes.is_string()) {
                m.modes = parse_modes(modes.get<std::string>());
            } else {
                m.modes.clear();
                for (const auto& v : modes) m.modes.push_back(parse_slam_mode(v.get<std::string>()));
            }
        }
        read_field(j, "workers", m.workers);
        read_field(j, "out", m.out_dir);
        if (j.contains("mission")) {
            const auto& c = j.at("mission");
            check_keys(c, {"velocity", "frame_rate", "ref_scan_min_dist", "revisit_radius",
                           "lc_min_dist", "odometry_correction", "laps", "landing_radius",
                           "max_ticks", "zone_quantization", "range_noise_std"},
                       "mission");
            auto& mc = m.mission;
            read_field(c, "velocity", mc.velocity);
            read_field(c, "frame_rate", mc.frame_rate);
            read_field(c, "ref_scan_min_dist", mc.ref_scan_min_dist);
            read_field(c, "revisit_radius", mc.revisit_radius);
            read_field(c, "lc_min_dist", mc.lc_min_dist);
            read_field(c, "odometry_correction", mc.odometry_correction);
            read_field(c, "laps", mc.laps);
            read_field(c, "landing_radius", mc.landing_radius);
            read_field(c, "max_ticks", mc.max_ticks);
            read_field(c, "zone_quantization", mc.tof.zone_quantization);
            read_field(c, "range_noise_std", mc.tof.range_noise_std);
        }
        if (j.contains("drift")) {
            const auto& d = j.at("drift");
            check_keys(d, {"scale_forward", "velocity_noise_std", "yaw_rate_noise_std", "yaw_rate_bias"},
                       "drift");
            read_field(d, "scale_forward", m.drift.scale_forward);
            read_field(d, "velocity_noise_std", m.drift.velocity_noise_std);
            read_field(d, "yaw_rate_noise_std", m.drift.yaw_rate_noise_std);
            read_field(d, "yaw_rate_bias", m.drift.yaw_rate_bias);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("manifest json: ") + e.what());
    }
    return m;
}

std::string manifest_to_json(const RunManifest& m) {
    ordered_json j;
    j["maze"] = m.maze;
    j["seed"] = m.seed ? ordered_json(*m.seed) : ordered_json(nullptr);
    j["modes"] = ordered_json::array();
    for (auto mode : m.modes) j["modes"].push_back(to_string(mode));
    j["workers"] = m.workers;
    j["out"] = m.out_dir;
    const auto& mc = m.mission;
    j["mission"] = {{"velocity", mc.velocity},
                    {"frame_rate", mc.frame_rate},
                    {"ref_scan_min_dist", mc.ref_scan_min_dist},
                    {"revisit_radius", mc.revisit_radius},
                    {"lc_min_dist", mc.lc_min_dist},
                    {"odometry_correction", mc.odometry_correction},
                    {"laps", mc.laps},
                    {"landing_radius", mc.landing_radius},
                    {"max_ticks", mc.max_ticks},
                    {"zone_quantization", mc.tof.zone_quantization},
                    {"range_noise_std", mc.tof.range_noise_std}};
    j["drift"] = {{"scale_forward", m.drift.scale_forward},
                  {"velocity_noise_std", m.drift.velocity_noise_std},
                  {"yaw_rate_noise_std", m.drift.yaw_rate_noise_std},
                  {"yaw_rate_bias", m.drift.yaw_rate_bias}};
    return j.dump(2) + "\n";
}

ModeMetrics compute_metrics(SlamMode mode, const Maze& maze, const MissionResult& r,
                            const MissionConfig& cfg) {
    ModeMetrics m;
    m.mode = mode;
    m.entries = r.entries.size();
    m.lc_accepted = r.lc_accepted;
    m.lc_rejected = r.lc_rejected;
    m.max_lc_edges = r.max_lc_edges;
    m.ticks = r.ticks;
    m.landed = r.landed;
    m.aborted = r.aborted;
    m.abort_reason = r.abort_reason;
    if (r.truth.empty() || r.optimized.size() != r.truth.size()) return m;
    m.rmse_odometry = positioning_rmse(r.odometry, r.truth);
    m.rmse_online = positioning_rmse(r.estimate, r.truth);
    m.rmse_optimized = positioning_rmse(r.optimized, r.truth);
    const auto geom = quad_deck(cfg.sensor_offset);
    const auto map_opt = dense_map(r.entries, r.optimized, geom);
    const auto map_odo = dense_map(r.entries, r.odometry, geom);
    m.map_points = map_opt.size();
    if (!map_opt.empty()) {
        m.mapping_rmse_optimized = mapping_rmse(map_opt, maze.walls);
        m.mapping_rmse_odometry = mapping_rmse(map_odo, maze.walls);
    }
    return m;
}

std::vector<ModeRun> run_modes(const Maze& maze, const RunManifest& manifest) {
    manifest.validate();
    std::vector<ModeRun> runs;
    for (SlamMode mode : manifest.modes) {
        MissionConfig cfg = manifest.mission;
        cfg.mode = mode;
        cfg.seed = *manifest.seed;
        DriftModel drift = manifest.drift;
        drift.seed = *manifest.seed ^ kDriftSeedMix;
        InProcessCompanion engine(engine_config_for(mode, manifest.workers));
        ModeRun run;
        run.result = run_mission(maze, cfg, drift, engine);
        run.metrics = compute_metrics(mode, maze, run.result, cfg);
        runs.push_back(std::move(run));
    }
    return runs;
}

std::string metrics_to_json(const std::string& maze_name, std::uint64_t seed,
                            const std::vector<ModeRun>& runs) {
    ordered_json j;
    j["maze"] = maze_name;
    j["seed"] = seed;
    j["modes"] = ordered_json::object();
    for (const auto& run : runs) {
        const auto& m = run.metrics;
        ordered_json o;
        o["positioning_rmse"] = m.rmse_optimized;
        o["positioning_rmse_odometry"] = m.rmse_odometry;
        o["positioning_rmse_online"] = m.rmse_online;
        o["mapping_rmse"] = m.mapping_rmse_optimized;
        o["mapping_rmse_odometry"] = m.mapping_rmse_odometry;
        o["entries"] = m.entries;
        o["map_points"] = m.map_points;
        o["lc_accepted"] = m.lc_accepted;
        o["lc_rejected"] = m.lc_rejected;
        o["max_lc_edges"] = m.max_lc_edges;
        o["ticks"] = m.ticks;
        o["landed"] = m.landed;
        o["aborted"] = m.aborted;
        if (m.aborted) o["abort_reason"] = m.abort_reason;
        j["modes"][to_string(m.mode)] = o;
    }
    return j.dump(2) + "\n";
}

namespace {

std::ofstream open_out(const std::filesystem::path& p, bool binary = false) {
    std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    return os;
}

}  // namespace

void write_run_artifacts(const Maze& maze, const RunManifest& manifest,
                         const std::vector<ModeRun>& runs) {
    namespace fs = std::filesystem;
    const fs::path root(manifest.out_dir);
    fs::create_directories(root);
    open_out(root / "metrics.json") << metrics_to_json(maze.name, *manifest.seed, runs);
    open_out(root / "manifest.json") << manifest_to_json(manifest);
    const auto geom = quad_deck(manifest.mission.sensor_offset);
    for (const auto& run : runs) {
        const auto& r = run.result;
        const fs::path dir = root / to_string(run.metrics.mode);
        fs::create_directories(dir);
        {
            auto os = open_out(dir / "mission.jsonl");
            for (const auto& line : r.log) os << line << '\n';
        }
        {
            auto os = open_out(dir / "trajectory.csv");
            write_trajectory_csv(os, r.truth, r.optimized);
        }
        {
            auto os = open_out(dir / "odometry.csv");
            write_trajectory_csv(os, r.truth, r.odometry);
        }
        if (r.entries.size() != r.optimized.size() || r.entries.empty()) continue;
        const auto map = dense_map(r.entries, r.optimized, geom);
        {
            auto os = open_out(dir / "map.csv");
            write_points_csv(os, map);
        }
        if (!map.empty()) {
            for (const auto& [res, name] : {std::pair{0.075, "occupancy_0.075.pgm"},
                                            std::pair{0.05, "occupancy_0.050.pgm"}}) {
                auto os = open_out(dir / name, true);
                write_pgm(os, rasterize_occupancy(map, res));
            }
        }
        {
            const std::vector<SvgTrajectory> trajs = {{r.truth, "red", "ground truth"},
                                                      {r.odometry, "gold", "unoptimized"},
                                                      {r.optimized, "black", "optimized"}};
            auto os = open_out(dir / "trajectories.svg");
            write_svg(os, maze.walls, trajs, map);
        }
        {
            auto os = open_out(dir / "graph.txt");
            write_graph(os, r.optimized, build_edges(r.optimized, r.lc_edges));
        }
    }
}

std::vector<ModeRun> cmd_run(const RunManifest& manifest) {
    manifest.validate();
    const Maze maze = load_maze(manifest.maze);
    auto runs = run_modes(maze, manifest);
    if (!manifest.out_dir.empty()) write_run_artifacts(maze, manifest, runs);
    return runs;
}

QuadraticFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3) {
        throw std::invalid_argument("quadratic fit needs at least three aligned samples");
    }
    // Normal equations of the 3-parameter least-squares problem, solved by Cramer's rule.
    double s[5] = {0, 0, 0, 0, 0}, t[3] = {0, 0, 0};
    for (std::size_t k = 0; k < x.size(); ++k) {
        double p = 1.0;
        for (int e = 0; e < 5; ++e) {
            s[e] += p;
            if (e < 3) t[e] += p * y[k];
            p *= x[k];
        }
    }
    const auto det3 = [](double a, double b, double c, double d, double e, double f, double g,
                         double h, double i) {
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    };
    // Unknowns ordered (c, b, a): rows sum x^r * [1, x, x^2].
    const double d = det3(s[0], s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4]);
    if (std::abs(d) < 1e-300) throw std::invalid_argument("quadratic fit: degenerate samples");
    QuadraticFit f;
    f.c = det3(t[0], s[1], s[2], t[1], s[2], s[3], t[2], s[3], s[4]) / d;
    f.b = det3(s[0], t[0], s[2], s[1], t[1], s[3], s[2], t[2], s[4]) / d;
    f.a = det3(s[0], s[1], t[0], s[1], s[2], t[1], s[2], s[3], t[2]) / d;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double fit = f.a * x[k] * x[k] + f.b * x[k] + f.c;
        ss_res += (y[k] - fit) * (y[k] - fit);
        ss_tot += (y[k] - mean) * (y[k] - mean);
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

std::vector<BenchRow> run_bench(const std::vector<std::size_t>& sizes, std::size_t closures,
                                unsigned workers, int repeats) {
    using clock = std::chrono::steady_clock;
    const auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
    if (repeats < 1) throw std::invalid_argument("bench: repeats must be positive");
    std::vector<BenchRow> rows;
    for (std::size_t n : sizes) {
        if (n < 2) throw std::invalid_argument("bench: sizes must be at least 2");
        const SyntheticGraph g = chain_graph(n, benchmark_lc_pairs(n, closures));
        const auto edges = build_edges(g.poses, g.lc_edges);
        BenchRow row;
        row.poses = n;
        row.closures = closures;
        row.assembly_ms = row.rcm_ms = row.cholesky_ms = row.solve_ms = 1e300;
        for (int rep = 0; rep < repeats; ++rep) {
            auto t0 = clock::now();
            const LinearSystem sys = assemble(g.poses, edges);
            auto t1 = clock::now();
            const Permutation p = rcm(sys.h);
            const CsrLower hp = permute(sys.h, p);
            auto t2 = clock::now();
            const CsrLower lp = cholesky_crout(hp, workers);
            auto t3 = clock::now();
            const auto y = solve_lower(lp, permute_vector(sys.b, p));
            const auto dx = unpermute_vector(solve_upper_transposed(lp, y), p);
            auto t4 = clock::now();
            row.assembly_ms = std::min(row.assembly_ms, ms(t1 - t0));
            row.rcm_ms = std::min(row.rcm_ms, ms(t2 - t1));
            row.cholesky_ms = std::min(row.cholesky_ms, ms(t3 - t2));
            row.solve_ms = std::min(row.solve_ms, ms(t4 - t3));
            row.nnz_h = sys.h.nnz();
            row.nnz_lp = lp.nnz();
            if (dx.size() != sys.b.size()) throw std::logic_error("bench: solve size mismatch");
        }
        row.nnz_l = symbolic_cholesky(assemble(g.poses, edges).h).nnz();
        rows.push_back(row);
    }
    return rows;
}

}  // namespace tofslam
