#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tofslam/graph_io.hpp"
#include "tofslam/icp_eval.hpp"
#include "tofslam/runner.hpp"
#include "tofslam/synthetic.hpp"

using namespace tofslam;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunArgs {
    std::string manifest;
    std::string maze;
    std::uint64_t seed = 0;
    std::string mode;
    std::string out;
    int laps = 0;
    unsigned workers = 0;
    double drift_scale = 0.0;
    double noise = -1.0;
    double correction = 0.0;
    double range_noise = -1.0;
    bool no_quantization = false;
};

int do_run(const RunArgs& a, const CLI::App& cmd) {
    RunManifest m;
    if (!a.manifest.empty()) m = parse_manifest(read_file(a.manifest));
    if (cmd.count("--maze")) m.maze = a.maze;
    if (cmd.count("--seed")) m.seed = a.seed;
    if (cmd.count("--mode")) m.modes = parse_modes(a.mode);
    if (cmd.count("--out")) m.out_dir = a.out;
    if (cmd.count("--laps")) m.mission.laps = a.laps;
    if (cmd.count("--workers")) m.workers = a.workers;
    if (cmd.count("--drift-scale")) {
        m.drift.scale_forward = a.drift_scale;
        m.mission.odometry_correction = 1.0 / a.drift_scale;
    }
    if (cmd.count("--correction")) m.mission.odometry_correction = a.correction;
    if (cmd.count("--noise")) {
        m.drift.velocity_noise_std *= a.noise;
        m.drift.yaw_rate_noise_std *= a.noise;
        m.drift.yaw_rate_bias *= a.noise;
        m.mission.tof.range_noise_std *= a.noise;
        if (a.noise == 0.0) m.mission.tof.zone_quantization = false;
    }
    if (cmd.count("--range-noise")) m.mission.tof.range_noise_std = a.range_noise;
    if (a.no_quantization) m.mission.tof.zone_quantization = false;

    const auto runs = cmd_run(m);
    std::printf("%-9s %7s %9s %9s %9s %9s %5s %5s\n", "mode", "ticks", "rmse_odo", "rmse_opt",
                "map_odo", "map_opt", "lc", "maxlc");
    int status = 0;
    for (const auto& r : runs) {
        const auto& x = r.metrics;
        std::printf("%-9s %7d %9.4f %9.4f %9.4f %9.4f %5zu %5zu%s\n", to_string(x.mode), x.ticks,
                    x.rmse_odometry, x.rmse_optimized, x.mapping_rmse_odometry,
                    x.mapping_rmse_optimized, x.lc_accepted, x.max_lc_edges,
                    x.aborted ? "  aborted" : (x.landed ? "" : "  timeout"));
        if (x.aborted) {
            std::fprintf(stderr, "%s: %s\n", to_string(x.mode), x.abort_reason.c_str());
            status = 1;
        }
    }
    if (!m.out_dir.empty()) std::printf("artifacts in %s\n", m.out_dir.c_str());
    return status;
}

struct BenchArgs {
    std::vector<std::size_t> sizes;
    std::size_t closures = 2;
    unsigned workers = 1;
    int repeats = 5;
    std::string csv;
};

int do_bench(const BenchArgs& a) {
    std::vector<std::size_t> sizes = a.sizes;
    if (sizes.empty()) {
        for (std::size_t n = 20; n <= 440; n += 20) sizes.push_back(n);
    }
    const auto rows = run_bench(sizes, a.closures, a.workers, a.repeats);
    std::printf("%6s %4s %8s %8s %8s %6s %10s %10s %10s %10s\n", "poses", "lc", "nnz_H", "nnz_L",
                "nnz_LP", "LP/L", "assemb_ms", "rcm_ms", "chol_ms", "solve_ms");
    std::vector<double> x, y;
    for (const auto& r : rows) {
        std::printf("%6zu %4zu %8zu %8zu %8zu %6.3f %10.4f %10.4f %10.4f %10.4f\n", r.poses,
                    r.closures, r.nnz_h, r.nnz_l, r.nnz_lp,
                    static_cast<double>(r.nnz_lp) / static_cast<double>(r.nnz_l), r.assembly_ms,
                    r.rcm_ms, r.cholesky_ms, r.solve_ms);
        x.push_back(static_cast<double>(r.poses));
        y.push_back(r.cholesky_ms);
    }
    if (rows.size() >= 3) {
        const auto f = fit_quadratic(x, y);
        std::printf("cholesky fit: %.3e N^2 + %.3e N + %.3e ms, R^2 = %.4f\n", f.a, f.b, f.c, f.r2);
    }
    if (!a.csv.empty()) {
        std::ofstream os(a.csv);
        if (!os) throw std::runtime_error("cannot write " + a.csv);
        os << "poses,closures,nnz_h,nnz_l,nnz_lp,assembly_ms,rcm_ms,cholesky_ms,solve_ms\n";
        for (const auto& r : rows) {
            os << r.poses << ',' << r.closures << ',' << r.nnz_h << ',' << r.nnz_l << ','
               << r.nnz_lp << ',' << r.assembly_ms << ',' << r.rcm_ms << ',' << r.cholesky_ms
               << ',' << r.solve_ms << '\n';
        }
    }
    return 0;
}

struct IcpArgs {
    int seeds = 20;
    double offset = 0.3;
    double rotation_deg = 30.0;
    bool no_quantization = false;
    bool trace = false;
};

int do_icp_eval(const IcpArgs& a) {
    CornerTrialOptions o;
    o.offset = a.offset;
    o.rotation = deg2rad(a.rotation_deg);
    o.zone_quantization = !a.no_quantization;
    double worst_t = 0.0, worst_r = 0.0, worst_e = 0.0;
    std::printf("%5s %9s %9s %9s %8s %9s\n", "seed", "e_T_m", "e_R_deg", "e_ICP_m", "settled", "points");
    for (int s = 1; s <= a.seeds; ++s) {
        const auto t = run_corner_trial(static_cast<std::uint64_t>(s), o);
        std::printf("%5d %9.4f %9.3f %9.4f %8s %4zu/%-4zu\n", s, t.e_t, rad2deg(t.e_r), t.icp.e_icp,
                    t.icp.settled_at ? std::to_string(*t.icp.settled_at).c_str() : "-",
                    t.src_points, t.dst_points);
        if (a.trace) {
            std::printf("      e_ICP per iteration:");
            for (double e : t.icp.e_icp_history) std::printf(" %.4f", e);
            std::printf("\n");
        }
        worst_t = std::max(worst_t, t.e_t);
        worst_r = std::max(worst_r, t.e_r);
        worst_e = std::max(worst_e, t.icp.e_icp);
    }
    std::printf("worst: e_T %.4f m, e_R %.3f deg, e_ICP %.4f m\n", worst_t, rad2deg(worst_r), worst_e);
    return 0;
}

struct ExportArgs {
    std::string synthetic;
    std::size_t poses = 200;
    std::size_t closures = 2;
    std::string maze;
    std::uint64_t seed = 1;
    std::string out;
};

int do_export(const ExportArgs& a) {
    std::vector<Pose2> poses;
    std::vector<Edge> lc;
    if (a.synthetic == "chain") {
        const auto g = chain_graph(a.poses, benchmark_lc_pairs(a.poses, a.closures));
        poses = g.poses;
        lc = g.lc_edges;
    } else if (a.synthetic == "square-loop") {
        SquareLoopOptions o;
        o.poses = a.poses;
        o.closures = a.closures;
        o.seed = a.seed;
        const auto g = square_loop_graph(o);
        poses = g.poses;
        lc = g.lc_edges;
    } else if (!a.synthetic.empty()) {
        throw std::invalid_argument("unknown synthetic graph '" + a.synthetic + "'");
    } else {
        if (a.maze.empty()) throw std::invalid_argument("export-graph needs --synthetic or --maze");
        // Engine graph at landing: optimized poses and every accepted closure.
        RunManifest m;
        m.maze = a.maze;
        m.seed = a.seed;
        m.modes = {SlamMode::nanoslam};
        const auto runs = cmd_run(m);
        poses = runs.front().result.optimized;
        lc = runs.front().result.lc_edges;
    }
    const auto edges = build_edges(poses, lc);
    if (a.out.empty()) {
        write_graph(std::cout, poses, edges);
    } else {
        std::ofstream os(a.out);
        if (!os) throw std::runtime_error("cannot write " + a.out);
        write_graph(os, poses, edges);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ToF pose-graph SLAM simulator and solver tools"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Fly seeded missions and write metrics, maps and plots");
    run_cmd->add_option("--manifest", run.manifest, "JSON run manifest; flags override it");
    run_cmd->add_option("--maze", run.maze, "Maze JSON file");
    run_cmd->add_option("--seed", run.seed, "Seed for drift and sensing (required)");
    run_cmd->add_option("--mode", run.mode, "all | none | nanoslam | one-lc")->default_str("all");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_option("--laps", run.laps, "Laps before landing");
    run_cmd->add_option("--workers", run.workers, "Solver and ICP worker threads");
    run_cmd->add_option("--drift-scale", run.drift_scale,
                        "Forward odometry scale; also sets the correction to its inverse");
    run_cmd->add_option("--correction", run.correction, "Odometry translation correction");
    run_cmd->add_option("--noise", run.noise, "Multiplier on odometry noise, yaw bias and range noise; 0 also disables zone quantization");
    run_cmd->add_option("--range-noise", run.range_noise, "ToF range noise std, meters");
    run_cmd->add_flag("--no-quantization", run.no_quantization, "Sample zone centers only");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Solver stage timings and fill on chain graphs");
    bench_cmd->add_option("--sizes", bench.sizes, "Pose counts (default 20..440 step 20)");
    bench_cmd->add_option("--closures", bench.closures, "Loop closures per graph");
    bench_cmd->add_option("--workers", bench.workers, "Cholesky worker threads");
    bench_cmd->add_option("--repeats", bench.repeats, "Timing repeats, minimum reported");
    bench_cmd->add_option("--csv", bench.csv, "Also write the table as CSV");

    IcpArgs icp;
    auto* icp_cmd = app.add_subcommand("icp-eval", "Align corner scans offset by a known pose error");
    icp_cmd->add_option("--seeds", icp.seeds, "Number of seeded trials");
    icp_cmd->add_option("--offset", icp.offset, "Translation error, meters");
    icp_cmd->add_option("--rotation", icp.rotation_deg, "Rotation error, degrees");
    icp_cmd->add_flag("--no-quantization", icp.no_quantization, "Sample zone centers only");
    icp_cmd->add_flag("--trace", icp.trace, "Print e_ICP after every iteration");

    ExportArgs ex;
    auto* export_cmd = app.add_subcommand("export-graph", "Write a pose graph as VERTEX/EDGE text");
    export_cmd->add_option("--synthetic", ex.synthetic, "chain | square-loop");
    export_cmd->add_option("--poses", ex.poses, "Poses of the synthetic graph");
    export_cmd->add_option("--closures", ex.closures, "Loop closures of the synthetic graph");
    export_cmd->add_option("--maze", ex.maze, "Export the optimized graph of a nanoslam mission");
    export_cmd->add_option("--seed", ex.seed, "Seed");
    export_cmd->add_option("--out", ex.out, "Output file (default stdout)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run_cmd) return do_run(run, *run_cmd);
        if (*bench_cmd) return do_bench(bench);
        if (*icp_cmd) return do_icp_eval(icp);
        if (*export_cmd) return do_export(ex);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
