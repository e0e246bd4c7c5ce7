#include "tofslam/mission.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include <json.hpp>

namespace tofslam {

using nlohmann::ordered_json;

const char* to_string(SlamMode m) {
    switch (m) {
        case SlamMode::none: return "none";
        case SlamMode::nanoslam: return "nanoslam";
        case SlamMode::one_lc: return "one-lc";
    }
    return "?";
}

SlamMode parse_slam_mode(const std::string& s) {
    if (s == "none") return SlamMode::none;
    if (s == "nanoslam") return SlamMode::nanoslam;
    if (s == "one-lc") return SlamMode::one_lc;
    throw std::invalid_argument("unknown mode '" + s + "' (none, nanoslam, one-lc)");
}

void MissionConfig::validate() const {
    if (!(velocity > 0.0) || !(frame_rate > 0.0) || !(ref_scan_min_dist > 0.0) ||
        !(revisit_radius > 0.0) || !(lc_min_dist > 0.0) || !(odometry_correction > 0.0) ||
        !(landing_radius > 0.0)) {
        throw std::invalid_argument("mission: speeds, distances and correction must be positive");
    }
    if (laps < 1 || turn_ticks < 1 || return_ticks < 1 || max_ticks < 1 ||
        scan.frames_per_scan < 2) {
        throw std::invalid_argument("mission: counts must be positive");
    }
}

namespace {

ordered_json pose_json(const Pose2& p) { return ordered_json::array({p.x, p.y, p.psi}); }

class MissionRun {
public:
    MissionRun(const Maze& maze, const MissionConfig& cfg, const DriftModel& drift,
               Companion& engine)
        : maze_(maze),
          cfg_(cfg),
          engine_(engine),
          drift_(drift),
          rng_(cfg.seed),
          geometry_(quad_deck(cfg.sensor_offset)),
          dt_(1.0 / cfg.frame_rate) {
        state_ = {maze.takeoff, maze.takeoff};
        odometry_ = maze.takeoff;
    }

    MissionResult run() {
        try {
            while (result_.ticks < cfg_.max_ticks && !result_.landed) tick();
            if (!result_.landed) emit({{"event", "timeout"}, {"tick", result_.ticks}});
            if (cfg_.mode == SlamMode::nanoslam && result_.lc_accepted > 0) {
                const Response r = call(Pgo{});
                emit({{"event", "pgo"}, {"final", true}, {"lc_edges", r.lc_edges}});
            }
        } catch (const std::exception& e) {
            result_.aborted = true;
            result_.abort_reason = e.what();
            emit({{"event", "abort"}, {"reason", e.what()}});
        }
        result_.entries = engine_.engine().graph().entries();
        result_.optimized = engine_.engine().graph().poses();
        result_.lc_edges = engine_.engine().graph().lc_edges();
        return std::move(result_);
    }

private:
    enum class Phase { fly, turn, scan, settle };

    Response call(const Command& c) {
        Response r = engine_.call(c);
        if (!r.ok) throw std::runtime_error(std::string("engine ") + to_string(r.command) + ": " + r.message);
        return r;
    }

    void emit(ordered_json j) { result_.log.push_back(j.dump()); }

    Pose2 request_pose(std::size_t id) {
        const Response r = call(PoseRequest{static_cast<std::int32_t>(id)});
        return {r.x, r.y, r.psi};
    }

    void tick() {
        const FrameRows rows = simulate_rows(state_.truth, maze_, geometry_, cfg_.tof, rng_);
        const std::size_t id = result_.truth.size();
        GraphEntry entry{static_cast<std::int32_t>(id),
                         static_cast<std::int32_t>(std::lround(result_.ticks * 1000.0 * dt_)),
                         state_.estimate, rows_to_millimeters(rows)};
        call(NewPose{to_packet(entry)});
        result_.truth.push_back(state_.truth);
        result_.estimate.push_back(state_.estimate);
        result_.odometry.push_back(odometry_);

        MotionCommand cmd;
        std::string label;
        switch (phase_) {
            case Phase::fly: label = fly(rows, id, cmd); break;
            case Phase::turn: label = turn(cmd); break;
            case Phase::scan: label = scan(id, cmd); break;
            case Phase::settle: label = settle(cmd); break;
        }
        emit({{"tick", result_.ticks},
              {"id", id},
              {"truth", pose_json(state_.truth)},
              {"estimate", pose_json(state_.estimate)},
              {"command", label}});
        if (!result_.landed) {
            const OdometryReading reading = drift_.measure(cmd);
            state_.truth = advance_truth(state_.truth, cmd, dt_);
            state_.estimate = integrate_odometry(state_.estimate, reading, dt_, cfg_.odometry_correction);
            odometry_ = integrate_odometry(odometry_, reading, dt_, cfg_.odometry_correction);
            if (snap_) {
                state_.truth.psi = angle_norm(*snap_);
                snap_.reset();
            }
        }
        ++result_.ticks;
    }

    std::string fly(const FrameRows& rows, std::size_t id, MotionCommand& cmd) {
        const double since_scan =
            last_scan_ ? norm(state_.estimate.position() - last_scan_->position())
                       : std::numeric_limits<double>::infinity();

        // A stored scan pose within the revisit radius arms a loop-closure scan, which is taken
        // once the estimate stops approaching it.
        if (lc_candidate_) {
            const double d = norm(state_.estimate.position() - reference_poses_[*lc_candidate_].position());
            if (d >= lc_candidate_dist_) {
                const std::size_t ref = reference_ids_[*lc_candidate_];
                lc_candidate_.reset();
                return start_scan(id, true, ref, cmd);
            }
            lc_candidate_dist_ = d;
        } else if (since_scan >= cfg_.lc_min_dist) {
            double best = cfg_.revisit_radius;
            for (std::size_t k = 0; k < reference_ids_.size(); ++k) {
                const double d = norm(state_.estimate.position() - reference_poses_[k].position());
                if (d < best) {
                    best = d;
                    lc_candidate_ = k;
                    lc_candidate_dist_ = d;
                }
            }
        }
        const ScanFrame local = project_frame(Pose2{}, rows, geometry_);
        if (!lc_candidate_ && since_scan >= cfg_.ref_scan_min_dist && detect_corner(local, cfg_.hough)) {
            return start_scan(id, false, 0, cmd);
        }
        if (!lc_candidate_ && std::abs(turned_) >= 2.0 * kPi * cfg_.laps - 1e-9 &&
            norm(state_.truth.position() - maze_.takeoff.position()) < cfg_.landing_radius) {
            result_.landed = true;
            emit({{"event", "land"}, {"reason", "laps"}, {"tick", result_.ticks}});
            return "land";
        }
        const FollowCommand f = wall_follow_step(rows, cfg_.follower);
        switch (f) {
            case FollowCommand::forward:
                cmd.forward = cfg_.velocity;
                return "forward";
            case FollowCommand::turn_left:
            case FollowCommand::turn_right: {
                const double sign = f == FollowCommand::turn_left ? 1.0 : -1.0;
                phase_ = Phase::turn;
                remaining_ = cfg_.turn_ticks;
                turn_rate_ = sign * (kPi / 2.0) / (cfg_.turn_ticks * dt_);
                turn_target_ = state_.truth.psi + sign * kPi / 2.0;
                turned_ += sign * kPi / 2.0;
                return turn(cmd);
            }
            case FollowCommand::land:
                result_.landed = true;
                emit({{"event", "land"}, {"reason", "dead end"}, {"tick", result_.ticks}});
                return "land";
        }
        return "hover";
    }

    std::string turn(MotionCommand& cmd) {
        cmd.yaw_rate = turn_rate_;
        if (--remaining_ == 0) {
            snap_ = turn_target_;
            phase_ = Phase::fly;
        }
        return turn_rate_ > 0 ? "turn-left" : "turn-right";
    }

    std::string start_scan(std::size_t id, bool lc, std::size_t reference, MotionCommand& cmd) {
        phase_ = Phase::scan;
        scan_ = {id, lc, reference};
        frame_ = 0;
        pre_scan_heading_ = state_.truth.psi;
        last_scan_ = state_.estimate;
        emit({{"event", "scan_start"},
              {"kind", lc ? "lc" : "reference"},
              {"id", id},
              {"pair", lc ? ordered_json(reference) : ordered_json(nullptr)}});
        return scan(id, cmd);
    }

    std::string scan(std::size_t id, MotionCommand& cmd) {
        const int n = cfg_.scan.frames_per_scan;
        const double step = cfg_.scan.spin_angle / (n - 1);
        if (++frame_ < n) {
            cmd.yaw_rate = step / dt_;
            return "scan";
        }
        // Last frame stored: process the scan, then return to the pre-scan heading.
        result_.scans.push_back(scan_);
        if (!scan_.loop_closure) {
            reference_ids_.push_back(scan_.first_id);
            reference_poses_.push_back(result_.estimate[scan_.first_id]);
        } else if (cfg_.mode != SlamMode::none) {
            close_loop(id);
        }
        phase_ = Phase::settle;
        remaining_ = cfg_.return_ticks;
        return settle(cmd);
    }

    void close_loop(std::size_t current) {
        const Response r = call(LcInfo{static_cast<std::int32_t>(scan_.reference_id),
                                       static_cast<std::int32_t>(scan_.first_id)});
        result_.max_lc_edges = std::max<std::size_t>(result_.max_lc_edges, r.lc_edges);
        emit({{"event", "lc"},
              {"i", scan_.reference_id},
              {"j", scan_.first_id},
              {"accepted", r.accepted},
              {"e_icp", r.e_icp},
              {"lc_edges", r.lc_edges}});
        if (!r.accepted) {
            ++result_.lc_rejected;
            return;
        }
        ++result_.lc_accepted;
        const Response p = call(Pgo{});
        emit({{"event", "pgo"}, {"final", false}, {"lc_edges", p.lc_edges}});
        state_.estimate = request_pose(current);
        for (std::size_t k = 0; k < reference_ids_.size(); ++k) {
            reference_poses_[k] = request_pose(reference_ids_[k]);
        }
        last_scan_ = request_pose(scan_.first_id);
        emit({{"event", "pose_refresh"}, {"id", current}, {"estimate", pose_json(state_.estimate)}});
    }

    std::string settle(MotionCommand& cmd) {
        cmd.yaw_rate = -cfg_.scan.spin_angle / (cfg_.return_ticks * dt_);
        if (--remaining_ == 0) {
            snap_ = pre_scan_heading_;
            phase_ = Phase::fly;
        }
        return "scan-return";
    }

    const Maze& maze_;
    const MissionConfig& cfg_;
    Companion& engine_;
    DriftSimulator drift_;
    std::mt19937_64 rng_;
    std::vector<SensorGeometry> geometry_;
    double dt_;

    OdometryStep state_{};
    Pose2 odometry_{};
    MissionResult result_;
    Phase phase_ = Phase::fly;
    int remaining_ = 0;
    double turn_rate_ = 0.0;
    double turn_target_ = 0.0;
    double turned_ = 0.0;
    std::optional<double> snap_;
    double pre_scan_heading_ = 0.0;
    int frame_ = 0;
    ScanEvent scan_{};
    std::optional<Pose2> last_scan_;
    std::optional<std::size_t> lc_candidate_;
    double lc_candidate_dist_ = 0.0;
    std::vector<std::size_t> reference_ids_;
    std::vector<Pose2> reference_poses_;
};

}  // namespace

EngineConfig engine_config_for(SlamMode mode, unsigned workers) {
    EngineConfig cfg;
    cfg.mode = mode == SlamMode::one_lc ? EngineMode::one_lc : EngineMode::nanoslam;
    cfg.workers = workers;
    return cfg;
}

MissionResult run_mission(const Maze& maze, const MissionConfig& cfg, const DriftModel& drift,
                          Companion& engine) {
    maze.validate();
    cfg.validate();
    if (cfg.mode != SlamMode::none &&
        (cfg.mode == SlamMode::one_lc) != (engine.engine().config().mode == EngineMode::one_lc)) {
        throw std::invalid_argument(std::string("mission mode ") + to_string(cfg.mode) +
                                    " does not match the engine mode");
    }
    return MissionRun(maze, cfg, drift, engine).run();
}

}  // namespace tofslam
