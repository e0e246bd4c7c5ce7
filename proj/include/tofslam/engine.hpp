#pragma once

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "tofslam/hierarchical.hpp"
#include "tofslam/icp.hpp"
#include "tofslam/protocol.hpp"

namespace tofslam {

enum class EngineMode { nanoslam, one_lc };

struct EngineConfig {
    EngineMode mode = EngineMode::nanoslam;
    HierarchicalConfig hierarchy{};
    IcpOptions icp{};
    double lc_gate = 0.1;  // meters; LC edges with a larger e_ICP are discarded
    std::vector<SensorGeometry> geometry = quad_deck();
    ScanConfig scan{};
    unsigned workers = 1;  // ICP correspondences, Cholesky and subgraphs
};

struct PgoRecord {
    std::size_t poses = 0;
    std::size_t lc_edges = 0;
    bool hierarchical = false;
    GaussNewtonReport report;  // direct solve, or the sparse graph when hierarchical
};

struct LcRecord {
    std::size_t i = 0;
    std::size_t j = 0;
    bool accepted = false;
    double e_icp = 0.0;
    Rigid2 transform{};
};

/// The companion-side SLAM state: graph table, LC edges and scan poses. Commands are handled
/// serially; failures come back as error responses and leave the state unchanged.
class SlamEngine {
public:
    explicit SlamEngine(EngineConfig cfg = {});

    Response handle(const Command& cmd);

    const PoseGraph& graph() const { return graph_; }
    const EngineConfig& config() const { return cfg_; }
    const std::vector<PgoRecord>& pgo_history() const { return pgo_history_; }
    const std::vector<LcRecord>& lc_history() const { return lc_history_; }

    /// The scan stored at entries first..first+frames_per_scan-1, built with the current poses.
    Scan scan_at(std::size_t first) const;

private:
    Response new_pose(const NewPose& c);
    Response lc_info(const LcInfo& c);
    Response pgo();
    Response pose_request(const PoseRequest& c) const;

    EngineConfig cfg_;
    PoseGraph graph_;
    std::vector<PgoRecord> pgo_history_;
    std::vector<LcRecord> lc_history_;
};

/// A link from the mission to an engine.
class Companion {
public:
    virtual ~Companion() = default;
    virtual Response call(const Command& cmd) = 0;
    /// Engine state; valid between calls.
    virtual const SlamEngine& engine() const = 0;
};

class InProcessCompanion : public Companion {
public:
    explicit InProcessCompanion(EngineConfig cfg = {}) : engine_(std::move(cfg)) {}
    Response call(const Command& cmd) override { return engine_.handle(cmd); }
    const SlamEngine& engine() const override { return engine_; }

private:
    SlamEngine engine_;
};

/// Blocking in-memory byte pipe.
class ByteChannel {
public:
    void write(std::span<const std::uint8_t> bytes);
    /// Waits for data; returns an empty vector once closed and drained.
    std::vector<std::uint8_t> read_some(std::size_t max_bytes);
    void close();

private:
    std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<std::uint8_t> data_;
    bool closed_ = false;
};

/// Engine served on its own thread behind the framed byte protocol. Writes are split into
/// small chunks so the server decodes across arbitrary boundaries.
class StreamCompanion : public Companion {
public:
    explicit StreamCompanion(EngineConfig cfg = {}, std::size_t chunk = 17);
    ~StreamCompanion() override;

    Response call(const Command& cmd) override;
    const SlamEngine& engine() const override { return engine_; }

private:
    void serve();

    SlamEngine engine_;
    std::size_t chunk_;
    ByteChannel to_engine_;
    ByteChannel to_host_;
    FrameDecoder host_decoder_;
    std::jthread server_;
};

}  // namespace tofslam
