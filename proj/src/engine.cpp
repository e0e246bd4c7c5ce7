#include "tofslam/engine.hpp"

#include <algorithm>

namespace tofslam {

namespace {

Response reply(CommandId id) {
    Response r;
    r.command = id;
    return r;
}

}  // namespace

SlamEngine::SlamEngine(EngineConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.hierarchy.validate();
    cfg_.hierarchy.workers = cfg_.workers;
    cfg_.icp.workers = cfg_.workers;
    if (!(cfg_.lc_gate > 0.0)) throw std::invalid_argument("engine: LC gate must be positive");
}

Response SlamEngine::handle(const Command& cmd) {
    try {
        return std::visit(
            [this](const auto& c) -> Response {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, NewPose>) return new_pose(c);
                else if constexpr (std::is_same_v<T, LcInfo>) return lc_info(c);
                else if constexpr (std::is_same_v<T, Pgo>) return pgo();
                else return pose_request(c);
            },
            cmd);
    } catch (const std::exception& e) {
        Response r;
        r.command = command_id(cmd);
        r.ok = false;
        r.message = e.what();
        return r;
    }
}

Response SlamEngine::new_pose(const NewPose& c) {
    graph_.append(from_packet(c.entry));
    return reply(CommandId::new_pose);
}

Scan SlamEngine::scan_at(std::size_t first) const {
    const auto n = static_cast<std::size_t>(cfg_.scan.frames_per_scan);
    if (first + n > graph_.size()) {
        throw GraphError("scan at " + std::to_string(first) + " needs entries up to " +
                         std::to_string(first + n - 1) + ", table has " +
                         std::to_string(graph_.size()));
    }
    std::vector<FrameInput> frames;
    for (std::size_t k = first; k < first + n; ++k) {
        const auto& e = graph_.entry(k);
        frames.push_back({e.pose, rows_from_millimeters(e.tof)});
    }
    return assemble_scan(frames, cfg_.geometry, cfg_.scan);
}

Response SlamEngine::lc_info(const LcInfo& c) {
    if (c.i < 0 || c.j <= c.i) throw GraphError("LcInfo requires 0 <= i < j");
    const auto i = static_cast<std::size_t>(c.i);
    const auto j = static_cast<std::size_t>(c.j);
    const Scan si = scan_at(i);
    const Scan sj = scan_at(j);

    Response r = reply(CommandId::lc_info);
    LcRecord rec{i, j, false, 0.0, Rigid2::identity()};
    try {
        const IcpResult icp = icp_align(sj.points, si.points, cfg_.icp);
        rec.e_icp = icp.e_icp;
        rec.transform = icp.transform;
        rec.accepted = icp.e_icp <= cfg_.lc_gate;
    } catch (const DegenerateAlignment&) {
        rec.e_icp = -1.0;
    }
    if (rec.accepted) {
        const Pose2 xi = graph_.entry(i).pose;
        const Pose2 xj = rec.transform.apply(graph_.entry(j).pose);
        graph_.add_lc_edge({i, j, odometry_edge(xi, xj), EdgeKind::loop_closure, kLoopClosureOmega});
        graph_.add_scan_pose(i);
        graph_.add_scan_pose(j);
    }
    lc_history_.push_back(rec);
    r.accepted = rec.accepted;
    r.e_icp = static_cast<float>(rec.e_icp);
    r.lc_edges = static_cast<std::uint16_t>(graph_.lc_edges().size());
    return r;
}

Response SlamEngine::pgo() {
    PgoRecord rec;
    rec.poses = graph_.size();
    rec.lc_edges = graph_.lc_edges().size();
    if (!graph_.lc_edges().empty()) {
        if (graph_.size() <= cfg_.hierarchy.max_sparse_poses) {
            GaussNewtonOptions gn;
            gn.iterations = cfg_.hierarchy.iterations;
            gn.workers = cfg_.workers;
            rec.report = optimize(graph_, gn);
        } else {
            rec.hierarchical = true;
            rec.report = optimize_hierarchical(graph_, cfg_.hierarchy).sparse;
        }
        pgo_history_.push_back(rec);
    }
    if (cfg_.mode == EngineMode::one_lc) graph_.clear_lc_edges();
    Response r = reply(CommandId::pgo);
    r.lc_edges = static_cast<std::uint16_t>(graph_.lc_edges().size());
    return r;
}

Response SlamEngine::pose_request(const PoseRequest& c) const {
    if (c.id < 0) throw GraphError("pose request for a negative id");
    const Pose2& p = graph_.entry(static_cast<std::size_t>(c.id)).pose;
    Response r = reply(CommandId::pose_request);
    r.x = static_cast<float>(p.x);
    r.y = static_cast<float>(p.y);
    r.psi = static_cast<float>(p.psi);
    return r;
}

void ByteChannel::write(std::span<const std::uint8_t> bytes) {
    {
        std::lock_guard lock(mutex_);
        if (closed_) throw ProtocolError("write to a closed channel");
        data_.insert(data_.end(), bytes.begin(), bytes.end());
    }
    ready_.notify_all();
}

std::vector<std::uint8_t> ByteChannel::read_some(std::size_t max_bytes) {
    std::unique_lock lock(mutex_);
    ready_.wait(lock, [&] { return closed_ || !data_.empty(); });
    const std::size_t n = std::min(max_bytes, data_.size());
    std::vector<std::uint8_t> out(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(n));
    data_.erase(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

void ByteChannel::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    ready_.notify_all();
}

StreamCompanion::StreamCompanion(EngineConfig cfg, std::size_t chunk)
    : engine_(std::move(cfg)), chunk_(std::max<std::size_t>(1, chunk)) {
    server_ = std::jthread([this] { serve(); });
}

StreamCompanion::~StreamCompanion() {
    to_engine_.close();
    to_host_.close();
}

void StreamCompanion::serve() {
    FrameDecoder decoder;
    for (;;) {
        const auto bytes = to_engine_.read_some(chunk_);
        if (bytes.empty()) return;
        decoder.feed(bytes);
        while (auto frame = decoder.next()) {
            Response r;
            try {
                r = engine_.handle(decode_command(*frame));
            } catch (const ProtocolError& e) {
                r.command = static_cast<CommandId>(frame->id);
                r.ok = false;
                r.message = e.what();
            }
            const auto out = encode_response(r);
            for (std::size_t k = 0; k < out.size(); k += chunk_) {
                to_host_.write(std::span(out).subspan(k, std::min(chunk_, out.size() - k)));
            }
        }
    }
}

Response StreamCompanion::call(const Command& cmd) {
    const auto bytes = encode_command(cmd);
    for (std::size_t k = 0; k < bytes.size(); k += chunk_) {
        to_engine_.write(std::span(bytes).subspan(k, std::min(chunk_, bytes.size() - k)));
    }
    for (;;) {
        if (auto frame = host_decoder_.next()) return decode_response(*frame);
        const auto chunk = to_host_.read_some(chunk_);
        if (chunk.empty()) throw ProtocolError("companion closed the link");
        host_decoder_.feed(chunk);
    }
}

}  // namespace tofslam
