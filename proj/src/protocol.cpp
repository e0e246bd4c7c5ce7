#include "tofslam/protocol.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace tofslam {

namespace {

class Writer {
public:
    void u8(std::uint8_t v) { out.push_back(v); }
    void u16(std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void i16(std::int16_t v) { u16(static_cast<std::uint16_t>(v)); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

    std::vector<std::uint8_t> out;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : bytes(b) {}

    std::uint8_t u8() {
        need(1);
        return bytes[pos++];
    }
    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes[pos + k]) << (8 * k);
        pos += 4;
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::int16_t i16() { return static_cast<std::int16_t>(u16()); }
    float f32() { return std::bit_cast<float>(u32()); }
    std::size_t remaining() const { return bytes.size() - pos; }
    std::string rest() {
        std::string s(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
        pos = bytes.size();
        return s;
    }

private:
    void need(std::size_t n) const {
        if (remaining() < n) throw ProtocolError("truncated payload");
    }
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
};

void check_entry(const GraphEntryPacket& p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.psi)) {
        throw ProtocolError("graph entry: non-finite pose");
    }
    for (const auto& row : p.tof) {
        for (auto mm : row) {
            if (mm < 0 || mm > kMaxTofMillimeters) {
                throw ProtocolError("graph entry: distance outside [0, 4000] mm");
            }
        }
    }
}

void expect_size(const Frame& f, std::size_t n) {
    if (f.payload.size() != n) {
        throw ProtocolError(std::string(to_string(static_cast<CommandId>(f.id))) + ": payload is " +
                            std::to_string(f.payload.size()) + " bytes, expected " +
                            std::to_string(n));
    }
}

}  // namespace

std::array<std::uint8_t, kEntrySize> encode_entry(const GraphEntryPacket& p) {
    check_entry(p);
    Writer w;
    w.i32(p.pose_id);
    w.i32(p.timestamp);
    w.f32(p.x);
    w.f32(p.y);
    w.f32(p.psi);
    for (const auto& row : p.tof) {
        for (auto mm : row) w.i16(mm);
    }
    std::array<std::uint8_t, kEntrySize> out{};
    std::memcpy(out.data(), w.out.data(), kEntrySize);
    return out;
}

GraphEntryPacket decode_entry(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kEntrySize) {
        throw ProtocolError("graph entry must be 84 bytes, got " + std::to_string(bytes.size()));
    }
    Reader r(bytes);
    GraphEntryPacket p;
    p.pose_id = r.i32();
    p.timestamp = r.i32();
    p.x = r.f32();
    p.y = r.f32();
    p.psi = r.f32();
    for (auto& row : p.tof) {
        for (auto& mm : row) mm = r.i16();
    }
    check_entry(p);
    return p;
}

GraphEntryPacket to_packet(const GraphEntry& e) {
    return {e.pose_id, e.timestamp, static_cast<float>(e.pose.x), static_cast<float>(e.pose.y),
            static_cast<float>(e.pose.psi), e.tof};
}

GraphEntry from_packet(const GraphEntryPacket& p) {
    return {p.pose_id, p.timestamp, Pose2(p.x, p.y, p.psi), p.tof};
}

const char* to_string(CommandId id) {
    switch (id) {
        case CommandId::new_pose: return "NewPose";
        case CommandId::lc_info: return "LcInfo";
        case CommandId::pgo: return "Pgo";
        case CommandId::pose_request: return "PoseRequest";
    }
    return "unknown command";
}

CommandId command_id(const Command& c) {
    return std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, NewPose>) return CommandId::new_pose;
            else if constexpr (std::is_same_v<T, LcInfo>) return CommandId::lc_info;
            else if constexpr (std::is_same_v<T, Pgo>) return CommandId::pgo;
            else return CommandId::pose_request;
        },
        c);
}

std::vector<std::uint8_t> encode_frame(std::uint8_t id, std::span<const std::uint8_t> payload) {
    if (payload.size() > 0xffff) throw ProtocolError("payload exceeds 65535 bytes");
    Writer w;
    w.u8(id);
    w.u16(static_cast<std::uint16_t>(payload.size()));
    w.out.insert(w.out.end(), payload.begin(), payload.end());
    return w.out;
}

std::vector<std::uint8_t> encode_command(const Command& c) {
    Writer w;
    if (const auto* n = std::get_if<NewPose>(&c)) {
        const auto e = encode_entry(n->entry);
        w.out.assign(e.begin(), e.end());
    } else if (const auto* l = std::get_if<LcInfo>(&c)) {
        w.i32(l->i);
        w.i32(l->j);
    } else if (const auto* q = std::get_if<PoseRequest>(&c)) {
        w.i32(q->id);
    }
    return encode_frame(static_cast<std::uint8_t>(command_id(c)), w.out);
}

Command decode_command(const Frame& f) {
    Reader r(f.payload);
    switch (static_cast<CommandId>(f.id)) {
        case CommandId::new_pose:
            expect_size(f, kEntrySize);
            return NewPose{decode_entry(f.payload)};
        case CommandId::lc_info: {
            expect_size(f, 8);
            LcInfo l;
            l.i = r.i32();
            l.j = r.i32();
            return l;
        }
        case CommandId::pgo:
            expect_size(f, 0);
            return Pgo{};
        case CommandId::pose_request:
            expect_size(f, 4);
            return PoseRequest{r.i32()};
    }
    throw ProtocolError("unknown command id " + std::to_string(f.id));
}

std::vector<std::uint8_t> encode_response(const Response& resp) {
    Writer w;
    w.u8(resp.ok ? 0 : 1);
    if (!resp.ok) {
        w.out.insert(w.out.end(), resp.message.begin(), resp.message.end());
    } else if (resp.command == CommandId::lc_info) {
        w.u8(resp.accepted ? 1 : 0);
        w.f32(resp.e_icp);
        w.u16(resp.lc_edges);
    } else if (resp.command == CommandId::pgo) {
        w.u16(resp.lc_edges);
    } else if (resp.command == CommandId::pose_request) {
        w.f32(resp.x);
        w.f32(resp.y);
        w.f32(resp.psi);
    }
    return encode_frame(static_cast<std::uint8_t>(resp.command), w.out);
}

Response decode_response(const Frame& f) {
    Response resp;
    resp.command = static_cast<CommandId>(f.id);
    if (f.id < 1 || f.id > 4) throw ProtocolError("unknown response id " + std::to_string(f.id));
    Reader r(f.payload);
    const std::uint8_t status = r.u8();
    if (status > 1) throw ProtocolError("bad status byte");
    resp.ok = status == 0;
    if (!resp.ok) {
        resp.message = r.rest();
        return resp;
    }
    switch (resp.command) {
        case CommandId::new_pose: break;
        case CommandId::lc_info:
            resp.accepted = r.u8() != 0;
            resp.e_icp = r.f32();
            resp.lc_edges = r.u16();
            break;
        case CommandId::pgo: resp.lc_edges = r.u16(); break;
        case CommandId::pose_request:
            resp.x = r.f32();
            resp.y = r.f32();
            resp.psi = r.f32();
            break;
    }
    if (r.remaining() != 0) throw ProtocolError("trailing bytes in response");
    return resp;
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
    buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameDecoder::next() {
    if (buffer_.size() < kFrameHeaderSize) return std::nullopt;
    const std::size_t len = buffer_[1] | (static_cast<std::size_t>(buffer_[2]) << 8);
    if (buffer_.size() < kFrameHeaderSize + len) return std::nullopt;
    Frame f;
    f.id = buffer_[0];
    const auto begin = buffer_.begin() + kFrameHeaderSize;
    f.payload.assign(begin, begin + static_cast<std::ptrdiff_t>(len));
    buffer_.erase(buffer_.begin(), begin + static_cast<std::ptrdiff_t>(len));
    return f;
}

}  // namespace tofslam
