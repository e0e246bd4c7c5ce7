#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tofslam/pose_graph.hpp"

namespace tofslam {

/// Host <-> companion wire format, version 1.
///
/// Frame: u8 command id, u16 little-endian payload length, payload. Responses use the same
/// framing and echo the command id; their payload starts with a status byte (0 ok, 1 error,
/// followed by a UTF-8 message on error).
///
///   id  command       request payload            ok response data
///   1   NewPose       84-byte graph entry        -
///   2   LcInfo        i32 i, i32 j               u8 accepted, f32 e_icp, u16 lc_edges
///   3   Pgo           -                          u16 lc_edges
///   4   PoseRequest   i32 id                     f32 x, f32 y, f32 psi
inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::size_t kEntrySize = 84;
inline constexpr std::size_t kFrameHeaderSize = 3;

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Graph table entry as transmitted: pose as float32, ToF rows sensor-major in millimeters.
struct GraphEntryPacket {
    std::int32_t pose_id = 0;
    std::int32_t timestamp = 0;
    float x = 0.0f;
    float y = 0.0f;
    float psi = 0.0f;
    TofRows tof{};

    friend bool operator==(const GraphEntryPacket&, const GraphEntryPacket&) = default;
};

/// Throws ProtocolError on non-finite pose fields or distances outside [0, 4000] mm.
std::array<std::uint8_t, kEntrySize> encode_entry(const GraphEntryPacket& p);
/// Throws ProtocolError on a length other than 84 bytes or out-of-range fields.
GraphEntryPacket decode_entry(std::span<const std::uint8_t> bytes);

GraphEntryPacket to_packet(const GraphEntry& e);
GraphEntry from_packet(const GraphEntryPacket& p);

enum class CommandId : std::uint8_t { new_pose = 1, lc_info = 2, pgo = 3, pose_request = 4 };

const char* to_string(CommandId id);

struct NewPose {
    GraphEntryPacket entry;
    friend bool operator==(const NewPose&, const NewPose&) = default;
};
struct LcInfo {
    std::int32_t i = 0;
    std::int32_t j = 0;
    friend bool operator==(const LcInfo&, const LcInfo&) = default;
};
struct Pgo {
    friend bool operator==(const Pgo&, const Pgo&) = default;
};
struct PoseRequest {
    std::int32_t id = 0;
    friend bool operator==(const PoseRequest&, const PoseRequest&) = default;
};

using Command = std::variant<NewPose, LcInfo, Pgo, PoseRequest>;

CommandId command_id(const Command& c);

struct Response {
    CommandId command = CommandId::new_pose;
    bool ok = true;
    std::string message;          // error text
    bool accepted = false;        // LcInfo
    float e_icp = 0.0f;           // LcInfo
    std::uint16_t lc_edges = 0;   // LcInfo, Pgo
    float x = 0.0f, y = 0.0f, psi = 0.0f;  // PoseRequest

    friend bool operator==(const Response&, const Response&) = default;
};

struct Frame {
    std::uint8_t id = 0;
    std::vector<std::uint8_t> payload;
};

std::vector<std::uint8_t> encode_frame(std::uint8_t id, std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_command(const Command& c);
/// Throws ProtocolError for unknown ids or payload sizes that do not match the command.
Command decode_command(const Frame& f);

std::vector<std::uint8_t> encode_response(const Response& r);
Response decode_response(const Frame& f);

/// Reassembles frames from arbitrarily split byte chunks.
class FrameDecoder {
public:
    void feed(std::span<const std::uint8_t> bytes);
    std::optional<Frame> next();
    std::size_t buffered() const { return buffer_.size(); }

private:
    std::deque<std::uint8_t> buffer_;
};

}  // namespace tofslam
