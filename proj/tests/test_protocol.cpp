#include <gtest/gtest.h>

#include <random>

#include "tofslam/protocol.hpp"

using namespace tofslam;

namespace {

GraphEntryPacket ramp_packet() {
    GraphEntryPacket p{7, 1234, 1.5f, -2.25f, 0.5f, {}};
    for (int s = 0; s < 4; ++s) {
        for (int z = 0; z < 8; ++z) {
            p.tof[static_cast<std::size_t>(s)][static_cast<std::size_t>(z)] =
                static_cast<std::int16_t>(s * 8 + z);
        }
    }
    return p;
}

std::vector<Frame> decode_all(FrameDecoder& d) {
    std::vector<Frame> out;
    while (auto f = d.next()) out.push_back(*f);
    return out;
}

}  // namespace

TEST(Protocol, ZeroEntryIs84ZeroBytes) {
    const auto bytes = encode_entry({});
    EXPECT_EQ(bytes.size(), 84u);
    for (auto b : bytes) EXPECT_EQ(b, 0);
    EXPECT_EQ(decode_entry(bytes), GraphEntryPacket{});
}

TEST(Protocol, GoldenEntryBytes) {
    const auto bytes = encode_entry(ramp_packet());
    const std::vector<std::uint8_t> head = {0x07, 0x00, 0x00, 0x00, 0xd2, 0x04, 0x00, 0x00,
                                            0x00, 0x00, 0xc0, 0x3f, 0x00, 0x00, 0x10, 0xc0,
                                            0x00, 0x00, 0x00, 0x3f};
    for (std::size_t k = 0; k < head.size(); ++k) EXPECT_EQ(bytes[k], head[k]) << k;
    for (std::size_t k = 0; k < 32; ++k) {
        EXPECT_EQ(bytes[20 + 2 * k], k);
        EXPECT_EQ(bytes[21 + 2 * k], 0);
    }
    EXPECT_EQ(decode_entry(bytes), ramp_packet());
}

TEST(Protocol, EntryErrors) {
    const auto bytes = encode_entry(ramp_packet());
    EXPECT_THROW(decode_entry(std::span(bytes).first(83)), ProtocolError);
    std::vector<std::uint8_t> longer(bytes.begin(), bytes.end());
    longer.push_back(0);
    EXPECT_THROW(decode_entry(longer), ProtocolError);

    auto bad = ramp_packet();
    bad.tof[1][2] = 4001;
    EXPECT_THROW(encode_entry(bad), ProtocolError);
    bad.tof[1][2] = -1;
    EXPECT_THROW(encode_entry(bad), ProtocolError);
    auto nan = ramp_packet();
    nan.x = std::numeric_limits<float>::quiet_NaN();
    EXPECT_THROW(encode_entry(nan), ProtocolError);

    auto raw = bytes;
    raw[20] = 0xff;
    raw[21] = 0x7f;  // 32767 mm
    EXPECT_THROW(decode_entry(raw), ProtocolError);
}

TEST(Protocol, RandomEntriesRoundTrip) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int32_t> id;
    std::uniform_real_distribution<float> pos(-100.0f, 100.0f);
    std::uniform_int_distribution<int> mm(0, 4000);
    for (int t = 0; t < 1000; ++t) {
        GraphEntryPacket p{id(rng), id(rng), pos(rng), pos(rng), pos(rng), {}};
        for (auto& row : p.tof) {
            for (auto& v : row) v = static_cast<std::int16_t>(mm(rng));
        }
        const auto bytes = encode_entry(p);
        EXPECT_EQ(decode_entry(bytes), p);
        EXPECT_EQ(encode_entry(decode_entry(bytes)), bytes);
    }
}

TEST(Protocol, PacketConversionRoundsPoseToFloat) {
    GraphEntry e{3, 400, Pose2(0.1, 0.2, 0.3), {}};
    const auto back = from_packet(to_packet(e));
    EXPECT_EQ(back.pose_id, 3);
    EXPECT_EQ(back.pose.x, static_cast<double>(0.1f));
    EXPECT_EQ(back.pose.psi, static_cast<double>(0.3f));
}

TEST(Protocol, CommandsRoundTrip) {
    const std::vector<Command> cmds = {NewPose{ramp_packet()}, LcInfo{3, -9}, Pgo{},
                                       PoseRequest{123456}};
    FrameDecoder d;
    for (const auto& c : cmds) d.feed(encode_command(c));
    const auto frames = decode_all(d);
    ASSERT_EQ(frames.size(), cmds.size());
    for (std::size_t k = 0; k < cmds.size(); ++k) {
        EXPECT_EQ(decode_command(frames[k]), cmds[k]);
        EXPECT_EQ(frames[k].id, static_cast<std::uint8_t>(command_id(cmds[k])));
    }
    EXPECT_EQ(encode_command(Pgo{}), (std::vector<std::uint8_t>{3, 0, 0}));
    EXPECT_EQ(encode_command(PoseRequest{258}), (std::vector<std::uint8_t>{4, 4, 0, 2, 1, 0, 0}));
    EXPECT_EQ(encode_command(NewPose{}).size(), 87u);
}

TEST(Protocol, CommandErrors) {
    EXPECT_THROW(decode_command({9, {}}), ProtocolError);
    EXPECT_THROW(decode_command({0, {}}), ProtocolError);
    EXPECT_THROW(decode_command({2, {1, 2, 3}}), ProtocolError);
    EXPECT_THROW(decode_command({3, {0}}), ProtocolError);
    EXPECT_THROW(decode_command({1, std::vector<std::uint8_t>(83)}), ProtocolError);
}

TEST(Protocol, ResponsesRoundTrip) {
    Response lc;
    lc.command = CommandId::lc_info;
    lc.accepted = true;
    lc.e_icp = 0.0125f;
    lc.lc_edges = 7;
    Response pose;
    pose.command = CommandId::pose_request;
    pose.x = 1.0f;
    pose.y = -2.0f;
    pose.psi = 3.0f;
    Response err;
    err.command = CommandId::pgo;
    err.ok = false;
    err.message = "no such pose";
    Response ack;
    Response pgo;
    pgo.command = CommandId::pgo;
    pgo.lc_edges = 1;
    for (const auto& r : {lc, pose, err, ack, pgo}) {
        FrameDecoder d;
        d.feed(encode_response(r));
        const auto f = d.next();
        ASSERT_TRUE(f.has_value());
        EXPECT_EQ(decode_response(*f), r);
    }
    EXPECT_EQ(encode_response(ack), (std::vector<std::uint8_t>{1, 1, 0, 0}));
    EXPECT_THROW(decode_response({2, {0, 1}}), ProtocolError);
    EXPECT_THROW(decode_response({1, {0, 5}}), ProtocolError);
    EXPECT_THROW(decode_response({1, {}}), ProtocolError);
    EXPECT_THROW(decode_response({1, {2}}), ProtocolError);
    EXPECT_THROW(decode_response({8, {0}}), ProtocolError);
}

TEST(Protocol, FramingAcrossArbitrarySplits) {
    std::vector<std::uint8_t> stream;
    std::vector<Command> cmds;
    for (int k = 0; k < 20; ++k) {
        auto p = ramp_packet();
        p.pose_id = k;
        cmds.push_back(NewPose{p});
        cmds.push_back(LcInfo{k, k + 1});
        cmds.push_back(Pgo{});
    }
    for (const auto& c : cmds) {
        const auto b = encode_command(c);
        stream.insert(stream.end(), b.begin(), b.end());
    }
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        FrameDecoder d;
        std::vector<Frame> frames;
        std::size_t pos = 0;
        while (pos < stream.size()) {
            const std::size_t n = std::min<std::size_t>(rng() % 100, stream.size() - pos);
            d.feed(std::span(stream).subspan(pos, n));
            pos += n;
            for (auto& f : decode_all(d)) frames.push_back(std::move(f));
        }
        EXPECT_EQ(d.buffered(), 0u);
        ASSERT_EQ(frames.size(), cmds.size());
        for (std::size_t k = 0; k < cmds.size(); ++k) EXPECT_EQ(decode_command(frames[k]), cmds[k]);
    }
}

TEST(Protocol, PartialFrameWaits) {
    FrameDecoder d;
    const auto b = encode_command(LcInfo{1, 2});
    d.feed(std::span(b).first(2));
    EXPECT_FALSE(d.next().has_value());
    d.feed(std::span(b).subspan(2, 5));
    EXPECT_FALSE(d.next().has_value());
    d.feed(std::span(b).subspan(7));
    ASSERT_TRUE(d.next().has_value());
    EXPECT_FALSE(d.next().has_value());
}
