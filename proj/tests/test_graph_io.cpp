#include <gtest/gtest.h>

#include <sstream>

#include "tofslam/graph_io.hpp"
#include "tofslam/synthetic.hpp"

using namespace tofslam;

TEST(GraphIo, RoundTripIsExact) {
    const auto g = square_loop_graph({.poses = 200, .side = 2.0, .laps = 2, .closures = 2});
    const auto edges = build_edges(g.poses, g.lc_edges);
    std::stringstream ss;
    write_graph(ss, g.poses, edges);
    const auto back = read_graph(ss);
    ASSERT_EQ(back.poses.size(), g.poses.size());
    ASSERT_EQ(back.edges.size(), edges.size());
    for (std::size_t k = 0; k < g.poses.size(); ++k) {
        EXPECT_EQ(back.poses[k].x, g.poses[k].x);
        EXPECT_EQ(back.poses[k].y, g.poses[k].y);
        EXPECT_EQ(back.poses[k].psi, g.poses[k].psi);
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
        EXPECT_EQ(back.edges[k].from, edges[k].from);
        EXPECT_EQ(back.edges[k].to, edges[k].to);
        EXPECT_EQ(back.edges[k].z.x, edges[k].z.x);
        EXPECT_EQ(back.edges[k].z.psi, edges[k].z.psi);
        EXPECT_EQ(back.edges[k].omega, edges[k].omega);
        EXPECT_EQ(back.edges[k].kind, edges[k].kind);
    }
}

TEST(GraphIo, SkipsCommentsAndBlankLines) {
    std::istringstream in("# header\n\nVERTEX 0 0 0 0\n  \nVERTEX 1 1 0 0\nEDGE 0 1 1 0 0 1\n");
    const auto g = read_graph(in);
    EXPECT_EQ(g.poses.size(), 2u);
    ASSERT_EQ(g.edges.size(), 1u);
    EXPECT_EQ(g.edges[0].kind, EdgeKind::odometry);
}

TEST(GraphIo, ErrorsNameTheLine) {
    const char* bad[] = {
        "VERTEX 0 0 0\n",
        "VERTEX 1 0 0 0\n",
        "VERTEX 0 0 0 0\nFOO 1\n",
        "VERTEX 0 0 0 0 7\n",
        "VERTEX 0 0 0 0\nVERTEX 1 0 0 0\nEDGE 0 1 1 0 0 0\n",
        "VERTEX 0 nan 0 0\n",
    };
    for (const char* text : bad) {
        std::istringstream in(text);
        try {
            read_graph(in);
            ADD_FAILURE() << text;
        } catch (const GraphError& e) {
            EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
        }
    }
    std::istringstream dangling("VERTEX 0 0 0 0\nEDGE 0 3 1 0 0 1\n");
    EXPECT_THROW(read_graph(dangling), GraphError);
}
