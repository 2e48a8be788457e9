#include <gtest/gtest.h>

#include <filesystem>

#include "dgl/io.hpp"
#include "dgl/setgen.hpp"

using namespace dgl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("dgl_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST(Io, PointsRoundTripBitExact) {
    const auto dir = scratch("points");
    detail::Rng rng(4);
    std::vector<Point2> pts;
    for (int i = 0; i < 200; ++i) pts.push_back({std::ldexp(double(i), -8) + 1e-3 * detail::uniform01(rng), -0.3 + i * 1e-2 / 3});
    const PointSet P(Scale(9), pts, Box{-1, -1, 1.5, 1.5});
    io::write_points(dir / "p.csv", P);
    const auto Q = io::read_points(dir / "p.csv");
    ASSERT_EQ(Q.size(), P.size());
    EXPECT_EQ(Q.delta().k(), 9);
    EXPECT_EQ(Q.box(), P.box());
    for (std::size_t i = 0; i < P.size(); ++i) {
        EXPECT_EQ(Q[i].x, P[i].x);
        EXPECT_EQ(Q[i].y, P[i].y);
    }
}

TEST(Io, TubesRoundTrip) {
    const auto dir = scratch("tubes");
    const auto T = gen_random_tube_family(Scale(6), 1.2, 3);
    io::write_tubes(dir / "t.csv", T);
    const auto U = io::read_tubes(dir / "t.csv", 6);
    ASSERT_EQ(U.size(), T.size());
    for (std::size_t i = 0; i < T.size(); ++i) {
        EXPECT_EQ(U[i].line.phi(), T[i].line.phi());
        EXPECT_EQ(U[i].line.c(), T[i].line.c());
        EXPECT_EQ(U[i].w, T[i].w);
    }
    EXPECT_EQ(io::read_tubes(dir / "t.csv").delta().k(), 6);
}

TEST(Io, MalformedInputs) {
    const auto dir = scratch("bad");
    io::write_text(dir / "a.csv", "x,z\n0,0\n");
    io::write_text(dir / "a.json", "{\"k\": 4}");
    EXPECT_THROW(io::read_points(dir / "a.csv"), InvalidArgument);
    io::write_text(dir / "a.csv", "x,y\n0,zero\n");
    EXPECT_THROW(io::read_points(dir / "a.csv"), InvalidArgument);
    io::write_text(dir / "a.csv", "x,y\n0,0,1\n");
    EXPECT_THROW(io::read_points(dir / "a.csv"), InvalidArgument);
    io::write_text(dir / "a.csv", "x,y\n0,0\n0.01,0\n");
    EXPECT_THROW(io::read_points(dir / "a.csv"), InvalidArgument);
    io::write_text(dir / "b.csv", "x,y\n0,0\n");
    EXPECT_THROW(io::read_points(dir / "b.csv"), InvalidArgument);  // no sidecar
    EXPECT_THROW(io::read_points(dir / "missing.csv"), InvalidArgument);
}

TEST(Io, ProfileJson) {
    const auto P = gen_grid(Scale(4));
    const auto j = io::to_json(concentration_profile(P, 2.0));
    EXPECT_EQ(j["kind"], "covering");
    EXPECT_EQ(j["entries"].size(), 5u);
    EXPECT_EQ(j["entries"][0]["k_r"], 0);
    EXPECT_DOUBLE_EQ(j["C_star"].get<double>(), 1.0);
    EXPECT_TRUE(io::finite_or_null(std::numeric_limits<double>::infinity()).is_null());
}
