#include <gtest/gtest.h>

#include <cmath>

#include "dgl/incidence.hpp"
#include "dgl/projections.hpp"
#include "dgl/setgen.hpp"

using namespace dgl;

TEST(Incidence, HandExample) {
    const Scale d(4);
    const PointSet P(d, {{0, 0}, {0.5, 0}, {1, 0}, {0, 0.5}});
    const TubeSet T(d, {{LineNF(kPi / 2, 0.0), d.value()}, {LineNF(0.0, 0.0), d.value()}, {LineNF(0.0, 1.5), d.value()}});
    const auto rep = count_bruteforce(P, T);
    EXPECT_EQ(rep.per_tube, (std::vector<std::uint32_t>{3, 2, 0}));
    EXPECT_EQ(rep.total, 5u);
    EXPECT_EQ(count_indexed(P, T), rep);
}

TEST(Incidence, BoundaryIsInclusive) {
    const Scale d(3);
    const PointSet P(d, {{0.125, 0.0}, {0.25, 0.0}});
    const TubeSet T(d, {{LineNF(0.0, 0.0), 0.125}});
    EXPECT_EQ(count_bruteforce(P, T).total, 1u);
    EXPECT_EQ(count_indexed(P, T).total, 1u);
}

TEST(Incidence, IndexedMatchesBruteForce) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        detail::Rng rng(seed);
        const Scale d(static_cast<int>(5 + seed % 4));
        const auto grid = gen_random_frostman(d, 1.0 + 0.15 * seed, seed);
        std::vector<Point2> shifted;
        for (auto p : grid.points()) shifted.push_back({2 * p.x - 1, p.y - 0.5});
        const PointSet P(d, shifted);
        std::vector<Tube> tubes;
        const double w = d.value() * (1 + seed % 3);
        for (int j = 0; j < 300; ++j) tubes.push_back({LineNF(kPi * detail::uniform01(rng), 2.4 * detail::uniform01(rng) - 1.2), w});
        // Axis-aligned and diagonal tubes through grid lines exercise the boundary predicate.
        for (int j = -4; j <= 4; ++j) {
            tubes.push_back({LineNF(0.0, j * d.value()), w});
            tubes.push_back({LineNF(kPi / 2, j * d.value()), w});
            tubes.push_back({LineNF(kPi / 4, j * d.value()), w});
        }
        const TubeSet T(d, tubes);
        const auto brute = count_bruteforce(P, T);
        EXPECT_EQ(count_indexed(P, T), brute) << seed;
        EXPECT_TRUE(brute.oracle);
    }
}

TEST(Incidence, WideTubesAndSingletons) {
    const Scale d(6);
    const PointSet P(d, {{0.3125, -0.25}});
    std::vector<Tube> tubes;
    for (int j = 0; j < 50; ++j) tubes.push_back({LineNF(j * 0.06, 0.1 * (j % 7) - 0.3), 0.5});
    const TubeSet T(d, tubes);
    EXPECT_EQ(count_indexed(P, T), count_bruteforce(P, T));
}

TEST(Incidence, SizingGuard) {
    const auto P = gen_grid(Scale(7));
    const auto T = gen_random_tube_family(Scale(7), 1.5, 1);
    EXPECT_THROW(count_indexed(P, T, 10.0), SizingError);
}

TEST(FuRen, Kappa) {
    EXPECT_DOUBLE_EQ(fu_ren_kappa(1.0, 1.0), 0.5);
    EXPECT_DOUBLE_EQ(fu_ren_kappa(1.5, 2.0), 1.0 / 2.5);
    EXPECT_DOUBLE_EQ(fu_ren_kappa(2.0, 2.0), 1.0 / 3.0);
    EXPECT_THROW(fu_ren_kappa(0.5, 0.5), InvalidArgument);
    EXPECT_THROW(fu_ren_kappa(2.5, 0.5), InvalidArgument);
}

TEST(FuRen, CeilingAndMargin) {
    const Scale d(7);
    const auto F = gen_random_frostman_certified(d, 1.0, 3);
    const auto T = gen_random_tube_family(d, 1.0, 4);
    const double epsP = F.certificate.epsilon(d);
    const double epsT = tube_concentration_profile(T, 1.0).epsilon(d);
    const auto rep = fu_ren_check(F.points, T, 1.0, 1.0, epsP, epsT);
    ASSERT_TRUE(rep.fu_ren);
    const auto& fr = *rep.fu_ren;
    const double eps = std::max(epsP, epsT);
    EXPECT_DOUBLE_EQ(fr.ceiling, double(F.points.size()) * T.size() * std::pow(d.value(), 0.5 - 5 * eps));
    EXPECT_FALSE(fr.violation);
    EXPECT_NEAR(fr.margin, std::log2(fr.ceiling / rep.total), 1e-12);
    EXPECT_EQ(rep, count_bruteforce(F.points, T));
}

TEST(FuRen, UncertifiedInputIsRejected) {
    const Scale d(7);
    // All points on one short segment: far from a (delta, 1.5, delta^-0.1)-set.
    std::vector<Point2> pts;
    for (int i = 0; i < 16; ++i) pts.push_back({i * d.value(), 0});
    const PointSet P(d, pts);
    const auto T = gen_random_tube_family(d, 1.0, 4);
    EXPECT_THROW(fu_ren_check(P, T, 1.5, 1.0, 0.1, 1.0), CertificationError);
    std::vector<Tube> parallel;
    for (int i = 0; i < 16; ++i) parallel.push_back({LineNF(0.0, i * d.value()), d.value()});
    EXPECT_THROW(fu_ren_check(gen_grid(d), TubeSet(d, parallel), 2.0, 1.5, 0.0, 0.01), CertificationError);
}

TEST(FuRen, EmptyTubesGiveInfiniteMargin) {
    const Scale d(5);
    const auto P = gen_grid(d);
    const TubeSet T(d, {{LineNF(0.0, 3.5), d.value()}});
    const auto rep = fu_ren_check(P, T, 2.0, 0.0 + 1.0, 0.0, 1.0);
    EXPECT_EQ(rep.total, 0u);
    EXPECT_TRUE(std::isinf(rep.fu_ren->margin));
}

TEST(Heavy, ThresholdInclusive) {
    const Scale d(4);
    // 16 points on x = 0; threshold delta^{1/2} * 16 = 4.
    std::vector<Point2> pts;
    for (int i = 0; i < 16; ++i) pts.push_back({0.0, i * d.value()});
    const PointSet P(d, pts);
    const TubeSet T(d, {{LineNF(0.0, 0.0), d.value()}, {LineNF(kPi / 2, 0.0), d.value()}, {LineNF(kPi / 2, 0.125), d.value()}});
    const auto rep = count_bruteforce(P, T);
    EXPECT_EQ(rep.per_tube, (std::vector<std::uint32_t>{16, 2, 3}));
    EXPECT_EQ(heavy_tubes(P, T, 0.5, 0.0).size(), 1u);
    EXPECT_DOUBLE_EQ(heavy_threshold(16, d, 0.5, 0.0), 4.0 * (1 - 1e-12));
    // Exactly at the threshold counts as heavy: y in [0, 3/16] holds 4 points.
    const TubeSet at(d, {{LineNF(kPi / 2, 3.0 / 32), 3.0 / 32}});
    const TubeSet below(d, {{LineNF(kPi / 2, 3.0 / 32), 3.0 / 32 - 1e-9}});
    EXPECT_EQ(count_bruteforce(P, at).total, 4u);
    EXPECT_EQ(count_bruteforce(P, below).total, 2u);
    EXPECT_EQ(heavy_tubes(P, at, 0.5, 0.0).size(), 1u);
    EXPECT_EQ(heavy_tubes(P, below, 0.5, 0.0).size(), 0u);
}

TEST(TwoEnds, UniformLineIsNotConcentrated) {
    std::vector<Point2> pts;
    for (int i = 0; i < 64; ++i) pts.push_back({i / 64.0, 0.0});
    EXPECT_FALSE(two_ends_test(pts, 1.0 / 7).concentrated);
}

TEST(TwoEnds, ClusterIsConcentrated) {
    std::vector<Point2> pts;
    for (int i = 0; i < 30; ++i) pts.push_back({0.01 * i, 0.0});
    for (int i = 0; i < 34; ++i) pts.push_back({0.5 + i / 68.0, 0.0});
    const auto r = two_ends_test(pts, 0.15);
    EXPECT_TRUE(r.concentrated);
    EXPECT_GE(r.count, 22u);
    EXPECT_EQ(r.threshold, 22u);
    EXPECT_THROW(two_ends_test(pts, 0.0), InvalidArgument);
}

TEST(TwoEnds, BruteForceAgreement) {
    // Every reported ball really holds `count` points.
    const auto P = gen_random_frostman(Scale(6), 1.0, 9);
    for (double rho : {0.05, 0.1, 0.3}) {
        const auto r = two_ends_test(P, rho);
        std::size_t n = 0;
        for (auto p : P.points()) n += dist(p, r.center) <= rho;
        EXPECT_EQ(n, r.count);
    }
}

TEST(Incidence, NetCoversGrid) {
    const Scale d(5);
    const auto P = gen_grid(d);
    const auto T = gen_tube_net(d.value());
    EXPECT_GE(count_indexed(P, T).total, P.size());
    EXPECT_EQ(count_indexed(P, TubeSet(d, {{LineNF(0.0, 4.0), d.value()}})).total, 0u);
}

TEST(Incidence, Monotone) {
    const Scale d(6);
    auto pts = gen_random_frostman(d, 1.2, 8).vec();
    const auto T = gen_random_tube_family(d, 1.0, 2);
    const auto before = count_indexed(PointSet(d, pts), T).total;
    pts.push_back({-0.5, -0.5});
    EXPECT_GE(count_indexed(PointSet(d, pts), T).total, before);
    auto tubes = T.vec();
    tubes.push_back({LineNF(0.3, 0.0), T.width()});
    EXPECT_GE(count_indexed(PointSet(d, pts), TubeSet(d, tubes)).total, count_indexed(PointSet(d, pts), T).total);
}

TEST(Incidence, DualTransportSandwich) {
    // Points in [-1,1]^2 and lines with slopes in [-1, 1]: dual incidences at width w lie between
    // the primal counts at w / 2 and 2 w.
    detail::Rng rng(31);
    const Scale d(6);
    auto u = [&] { return 2.0 * detail::uniform01(rng) - 1.0; };
    std::vector<Point2> pts;
    for (int i = 0; i < 400; ++i) pts.push_back({u(), u()});
    std::vector<LineNF> axes;
    for (int j = 0; j < 200; ++j) axes.push_back(to_normal_form(SlopeLine<double>{u(), 0.5 * u()}));
    const double w = 0x1p-5;
    auto primal = [&](double width) {
        std::vector<Tube> t;
        for (const auto& l : axes) t.push_back({l, width});
        return count_bruteforce(pts, t).total;
    };
    std::vector<Point2> dual_pts;
    for (const auto& l : axes) dual_pts.push_back(dualize_line(l));
    std::vector<Tube> dual_tubes;
    for (auto p : pts) dual_tubes.push_back({dualize_point(p), w});
    const auto dual = count_bruteforce(dual_pts, dual_tubes).total;
    EXPECT_LE(primal(w / 2), dual);
    EXPECT_LE(dual, primal(2 * w));
}
