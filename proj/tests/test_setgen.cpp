#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dgl/setgen.hpp"
#include "support/oracles.hpp"

using namespace dgl;

TEST(Cantor, NumeratorsMatchIntervalEnumeration) {
    const CantorSpec spec{4, {0, 3}, 4};
    const auto num = spec.numerators();
    const auto iv = oracle::cantor_intervals(4, {0, 3}, 4);
    ASSERT_EQ(num.size(), iv.size());
    for (std::size_t i = 0; i < iv.size(); ++i) EXPECT_DOUBLE_EQ(double(num[i]) / spec.denominator(), iv[i].first);
}

TEST(Cantor, MatchedLevelBaseFour) {
    // Gap at level L is 2 * 4^-L, so the deepest level with gap >= 2^-k is floor((k+1)/2).
    for (int k = 2; k <= 16; ++k) EXPECT_EQ(matched_level(4, {0, 3}, Scale(k)), (k + 1) / 2) << k;
}

TEST(Cantor, MismatchIsError) {
    const CantorSpec spec{3, {0, 2}, 6};
    EXPECT_THROW(gen_cantor_product(spec, Scale(4)), InvalidArgument);
    EXPECT_THROW((CantorSpec{3, {0, 3}, 2}.validate()), InvalidArgument);
    EXPECT_THROW((CantorSpec{3, {1, 1}, 2}.validate()), InvalidArgument);
}

TEST(Cantor, ProductSizeAndSeparation) {
    const Scale d(8);
    const CantorSpec spec{4, {0, 3}, matched_level(4, {0, 3}, d)};
    const auto P = gen_cantor_product(spec, d);
    EXPECT_EQ(P.size(), 256u);
    EXPECT_GE(min_separation_below(P.points(), 1.0), d.value());
}

TEST(Cantor, SingleAxisLiesOnLine) {
    const CantorSpec spec{3, {0, 2}, 3};
    const auto P = gen_cantor_product(spec, std::nullopt, Scale(5));
    EXPECT_TRUE(collinear(P.points()));
}

TEST(Grid, Size) {
    EXPECT_EQ(gen_grid(Scale(5)).size(), 1024u);
    EXPECT_EQ(gen_grid(Scale(5), 0.5).size(), 256u);
}

TEST(Frostman, DeterministicAndCertified) {
    const auto a = gen_random_frostman_certified(Scale(8), 1.2, 99);
    const auto b = gen_random_frostman_certified(Scale(8), 1.2, 99);
    ASSERT_EQ(a.points.size(), b.points.size());
    EXPECT_TRUE(std::equal(a.points.vec().begin(), a.points.vec().end(), b.points.vec().begin(),
                           [](Point2 p, Point2 q) { return p.x == q.x && p.y == q.y; }));
    EXPECT_LE(a.certificate.C_star, kFrostmanMaxC);
    const auto c = gen_random_frostman(Scale(8), 1.2, 100);
    EXPECT_NE(a.points.size() + a.points[0].x, c.size() + c[0].x);
}

TEST(Frostman, SizeNearTarget) {
    for (double s : {0.5, 1.0, 1.5, 2.0}) {
        const auto P = gen_random_frostman(Scale(10), s, 5);
        const double target = std::exp2(s * 10);
        EXPECT_GE(double(P.size()), target / 4) << s;
        EXPECT_LE(double(P.size()), target * 4) << s;
    }
}

TEST(Frostman, RejectsExponent) {
    EXPECT_THROW(gen_random_frostman(Scale(5), 0.0, 1), InvalidArgument);
    EXPECT_THROW(gen_random_frostman(Scale(5), 2.5, 1), InvalidArgument);
}

TEST(Directions, OneDimensionalProfile) {
    const Scale d(12);
    const auto dirs = gen_direction_set(d, 0.5, 3);
    std::vector<double> u;
    for (double t : dirs) {
        EXPECT_GE(t, 0.0);
        EXPECT_LT(t, kPi);
        u.push_back(t / kPi);
    }
    std::sort(u.begin(), u.end());
    EXPECT_LE(oracle::interval_profile(u, 0.5, 12), 16.0);
}

TEST(Bush, AllTubesThroughApex) {
    const BushSpec spec{{0.25, -0.5}, 0.7, Scale(9), 4};
    const auto T = gen_tube_bush(spec);
    EXPECT_GT(T.size(), 10u);
    for (const auto& t : T.tubes()) EXPECT_LT(point_line_dist(spec.apex, t.line), 1e-12);
    std::set<double> phis;
    for (const auto& t : T.tubes()) phis.insert(t.line.phi());
    EXPECT_EQ(phis.size(), T.size());
}

TEST(TubeNet, Shape) {
    for (double r : {0x1p-4, 0x1p-6}) {
        const auto T = gen_tube_net(r);
        const auto sh = tube_net_shape(r);
        EXPECT_EQ(T.size(), sh.directions * sh.offsets);
        EXPECT_EQ(T.width(), 2 * r);
        const double n = T.size();
        EXPECT_GE(n, 1.0 / (r * r));
        EXPECT_LE(n, 64.0 / (r * r));
    }
}

TEST(TubeNet, ContainsRandomTubes) {
    const double r = 0x1p-4;
    const auto T = gen_tube_net(r);
    detail::Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const double phi = kPi * detail::uniform01(rng);
        const double c = -1.4 + 2.8 * detail::uniform01(rng);
        const auto strip = oracle::strip_in_box(phi, c, r);
        if (strip.empty()) continue;
        bool found = false;
        for (const auto& t : T.tubes())
            if (oracle::max_dist_to_line(strip, t.line.phi(), t.line.c()) <= t.w + 1e-12) {
                found = true;
                break;
            }
        EXPECT_TRUE(found) << phi << " " << c;
    }
}

TEST(RandomTubeFamily, ParametersInRange) {
    const auto T = gen_random_tube_family(Scale(7), 1.0, 2);
    EXPECT_TRUE(T.separated());
    for (const auto& t : T.tubes()) {
        EXPECT_LE(std::fabs(t.line.c()), 1.0);
        EXPECT_EQ(t.w, 0x1p-7);
    }
}

TEST(Cantor, ProductDimensionFit) {
    std::vector<ScaleCount> s;
    const Scale d(12);
    const CantorSpec spec{4, {0, 3}, matched_level(4, {0, 3}, d)};
    const auto P = gen_cantor_product(spec, d);
    for (int k = 4; k <= 12; ++k) s.push_back({k, double(covering_number(P, std::ldexp(1.0, -k)))});
    EXPECT_NEAR(fit_exponent(s).slope, 2 * spec.nominal_dimension(), 0.05);
}

TEST(Cantor, LevelMatchedSweep) {
    std::vector<ScaleCount> s;
    for (int k : {4, 6, 8, 10}) {
        const Scale d(k);
        const CantorSpec spec{4, {0, 3}, matched_level(4, {0, 3}, d)};
        s.push_back({k, double(gen_cantor_product(spec, std::nullopt, d).size())});
    }
    EXPECT_NEAR(fit_exponent(s).slope, 0.5, 0.05);
}

TEST(TubeNet, SmallScales) {
    const auto half = gen_tube_net(0.5);
    EXPECT_GE(half.size(), 1u);
    EXPECT_LE(half.size(), 256u);
    const double r = 0x1p-5;
    const double n = gen_tube_net(r).size();
    EXPECT_GE(n, 1024.0 / 64);
    EXPECT_LE(n, 1024.0 * 64);
    EXPECT_THROW(gen_tube_net(0.75), InvalidArgument);
}

TEST(TubeNet, UniformInParameterSpace) {
    const auto T = gen_tube_net(0x1p-4);
    EXPECT_LE(tube_concentration_profile(T, 2.0).C_star, 64.0);
}

TEST(Bush, ProfileBoundedByDirections) {
    const BushSpec spec{{0.0, 0.0}, 1.0, Scale(8), 6};
    const auto T = gen_tube_bush(spec);
    std::vector<double> u;
    for (double a : gen_direction_set(spec.delta, spec.s, spec.seed)) u.push_back(a / kPi);
    std::sort(u.begin(), u.end());
    // Through the origin c = 0, so the parameter profile is the direction profile up to the pi stretch.
    EXPECT_LE(tube_concentration_profile(T, 1.0).C_star, 4.0 * std::max(1.0, oracle::interval_profile(u, 1.0, 8)));
}

TEST(Generators, OutputsSatisfyInvariants) {
    const auto P = gen_random_frostman(Scale(9), 1.7, 12);
    EXPECT_GE(min_separation_below(P.points(), 1.0), P.delta().value());
    for (auto p : P.points()) {
        EXPECT_GE(p.x, 0.0);
        EXPECT_LT(p.x, 1.0);
    }
}
