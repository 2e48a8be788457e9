#include <gtest/gtest.h>

#include <cmath>

#include "dgl/regularity.hpp"
#include "dgl/setgen.hpp"
#include "support/oracles.hpp"

using namespace dgl;

TEST(Profile, FullGridIsExactlyOne) {
    const auto P = gen_grid(Scale(6));
    EXPECT_DOUBLE_EQ(concentration_profile(P, 2.0).C_star, 1.0);
    EXPECT_DOUBLE_EQ(katz_tao_profile(P, 2.0).C_star, 1.0);
}

TEST(Profile, SegmentHasDimensionOne) {
    const Scale d(8);
    std::vector<Point2> pts;
    for (int i = 0; i < 256; ++i) pts.push_back({i * d.value(), 0.0});
    const PointSet P(d, pts);
    EXPECT_DOUBLE_EQ(concentration_profile(P, 1.0).C_star, 1.0);
    // At s = 2 the densest square is the delta-square: 1 / (delta^2 * 256) = 256.
    EXPECT_DOUBLE_EQ(concentration_profile(P, 2.0).C_star, 256.0);
}

TEST(Profile, SinglePoint) {
    const PointSet P(Scale(5), {{0.3125, 0.5}});
    const auto c = concentration_profile(P, 1.0);
    EXPECT_DOUBLE_EQ(c.C_star, 32.0);
    EXPECT_EQ(c.entries[c.argmax].k_r, 5);
    EXPECT_DOUBLE_EQ(katz_tao_profile(P, 1.0).C_star, 1.0);
    EXPECT_EQ(c.epsilon(P.delta()), 1.0);
}

TEST(Profile, MatchesBruteForceOnRandomSets) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (double s : {0.7, 1.3}) {
            const Scale d(6);
            const auto P = gen_random_frostman(d, s, seed);
            const double total = static_cast<double>(covering_number(P, d.value()));
            const double cov = oracle::brute_square_profile(P.vec(), 6, true, [&](double r) { return std::pow(r, s) * total; });
            const double kt = oracle::brute_square_profile(P.vec(), 6, false, [&](double r) { return std::pow(r / d.value(), s); });
            EXPECT_NEAR(concentration_profile(P, s).C_star, cov, 1e-12 * cov);
            EXPECT_NEAR(katz_tao_profile(P, s).C_star, kt, 1e-12 * kt);
        }
    }
}

TEST(Profile, WitnessReevaluates) {
    const auto P = gen_random_frostman(Scale(9), 1.1, 8);
    for (auto kind : {MassKind::Covering, MassKind::Cardinality}) {
        const auto prof = kind == MassKind::Covering ? concentration_profile(P, 1.1) : katz_tao_profile(P, 1.1);
        ASSERT_EQ(prof.entries.size(), 10u);
        for (const auto& e : prof.entries) {
            EXPECT_EQ(cell_mass(P.points(), P.delta(), e.cell, kind), e.mass);
            const double r = e.r;
            EXPECT_GE(e.witness.x, e.cell.shift.x + e.cell.ix * r);
            EXPECT_LT(e.witness.x, e.cell.shift.x + (e.cell.ix + 1) * r);
        }
    }
}

TEST(Profile, EmptyIsError) {
    const std::vector<Point2> none;
    EXPECT_THROW(detail::cell_profile(none, Scale(3), 1.0, MassKind::Covering, false), InvalidArgument);
}

TEST(TubeProfile, WrapsAcrossSeam) {
    const Scale d(6);
    const TubeSet T(d, {{LineNF(0.001, 0.3), d.value()}, {LineNF(kPi - 0.001, -0.3), d.value()}});
    const auto kt = tube_katz_tao_profile(T, 0.0);
    EXPECT_EQ(kt.entries[3].mass, 2.0);
    // The same parameter pair read as plain points is split at that scale.
    const auto flat = detail::cell_profile(T.parameters(), d, 0.0, MassKind::Cardinality, false);
    EXPECT_EQ(flat.entries[3].mass, 1.0);
}

TEST(Fit, RecoversExactSlope) {
    std::vector<ScaleCount> s;
    for (int k = 4; k <= 10; ++k) s.push_back({k, std::exp2(1.5 * k + 2.0)});
    const auto f = fit_exponent(s);
    EXPECT_NEAR(f.slope, 1.5, 1e-12);
    EXPECT_NEAR(f.intercept, 2.0, 1e-12);
    EXPECT_LT(f.max_residual, 1e-12);
}

TEST(Fit, Errors) {
    EXPECT_THROW(fit_exponent(std::vector<ScaleCount>{{1, 2}, {2, 4}}), InvalidArgument);
    EXPECT_THROW(fit_exponent(std::vector<ScaleCount>{{1, 2}, {2, 4}, {3, 0.5}}), InvalidArgument);
    EXPECT_THROW(fit_exponent(std::vector<ScaleCount>{{2, 2}, {2, 4}, {2, 8}}), InvalidArgument);
}

TEST(Fit, CoveringOfGridHasSlopeTwo) {
    std::vector<ScaleCount> s;
    const auto P = gen_grid(Scale(8));
    for (int k = 2; k <= 8; ++k) s.push_back({k, double(covering_number(P, std::ldexp(1.0, -k)))});
    EXPECT_NEAR(fit_exponent(s).slope, 2.0, 1e-12);
}
