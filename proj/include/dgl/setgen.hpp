#pragma once

// Generators for the fractal point and tube configurations used by the experiments.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "dgl/detail/random.hpp"
#include "dgl/geom.hpp"
#include "dgl/regularity.hpp"

namespace dgl {

struct CantorSpec {
    int base = 2;
    std::vector<int> digits{0, 1};
    int level = 1;

    void validate() const {
        require(base >= 2 && base <= 64, "Cantor base must lie in [2, 64]");
        require(!digits.empty(), "Cantor digit set must be non-empty");
        std::vector<int> d = digits;
        std::sort(d.begin(), d.end());
        require(std::adjacent_find(d.begin(), d.end()) == d.end(), "Cantor digits must be distinct");
        require(d.front() >= 0 && d.back() < base, "Cantor digits must lie in [0, base)");
        require(level >= 1, "Cantor level must be >= 1");
        require(std::pow(static_cast<double>(base), level) < 0x1.0p62, "Cantor base^level overflows");
    }

    double nominal_dimension() const {
        return std::log(static_cast<double>(digits.size())) / std::log(static_cast<double>(base));
    }

    std::uint64_t denominator() const {
        std::uint64_t q = 1;
        for (int i = 0; i < level; ++i) q *= static_cast<std::uint64_t>(base);
        return q;
    }

    /// Left endpoints of the surviving level intervals, as numerators over base^level, ascending.
    std::vector<std::uint64_t> numerators() const {
        validate();
        std::vector<int> d = digits;
        std::sort(d.begin(), d.end());
        std::vector<std::uint64_t> cur{0};
        for (int i = 0; i < level; ++i) {
            require(cur.size() * d.size() <= (1u << 22), "Cantor set too large to enumerate");
            std::vector<std::uint64_t> next;
            next.reserve(cur.size() * d.size());
            for (auto v : cur)
                for (int digit : d) next.push_back(v * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(digit));
            cur = std::move(next);
        }
        return cur;
    }

    /// Smallest gap between distinct left endpoints, as a numerator over base^level.
    std::uint64_t min_gap_numerator() const {
        const auto v = numerators();
        std::uint64_t g = denominator();
        for (std::size_t i = 1; i < v.size(); ++i) g = std::min(g, v[i] - v[i - 1]);
        return g;
    }

    /// gap / base^level >= 2^-k, exactly.
    bool separated_at(Scale delta) const {
        const auto lhs = static_cast<unsigned __int128>(min_gap_numerator()) << delta.k();
        return lhs >= static_cast<unsigned __int128>(denominator());
    }
};

/// Deepest level whose left endpoints stay delta-separated (at least 1).
inline int matched_level(int base, const std::vector<int>& digits, Scale delta) {
    CantorSpec spec{base, digits, 1};
    spec.validate();
    int best = 1;
    for (int L = 1; L <= 62; ++L) {
        spec.level = L;
        if (std::pow(static_cast<double>(base), L) >= 0x1.0p62) break;
        if (std::pow(static_cast<double>(digits.size()), L) > (1u << 22)) break;
        if (!spec.separated_at(delta)) break;
        best = L;
    }
    return best;
}

namespace detail {

// floor(num * 2^k / den) * 2^-k, exact.
inline double snap_down(std::uint64_t num, std::uint64_t den, Scale delta) {
    const auto cell = (static_cast<unsigned __int128>(num) << delta.k()) / den;
    return std::ldexp(static_cast<double>(cell), -delta.k());
}

inline std::vector<double> cantor_axis(const CantorSpec& spec, Scale delta) {
    require(spec.separated_at(delta), "Cantor level/delta mismatch: surviving intervals closer than delta");
    std::vector<double> out;
    const auto den = spec.denominator();
    for (auto v : spec.numerators()) out.push_back(snap_down(v, den, delta));
    return out;
}

} // namespace detail

/// Product of left endpoints, snapped down to the delta grid. Without specB the set lies on y = 0.
inline PointSet gen_cantor_product(const CantorSpec& specA, const std::optional<CantorSpec>& specB, Scale delta) {
    const auto xs = detail::cantor_axis(specA, delta);
    const std::vector<double> ys = specB ? detail::cantor_axis(*specB, delta) : std::vector<double>{0.0};
    std::vector<Point2> pts;
    pts.reserve(xs.size() * ys.size());
    for (double x : xs)
        for (double y : ys) pts.push_back({x, y});
    return PointSet(delta, std::move(pts));
}

inline PointSet gen_cantor_product(const CantorSpec& spec, Scale delta) { return gen_cantor_product(spec, spec, delta); }

/// Full grid {i delta} x {j delta} in [0, side)^2.
inline PointSet gen_grid(Scale delta, double side = 1.0) {
    const auto n = static_cast<std::int64_t>(std::llround(side / delta.value()));
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(n * n));
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) pts.push_back({i * delta.value(), j * delta.value()});
    return PointSet(delta, std::move(pts));
}

namespace detail {

/// Top-down random dyadic tree in [0,1)^Dim: each surviving cube keeps floor(2^s) children,
/// and a random subset of cubes keeps one more, sized so that level j holds 2^{s j} cubes
/// rounded stochastically.
/// Returns leaf cells at level k as integer coordinates.
template <int Dim>
std::vector<std::array<std::uint32_t, Dim>> random_dyadic_tree(int k, double s, Rng& rng) {
    constexpr int kChildren = 1 << Dim;
    const double branching = std::min(std::exp2(s), static_cast<double>(kChildren));
    const int whole = std::max(1, static_cast<int>(std::floor(branching)));
    const double frac = branching - std::floor(branching);
    std::vector<std::array<std::uint32_t, Dim>> level{{}};
    for (int j = 0; j < k; ++j) {
        const std::size_t n = level.size();
        std::vector<char> extra(n, 0);
        if (frac > 0.0 && whole < kChildren) {
            const double target = std::floor(std::exp2(s * (j + 1)) + uniform01(rng));
            const double m = std::clamp(target - whole * static_cast<double>(n), 0.0, static_cast<double>(n));
            const auto count = static_cast<std::size_t>(m);
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            for (std::size_t i = 0; i < std::min(count, n); ++i) {
                std::swap(idx[i], idx[i + uniform_below(rng, n - i)]);
                extra[idx[i]] = 1;
            }
        }
        std::vector<std::array<std::uint32_t, Dim>> next;
        for (std::size_t c = 0; c < n; ++c) {
            const int keep = whole + extra[c];
            std::array<int, kChildren> order;
            std::iota(order.begin(), order.end(), 0);
            for (int i = 0; i < keep; ++i) {
                const auto pick = i + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(kChildren - i)));
                std::swap(order[i], order[pick]);
                std::array<std::uint32_t, Dim> child = level[c];
                for (int d = 0; d < Dim; ++d) child[d] = 2 * child[d] + ((order[i] >> d) & 1);
                next.push_back(child);
            }
        }
        level = std::move(next);
    }
    std::sort(level.begin(), level.end());
    return level;
}

} // namespace detail

inline constexpr double kFrostmanMaxC = 16.0;
inline constexpr int kFrostmanAttempts = 8;

struct FrostmanSet {
    PointSet points;
    ConcentrationProfile certificate;
    int attempts = 0;
};

/// Random (delta, s, 16)-set in [0,1)^2 certified post hoc, regenerated up to 8 times.
inline FrostmanSet gen_random_frostman_certified(Scale delta, double s, std::uint64_t seed) {
    require(s > 0.0 && s <= 2.0, "Frostman exponent s must lie in (0, 2]");
    ConcentrationProfile last;
    for (int attempt = 0; attempt < kFrostmanAttempts; ++attempt) {
        detail::Rng rng(detail::mix_seed(seed, static_cast<std::uint64_t>(attempt)));
        const auto leaves = detail::random_dyadic_tree<2>(delta.k(), s, rng);
        std::vector<Point2> pts;
        pts.reserve(leaves.size());
        for (const auto& c : leaves) pts.push_back({std::ldexp(double(c[0]), -delta.k()), std::ldexp(double(c[1]), -delta.k())});
        PointSet P(delta, std::move(pts));
        last = concentration_profile(P, s);
        if (last.C_star <= kFrostmanMaxC) return {std::move(P), std::move(last), attempt + 1};
    }
    throw CertificationError("random Frostman generator: no attempt met C <= 16 (last C_star = " +
                             std::to_string(last.C_star) + ")");
}

inline PointSet gen_random_frostman(Scale delta, double s, std::uint64_t seed) {
    return gen_random_frostman_certified(delta, s, seed).points;
}

/// Random 1-d dyadic set of directions in [0, pi), expected size 2^{s k}.
inline std::vector<double> gen_direction_set(Scale delta, double s, std::uint64_t seed) {
    require(s >= 0.0 && s <= 1.0, "direction-set exponent must lie in [0, 1]");
    detail::Rng rng(seed);
    const auto leaves = detail::random_dyadic_tree<1>(delta.k(), s, rng);
    std::vector<double> out;
    out.reserve(leaves.size());
    for (const auto& c : leaves) out.push_back(kPi * std::ldexp(double(c[0]), -delta.k()));
    return out;
}

struct BushSpec {
    Point2 apex;
    double s = 1.0;
    Scale delta{6};
    std::uint64_t seed = 0;

    double target_count() const { return std::exp2(s * delta.k()); }
};

/// Delta-tubes through the apex with a random (delta, s) direction set.
inline TubeSet gen_tube_bush(const BushSpec& spec) {
    require(std::fabs(spec.apex.x) <= 1.0 && std::fabs(spec.apex.y) <= 1.0, "bush apex must lie in the working box");
    const auto dirs = gen_direction_set(spec.delta, spec.s, spec.seed);
    std::vector<Tube> tubes;
    tubes.reserve(dirs.size());
    for (double theta : dirs) tubes.push_back({LineNF::with_direction(spec.apex, theta), spec.delta.value()});
    return TubeSet(spec.delta, std::move(tubes));
}

struct TubeNetShape {
    std::size_t directions = 0;
    std::size_t offsets = 0;
};

inline TubeNetShape tube_net_shape(double r) {
    require(r > 0.0 && r <= 0.5, "tube net scale r must lie in (0, 1/2]");
    return {static_cast<std::size_t>(std::ceil(2.0 * kPi / r)), static_cast<std::size_t>(std::ceil(4.0 / r))};
}

/// 2r-tubes on a grid of directions x offsets; any r-tube's intersection with [-1,1]^2
/// lies inside a member, and the family is r/2-separated in the (phi, c) grid.
inline TubeSet gen_tube_net(double r) {
    const auto shape = tube_net_shape(r);
    std::vector<Tube> tubes;
    tubes.reserve(shape.directions * shape.offsets);
    const double dphi = kPi / static_cast<double>(shape.directions);
    const double dc = 4.0 / static_cast<double>(shape.offsets);
    for (std::size_t i = 0; i < shape.directions; ++i)
        for (std::size_t j = 0; j < shape.offsets; ++j)
            tubes.push_back({LineNF(static_cast<double>(i) * dphi, -2.0 + (static_cast<double>(j) + 0.5) * dc), 2.0 * r});
    return TubeSet(Scale::at_most(r), std::move(tubes), true);
}

/// Delta-tubes whose (phi/pi, (c+1)/2) parameters form a random (delta, t)-set of the unit square.
inline TubeSet gen_random_tube_family(Scale delta, double t, std::uint64_t seed) {
    const auto params = gen_random_frostman(delta, t, seed);
    std::vector<Tube> tubes;
    tubes.reserve(params.size());
    for (const auto& q : params.points()) tubes.push_back({LineNF(kPi * q.x, 2.0 * q.y - 1.0), delta.value()});
    return TubeSet(delta, std::move(tubes), true);
}

} // namespace dgl
