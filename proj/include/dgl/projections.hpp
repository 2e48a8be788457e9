#pragma once

// Radial projections, direction and spanned-line sets, point-line duality and the
// planar projective flattening (x1, x2) -> (x1, 1) / x2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dgl/detail/grid.hpp"
#include "dgl/detail/parallel.hpp"
#include "dgl/detail/random.hpp"
#include "dgl/geom.hpp"

namespace dgl {

struct DirectionSet {
    Scale delta{1};
    std::vector<double> angles;
    bool oriented = true;  ///< angles in [0, 2pi) if oriented, else [0, pi)
};

namespace detail {

inline double wrap_angle(double a, double period) {
    a = std::fmod(a, period);
    if (a < 0.0) a += period;
    if (a >= period) a = 0.0;
    return a;
}

inline std::size_t count_arcs(std::span<const double> angles, double r) {
    std::vector<std::int64_t> b;
    b.reserve(angles.size());
    for (double a : angles) b.push_back(cell_index(a, r));
    std::sort(b.begin(), b.end());
    return static_cast<std::size_t>(std::unique(b.begin(), b.end()) - b.begin());
}

// Non-throwing core of radial_project; empty when nothing survives the exclusion.
inline std::vector<double> radial_angles(Point2 x, std::span<const Point2> ys, double exclusion) {
    std::vector<double> out;
    out.reserve(ys.size());
    for (const auto& y : ys) {
        const Point2 d = y - x;
        if (norm(d) > exclusion) out.push_back(wrap_angle(std::atan2(d.y, d.x), 2.0 * kPi));
    }
    return out;
}

} // namespace detail

/// Angles of y - x for y in Y with |y - x| > delta/2.
inline DirectionSet radial_project(Point2 x, const PointSet& Y) {
    DirectionSet out{Y.delta(), detail::radial_angles(x, Y.points(), Y.delta().value() / 2.0), true};
    if (out.angles.empty()) throw InvalidArgument("radial projection is empty after self-exclusion");
    return out;
}

/// Occupied arcs [i r, (i+1) r) of the circle.
inline std::size_t projection_covering(Point2 x, const PointSet& Y, double r) {
    detail::require_resolvable(r, Y.delta());
    return detail::count_arcs(radial_project(x, Y).angles, r);
}

struct Viewpoint {
    Point2 x;
    std::size_t index = 0;
    std::size_t covering = 0;
};

/// argmax over x in X of projection_covering(x, Y, r), lowest index on ties.
inline Viewpoint best_viewpoint(const PointSet& X, const PointSet& Y, double r) {
    require(!X.empty() && !Y.empty(), "best viewpoint needs non-empty X and Y");
    detail::require_resolvable(r, Y.delta());
    std::vector<std::size_t> cover(X.size(), 0);
    const double excl = Y.delta().value() / 2.0;
    detail::parallel_for(X.size(), [&](std::size_t i) {
        cover[i] = detail::count_arcs(detail::radial_angles(X[i], Y.points(), excl), r);
    });
    const auto it = std::max_element(cover.begin(), cover.end());
    const auto idx = static_cast<std::size_t>(it - cover.begin());
    return {X[idx], idx, *it};
}

inline constexpr std::uint64_t kPairCap = 20'000'000;

namespace detail {

/// Calls fn(i, j) for all pairs i < j, or for kPairCap seeded uniform pairs beyond the cap.
template <class Fn>
bool for_each_pair(std::size_t n, std::uint64_t seed, Fn&& fn) {
    const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (pairs <= kPairCap) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) fn(i, j);
        return false;
    }
    Rng rng(seed);
    for (std::uint64_t s = 0; s < kPairCap; ++s) {
        auto i = static_cast<std::size_t>(uniform_below(rng, n));
        auto j = static_cast<std::size_t>(uniform_below(rng, n - 1));
        if (j >= i) ++j;
        fn(std::min(i, j), std::max(i, j));
    }
    return true;
}

} // namespace detail

struct DirectionSetResult {
    DirectionSet directions;
    std::size_t covering = 0;
    bool sampled = false;
};

/// Unoriented directions of all pairs, covering at r on [0, pi).
inline DirectionSetResult direction_set(const PointSet& X, double r, std::uint64_t seed = 0) {
    require(X.size() >= 2, "direction set needs at least two points");
    detail::require_resolvable(r, X.delta());
    DirectionSetResult res;
    res.directions = {X.delta(), {}, false};
    res.sampled = detail::for_each_pair(X.size(), seed, [&](std::size_t i, std::size_t j) {
        const Point2 d = X[j] - X[i];
        res.directions.angles.push_back(detail::wrap_angle(std::atan2(d.y, d.x), kPi));
    });
    res.covering = detail::count_arcs(res.directions.angles, r);
    return res;
}

struct SpannedLines {
    std::optional<TubeSet> lines;  ///< distinct spanned lines (within 1e-9), when requested
    std::size_t covering = 0;      ///< occupied (phi, c) cells of side r
    std::uint64_t pairs = 0;
    bool sampled = false;
};

namespace detail {

// Clusters lines whose (phi, c) agree within tol, identifying phi ~ pi with (0, -c).
inline std::vector<LineNF> distinct_lines(std::vector<LineNF> lines, double tol) {
    auto canon = [tol](const LineNF& l) {
        return l.phi() > kPi - tol ? std::pair{l.phi() - kPi, -l.c()} : std::pair{l.phi(), l.c()};
    };
    std::sort(lines.begin(), lines.end(), [&](const LineNF& a, const LineNF& b) { return canon(a) < canon(b); });
    std::vector<LineNF> out;
    std::vector<std::pair<double, double>> reps;
    for (const auto& l : lines) {
        const auto q = canon(l);
        bool seen = false;
        for (auto it = reps.rbegin(); it != reps.rend() && q.first - it->first <= 2 * tol; ++it)
            if (std::fabs(q.second - it->second) <= tol && std::fabs(q.first - it->first) <= tol) {
                seen = true;
                break;
            }
        if (!seen) {
            reps.push_back(q);
            out.push_back(l);
        }
    }
    return out;
}

} // namespace detail

/// Lines through pairs of distinct points, covering in the (phi, c) grid at r.
inline SpannedLines spanned_lines(const PointSet& X, double r, bool keep_lines = true, std::uint64_t seed = 0) {
    require(X.size() >= 2, "spanned lines need at least two points");
    detail::require_resolvable(r, X.delta());
    SpannedLines res;
    std::vector<std::uint64_t> keys;
    std::vector<LineNF> lines;
    res.sampled = detail::for_each_pair(X.size(), seed, [&](std::size_t i, std::size_t j) {
        const LineNF l = LineNF::through(X[i], X[j]);
        keys.push_back(detail::pack(detail::cell_index(l.phi(), r), detail::cell_index(l.c(), r)));
        if (keep_lines) lines.push_back(l);
        ++res.pairs;
    });
    std::sort(keys.begin(), keys.end());
    res.covering = static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
    if (keep_lines) {
        const auto uniq = detail::distinct_lines(std::move(lines), 1e-9);
        res.lines = TubeSet::around(X.delta(), uniq, X.delta().value());
    }
    return res;
}

// ---- point-line duality -------------------------------------------------------------
// D(a, b) = {y = a x + b};  D*({y = c x + d}) = (-c, d);  p in l  <=>  D*(l) in D(p).

template <class T>
struct PointT {
    T x;
    T y;
    friend bool operator==(const PointT&, const PointT&) = default;
};

template <class T>
struct SlopeLine {
    T slope;
    T intercept;
    friend bool operator==(const SlopeLine&, const SlopeLine&) = default;
};

template <class T>
SlopeLine<T> dual_line_of(const PointT<T>& p) {
    return {p.x, p.y};
}

template <class T>
PointT<T> dual_point_of(const SlopeLine<T>& l) {
    return {-l.slope, l.intercept};
}

/// y - (slope x + intercept); zero iff p lies on l.
template <class T>
T vertical_residual(const PointT<T>& p, const SlopeLine<T>& l) {
    return p.y - (l.slope * p.x + l.intercept);
}

template <class T>
bool incident(const PointT<T>& p, const SlopeLine<T>& l) {
    return vertical_residual(p, l) == T(0);
}

inline LineNF to_normal_form(const SlopeLine<double>& l) {
    // a x - y = -b  ->  n = (-a, 1)/|.|, c = b/|.|
    const double s = std::hypot(l.slope, 1.0);
    return LineNF(std::atan2(1.0, -l.slope), l.intercept / s);
}

inline SlopeLine<double> to_slope_form(const LineNF& l) {
    const Point2 n = l.normal();
    if (std::fabs(n.y) < 1e-12) throw Unrepresentable("vertical line has no slope-intercept form");
    return {-n.x / n.y, l.c() / n.y};
}

inline LineNF dualize_point(Point2 p) { return to_normal_form(dual_line_of(PointT<double>{p.x, p.y})); }

inline Point2 dualize_line(const LineNF& l) {
    const auto q = dual_point_of(to_slope_form(l));
    return {q.x, q.y};
}

/// Rotates points about the origin.
inline std::vector<Point2> rotate(std::span<const Point2> pts, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    std::vector<Point2> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back({c * p.x - s * p.y, s * p.x + c * p.y});
    return out;
}

/// p -> scale * p + offset
struct AffineMap {
    double scale = 1.0;
    Point2 offset;
    Point2 operator()(Point2 p) const { return {scale * p.x + offset.x, scale * p.y + offset.y}; }
};

struct FlattenedSet {
    std::vector<Point2> images;  ///< F(p) = (x1/x2, 1/x2)
    AffineMap to_box;            ///< maps images into [-1, 1]^2
    std::vector<Point2> boxed;
};

/// Applies F(x1, x2) = (x1, 1)/x2; every point needs |x2| >= floor_h.
inline FlattenedSet projective_flatten(std::span<const Point2> pts, double floor_h) {
    require(floor_h > 0.0, "projective flattening needs a positive floor h");
    FlattenedSet out;
    double extent = 0.0;
    for (const auto& p : pts) {
        if (!(std::fabs(p.y) >= floor_h)) throw InvalidArgument("projective flattening: |x2| below the floor");
        out.images.push_back({p.x / p.y, 1.0 / p.y});
        extent = std::max({extent, std::fabs(out.images.back().x), std::fabs(out.images.back().y)});
    }
    out.to_box.scale = extent > 1.0 ? 1.0 / extent : 1.0;
    for (const auto& q : out.images) out.boxed.push_back(out.to_box(q));
    return out;
}

inline FlattenedSet projective_flatten(const PointSet& P, double floor_h) { return projective_flatten(P.points(), floor_h); }

/// True if all points lie on one line parallel to dir, within tol.
inline bool collinear_along(std::span<const Point2> pts, Point2 dir, double tol = 1e-9) {
    if (pts.empty()) return true;
    const double len = norm(dir);
    require(len > 0.0, "direction must be non-zero");
    const Point2 n{-dir.y / len, dir.x / len};
    const double c0 = dot(pts[0], n);
    return std::all_of(pts.begin(), pts.end(), [&](Point2 p) { return std::fabs(dot(p, n) - c0) <= tol; });
}

} // namespace dgl
