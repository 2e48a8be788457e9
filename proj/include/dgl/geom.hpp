#pragma once

// Planar primitives: points, dyadic scales, lines in normal form, tubes, and
// the lattice-cell covering numbers the rest of the library is built on.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dgl/detail/grid.hpp"
#include "dgl/errors.hpp"

namespace dgl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kCoordLimit = 2.0;
inline constexpr double kOffsetLimit = 4.0;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

/// Dyadic scale delta = 2^-k.
class Scale {
public:
    explicit Scale(int k) : k_(k) {
        require(k >= 1 && k <= 30, "scale exponent k must lie in [1, 30], got " + std::to_string(k));
    }

    /// Largest dyadic scale not exceeding v.
    static Scale at_most(double v) {
        require(v > 0.0 && v <= 0.5, "scale value must lie in (0, 1/2]");
        int k = static_cast<int>(std::ceil(-std::log2(v) - 1e-12));
        return Scale(std::max(k, 1));
    }

    int k() const { return k_; }
    double value() const { return std::ldexp(1.0, -k_); }

    friend bool operator==(const Scale&, const Scale&) = default;

private:
    int k_;
};

/// Dyadic radii 2^0, 2^-1, ..., delta.
inline std::vector<double> dyadic_radii(Scale delta) {
    std::vector<double> out;
    for (int j = 0; j <= delta.k(); ++j) out.push_back(std::ldexp(1.0, -j));
    return out;
}

/// Line {p : p . n(phi) = c} with phi in [0, pi).
class LineNF {
public:
    LineNF() = default;

    /// Normalizes an arbitrary normal angle into [0, pi), flipping the sign of c as needed.
    LineNF(double phi, double c) {
        require(std::isfinite(phi) && std::isfinite(c), "line parameters must be finite");
        phi = std::fmod(phi, 2.0 * kPi);
        if (phi < 0.0) phi += 2.0 * kPi;
        if (phi >= kPi) {
            phi -= kPi;
            c = -c;
        }
        if (phi >= kPi) phi = 0.0;
        require(std::fabs(c) <= kOffsetLimit, "line offset |c| exceeds 4");
        phi_ = phi;
        c_ = c;
    }

    static LineNF through(Point2 p, Point2 q) {
        const Point2 d = q - p;
        require(d.x != 0.0 || d.y != 0.0, "a line needs two distinct points");
        // normal (-dy, dx)
        double phi = std::atan2(d.x, -d.y);
        if (phi < 0.0) phi += kPi;
        if (phi >= kPi) phi -= kPi;
        const Point2 n{std::cos(phi), std::sin(phi)};
        return LineNF(phi, dot(p, n));
    }

    /// Line through p whose direction makes angle theta with the x-axis.
    static LineNF with_direction(Point2 p, double theta) {
        const double phi0 = theta + kPi / 2.0;
        LineNF tmp(phi0, 0.0);
        const Point2 n = tmp.normal();
        return LineNF(tmp.phi_, dot(p, n));
    }

    double phi() const { return phi_; }
    double c() const { return c_; }
    Point2 normal() const { return {std::cos(phi_), std::sin(phi_)}; }
    Point2 direction() const { return {-std::sin(phi_), std::cos(phi_)}; }

    friend bool operator==(const LineNF&, const LineNF&) = default;

private:
    double phi_ = 0.0;
    double c_ = 0.0;
};

namespace detail {

// Every incidence path evaluates membership through this one expression so that
// indexed and brute-force counts agree bit for bit.
inline double offset_residual(Point2 p, double cs, double sn, double c) {
    return p.x * cs + p.y * sn - c;
}

} // namespace detail

inline double point_line_dist(Point2 p, const LineNF& l) {
    return std::fabs(detail::offset_residual(p, std::cos(l.phi()), std::sin(l.phi()), l.c()));
}

/// min over the antipodal identification of |n1 -+ n2| + |c1 -+ c2|.
inline double line_metric(const LineNF& a, const LineNF& b) {
    const Point2 n1 = a.normal();
    const Point2 n2 = b.normal();
    const double same = norm(n1 - n2) + std::fabs(a.c() - b.c());
    const double flipped = norm(n1 + n2) + std::fabs(a.c() + b.c());
    return std::min(same, flipped);
}

struct Tube {
    LineNF line;
    double w = 0.0;  ///< half-width
};

inline bool tube_contains(const Tube& t, Point2 p) { return point_line_dist(p, t.line) <= t.w; }

struct Box {
    double x0 = -1.0, y0 = -1.0, x1 = 1.0, y1 = 1.0;

    bool contains(Point2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    friend bool operator==(const Box&, const Box&) = default;
};

inline Box bounding_box(std::span<const Point2> pts) {
    if (pts.empty()) return Box{};
    Box b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
    for (const auto& p : pts) {
        b.x0 = std::min(b.x0, p.x);
        b.y0 = std::min(b.y0, p.y);
        b.x1 = std::max(b.x1, p.x);
        b.y1 = std::max(b.y1, p.y);
    }
    return b;
}

/// Smallest pairwise distance, or +inf for fewer than two points. Grid-bucketed at `probe`.
inline double min_separation_below(std::span<const Point2> pts, double probe) {
    std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed;
    keyed.reserve(pts.size());
    for (std::uint32_t i = 0; i < pts.size(); ++i)
        keyed.emplace_back(detail::pack(detail::cell_index(pts[i].x, probe), detail::cell_index(pts[i].y, probe)), i);
    std::sort(keyed.begin(), keyed.end());
    double best = INFINITY;
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
        const auto ix = detail::cell_index(pts[i].x, probe);
        const auto iy = detail::cell_index(pts[i].y, probe);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                const auto key = detail::pack(ix + dx, iy + dy);
                auto it = std::lower_bound(keyed.begin(), keyed.end(), std::make_pair(key, std::uint32_t{0}));
                for (; it != keyed.end() && it->first == key; ++it)
                    if (it->second != i) best = std::min(best, dist(pts[i], pts[it->second]));
            }
        }
    }
    return best;
}

/// A finite delta-separated planar point set.
class PointSet {
public:
    PointSet(Scale delta, std::vector<Point2> points) : PointSet(delta, std::move(points), std::nullopt) {}

    PointSet(Scale delta, std::vector<Point2> points, std::optional<Box> box)
        : delta_(delta), points_(std::move(points)) {
        for (const auto& p : points_)
            require(std::isfinite(p.x) && std::isfinite(p.y) && std::fabs(p.x) <= kCoordLimit &&
                        std::fabs(p.y) <= kCoordLimit,
                    "point outside the coordinate limit |x|,|y| <= 2");
        const double d = delta_.value();
        const double sep = min_separation_below(points_, d);
        require(sep >= d * (1.0 - 1e-9), "point set is not delta-separated at delta = 2^-" + std::to_string(delta_.k()));
        box_ = box ? *box : (points_.empty() ? Box{} : bounding_box(points_));
        for (const auto& p : points_) require(box_.contains(p), "point outside the declared box");
    }

    Scale delta() const { return delta_; }
    std::span<const Point2> points() const { return points_; }
    const std::vector<Point2>& vec() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const Box& box() const { return box_; }
    const Point2& operator[](std::size_t i) const { return points_[i]; }

private:
    Scale delta_;
    std::vector<Point2> points_;
    Box box_;
};

/// A family of tubes sharing one half-width.
class TubeSet {
public:
    TubeSet(Scale delta, std::vector<Tube> tubes, bool separated = false)
        : delta_(delta), tubes_(std::move(tubes)), separated_(separated) {
        width_ = tubes_.empty() ? delta_.value() : tubes_.front().w;
        for (const auto& t : tubes_) {
            require(t.w > 0.0 && t.w <= 1.0, "tube half-width must lie in (0, 1]");
            require(t.w == width_, "tubes in a TubeSet must share one width");
        }
    }

    /// All tubes of half-width w around the given lines.
    static TubeSet around(Scale delta, std::span<const LineNF> lines, double w, bool separated = false) {
        std::vector<Tube> tubes;
        tubes.reserve(lines.size());
        for (const auto& l : lines) tubes.push_back({l, w});
        TubeSet out(delta, std::move(tubes), separated);
        out.width_ = w;
        return out;
    }

    Scale delta() const { return delta_; }
    double width() const { return width_; }
    bool separated() const { return separated_; }
    std::span<const Tube> tubes() const { return tubes_; }
    const std::vector<Tube>& vec() const { return tubes_; }
    std::size_t size() const { return tubes_.size(); }
    bool empty() const { return tubes_.empty(); }
    const Tube& operator[](std::size_t i) const { return tubes_[i]; }

    /// (phi, c) coordinates of the axial lines.
    std::vector<Point2> parameters() const {
        std::vector<Point2> out;
        out.reserve(tubes_.size());
        for (const auto& t : tubes_) out.push_back({t.line.phi(), t.line.c()});
        return out;
    }

private:
    Scale delta_;
    std::vector<Tube> tubes_;
    double width_ = 0.0;
    bool separated_ = false;
};

namespace detail {

inline std::size_t count_cells(std::span<const Point2> pts, double r) {
    std::vector<std::uint64_t> keys;
    keys.reserve(pts.size());
    for (const auto& p : pts) keys.push_back(pack(cell_index(p.x, r), cell_index(p.y, r)));
    std::sort(keys.begin(), keys.end());
    return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

inline void require_resolvable(double r, Scale delta) {
    require(std::isfinite(r) && r >= delta.value() * (1.0 - 1e-12),
            "covering radius is below the data scale delta");
}

} // namespace detail

/// Number of half-open cells of r*Z^2 containing a point. Within a factor 9 of the ball covering number.
inline std::size_t covering_number(const PointSet& P, double r) {
    detail::require_resolvable(r, P.delta());
    return detail::count_cells(P.points(), r);
}

/// Occupied cells of side r in the (phi, c) parameter plane of the axial lines.
inline std::size_t tube_covering_number(const TubeSet& T, double r) {
    detail::require_resolvable(r, T.delta());
    return detail::count_cells(T.parameters(), r);
}

/// True if every point lies within tol of one common line (also for fewer than 3 points).
inline bool collinear(std::span<const Point2> pts, double tol = 1e-9) {
    if (pts.size() < 3) return true;
    const Point2 a = pts[0];
    std::size_t far = 0;
    double best = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double d = dist(a, pts[i]);
        if (d > best) {
            best = d;
            far = i;
        }
    }
    if (best == 0.0) return true;
    const LineNF l = LineNF::through(a, pts[far]);
    return std::all_of(pts.begin(), pts.end(), [&](Point2 p) { return point_line_dist(p, l) <= tol; });
}

} // namespace dgl
