#pragma once

// Point-tube incidence counting: a brute-force oracle, a grid-indexed engine with the
// same per-pair predicate, the incidence ceiling, heavy tubes and the two-ends diagnostic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dgl/detail/grid.hpp"
#include "dgl/detail/parallel.hpp"
#include "dgl/geom.hpp"
#include "dgl/regularity.hpp"

namespace dgl {

struct FuRenBound {
    double s = 0.0;
    double t = 0.0;
    double kappa = 0.0;
    double eps = 0.0;
    double ceiling = 0.0;  ///< |P||T| delta^{kappa(s+t-1) - 5 eps}
    double margin = 0.0;   ///< log2(ceiling / total); +inf when total = 0
    bool violation = false;
    double C_points = 0.0;
    double C_tubes = 0.0;
};

struct IncidenceReport {
    std::uint64_t total = 0;
    std::vector<std::uint32_t> per_tube;
    bool oracle = false;
    std::optional<FuRenBound> fu_ren;

    friend bool operator==(const IncidenceReport& a, const IncidenceReport& b) {
        return a.total == b.total && a.per_tube == b.per_tube;
    }
};

namespace detail {

struct TubeKernel {
    double cs, sn, c, w;
    explicit TubeKernel(const Tube& t) : cs(std::cos(t.line.phi())), sn(std::sin(t.line.phi())), c(t.line.c()), w(t.w) {}
    bool contains(Point2 p) const { return std::fabs(offset_residual(p, cs, sn, c)) <= w; }
};

} // namespace detail

/// Tests all |P| |T| pairs.
inline IncidenceReport count_bruteforce(std::span<const Point2> pts, std::span<const Tube> tubes) {
    IncidenceReport rep;
    rep.oracle = true;
    rep.per_tube.assign(tubes.size(), 0);
    for (std::size_t j = 0; j < tubes.size(); ++j) {
        const detail::TubeKernel k(tubes[j]);
        std::uint32_t n = 0;
        for (const auto& p : pts) n += k.contains(p) ? 1u : 0u;
        rep.per_tube[j] = n;
        rep.total += n;
    }
    return rep;
}

inline IncidenceReport count_bruteforce(const PointSet& P, const TubeSet& T) {
    return count_bruteforce(P.points(), T.tubes());
}

/// Uniform cell grid over the bounding box of a point cloud, CSR layout.
class PointGrid {
public:
    PointGrid(std::span<const Point2> pts, double side) : pts_(pts) {
        const Box b = bounding_box(pts);
        x0_ = b.x0;
        y0_ = b.y0;
        h_ = side;
        // Coarsen rather than allocate far more cells than points.
        auto dims = [&] {
            nx_ = static_cast<std::int64_t>(std::floor((b.x1 - b.x0) / h_)) + 1;
            ny_ = static_cast<std::int64_t>(std::floor((b.y1 - b.y0) / h_)) + 1;
        };
        dims();
        while (static_cast<double>(nx_) * static_cast<double>(ny_) > 4.0 * static_cast<double>(pts.size()) + 1e6) {
            h_ *= 2.0;
            dims();
        }
        start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
        std::vector<std::uint32_t> cell_of(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            cell_of[i] = static_cast<std::uint32_t>(cell(col(pts[i].x), row(pts[i].y)));
            ++start_[cell_of[i] + 1];
        }
        std::partial_sum(start_.begin(), start_.end(), start_.begin());
        order_.resize(pts.size());
        std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
        for (std::uint32_t i = 0; i < pts.size(); ++i) order_[fill[cell_of[i]]++] = i;
    }

    double side() const { return h_; }
    std::int64_t columns() const { return nx_; }
    std::int64_t rows() const { return ny_; }

    /// Counts points of the tube by visiting a superset of the cells it meets.
    std::uint32_t count_tube(const detail::TubeKernel& k) const {
        if (pts_.empty()) return 0;
        std::uint32_t n = 0;
        const bool x_major = std::fabs(k.sn) >= std::fabs(k.cs);
        const std::int64_t major = x_major ? nx_ : ny_;
        const std::int64_t minor = x_major ? ny_ : nx_;
        const double a = x_major ? k.cs : k.sn;  // coefficient of the major coordinate
        const double b = x_major ? k.sn : k.cs;  // coefficient of the minor coordinate, |b| >= 1/sqrt2
        const double m0 = x_major ? x0_ : y0_;
        const double n0 = x_major ? y0_ : x0_;
        for (std::int64_t i = 0; i < major; ++i) {
            const double ua = m0 + static_cast<double>(i) * h_;
            const double ub = ua + h_;
            const double v1 = (k.c - k.w - ua * a) / b, v2 = (k.c + k.w - ua * a) / b;
            const double v3 = (k.c - k.w - ub * a) / b, v4 = (k.c + k.w - ub * a) / b;
            double lo = std::min({v1, v2, v3, v4}), hi = std::max({v1, v2, v3, v4});
            const double pad = 1e-9 * (1.0 + std::fabs(lo) + std::fabs(hi));
            auto ja = static_cast<std::int64_t>(std::floor((lo - pad - n0) / h_));
            auto jb = static_cast<std::int64_t>(std::floor((hi + pad - n0) / h_));
            if (jb < 0 || ja >= minor) continue;
            ja = std::max<std::int64_t>(ja, 0);
            jb = std::min<std::int64_t>(jb, minor - 1);
            for (std::int64_t j = ja; j <= jb; ++j) {
                const auto id = x_major ? cell(i, j) : cell(j, i);
                for (auto q = start_[id]; q < start_[id + 1]; ++q) n += k.contains(pts_[order_[q]]) ? 1u : 0u;
            }
        }
        return n;
    }

private:
    std::int64_t col(double x) const { return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((x - x0_) / h_)), 0, nx_ - 1); }
    std::int64_t row(double y) const { return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((y - y0_) / h_)), 0, ny_ - 1); }
    std::size_t cell(std::int64_t i, std::int64_t j) const { return static_cast<std::size_t>(j * nx_ + i); }

    std::span<const Point2> pts_;
    double x0_ = 0.0, y0_ = 0.0, h_ = 1.0;
    std::int64_t nx_ = 1, ny_ = 1;
    std::vector<std::uint32_t> start_;
    std::vector<std::uint32_t> order_;
};

inline constexpr double kDefaultWorkBudget = 1e8;

/// Same report as count_bruteforce, exactly. Cells have side max(delta, w).
/// Throws SizingError when the estimated cell visits exceed `budget`.
inline IncidenceReport count_indexed(std::span<const Point2> pts, std::span<const Tube> tubes, double delta,
                                     double budget = std::numeric_limits<double>::infinity()) {
    IncidenceReport rep;
    rep.per_tube.assign(tubes.size(), 0);
    if (pts.empty() || tubes.empty()) return rep;
    double w = 0.0;
    for (const auto& t : tubes) w = std::max(w, t.w);
    const PointGrid grid(pts, std::max(delta, w));
    const double work = static_cast<double>(tubes.size()) * static_cast<double>(std::max(grid.columns(), grid.rows())) +
                        static_cast<double>(pts.size());
    if (work > budget)
        throw SizingError("incidence count needs ~" + std::to_string(static_cast<long long>(work)) +
                          " cell visits (budget " + std::to_string(static_cast<long long>(budget)) +
                          "); reduce the scale range or the tube count");
    detail::parallel_for(tubes.size(), [&](std::size_t j) { rep.per_tube[j] = grid.count_tube(detail::TubeKernel(tubes[j])); });
    for (auto c : rep.per_tube) rep.total += c;
    return rep;
}

inline IncidenceReport count_indexed(const PointSet& P, const TubeSet& T,
                                     double budget = std::numeric_limits<double>::infinity()) {
    return count_indexed(P.points(), T.tubes(), P.delta().value(), budget);
}

/// min{1/2, 1/(s + t - 1)}; the bound is vacuous for s + t <= 1.
inline double fu_ren_kappa(double s, double t) {
    require(s >= 0.0 && s <= 2.0 && t >= 0.0 && t <= 2.0, "incidence exponents must lie in [0, 2]");
    if (s + t <= 1.0) throw InvalidArgument("incidence ceiling undefined for s + t <= 1");
    return std::min(0.5, 1.0 / (s + t - 1.0));
}

/// Counts incidences and compares them with |P||T| delta^{kappa(s+t-1) - 5 eps}, eps = max(epsP, epsT).
/// Throws CertificationError if P is not a (delta, s, delta^-epsP)-set or T not a (delta, t, delta^-epsT)-set.
inline IncidenceReport fu_ren_check(const PointSet& P, const TubeSet& T, double s, double t, double epsP, double epsT,
                                    double budget = std::numeric_limits<double>::infinity()) {
    FuRenBound fr;
    fr.s = s;
    fr.t = t;
    fr.kappa = fu_ren_kappa(s, t);
    fr.eps = std::max(epsP, epsT);
    const Scale delta = P.delta();
    const double dv = delta.value();
    if (!P.empty()) {
        fr.C_points = concentration_profile(P, s).C_star;
        if (fr.C_points > std::pow(dv, -epsP) * (1.0 + 1e-12))
            throw CertificationError("point set is not a (delta, s, delta^-epsP)-set: C_star = " + std::to_string(fr.C_points) +
                                     " > " + std::to_string(std::pow(dv, -epsP)));
    }
    if (!T.empty()) {
        fr.C_tubes = tube_concentration_profile(T, t).C_star;
        if (fr.C_tubes > std::pow(T.delta().value(), -epsT) * (1.0 + 1e-12))
            throw CertificationError("tube set is not a (delta, t, delta^-epsT)-set: C_star = " + std::to_string(fr.C_tubes) +
                                     " > " + std::to_string(std::pow(T.delta().value(), -epsT)));
    }
    IncidenceReport rep = count_indexed(P, T, budget);
    fr.ceiling = static_cast<double>(P.size()) * static_cast<double>(T.size()) *
                 std::pow(dv, fr.kappa * (s + t - 1.0) - 5.0 * fr.eps);
    fr.violation = static_cast<double>(rep.total) > fr.ceiling;
    fr.margin = rep.total == 0 ? std::numeric_limits<double>::infinity()
                               : std::log2(fr.ceiling / static_cast<double>(rep.total));
    rep.fu_ren = fr;
    return rep;
}

/// Threshold delta^{sigma+eps} |P|, nudged down by a relative 1e-12 so exact powers are inclusive.
inline double heavy_threshold(std::size_t n_points, Scale delta, double sigma, double eps) {
    return std::pow(delta.value(), sigma + eps) * static_cast<double>(n_points) * (1.0 - 1e-12);
}

/// Tubes T with |T cap P| >= delta^{sigma+eps} |P|.
inline TubeSet heavy_tubes(const PointSet& P, const TubeSet& T, double sigma, double eps) {
    const auto rep = count_indexed(P, T);
    const double thr = heavy_threshold(P.size(), P.delta(), sigma, eps);
    std::vector<Tube> out;
    for (std::size_t j = 0; j < T.size(); ++j)
        if (static_cast<double>(rep.per_tube[j]) >= thr) out.push_back(T[j]);
    return TubeSet(T.delta(), std::move(out), T.separated());
}

struct TwoEndsResult {
    bool concentrated = false;
    Point2 center;
    double radius = 0.0;
    std::size_t count = 0;      ///< points in the best ball
    std::size_t threshold = 0;  ///< ceil(n / 3)
};

/// Searches balls B(x, rho) with x on the lattice (rho/2)Z^2; every ball of radius rho/2
/// lies in one of them. Concentrated iff one holds at least ceil(n/3) of the points.
inline TwoEndsResult two_ends_test(std::span<const Point2> pts, double rho) {
    require(!pts.empty(), "two-ends test needs points");
    require(rho > 0.0 && std::isfinite(rho), "two-ends radius must be positive");
    const double step = rho / 2.0;
    std::vector<std::uint64_t> hits;
    for (const auto& p : pts) {
        const auto i0 = static_cast<std::int64_t>(std::floor((p.x - rho) / step));
        const auto i1 = static_cast<std::int64_t>(std::ceil((p.x + rho) / step));
        const auto j0 = static_cast<std::int64_t>(std::floor((p.y - rho) / step));
        const auto j1 = static_cast<std::int64_t>(std::ceil((p.y + rho) / step));
        for (auto i = i0; i <= i1; ++i)
            for (auto j = j0; j <= j1; ++j)
                if (dist(p, {static_cast<double>(i) * step, static_cast<double>(j) * step}) <= rho) hits.push_back(detail::pack(i, j));
    }
    std::sort(hits.begin(), hits.end());
    TwoEndsResult res;
    res.radius = rho;
    res.threshold = (pts.size() + 2) / 3;
    for (std::size_t a = 0; a < hits.size();) {
        std::size_t b = a;
        while (b < hits.size() && hits[b] == hits[a]) ++b;
        if (b - a > res.count) {
            res.count = b - a;
            const auto [i, j] = detail::unpack(hits[a]);
            res.center = {static_cast<double>(i) * step, static_cast<double>(j) * step};
        }
        a = b;
    }
    res.concentrated = res.count >= res.threshold;
    return res;
}

inline TwoEndsResult two_ends_test(const PointSet& P, double rho) { return two_ends_test(P.points(), rho); }

} // namespace dgl
