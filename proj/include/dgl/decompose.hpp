#pragma once

// Splitting a (delta, t, C)-set into Katz-Tao (delta, t, 1)-sets: group the points of
// every cover ball into chunks of size H, join each chunk into a clique, and colour
// the resulting conflict graph. Colour classes are the parts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dgl/geom.hpp"
#include "dgl/regularity.hpp"

namespace dgl {

/// Centres (r/2)Z^2 inside a box with balls B(x, r). Each ball contains the square of
/// side r about its centre; those squares are exactly the cells the profiles test.
struct BallCover {
    double r = 1.0;
    std::vector<Point2> centers;

    bool ball_contains(std::size_t i, Point2 p) const { return dist(centers[i], p) <= r; }
};

inline BallCover build_ball_cover(double r, const Box& box = Box{}) {
    require(r > 0.0 && r <= 2.0, "ball cover radius must lie in (0, 2]");
    BallCover cover{r, {}};
    const double step = r / 2.0;
    const auto i0 = static_cast<std::int64_t>(std::ceil(box.x0 / step - detail::kCellSnap));
    const auto i1 = static_cast<std::int64_t>(std::floor(box.x1 / step + detail::kCellSnap));
    const auto j0 = static_cast<std::int64_t>(std::ceil(box.y0 / step - detail::kCellSnap));
    const auto j1 = static_cast<std::int64_t>(std::floor(box.y1 / step + detail::kCellSnap));
    for (auto i = i0; i <= i1; ++i)
        for (auto j = j0; j <= j1; ++j) cover.centers.push_back({static_cast<double>(i) * step, static_cast<double>(j) * step});
    return cover;
}

/// One (scale, cover ball) pair visited while grouping.
struct BallGroupRecord {
    int k_r = 0;
    CellRef cell;
    std::size_t count = 0;  ///< |P cap B|
    std::size_t groups = 0; ///< m(B) = ceil(|P cap B| / H)
};

struct DecompositionCore {
    double H_exact = 0.0;
    std::size_t H = 0;
    double C = 0.0;
    double t = 0.0;
    std::vector<std::vector<std::uint32_t>> part_indices;
    std::size_t max_degree = 0;
    std::size_t edge_count = 0;
    std::vector<BallGroupRecord> records;
};

inline double decomposition_threshold(double t, double C, std::size_t n, Scale delta) {
    return std::pow(4.0, t + 1.0) * C * static_cast<double>(n) * std::pow(delta.value(), t);
}

namespace detail {

inline constexpr double kCliqueBudget = 1e8;

inline DecompositionCore katz_tao_decompose_coords(std::span<const Point2> coords, Scale delta, double t, double C,
                                                   bool wrap_phi) {
    require(!coords.empty(), "cannot decompose an empty set");
    require(t > 0.0 && C > 0.0, "decomposition needs t > 0 and C > 0");
    DecompositionCore out;
    out.t = t;
    out.C = C;
    out.H_exact = decomposition_threshold(t, C, coords.size(), delta);
    if (out.H_exact < 1.0)
        throw InvalidArgument("decomposition threshold H = " + std::to_string(out.H_exact) +
                              " < 1: the set is too sparse for the declared (t, C)");
    out.H = static_cast<std::size_t>(std::ceil(out.H_exact - 1e-12));

    const std::size_t n = coords.size();
    const double volume = static_cast<double>(n) * static_cast<double>(std::min(out.H, n)) * 4.0 * (delta.k() + 1);
    if (volume > kCliqueBudget)
        throw SizingError("decomposition conflict graph would hold up to " + std::to_string(volume) +
                          " adjacency entries (budget " + std::to_string(kCliqueBudget) + ")");
    std::vector<std::vector<std::uint32_t>> adj(n);
    std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(n);
    for (int j = 0; j <= delta.k(); ++j) {
        const double r = std::ldexp(1.0, -j);
        for (int sh = 0; sh < 4; ++sh) {
            const Point2 shift{(sh & 1) ? r / 2 : 0.0, (sh & 2) ? r / 2 : 0.0};
            for (std::uint32_t i = 0; i < n; ++i) {
                const Point2 q = lattice_coords(coords[i], shift.x, wrap_phi);
                keyed[i] = {pack(cell_index(q.x - shift.x, r), cell_index(q.y - shift.y, r)), i};
            }
            std::sort(keyed.begin(), keyed.end());
            for (std::size_t a = 0; a < n;) {
                std::size_t b = a;
                while (b < n && keyed[b].first == keyed[a].first) ++b;
                const std::size_t count = b - a;
                const auto [ix, iy] = unpack(keyed[a].first);
                out.records.push_back({j, CellRef{r, shift, ix, iy}, count, (count + out.H - 1) / out.H});
                for (std::size_t g = a; g < b; g += out.H) {
                    const std::size_t e = std::min(b, g + out.H);
                    for (std::size_t u = g; u < e; ++u)
                        for (std::size_t v = g; v < e; ++v)
                            if (u != v) adj[keyed[u].second].push_back(keyed[v].second);
                }
                a = b;
            }
        }
    }
    for (auto& nb : adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        out.max_degree = std::max(out.max_degree, nb.size());
        out.edge_count += nb.size();
    }
    out.edge_count /= 2;

    // Greedy colouring, descending degree, ties by index.
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return adj[a].size() > adj[b].size(); });
    constexpr std::uint32_t kUncoloured = ~0u;
    std::vector<std::uint32_t> colour(n, kUncoloured);
    std::vector<std::uint32_t> seen_at(out.max_degree + 2, kUncoloured);
    std::uint32_t colours = 0;
    for (auto v : order) {
        for (auto u : adj[v])
            if (colour[u] != kUncoloured && colour[u] < seen_at.size()) seen_at[colour[u]] = v;
        std::uint32_t c = 0;
        while (seen_at[c] == v) ++c;
        colour[v] = c;
        colours = std::max(colours, c + 1);
    }
    out.part_indices.assign(colours, {});
    for (std::uint32_t i = 0; i < n; ++i) out.part_indices[colour[i]].push_back(i);
    return out;
}

} // namespace detail

struct Decomposition {
    std::vector<PointSet> parts;
    DecompositionCore core;
    std::vector<double> part_katz_tao;  ///< katz_tao_profile(part, t).C_star

    std::size_t N() const { return parts.size(); }
    std::size_t H() const { return core.H; }
};

/// Splits P into colour classes of the group conflict graph, H = 4^{t+1} C |P| delta^t.
inline Decomposition katz_tao_decompose(const PointSet& P, double t, double C) {
    Decomposition D{{}, detail::katz_tao_decompose_coords(P.points(), P.delta(), t, C, false), {}};
    for (const auto& idx : D.core.part_indices) {
        std::vector<Point2> pts;
        pts.reserve(idx.size());
        for (auto i : idx) pts.push_back(P[i]);
        D.parts.emplace_back(P.delta(), std::move(pts));
        D.part_katz_tao.push_back(katz_tao_profile(D.parts.back(), t).C_star);
    }
    return D;
}

struct TubeDecomposition {
    std::vector<TubeSet> parts;
    DecompositionCore core;
    std::vector<double> part_katz_tao;

    std::size_t N() const { return parts.size(); }
};

/// The same construction on the (phi, c) coordinates of the axial lines.
inline TubeDecomposition katz_tao_decompose(const TubeSet& T, double t, double C) {
    const auto params = T.parameters();
    TubeDecomposition D{{}, detail::katz_tao_decompose_coords(params, T.delta(), t, C, true), {}};
    for (const auto& idx : D.core.part_indices) {
        std::vector<Tube> tubes;
        for (auto i : idx) tubes.push_back(T[i]);
        D.parts.emplace_back(T.delta(), std::move(tubes), T.separated());
        D.part_katz_tao.push_back(tube_katz_tao_profile(D.parts.back(), t).C_star);
    }
    return D;
}

struct DecompositionReport {
    bool disjoint = true;
    bool exhaustive = true;
    bool katz_tao = true;
    bool count_bound = true;
    double c0 = 1.0;
    double count_ceiling = 0.0;  ///< C |P| delta^{t - eps}
    std::size_t N = 0;
    std::vector<std::string> failures;

    bool pass() const { return disjoint && exhaustive && katz_tao && count_bound; }
};

/// Checks a decomposition of P: disjoint, exhaustive, every part Katz-Tao with constant
/// c0 = 4^t, and N <= C |P| delta^{t - eps}. Never throws on failed checks.
inline DecompositionReport verify_decomposition(const Decomposition& D, const PointSet& P, double t, double eps) {
    DecompositionReport rep;
    rep.c0 = std::pow(4.0, t);
    rep.N = D.parts.size();

    auto key = [](Point2 p) { return std::pair{p.x, p.y}; };
    std::vector<std::pair<double, double>> all, want;
    for (const auto& part : D.parts)
        for (const auto& p : part.points()) all.push_back(key(p));
    for (const auto& p : P.points()) want.push_back(key(p));
    std::sort(all.begin(), all.end());
    std::sort(want.begin(), want.end());
    if (auto it = std::adjacent_find(all.begin(), all.end()); it != all.end()) {
        rep.disjoint = false;
        rep.failures.push_back("point (" + std::to_string(it->first) + ", " + std::to_string(it->second) +
                               ") appears in more than one part");
    }
    std::vector<std::pair<double, double>> uniq = all;
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    if (uniq != want) {
        rep.exhaustive = false;
        rep.failures.push_back("union of parts (" + std::to_string(uniq.size()) + " points) differs from P (" +
                               std::to_string(want.size()) + " points)");
    }
    for (std::size_t j = 0; j < D.parts.size(); ++j) {
        if (D.parts[j].empty()) continue;
        const auto prof = katz_tao_profile(D.parts[j], t);
        if (prof.C_star > rep.c0 * (1.0 + 1e-12)) {
            rep.katz_tao = false;
            const auto& e = prof.entries[prof.argmax];
            rep.failures.push_back("part " + std::to_string(j) + ": Katz-Tao constant " + std::to_string(prof.C_star) +
                                   " > " + std::to_string(rep.c0) + " at r = 2^-" + std::to_string(e.k_r) +
                                   ", witness (" + std::to_string(e.witness.x) + ", " + std::to_string(e.witness.y) + ")");
        }
    }
    rep.count_ceiling = D.core.C * static_cast<double>(P.size()) * std::pow(P.delta().value(), t - eps);
    if (static_cast<double>(rep.N) > rep.count_ceiling) {
        rep.count_bound = false;
        rep.failures.push_back("N = " + std::to_string(rep.N) + " exceeds C|P|delta^{t-eps} = " +
                               std::to_string(rep.count_ceiling));
    }
    return rep;
}

} // namespace dgl
