#pragma once

// Non-concentration certificates and box-dimension fits.
//
// A "ball" of radius ~r is realized as a half-open square of side r on one of the
// four lattices r*Z^2 + {0, r/2}^2. Every Euclidean ball of radius r/4 lies in one
// of them and every square lies in the ball of radius r/sqrt(2) about its centre,
// so the certified constants match the ball definitions up to fixed factors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dgl/geom.hpp"

namespace dgl {

enum class MassKind {
    Covering,     ///< |A cap B|_delta / (r^s |A|_delta)
    Cardinality,  ///< |A cap B| / (r/delta)^s
};

/// Identifies one tested square: side r, lattice shift, integer cell.
struct CellRef {
    double r = 1.0;
    Point2 shift;
    std::int64_t ix = 0;
    std::int64_t iy = 0;

    Point2 center() const { return {(static_cast<double>(ix) + 0.5) * r + shift.x, (static_cast<double>(iy) + 0.5) * r + shift.y}; }
};

struct ProfileEntry {
    int k_r = 0;  ///< r = 2^-k_r
    double r = 1.0;
    double C = 0.0;
    Point2 witness;
    CellRef cell;
    double mass = 0.0;
};

struct ConcentrationProfile {
    double s = 0.0;
    MassKind kind = MassKind::Covering;
    bool parameter_space = false;
    std::vector<ProfileEntry> entries;
    double C_star = 0.0;
    std::size_t argmax = 0;

    /// Smallest eps with C_star <= delta^-eps (0 when C_star <= 1).
    double epsilon(Scale delta) const {
        return C_star <= 1.0 ? 0.0 : std::log2(C_star) / static_cast<double>(delta.k());
    }
};

namespace detail {

// Parameter-space coordinates (phi, c) live on a cylinder of period pi with the
// sign flip c -> -c; a shifted square hanging below phi = 0 wraps to phi + pi.
inline Point2 lattice_coords(Point2 q, double shift_x, bool wrap_phi) {
    if (wrap_phi && q.x - shift_x < 0.0) return {q.x + kPi, -q.y};
    return q;
}

inline double mass_denominator(MassKind kind, double r, double s, double delta, double total) {
    return kind == MassKind::Covering ? std::pow(r, s) * total : std::pow(r / delta, s);
}

inline ConcentrationProfile cell_profile(std::span<const Point2> coords, Scale delta, double s, MassKind kind,
                                         bool wrap_phi) {
    require(!coords.empty(), "concentration profile of an empty set");
    require(std::isfinite(s) && s >= 0.0, "exponent s must be finite and non-negative");
    const double d = delta.value();
    const double total = static_cast<double>(count_cells(coords, d));

    std::vector<std::uint64_t> dkeys(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i)
        dkeys[i] = pack(cell_index(coords[i].x, d), cell_index(coords[i].y, d));

    ConcentrationProfile prof;
    prof.s = s;
    prof.kind = kind;
    prof.parameter_space = wrap_phi;

    std::vector<std::pair<std::uint64_t, std::uint64_t>> keyed(coords.size());
    for (int j = 0; j <= delta.k(); ++j) {
        const double r = std::ldexp(1.0, -j);
        ProfileEntry best;
        best.k_r = j;
        best.r = r;
        for (int sh = 0; sh < 4; ++sh) {
            const Point2 shift{(sh & 1) ? r / 2 : 0.0, (sh & 2) ? r / 2 : 0.0};
            for (std::size_t i = 0; i < coords.size(); ++i) {
                const Point2 q = lattice_coords(coords[i], shift.x, wrap_phi);
                keyed[i] = {pack(cell_index(q.x - shift.x, r), cell_index(q.y - shift.y, r)), dkeys[i]};
            }
            std::sort(keyed.begin(), keyed.end());
            for (std::size_t a = 0; a < keyed.size();) {
                std::size_t b = a;
                double mass = 0.0;
                while (b < keyed.size() && keyed[b].first == keyed[a].first) {
                    if (kind == MassKind::Cardinality || b == a || keyed[b].second != keyed[b - 1].second) mass += 1.0;
                    ++b;
                }
                const double C = mass / mass_denominator(kind, r, s, d, total);
                if (C > best.C) {
                    const auto [ix, iy] = unpack(keyed[a].first);
                    best.C = C;
                    best.mass = mass;
                    best.cell = CellRef{r, shift, ix, iy};
                    best.witness = best.cell.center();
                }
                a = b;
            }
        }
        prof.entries.push_back(best);
        if (best.C > prof.C_star) {
            prof.C_star = best.C;
            prof.argmax = prof.entries.size() - 1;
        }
    }
    return prof;
}

} // namespace detail

/// (delta, s, C) certificate: the set is a (delta, s, C)-set for every C >= C_star.
inline ConcentrationProfile concentration_profile(const PointSet& P, double s) {
    return detail::cell_profile(P.points(), P.delta(), s, MassKind::Covering, false);
}

/// Katz-Tao certificate: |P cap B| <= C (r/delta)^s on every tested square.
inline ConcentrationProfile katz_tao_profile(const PointSet& P, double s) {
    return detail::cell_profile(P.points(), P.delta(), s, MassKind::Cardinality, false);
}

inline ConcentrationProfile tube_concentration_profile(const TubeSet& T, double s) {
    const auto params = T.parameters();
    return detail::cell_profile(params, T.delta(), s, MassKind::Covering, true);
}

inline ConcentrationProfile tube_katz_tao_profile(const TubeSet& T, double s) {
    const auto params = T.parameters();
    return detail::cell_profile(params, T.delta(), s, MassKind::Cardinality, true);
}

/// Recomputes the mass of one tested square from scratch.
inline double cell_mass(std::span<const Point2> coords, Scale delta, const CellRef& cell, MassKind kind,
                        bool wrap_phi = false) {
    std::vector<std::uint64_t> inside;
    const double d = delta.value();
    for (const auto& p : coords) {
        const Point2 q = detail::lattice_coords(p, cell.shift.x, wrap_phi);
        if (detail::cell_index(q.x - cell.shift.x, cell.r) == cell.ix &&
            detail::cell_index(q.y - cell.shift.y, cell.r) == cell.iy)
            inside.push_back(detail::pack(detail::cell_index(p.x, d), detail::cell_index(p.y, d)));
    }
    if (kind == MassKind::Cardinality) return static_cast<double>(inside.size());
    std::sort(inside.begin(), inside.end());
    return static_cast<double>(std::unique(inside.begin(), inside.end()) - inside.begin());
}

struct ScaleCount {
    int k = 0;
    double count = 0.0;
};

struct ExponentFit {
    std::vector<std::pair<int, double>> samples;  ///< (k, log2 N)
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};

/// Least-squares line through (k, log2 N); the slope is the empirical exponent in N ~ delta^-slope.
inline ExponentFit fit_exponent(std::span<const ScaleCount> samples) {
    require(samples.size() >= 3, "exponent fit needs at least 3 samples");
    ExponentFit fit;
    double mk = 0.0, my = 0.0;
    for (const auto& s : samples) {
        require(s.count >= 1.0 && std::isfinite(s.count), "exponent fit needs counts >= 1");
        fit.samples.emplace_back(s.k, std::log2(s.count));
        mk += s.k;
        my += fit.samples.back().second;
    }
    const double n = static_cast<double>(samples.size());
    mk /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [k, y] : fit.samples) {
        sxx += (k - mk) * (k - mk);
        sxy += (k - mk) * (y - my);
    }
    require(sxx > 0.0, "degenerate exponent fit: all scales equal");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mk;
    for (const auto& [k, y] : fit.samples)
        fit.max_residual = std::max(fit.max_residual, std::fabs(y - (fit.intercept + fit.slope * k)));
    return fit;
}

inline ExponentFit fit_exponent(const std::vector<ScaleCount>& samples) {
    return fit_exponent(std::span<const ScaleCount>(samples));
}

} // namespace dgl
