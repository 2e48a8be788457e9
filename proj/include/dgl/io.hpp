#pragma once

// CSV/JSON persistence. Reals are written with 17 significant digits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgl/geom.hpp"
#include "dgl/regularity.hpp"

namespace dgl::io {

using nlohmann::json;

inline std::string real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    auto p = csv;
    p.replace_extension(".json");
    return p;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

inline std::vector<std::vector<double>> parse_csv(const std::string& text, const std::vector<std::string>& header,
                                                  const std::string& what) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument(what + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string want;
    for (std::size_t i = 0; i < header.size(); ++i) want += (i ? "," : "") + header[i];
    if (line != want) throw InvalidArgument(what + ": expected header '" + want + "', got '" + line + "'");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw InvalidArgument(what + ": malformed number '" + cell + "'");
            }
        }
        if (row.size() != header.size()) throw InvalidArgument(what + ": wrong column count in '" + line + "'");
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

/// Writes `path` (x,y) and its sidecar {"k", "box"}.
inline void write_points(const std::filesystem::path& path, const PointSet& P) {
    std::string csv = "x,y\n";
    for (const auto& p : P.points()) csv += real(p.x) + "," + real(p.y) + "\n";
    write_text(path, csv);
    const auto& b = P.box();
    json side = {{"k", P.delta().k()}, {"box", {b.x0, b.y0, b.x1, b.y1}}};
    write_text(sidecar_path(path), side.dump(2) + "\n");
}

inline PointSet read_points(const std::filesystem::path& path) {
    const auto rows = detail::parse_csv(read_text(path), {"x", "y"}, path.string());
    json side;
    try {
        side = json::parse(read_text(sidecar_path(path)));
    } catch (const json::exception& e) {
        throw InvalidArgument(sidecar_path(path).string() + ": " + e.what());
    }
    if (!side.contains("k") || !side["k"].is_number_integer())
        throw InvalidArgument(sidecar_path(path).string() + ": missing integer field k");
    std::vector<Point2> pts;
    for (const auto& r : rows) pts.push_back({r[0], r[1]});
    std::optional<Box> box;
    if (side.contains("box")) {
        const auto b = side["box"].get<std::vector<double>>();
        if (b.size() != 4) throw InvalidArgument("sidecar box must have 4 entries");
        box = Box{b[0], b[1], b[2], b[3]};
    }
    return PointSet(Scale(side["k"].get<int>()), std::move(pts), box);
}

inline void write_tubes(const std::filesystem::path& path, const TubeSet& T) {
    std::string csv = "phi,c,w\n";
    for (const auto& t : T.tubes()) csv += real(t.line.phi()) + "," + real(t.line.c()) + "," + real(t.w) + "\n";
    write_text(path, csv);
}

/// Reads phi,c,w rows. Without an explicit k the scale is the largest dyadic <= w.
inline TubeSet read_tubes(const std::filesystem::path& path, std::optional<int> k = std::nullopt) {
    const auto rows = detail::parse_csv(read_text(path), {"phi", "c", "w"}, path.string());
    std::vector<Tube> tubes;
    for (const auto& r : rows) tubes.push_back({LineNF(r[0], r[1]), r[2]});
    Scale delta = k ? Scale(*k) : (tubes.empty() ? Scale(1) : Scale::at_most(std::min(tubes.front().w, 0.5)));
    return TubeSet(delta, std::move(tubes));
}

inline json to_json(const ConcentrationProfile& prof) {
    json entries = json::array();
    for (const auto& e : prof.entries)
        entries.push_back({{"k_r", e.k_r}, {"C", e.C}, {"witness", {e.witness.x, e.witness.y}}, {"mass", e.mass}});
    return {{"s", prof.s},
            {"kind", prof.kind == MassKind::Covering ? "covering" : "katz-tao"},
            {"entries", entries},
            {"C_star", prof.C_star}};
}

inline json to_json(const ExponentFit& fit) {
    json samples = json::array();
    for (const auto& [k, y] : fit.samples) samples.push_back({{"k", k}, {"log2_N", y}});
    return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"max_residual", fit.max_residual}, {"samples", samples}};
}

/// JSON cannot carry infinities; they become null.
inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace dgl::io
