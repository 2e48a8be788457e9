#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace dgl::detail {

// Values sitting on a lattice line up to rounding noise are assigned to the cell above.
inline constexpr double kCellSnap = 1e-9;

inline std::int64_t cell_index(double v, double side) {
    return static_cast<std::int64_t>(std::floor(v / side + kCellSnap));
}

inline std::uint64_t pack(std::int64_t i, std::int64_t j) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
           static_cast<std::uint32_t>(j);
}

inline std::pair<std::int64_t, std::int64_t> unpack(std::uint64_t key) {
    return {static_cast<std::int32_t>(key >> 32), static_cast<std::int32_t>(key & 0xffffffffu)};
}

} // namespace dgl::detail
