#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "topgn/geometry.hpp"

namespace topgn {

struct GridCell {
    int r = 0;
    int c = 0;

    bool operator==(const GridCell&) const = default;
    auto operator<=>(const GridCell&) const = default;
};

/// Square robot-centered grid: n x n cells of side s meters, with the
/// lidar/robot origin at the center of cell (n/2, n/2). Cell k along an
/// axis covers the world interval [(k - n/2 - 1/2)s, (k - n/2 + 1/2)s).
struct GridSpec {
    int n = 200;
    double s = 0.05;

    bool operator==(const GridSpec&) const = default;

    bool valid() const { return n > 0 && n % 2 == 0 && s > 0.0; }

    void validate() const
    {
        if (!valid()) throw std::invalid_argument("GridSpec: n must be positive and even, s > 0");
    }

    bool in_bounds(const GridCell& cell) const
    {
        return cell.r >= 0 && cell.r < n && cell.c >= 0 && cell.c < n;
    }

    /// Continuous (row, col) index of a world point; integer values land on
    /// cell centers and the origin maps exactly to (n/2, n/2).
    Vec2 world_to_index(const Vec2& p) const
    {
        return {n / 2.0 + p.x / s, n / 2.0 + p.y / s};
    }

    Vec2 index_to_world(const Vec2& idx) const
    {
        return {(idx.x - n / 2.0) * s, (idx.y - n / 2.0) * s};
    }

    std::optional<GridCell> world_to_grid(const Vec2& p) const
    {
        const Vec2 idx = world_to_index(p);
        const GridCell cell{static_cast<int>(std::floor(idx.x + 0.5)),
                            static_cast<int>(std::floor(idx.y + 0.5))};
        if (!in_bounds(cell)) return std::nullopt;
        return cell;
    }

    /// World coordinates of a cell center.
    Vec2 grid_to_world(const GridCell& cell) const
    {
        return index_to_world({static_cast<double>(cell.r), static_cast<double>(cell.c)});
    }
};

template <typename T>
class Grid2D {
public:
    Grid2D() = default;

    explicit Grid2D(const GridSpec& spec, T init = T{})
        : spec_(spec), values_(static_cast<std::size_t>(spec.n) * spec.n, init)
    {
        spec.validate();
    }

    const GridSpec& spec() const { return spec_; }
    int side() const { return spec_.n; }

    T& at(int r, int c) { return values_[static_cast<std::size_t>(r) * spec_.n + c]; }
    const T& at(int r, int c) const { return values_[static_cast<std::size_t>(r) * spec_.n + c]; }
    T& at(const GridCell& cell) { return at(cell.r, cell.c); }
    const T& at(const GridCell& cell) const { return at(cell.r, cell.c); }

    bool in_bounds(int r, int c) const { return spec_.in_bounds({r, c}); }

    const std::vector<T>& values() const { return values_; }
    std::vector<T>& values() { return values_; }

    void fill(T v) { std::fill(values_.begin(), values_.end(), v); }

    std::vector<GridCell> nonzero_cells() const
    {
        std::vector<GridCell> cells;
        for (int r = 0; r < spec_.n; ++r)
            for (int c = 0; c < spec_.n; ++c)
                if (at(r, c) != T{}) cells.push_back({r, c});
        return cells;
    }

    bool operator==(const Grid2D&) const = default;

private:
    GridSpec spec_{};
    std::vector<T> values_;
};

using IntensityGrid = Grid2D<double>;
using BinaryGrid = Grid2D<std::uint8_t>;

namespace detail {

inline std::vector<GridCell> bresenham_forward(GridCell a, GridCell b)
{
    std::vector<GridCell> cells;
    const int dr = std::abs(b.r - a.r);
    const int dc = -std::abs(b.c - a.c);
    const int sr = a.r < b.r ? 1 : -1;
    const int sc = a.c < b.c ? 1 : -1;
    int err = dr + dc;
    GridCell cur = a;
    while (true) {
        cells.push_back(cur);
        if (cur == b) break;
        const int e2 = 2 * err;
        if (e2 >= dc) {
            err += dc;
            cur.r += sr;
        }
        if (e2 <= dr) {
            err += dr;
            cur.c += sc;
        }
    }
    return cells;
}

} // namespace detail

/// 8-connected integer line from a to b inclusive. Reversing the endpoints
/// yields the reversed cell list.
inline std::vector<GridCell> rasterize_segment(const GridCell& a, const GridCell& b)
{
    if (b < a) {
        std::vector<GridCell> cells = detail::bresenham_forward(b, a);
        std::reverse(cells.begin(), cells.end());
        return cells;
    }
    return detail::bresenham_forward(a, b);
}

/// Moves each cell's world center through T and re-bins it; out-of-bounds
/// results are dropped and duplicates collapsed. Output is sorted.
inline std::vector<GridCell> apply_transform(const std::vector<GridCell>& cells,
                                             const RigidTransform2D& transform,
                                             const GridSpec& spec)
{
    std::vector<GridCell> out;
    out.reserve(cells.size());
    for (const GridCell& cell : cells) {
        const Vec2 moved = transform.apply(spec.grid_to_world(cell));
        if (auto mapped = spec.world_to_grid(moved)) out.push_back(*mapped);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace topgn
