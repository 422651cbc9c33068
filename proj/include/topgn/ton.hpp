#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "topgn/grid.hpp"
#include "topgn/intensity_map.hpp"

namespace topgn {

/// Intensity condition that isolates transparent obstacle neighborhoods:
/// mid in [r_low, r_high] while low and high stay under r_high / suppression.
struct TonCondition {
    double r_low = 100.0;
    double r_high = 130.0;
    double suppression_ratio = 3.0;
    int min_contour_area = 3;

    bool valid() const
    {
        return 0.0 <= r_low && r_low <= r_high && suppression_ratio > 1.0 && min_contour_area >= 1;
    }

    void validate() const
    {
        if (!valid()) throw std::invalid_argument("TonCondition: invalid bounds");
    }

    double suppression_threshold() const { return r_high / suppression_ratio; }
};

using TonMask = BinaryGrid;

struct Ton {
    std::vector<GridCell> cells;
    double centroid_r = 0.0;
    double centroid_c = 0.0;
    double bound_radius = 0.0;
};

inline TonMask apply_condition(const RoiView& roi, const TonCondition& cond)
{
    cond.validate();
    TonMask mask(roi.roi_spec());
    const double cap = cond.suppression_threshold();
    for (int r = 0; r < roi.m(); ++r)
        for (int c = 0; c < roi.m(); ++c) {
            const double mid = roi.mid(r, c);
            mask.at(r, c) = (mid >= cond.r_low && mid <= cond.r_high &&
                             roi.low(r, c) < cap && roi.high(r, c) < cap)
                                ? 1
                                : 0;
        }
    return mask;
}

namespace detail {

/// Labels 8-connected components of 1-cells; returns the component cell
/// lists in first-encounter (row-major) order.
inline std::vector<std::vector<GridCell>> connected_components(const TonMask& mask)
{
    const int m = mask.side();
    Grid2D<std::uint8_t> visited(mask.spec());
    std::vector<std::vector<GridCell>> components;
    std::vector<GridCell> stack;

    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
            if (!mask.at(r, c) || visited.at(r, c)) continue;
            std::vector<GridCell> comp;
            stack.push_back({r, c});
            visited.at(r, c) = 1;
            while (!stack.empty()) {
                const GridCell cur = stack.back();
                stack.pop_back();
                comp.push_back(cur);
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        const int nr = cur.r + dr;
                        const int nc = cur.c + dc;
                        if (!mask.in_bounds(nr, nc) || visited.at(nr, nc) || !mask.at(nr, nc))
                            continue;
                        visited.at(nr, nc) = 1;
                        stack.push_back({nr, nc});
                    }
            }
            components.push_back(std::move(comp));
        }
    return components;
}

} // namespace detail

/// Removes 8-connected components smaller than min_contour_area.
inline TonMask denoise(const TonMask& mask, const TonCondition& cond)
{
    TonMask out = mask;
    for (const auto& comp : detail::connected_components(mask)) {
        if (static_cast<int>(comp.size()) < cond.min_contour_area)
            for (const GridCell& cell : comp) out.at(cell) = 0;
    }
    return out;
}

/// One Ton per 8-connected component, largest first; ties broken by the
/// component's (min r, min c).
inline std::vector<Ton> extract_tons(const TonMask& mask)
{
    std::vector<Ton> tons;
    for (auto& comp : detail::connected_components(mask)) {
        std::sort(comp.begin(), comp.end());
        Ton ton;
        double sum_r = 0.0;
        double sum_c = 0.0;
        for (const GridCell& cell : comp) {
            sum_r += cell.r;
            sum_c += cell.c;
        }
        ton.centroid_r = sum_r / static_cast<double>(comp.size());
        ton.centroid_c = sum_c / static_cast<double>(comp.size());
        double max_sq = 0.0;
        for (const GridCell& cell : comp) {
            const double dr = cell.r - ton.centroid_r;
            const double dc = cell.c - ton.centroid_c;
            max_sq = std::max(max_sq, dr * dr + dc * dc);
        }
        ton.bound_radius = std::sqrt(max_sq);
        ton.cells = std::move(comp);
        tons.push_back(std::move(ton));
    }
    std::sort(tons.begin(), tons.end(), [](const Ton& a, const Ton& b) {
        if (a.cells.size() != b.cells.size()) return a.cells.size() > b.cells.size();
        return a.cells.front() < b.cells.front();
    });
    return tons;
}

} // namespace topgn
