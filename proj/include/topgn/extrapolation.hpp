#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "topgn/geometry.hpp"
#include "topgn/grid.hpp"
#include "topgn/ton.hpp"

namespace topgn {

struct DegenerateTonError : std::runtime_error {
    DegenerateTonError() : std::runtime_error("TON centroid coincides with the lidar cell") {}
};

/// Tangent line segment standing in for the transparent surface behind a TON.
/// Coordinates are real-valued ROI cell indices.
struct ExtrapolatedSegment {
    int ton_index = 0;
    Vec2 p_int{};                 // light-ray / bounding-circle intersection
    Vec2 endpoints[2] = {{}, {}}; // p_int +- (r_rob/s) * tangent_hat
    std::vector<GridCell> raster;
};

struct ExtrapolationSet {
    std::vector<ExtrapolatedSegment> segments;
    TonMask mask;
    int skipped_degenerate = 0;
};

/// Incident-light and tangent vectors of a TON as seen from the map center,
/// in (row, col) index space. dot(light, tangent) == 0 by construction.
inline std::pair<Vec2, Vec2> light_and_tangent(const Ton& ton, int m)
{
    const Vec2 light{ton.centroid_r - m / 2.0, ton.centroid_c - m / 2.0};
    if (light.x == 0.0 && light.y == 0.0) throw DegenerateTonError();
    const Vec2 tangent{light.y, -light.x};
    return {light, tangent};
}

/// Near intersection of the center->centroid ray with the bounding circle;
/// the side facing the lidar.
inline Vec2 intersect_ray_circle(const Ton& ton, int m)
{
    const Vec2 center{m / 2.0, m / 2.0};
    const Vec2 light = light_and_tangent(ton, m).first;
    const double dist = light.norm();
    return center + light * ((dist - ton.bound_radius) / dist);
}

inline ExtrapolatedSegment extrapolate(const Ton& ton, int m, double r_rob, double s)
{
    if (r_rob < 0.0 || s <= 0.0) throw std::invalid_argument("extrapolate: need r_rob >= 0, s > 0");

    const auto [light, tangent] = light_and_tangent(ton, m);
    const Vec2 p_int = intersect_ray_circle(ton, m);
    const Vec2 half = tangent.normalized() * (r_rob / s);

    ExtrapolatedSegment seg;
    seg.p_int = p_int;
    seg.endpoints[0] = p_int - half;
    seg.endpoints[1] = p_int + half;

    const auto integerize = [](const Vec2& v) {
        return GridCell{static_cast<int>(std::llround(v.x)), static_cast<int>(std::llround(v.y))};
    };
    const GridSpec roi{m, s};
    for (const GridCell& cell : rasterize_segment(integerize(seg.endpoints[0]),
                                                  integerize(seg.endpoints[1]))) {
        if (roi.in_bounds(cell)) seg.raster.push_back(cell);
    }
    return seg;
}

/// Union of all extrapolated segments over the ROI grid. Degenerate TONs are
/// skipped and counted.
inline ExtrapolationSet build_extrapolation_set(const std::vector<Ton>& tons, int m, double r_rob,
                                                double s)
{
    ExtrapolationSet set;
    set.mask = TonMask(GridSpec{m, s});
    for (std::size_t i = 0; i < tons.size(); ++i) {
        ExtrapolatedSegment seg;
        try {
            seg = extrapolate(tons[i], m, r_rob, s);
        } catch (const DegenerateTonError&) {
            ++set.skipped_degenerate;
            continue;
        }
        seg.ton_index = static_cast<int>(i);
        for (const GridCell& cell : seg.raster) set.mask.at(cell) = 1;
        set.segments.push_back(std::move(seg));
    }
    return set;
}

} // namespace topgn
