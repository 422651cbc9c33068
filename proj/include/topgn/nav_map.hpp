#pragma once

#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include "topgn/distance_transform.hpp"
#include "topgn/extrapolation.hpp"
#include "topgn/grid.hpp"
#include "topgn/intensity_map.hpp"

namespace topgn {

/// Full-grid obstacle costmap: layer sum plus extrapolated segments written
/// into the centered ROI window. Keeps the segments (shifted to full-grid
/// index coordinates) for exact trajectory-crossing tests, and a clearance
/// field in cells for the planner.
struct NavMap {
    IntensityGrid grid;
    BinaryGrid obstacle_mask;
    std::vector<GridCell> obstacle_cells;
    Grid2D<double> clearance_sq;            // squared distance to O^t, cells^2
    std::vector<ExtrapolatedSegment> segments; // endpoints in full-grid index space
    double occupancy_threshold = 0.0;

    double clearance_cells(const GridCell& cell) const
    {
        return std::sqrt(clearance_sq.at(cell));
    }
};

inline NavMap compose_nav_map(const MultiLayerIntensityMap& map, const ExtrapolationSet& extrap,
                              double occupancy_threshold, double extrap_weight)
{
    const int n = map.spec.n;
    const int m = extrap.mask.side();
    if (m >= n) throw std::invalid_argument("compose_nav_map: ROI must be smaller than the grid");
    const int offset = (n - m) / 2;

    NavMap nav;
    nav.occupancy_threshold = occupancy_threshold;
    nav.grid = IntensityGrid(map.spec);
    for (std::size_t i = 0; i < nav.grid.values().size(); ++i)
        nav.grid.values()[i] =
            map.low.values()[i] + map.mid.values()[i] + map.high.values()[i];

    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            if (extrap.mask.at(r, c)) nav.grid.at(r + offset, c + offset) += extrap_weight;

    nav.obstacle_mask = BinaryGrid(map.spec);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (nav.grid.at(r, c) > occupancy_threshold) nav.obstacle_mask.at(r, c) = 1;

    // Segment cells count as obstacles regardless of the weight profile.
    nav.segments.reserve(extrap.segments.size());
    for (ExtrapolatedSegment seg : extrap.segments) {
        seg.p_int = seg.p_int + Vec2{static_cast<double>(offset), static_cast<double>(offset)};
        for (Vec2& e : seg.endpoints)
            e = e + Vec2{static_cast<double>(offset), static_cast<double>(offset)};
        for (GridCell& cell : seg.raster) {
            cell.r += offset;
            cell.c += offset;
            nav.obstacle_mask.at(cell) = 1;
        }
        nav.segments.push_back(std::move(seg));
    }

    nav.obstacle_cells = nav.obstacle_mask.nonzero_cells();
    nav.clearance_sq = squared_distance_transform(nav.obstacle_mask);
    return nav;
}

/// Ring buffer of the last t_past TON masks with the poses that produced them.
class TonHistory {
public:
    struct Entry {
        TonMask mask;
        RigidTransform2D pose; // world frame
        double timestamp = 0.0;
    };

    explicit TonHistory(int t_past = 10) : t_past_(t_past)
    {
        if (t_past < 0) throw std::invalid_argument("TonHistory: t_past must be >= 0");
    }

    int t_past() const { return t_past_; }
    std::size_t size() const { return entries_.size(); }
    const std::deque<Entry>& entries() const { return entries_; }

    void push(TonMask mask, const RigidTransform2D& pose, double timestamp)
    {
        if (!entries_.empty() && timestamp <= entries_.back().timestamp)
            throw std::invalid_argument("TonHistory: timestamps must strictly increase");
        entries_.push_back({std::move(mask), pose, timestamp});
        while (entries_.size() > static_cast<std::size_t>(t_past_)) entries_.pop_front();
    }

    void clear() { entries_.clear(); }

private:
    int t_past_;
    std::deque<Entry> entries_;
};

namespace detail {

/// Frame-(t-k) -> frame-t transform from the two world poses.
inline RigidTransform2D relative_transform(const RigidTransform2D& past_pose,
                                           const RigidTransform2D& current_pose)
{
    return current_pose.inverse().compose(past_pose);
}

} // namespace detail

/// Past TON masks re-binned into the current ROI frame and OR-ed with the
/// current mask: the binary accumulated transparent-obstacle map.
inline TonMask accumulate_ton_mask(const TonHistory& history, const TonMask& current_mask,
                                   const RigidTransform2D& current_pose)
{
    TonMask out = current_mask;
    const GridSpec roi = current_mask.spec();
    for (const TonHistory::Entry& entry : history.entries()) {
        const RigidTransform2D rel = detail::relative_transform(entry.pose, current_pose);
        for (const GridCell& cell : apply_transform(entry.mask.nonzero_cells(), rel, roi))
            out.at(cell) = 1;
    }
    return out;
}

/// Map accumulation: transformed past TON masks added into the mid layer's
/// centered window, then the three layers summed.
inline IntensityGrid accumulate_mapping(const MultiLayerIntensityMap& current,
                                        const TonHistory& history,
                                        const RigidTransform2D& current_pose,
                                        double mapping_weight)
{
    IntensityGrid mid = current.mid;
    const int n = current.spec.n;

    for (const TonHistory::Entry& entry : history.entries()) {
        const GridSpec roi = entry.mask.spec();
        const int offset = (n - roi.n) / 2;
        const RigidTransform2D rel = detail::relative_transform(entry.pose, current_pose);
        for (const GridCell& cell : apply_transform(entry.mask.nonzero_cells(), rel, roi))
            mid.at(cell.r + offset, cell.c + offset) += mapping_weight;
    }

    IntensityGrid out(current.spec);
    for (std::size_t i = 0; i < out.values().size(); ++i)
        out.values()[i] = current.low.values()[i] + mid.values()[i] + current.high.values()[i];
    return out;
}

} // namespace topgn
