#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "topgn/grid.hpp"

namespace topgn {

struct LidarPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double intensity = 0.0;

    bool finite() const
    {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) && std::isfinite(intensity);
    }
};

struct PointCloudFrame {
    std::vector<LidarPoint> points;
    double timestamp = 0.0;
    RigidTransform2D robot_pose{}; // world frame, for map accumulation
};

enum class Normalization { mean, sum, sum_over_s2 };

struct LayerConfig {
    double h_lid = 0.5;  // lidar mount height, meters
    double delta = 0.2;  // layer half-height, meters
    double i_max = 255.0;
    Normalization normalization = Normalization::mean;

    bool valid() const { return delta > 0.0 && h_lid - delta > 0.0 && i_max > 0.0; }

    void validate() const
    {
        if (!valid()) throw std::invalid_argument("LayerConfig: need delta > 0 and h_lid > delta");
    }

    /// Layer index for a height: 0 low, 1 mid, 2 high, -1 none.
    /// Intervals are half-open on the upper end, so z = h_lid - delta lands
    /// in mid and z = h_lid + delta lands in high.
    int layer_of(double z) const
    {
        if (!(z > 0.0)) return -1;
        if (z < h_lid - delta) return 0;
        if (z < h_lid + delta) return 1;
        if (z < h_lid + 2.0 * delta) return 2;
        return -1;
    }
};

struct MultiLayerIntensityMap {
    IntensityGrid low;
    IntensityGrid mid;
    IntensityGrid high;
    GridSpec spec{};
    LayerConfig config{};
    std::size_t skipped_nonfinite = 0;

    const IntensityGrid& layer(int i) const { return i == 0 ? low : (i == 1 ? mid : high); }
};

/// Centered m x m window into the three layers of a parent map.
/// Read-only; (r, c) indexes the parent at (r + offset, c + offset).
class RoiView {
public:
    RoiView(const MultiLayerIntensityMap& parent, int m)
        : parent_(&parent), m_(m), offset_((parent.spec.n - m) / 2)
    {
        if (m >= parent.spec.n || m <= 0 || m % 2 != 0)
            throw std::invalid_argument("RoiView: need 0 < m < n with m even");
    }

    int m() const { return m_; }
    int offset() const { return offset_; }
    double cell_size() const { return parent_->spec.s; }

    double low(int r, int c) const { return parent_->low.at(r + offset_, c + offset_); }
    double mid(int r, int c) const { return parent_->mid.at(r + offset_, c + offset_); }
    double high(int r, int c) const { return parent_->high.at(r + offset_, c + offset_); }

    GridSpec roi_spec() const { return {m_, parent_->spec.s}; }

private:
    const MultiLayerIntensityMap* parent_;
    int m_;
    int offset_;
};

/// Bins a frame into the three height layers. Non-finite points are skipped
/// and counted, never fatal.
inline MultiLayerIntensityMap build_layers(const PointCloudFrame& frame,
                                           const GridSpec& spec,
                                           const LayerConfig& config)
{
    spec.validate();
    config.validate();

    MultiLayerIntensityMap map{IntensityGrid(spec), IntensityGrid(spec), IntensityGrid(spec),
                               spec, config, 0};

    Grid2D<std::uint32_t> counts[3] = {Grid2D<std::uint32_t>(spec), Grid2D<std::uint32_t>(spec),
                                       Grid2D<std::uint32_t>(spec)};
    IntensityGrid* sums[3] = {&map.low, &map.mid, &map.high};

    for (const LidarPoint& p : frame.points) {
        if (!p.finite()) {
            ++map.skipped_nonfinite;
            continue;
        }
        const int layer = config.layer_of(p.z);
        if (layer < 0) continue;
        const auto cell = spec.world_to_grid({p.x, p.y});
        if (!cell) continue;
        sums[layer]->at(*cell) += p.intensity;
        counts[layer].at(*cell) += 1;
    }

    if (config.normalization == Normalization::mean) {
        for (int layer = 0; layer < 3; ++layer)
            for (std::size_t i = 0; i < sums[layer]->values().size(); ++i) {
                const std::uint32_t k = counts[layer].values()[i];
                if (k > 1) sums[layer]->values()[i] /= k;
            }
    } else if (config.normalization == Normalization::sum_over_s2) {
        const double inv_s2 = 1.0 / (spec.s * spec.s);
        for (int layer = 0; layer < 3; ++layer)
            for (double& v : sums[layer]->values()) v *= inv_s2;
    }
    return map;
}

inline RoiView extract_roi(const MultiLayerIntensityMap& map, int m)
{
    return RoiView(map, m);
}

} // namespace topgn
