#pragma once

#include <cstdint>
#include <stdexcept>

#include "topgn/grid.hpp"
#include "topgn/intensity_map.hpp"
#include "topgn/planner.hpp"
#include "topgn/simulator.hpp"
#include "topgn/ton.hpp"

namespace topgn {

/// Everything one pipeline instance needs, with cross-field validation.
struct PipelineConfig {
    GridSpec grid{200, 0.05};
    int roi_m = 80;
    LayerConfig layers{};
    TonCondition ton{};
    RobotConfig robot{};
    LidarModel lidar{};
    PlannerParams planner{};
    int t_past = 10;
    double frame_rate = 10.0; // Hz
    double occupancy_threshold = 50.0;
    double extrap_weight = 255.0;
    double mapping_weight = 255.0;
    double freeze_timeout = 10.0;    // seconds frozen before a run fails
    double scenario_timeout = 60.0;  // simulated seconds
    double goal_tolerance_factor = 2.0; // goal reached within factor * r_rob
    double odom_noise_std_xy = 0.0;     // meters per step, mapping poses only
    double odom_noise_std_theta = 0.0;  // radians per step
    std::uint64_t seed = 1;

    void validate() const
    {
        grid.validate();
        layers.validate();
        ton.validate();
        robot.validate();
        lidar.validate();
        planner.validate();
        if (roi_m >= grid.n || roi_m <= 0 || roi_m % 2 != 0)
            throw std::invalid_argument("config: need 0 < roi_m < n with roi_m even");
        if (ton.r_high > layers.i_max)
            throw std::invalid_argument("config: intensity range exceeds i_max");
        if (t_past < 0) throw std::invalid_argument("config: t_past must be >= 0");
        if (frame_rate <= 0) throw std::invalid_argument("config: frame_rate must be > 0");
        if (freeze_timeout <= 0 || scenario_timeout <= 0)
            throw std::invalid_argument("config: timeouts must be > 0");
        if (lidar.mount_height != layers.h_lid)
            throw std::invalid_argument("config: lidar mount_height must equal h_lid");
        if (!lidar_covers_layers(lidar, layers, robot.d_thresh))
            throw std::invalid_argument(
                "config: lidar vertical coverage misses a height layer at d_thresh");
    }
};

/// Main parameter profile: n=200, m=80, R=[100,130], h_lid=0.5, r_rob=0.3.
inline PipelineConfig section_profile()
{
    return PipelineConfig{};
}

/// Alternate profile: m=100, h_lid=0.48, r_rob=0.25.
inline PipelineConfig appendix_profile()
{
    PipelineConfig cfg;
    cfg.roi_m = 100;
    cfg.layers.h_lid = 0.48;
    cfg.lidar.mount_height = 0.48;
    cfg.robot.r_rob = 0.25;
    cfg.robot.d_thresh = RobotConfig::default_d_thresh(0.25);
    return cfg;
}

} // namespace topgn
