#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "topgn/geometry.hpp"
#include "topgn/grid.hpp"
#include "topgn/nav_map.hpp"

namespace topgn {

struct RobotConfig {
    double r_rob = 0.3;   // disc radius, meters
    double h_rob = 0.5;   // height, meters
    double v_max = 0.5;   // m/s
    double omega_max = 1.5; // rad/s
    double a_v = 0.5;     // m/s^2
    double a_omega = 2.0; // rad/s^2
    double d_thresh = 2.0 * 0.3 + 0.5; // standoff distance, meters

    static double default_d_thresh(double r_rob) { return 2.0 * r_rob + 0.5; }

    bool valid() const
    {
        return r_rob > 0 && h_rob > 0 && v_max > 0 && omega_max > 0 && a_v > 0 && a_omega > 0 &&
               d_thresh > 0;
    }

    void validate() const
    {
        if (!valid()) throw std::invalid_argument("RobotConfig: all limits must be positive");
    }
};

struct VelocityPair {
    double v = 0.0;
    double omega = 0.0;

    bool operator==(const VelocityPair&) const = default;
};

struct Pose2D {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
};

struct Trajectory {
    std::vector<Pose2D> states; // rollout poses, robot frame, first at origin
    std::vector<GridCell> cells; // deduplicated, in-bounds grid footprint
    double horizon = 0.0;
};

struct PlannerWeights {
    double heading = 1.0;
    double obstacle = 2.0;
    double velocity = 1.0;

    bool valid() const
    {
        return heading >= 0 && obstacle >= 0 && velocity >= 0 &&
               (heading + obstacle + velocity) > 0;
    }
};

struct PlannerParams {
    PlannerWeights weights{};
    int n_v = 11;
    int n_omega = 21;
    double window_dt = 0.2; // acceleration window, seconds
    double horizon = 2.0;   // rollout horizon, seconds
    double dt = 0.1;        // rollout integration step, seconds

    void validate() const
    {
        if (n_v < 1 || n_omega < 1 || window_dt <= 0 || dt <= 0 || horizon < dt ||
            !weights.valid())
            throw std::invalid_argument("PlannerParams: invalid sampling or weights");
    }
};

/// Uniform velocity samples over the acceleration-reachable window clamped
/// to the robot's velocity space.
inline std::vector<VelocityPair> dynamic_window(const VelocityPair& current,
                                                const RobotConfig& cfg, double dt, int n_v,
                                                int n_omega)
{
    if (dt <= 0 || n_v < 1 || n_omega < 1)
        throw std::invalid_argument("dynamic_window: need dt > 0 and samples >= 1");
    const double v_lo = std::max(0.0, current.v - cfg.a_v * dt);
    const double v_hi = std::min(cfg.v_max, current.v + cfg.a_v * dt);
    const double w_lo = std::max(-cfg.omega_max, current.omega - cfg.a_omega * dt);
    const double w_hi = std::min(cfg.omega_max, current.omega + cfg.a_omega * dt);

    const auto sample = [](double lo, double hi, int i, int count) {
        if (count == 1) return 0.5 * (lo + hi);
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    };

    std::vector<VelocityPair> out;
    out.reserve(static_cast<std::size_t>(n_v) * n_omega);
    for (int i = 0; i < n_v; ++i)
        for (int j = 0; j < n_omega; ++j)
            out.push_back({sample(v_lo, v_hi, i, n_v), sample(w_lo, w_hi, j, n_omega)});
    return out;
}

/// Constant-velocity unicycle rollout from the origin pose.
inline Trajectory rollout(const VelocityPair& vw, double horizon, double dt, const GridSpec& spec)
{
    if (!(horizon >= dt) || dt <= 0)
        throw std::invalid_argument("rollout: need horizon >= dt > 0");

    Trajectory traj;
    traj.horizon = horizon;
    Pose2D pose{};
    traj.states.push_back(pose);
    const int steps = static_cast<int>(std::floor(horizon / dt + 1e-9));
    for (int k = 0; k < steps; ++k) {
        pose.theta += vw.omega * dt;
        pose.x += vw.v * std::cos(pose.theta) * dt;
        pose.y += vw.v * std::sin(pose.theta) * dt;
        traj.states.push_back(pose);
    }
    for (const Pose2D& s : traj.states) {
        const auto cell = spec.world_to_grid({s.x, s.y});
        if (!cell) continue;
        if (std::find(traj.cells.begin(), traj.cells.end(), *cell) == traj.cells.end())
            traj.cells.push_back(*cell);
    }
    return traj;
}

struct ObstacleEval {
    bool collision = false;
    double clearance_cells = std::numeric_limits<double>::infinity();
    double cost = 0.0; // 1 / clearance, 0 in free space
};

/// Clearance-based cost with the segment-crossing rejection: a trajectory
/// whose polyline intersects an extrapolated segment is a collision even if
/// its cells never touch an obstacle.
inline ObstacleEval obstacle_cost(const Trajectory& traj, const NavMap& nav)
{
    ObstacleEval eval;
    const GridSpec& spec = nav.grid.spec();

    for (const GridCell& cell : traj.cells)
        eval.clearance_cells = std::min(eval.clearance_cells, nav.clearance_cells(cell));
    if (eval.clearance_cells == 0.0) {
        eval.collision = true;
        return eval;
    }

    for (const ExtrapolatedSegment& seg : nav.segments) {
        const Vec2 a = spec.index_to_world(seg.endpoints[0]);
        const Vec2 b = spec.index_to_world(seg.endpoints[1]);
        for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
            const Vec2 p{traj.states[i].x, traj.states[i].y};
            const Vec2 q{traj.states[i + 1].x, traj.states[i + 1].y};
            if (segments_intersect(p, q, a, b)) {
                eval.collision = true;
                return eval;
            }
        }
    }

    if (std::isfinite(eval.clearance_cells) && eval.clearance_cells > 0.0)
        eval.cost = 1.0 / eval.clearance_cells;
    return eval;
}

struct PlanResult {
    std::optional<VelocityPair> cmd; // empty = frozen
    int candidates = 0;
    int rejected_collision = 0;
    int rejected_inadmissible = 0;
    int selected_index = -1;
    double selected_clearance_cells = std::numeric_limits<double>::infinity();
};

/// Scores the non-colliding, admissible candidates with per-term min-max
/// normalization and returns the lowest-cost pair (lowest index on ties).
inline PlanResult select_velocity(const std::vector<VelocityPair>& candidates, const NavMap& nav,
                                  const Vec2& goal, const PlannerWeights& weights,
                                  const RobotConfig& cfg, double horizon, double dt,
                                  const GridSpec& spec)
{
    if (candidates.empty()) throw std::invalid_argument("select_velocity: no candidates");
    if (!weights.valid()) throw std::invalid_argument("select_velocity: invalid weights");

    struct Scored {
        int index;
        double head, obs, vel;
        double clearance;
    };
    std::vector<Scored> scored;
    scored.reserve(candidates.size());

    PlanResult result;
    result.candidates = static_cast<int>(candidates.size());

    for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
        const VelocityPair& vw = candidates[i];
        const Trajectory traj = rollout(vw, horizon, dt, spec);
        const ObstacleEval eval = obstacle_cost(traj, nav);
        if (eval.collision) {
            ++result.rejected_collision;
            continue;
        }
        const double stop_limit =
            std::isfinite(eval.clearance_cells)
                ? std::sqrt(2.0 * cfg.a_v * eval.clearance_cells * spec.s)
                : std::numeric_limits<double>::infinity();
        if (vw.v > stop_limit) {
            ++result.rejected_inadmissible;
            continue;
        }
        const Pose2D& end = traj.states.back();
        const double bearing = std::atan2(goal.y - end.y, goal.x - end.x);
        const double head = std::abs(wrap_angle(bearing - end.theta)) / kPi;
        const double vel = (cfg.v_max - vw.v) / cfg.v_max;
        scored.push_back({i, head, eval.cost, vel, eval.clearance_cells});
    }

    if (scored.empty()) return result; // frozen

    const auto minmax = [&](auto proj) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const Scored& s : scored) {
            lo = std::min(lo, proj(s));
            hi = std::max(hi, proj(s));
        }
        return std::pair<double, double>{lo, hi};
    };
    const auto [h_lo, h_hi] = minmax([](const Scored& s) { return s.head; });
    const auto [o_lo, o_hi] = minmax([](const Scored& s) { return s.obs; });
    const auto [v_lo, v_hi] = minmax([](const Scored& s) { return s.vel; });
    const auto norm = [](double x, double lo, double hi) {
        return hi > lo ? (x - lo) / (hi - lo) : 0.0;
    };

    int best = -1;
    double best_q = std::numeric_limits<double>::infinity();
    double best_clearance = std::numeric_limits<double>::infinity();
    for (const Scored& s : scored) {
        const double q = weights.heading * norm(s.head, h_lo, h_hi) +
                         weights.obstacle * norm(s.obs, o_lo, o_hi) +
                         weights.velocity * norm(s.vel, v_lo, v_hi);
        if (q < best_q) {
            best_q = q;
            best = s.index;
            best_clearance = s.clearance;
        }
    }
    result.cmd = candidates[best];
    result.selected_index = best;
    result.selected_clearance_cells = best_clearance;
    return result;
}

} // namespace topgn
