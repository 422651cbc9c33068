#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "topgn/config.hpp"
#include "topgn/extrapolation.hpp"
#include "topgn/frame_io.hpp"
#include "topgn/intensity_map.hpp"
#include "topgn/metrics.hpp"
#include "topgn/nav_map.hpp"
#include "topgn/pgm.hpp"
#include "topgn/planner.hpp"
#include "topgn/scene_io.hpp"
#include "topgn/simulator.hpp"
#include "topgn/ton.hpp"
#include "topgn/version.hpp"

namespace topgn {

/// One perception pass: layers -> ROI -> TON mask -> extrapolation -> nav map.
struct FrameResult {
    MultiLayerIntensityMap layers;
    TonMask mask;
    std::vector<Ton> tons;
    ExtrapolationSet extrap;
    NavMap nav;
};

inline FrameResult process_frame(const PointCloudFrame& frame, const PipelineConfig& cfg)
{
    FrameResult out;
    out.layers = build_layers(frame, cfg.grid, cfg.layers);
    const RoiView roi = extract_roi(out.layers, cfg.roi_m);
    out.mask = denoise(apply_condition(roi, cfg.ton), cfg.ton);
    out.tons = extract_tons(out.mask);
    out.extrap = build_extrapolation_set(out.tons, cfg.roi_m, cfg.robot.r_rob, cfg.grid.s);
    out.nav = compose_nav_map(out.layers, out.extrap, cfg.occupancy_threshold, cfg.extrap_weight);
    return out;
}

struct RunOptions {
    std::string out_dir;
    bool dump_grids = false;
    int dump_stride = 10;
    bool dump_frames = false;
    std::string scene_source_path; // copied into the run directory when set
};

struct RunResult {
    RunRecord record;
    bool transparent_collision = false;
    bool executed_segment_crossing = false; // executed step crossed a shield
    int frames = 0;
    double sim_time = 0.0;
    double wall_time_s = 0.0;
    std::string out_dir;
};

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    out << text;
}

inline std::string format_log_line(double t, const Pose2D& pose, const VelocityPair& vel,
                                   const std::string& event)
{
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %.6f %.6f %.6f %s\n", t, pose.x, pose.y,
                  pose.theta, vel.v, vel.omega, event.empty() ? "-" : event.c_str());
    return buf;
}

} // namespace detail

/// Closed-loop navigation run: scan, detect, extrapolate, plan, step, until
/// goal / collision / freeze / timeout. Writes trajectory.log, record.json,
/// config.json and versions.txt into the output directory.
inline RunResult run_scenario(const Scenario& scenario, std::uint64_t seed, const RunOptions& opts)
{
    const auto wall_start = std::chrono::steady_clock::now();
    const PipelineConfig& cfg = scenario.config;
    cfg.validate();

    namespace fs = std::filesystem;
    const fs::path out_dir(opts.out_dir);
    fs::create_directories(out_dir);
    if (opts.dump_grids) fs::create_directories(out_dir / "grids");

    std::mt19937_64 rng(seed);
    RobotState robot;
    robot.pose = scenario.start;
    if (scenario.start_jitter_xy > 0.0 || scenario.start_jitter_theta > 0.0) {
        std::uniform_real_distribution<double> jxy(-scenario.start_jitter_xy,
                                                   scenario.start_jitter_xy);
        std::uniform_real_distribution<double> jth(-scenario.start_jitter_theta,
                                                   scenario.start_jitter_theta);
        robot.pose.x += jxy(rng);
        robot.pose.y += jxy(rng);
        robot.pose.theta = wrap_angle(robot.pose.theta + jth(rng));
    }
    std::normal_distribution<double> odom_xy(0.0, cfg.odom_noise_std_xy);
    std::normal_distribution<double> odom_th(0.0, cfg.odom_noise_std_theta);

    const double period = 1.0 / cfg.frame_rate;
    const double goal_tol = cfg.goal_tolerance_factor * cfg.robot.r_rob;
    const int max_frames = static_cast<int>(cfg.scenario_timeout * cfg.frame_rate);

    TonHistory history(cfg.t_past);
    RigidTransform2D odom_pose{robot.pose.theta, robot.pose.x, robot.pose.y};

    RunResult result;
    result.out_dir = opts.out_dir;
    result.record.outcome = RunOutcome::timeout;
    result.record.min_clearance = std::numeric_limits<double>::infinity();

    std::string log;
    log += "# t x y theta v omega event\n";
    std::vector<PointCloudFrame> dumped_frames;

    // freezing = no progress toward the goal (halt, spin, or oscillation)
    double best_goal_dist = std::numeric_limits<double>::infinity();
    double last_progress_time = 0.0;
    for (int k = 0; k < max_frames; ++k) {
        const double t = static_cast<double>(k) / cfg.frame_rate;
        result.frames = k + 1;
        result.sim_time = t;

        const Vec2 pos{robot.pose.x, robot.pose.y};
        result.record.min_clearance =
            std::min(result.record.min_clearance,
                     world_clearance(pos, scenario.world, t, cfg.robot.h_rob) - cfg.robot.r_rob);

        const double goal_dist = (scenario.goal - pos).norm();
        if (goal_dist < best_goal_dist - 0.01) {
            best_goal_dist = goal_dist;
            last_progress_time = t;
        }
        if (goal_dist <= goal_tol) {
            result.record.outcome = RunOutcome::success;
            result.record.time_to_goal = t;
            log += detail::format_log_line(t, robot.pose, robot.velocity, "goal");
            break;
        }

        const PointCloudFrame frame =
            scan(robot.pose, cfg.lidar, scenario.world, t, cfg.layers.i_max);
        if (opts.dump_frames) dumped_frames.push_back(frame);
        const FrameResult fr = process_frame(frame, cfg);

        // mapping history uses (optionally noisy) odometry poses
        if (cfg.odom_noise_std_xy > 0.0 || cfg.odom_noise_std_theta > 0.0) {
            odom_pose.dx = robot.pose.x + odom_xy(rng);
            odom_pose.dy = robot.pose.y + odom_xy(rng);
            odom_pose.angle = wrap_angle(robot.pose.theta + odom_th(rng));
        } else {
            odom_pose = {robot.pose.theta, robot.pose.x, robot.pose.y};
        }
        if (cfg.t_past > 0) history.push(fr.mask, odom_pose, t + 1e-9);

        const Vec2 goal_robot =
            (scenario.goal - pos).rotated(-robot.pose.theta);
        const auto candidates = dynamic_window(robot.velocity, cfg.robot, cfg.planner.window_dt,
                                               cfg.planner.n_v, cfg.planner.n_omega);
        const PlanResult plan =
            select_velocity(candidates, fr.nav, goal_robot, cfg.planner.weights, cfg.robot,
                            cfg.planner.horizon, cfg.planner.dt, cfg.grid);

        VelocityPair cmd{0.0, 0.0};
        std::string event;
        if (plan.cmd) {
            cmd = *plan.cmd;
        } else {
            result.record.freeze_duration += period;
            event = "freeze";
        }

        if (t - last_progress_time > cfg.freeze_timeout) {
            result.record.outcome = RunOutcome::frozen;
            result.record.freeze_duration =
                std::max(result.record.freeze_duration, t - last_progress_time);
            log += detail::format_log_line(t, robot.pose, {0.0, 0.0}, "frozen_timeout");
            break;
        }

        const Pose2D before = robot.pose;
        const auto [next, collided] = step(robot, cmd, period, scenario.world, cfg.robot);
        robot = next;

        // the executed displacement must honor the shields of the frame that chose it
        if (plan.cmd) {
            const Vec2 moved_a = (Vec2{before.x, before.y} - pos).rotated(-before.theta);
            const Vec2 moved_b = (Vec2{robot.pose.x, robot.pose.y} - pos).rotated(-before.theta);
            for (const ExtrapolatedSegment& seg : fr.nav.segments) {
                const Vec2 a = cfg.grid.index_to_world(seg.endpoints[0]);
                const Vec2 b = cfg.grid.index_to_world(seg.endpoints[1]);
                if (segments_intersect(moved_a, moved_b, a, b)) {
                    result.executed_segment_crossing = true;
                    break;
                }
            }
        }

        if (opts.dump_grids && k % opts.dump_stride == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "frame_%05d_nav.pgm", k);
            write_pgm((out_dir / "grids" / name).string(), fr.nav.grid);
            std::snprintf(name, sizeof(name), "frame_%05d_mask.pgm", k);
            write_pgm((out_dir / "grids" / name).string(), fr.mask);
        }

        if (collided) {
            result.record.outcome = RunOutcome::collision;
            const auto kinds =
                contact_kinds({robot.pose.x, robot.pose.y}, scenario.world, robot.clock, cfg.robot);
            for (MaterialKind kind : kinds)
                if (kind == MaterialKind::transparent) result.transparent_collision = true;
            log += detail::format_log_line(t + period, robot.pose, robot.velocity, "collision");
            break;
        }
        log += detail::format_log_line(t + period, robot.pose, robot.velocity, event);
    }

    if (!std::isfinite(result.record.min_clearance)) result.record.min_clearance = 0.0;

    detail::write_text_file(out_dir / "trajectory.log", log);
    detail::write_text_file(out_dir / "versions.txt", std::string(kVersionBanner) + "\n");

    nlohmann::json record{{"outcome", to_string(result.record.outcome)},
                          {"time_to_goal", result.record.time_to_goal},
                          {"min_clearance", result.record.min_clearance},
                          {"freeze_duration", result.record.freeze_duration},
                          {"frames", result.frames},
                          {"sim_time", result.sim_time},
                          {"transparent_collision", result.transparent_collision},
                          {"seed", seed},
                          {"scenario", scenario.name}};
    detail::write_text_file(out_dir / "record.json", record.dump(2) + "\n");
    detail::write_text_file(out_dir / "config.json", config_to_json(cfg).dump(2) + "\n");
    if (!opts.scene_source_path.empty()) {
        std::error_code ec;
        std::filesystem::copy_file(opts.scene_source_path, out_dir / "scene.json",
                                   std::filesystem::copy_options::overwrite_existing, ec);
    }
    if (opts.dump_frames) write_frames((out_dir / "frames.txt").string(), dumped_frames);

    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
}

struct ReplayOptions {
    std::string out_dir;
    bool accumulate = false;
    bool dump_grids = false;
};

struct ReplayResult {
    std::vector<Scores> per_frame;
    Scores final_map; // accumulated map vs final ground truth
    std::string csv_path;
};

/// Detection evaluation over a recorded frame stream against the scene's
/// ground truth. Scores the per-frame TON mask (or the accumulated mask) on
/// the ROI window around each recorded pose.
inline ReplayResult replay_detection(const std::vector<PointCloudFrame>& frames,
                                     const World& gt_world, const PipelineConfig& cfg,
                                     const ReplayOptions& opts)
{
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(opts.out_dir);
    if (opts.dump_grids) fs::create_directories(fs::path(opts.out_dir) / "grids");

    const GridSpec roi_spec{cfg.roi_m, cfg.grid.s};
    TonHistory history(opts.accumulate ? std::max(cfg.t_past, 1) : 0);

    std::string csv = "granularity,frame,timestamp,tp,fp,fn,tn,miou,pa,f1,mae\n";
    ReplayResult result;

    TonMask last_pred(roi_spec);
    BinaryGrid last_gt(roi_spec);
    int index = 0;
    for (const PointCloudFrame& frame : frames) {
        const MultiLayerIntensityMap layers = build_layers(frame, cfg.grid, cfg.layers);
        const RoiView roi = extract_roi(layers, cfg.roi_m);
        const TonMask mask = denoise(apply_condition(roi, cfg.ton), cfg.ton);

        const Pose2D pose{frame.robot_pose.dx, frame.robot_pose.dy, frame.robot_pose.angle};
        TonMask pred = mask;
        if (opts.accumulate) {
            pred = accumulate_ton_mask(history, mask, frame.robot_pose);
            history.push(mask, frame.robot_pose, frame.timestamp);
        }
        const BinaryGrid gt = ground_truth_grid(gt_world, roi_spec, pose);

        const Scores s = scores(confusion(pred, gt));
        result.per_frame.push_back(s);
        char row[256];
        std::snprintf(row, sizeof(row), "frame,%d,%.6f,%llu,%llu,%llu,%llu,%.6f,%.6f,%.6f,%.6f\n",
                      index, frame.timestamp,
                      static_cast<unsigned long long>(confusion(pred, gt).tp),
                      static_cast<unsigned long long>(confusion(pred, gt).fp),
                      static_cast<unsigned long long>(confusion(pred, gt).fn),
                      static_cast<unsigned long long>(confusion(pred, gt).tn), s.miou, s.pa, s.f1,
                      s.mae);
        csv += row;

        if (opts.dump_grids) {
            char name[64];
            std::snprintf(name, sizeof(name), "frame_%05d_pred.pgm", index);
            write_pgm((fs::path(opts.out_dir) / "grids" / name).string(), pred);
            std::snprintf(name, sizeof(name), "frame_%05d_gt.pgm", index);
            write_pgm((fs::path(opts.out_dir) / "grids" / name).string(), gt);
        }
        last_pred = pred;
        last_gt = gt;
        ++index;
    }

    if (index > 0) {
        result.final_map = scores(confusion(last_pred, last_gt));
        const ConfusionCounts c = confusion(last_pred, last_gt);
        char row[256];
        std::snprintf(row, sizeof(row), "map,%d,%.6f,%llu,%llu,%llu,%llu,%.6f,%.6f,%.6f,%.6f\n",
                      index - 1, frames.back().timestamp, static_cast<unsigned long long>(c.tp),
                      static_cast<unsigned long long>(c.fp), static_cast<unsigned long long>(c.fn),
                      static_cast<unsigned long long>(c.tn), result.final_map.miou,
                      result.final_map.pa, result.final_map.f1, result.final_map.mae);
        csv += row;
    }

    const fs::path csv_path = fs::path(opts.out_dir) / "metrics.csv";
    detail::write_text_file(csv_path, csv);
    result.csv_path = csv_path.string();
    return result;
}

struct BenchReport {
    int points_per_frame = 0;
    int frames = 0;
    double perception_mean_ms = 0.0;
    double perception_p99_ms = 0.0;
    double perception_hz = 0.0;
    double cycle_mean_ms = 0.0;
    double cycle_p99_ms = 0.0;
    double cycle_hz = 0.0;
};

namespace detail {

/// Synthetic bench world: a closed box room with one glass panel. Wall
/// height extents are padded so every beam returns.
inline World bench_world()
{
    World world;
    MaterialModel wall{MaterialKind::opaque_diffuse};
    MaterialModel glass{MaterialKind::transparent, 120.0, 5.0, 0.95, 20.0};

    ObstaclePrimitive room;
    room.shape = ObstaclePrimitive::Shape::polyline;
    room.points = {{-4, -4}, {4, -4}, {4, 4}, {-4, 4}, {-4, -4}};
    room.z_min = -3.0;
    room.z_max = 4.0;
    room.material = wall;
    world.obstacles.push_back(room);

    ObstaclePrimitive panel;
    panel.shape = ObstaclePrimitive::Shape::polyline;
    panel.points = {{2.0, -1.5}, {2.0, 1.5}};
    panel.z_min = 0.0;
    panel.z_max = 2.0;
    panel.material = glass;
    world.obstacles.push_back(panel);
    return world;
}

} // namespace detail

/// Measures steady-state perception latency (build_layers through
/// compose_nav_map) and the full cycle including the planner, on one
/// representative frame replayed n_frames times.
inline BenchReport bench(const PipelineConfig& cfg, int n_frames)
{
    if (n_frames < 100) throw std::invalid_argument("bench: need n_frames >= 100");
    cfg.validate();

    const World world = detail::bench_world();
    const PointCloudFrame frame = scan({0, 0, 0}, cfg.lidar, world, 0.0, cfg.layers.i_max);

    BenchReport report;
    report.points_per_frame = static_cast<int>(frame.points.size());
    report.frames = n_frames;

    std::vector<double> perception_ms(n_frames);
    std::vector<double> cycle_ms(n_frames);
    const Vec2 goal{4.0, 0.0};

    for (int i = 0; i < n_frames; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const FrameResult fr = process_frame(frame, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        const auto candidates = dynamic_window({0.3, 0.0}, cfg.robot, cfg.planner.window_dt,
                                               cfg.planner.n_v, cfg.planner.n_omega);
        const PlanResult plan =
            select_velocity(candidates, fr.nav, goal, cfg.planner.weights, cfg.robot,
                            cfg.planner.horizon, cfg.planner.dt, cfg.grid);
        (void)plan;
        const auto t2 = std::chrono::steady_clock::now();
        perception_ms[i] = std::chrono::duration<double, std::milli>(t1 - t0).count();
        cycle_ms[i] = std::chrono::duration<double, std::milli>(t2 - t0).count();
    }

    const auto summarize = [](std::vector<double>& ms, double& mean, double& p99, double& hz) {
        double sum = 0.0;
        for (double v : ms) sum += v;
        mean = sum / static_cast<double>(ms.size());
        std::sort(ms.begin(), ms.end());
        p99 = ms[static_cast<std::size_t>(0.99 * (ms.size() - 1))];
        hz = mean > 0 ? 1000.0 / mean : 0.0;
    };
    summarize(perception_ms, report.perception_mean_ms, report.perception_p99_ms,
              report.perception_hz);
    summarize(cycle_ms, report.cycle_mean_ms, report.cycle_p99_ms, report.cycle_hz);
    return report;
}

} // namespace topgn
