#include <cstdio>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "topgn/topgn.hpp"

namespace fs = std::filesystem;
using namespace topgn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRunFailed = 3;

struct CommonOpts {
    std::string scene_path;
    std::string config_path;
    std::string out_dir;
};

PipelineConfig profile_by_name(const std::string& name)
{
    if (name == "appendix") return appendix_profile();
    if (name == "section5a" || name.empty()) return section_profile();
    throw SceneError("unknown profile '" + name + "' (expected section5a or appendix)");
}

int cmd_run(const CommonOpts& common, std::uint64_t seed, int runs, int jobs, bool dump_grids,
            bool dump_frames, bool strict)
{
    Scenario scenario = load_scenario(common.scene_path);
    if (!common.config_path.empty()) apply_config_file(common.config_path, scenario.config);

    std::vector<RunResult> results(runs);
    std::vector<std::thread> workers;
    std::mutex failure_mutex;
    std::vector<std::string> failures;

    const auto run_one = [&](int index) {
        RunOptions opts;
        opts.out_dir = runs == 1 ? common.out_dir
                                 : (fs::path(common.out_dir) / ("run_" + std::to_string(index)))
                                       .string();
        opts.dump_grids = dump_grids;
        opts.dump_frames = dump_frames;
        opts.scene_source_path = common.scene_path;
        try {
            results[index] = run_scenario(scenario, seed + index, opts);
        } catch (const std::exception& e) {
            std::scoped_lock lock(failure_mutex);
            failures.push_back(e.what());
        }
    };

    if (jobs <= 1 || runs == 1) {
        for (int i = 0; i < runs; ++i) run_one(i);
    } else {
        std::size_t next = 0;
        std::mutex next_mutex;
        for (int w = 0; w < std::min(jobs, runs); ++w)
            workers.emplace_back([&] {
                while (true) {
                    std::size_t index;
                    {
                        std::scoped_lock lock(next_mutex);
                        if (next >= results.size()) return;
                        index = next++;
                    }
                    run_one(static_cast<int>(index));
                }
            });
        for (auto& t : workers) t.join();
    }

    for (const std::string& what : failures) std::fprintf(stderr, "error: %s\n", what.c_str());
    if (!failures.empty()) return kExitConfigError;

    int collisions = 0;
    std::vector<RunRecord> records;
    for (int i = 0; i < runs; ++i) {
        const RunResult& r = results[i];
        records.push_back(r.record);
        if (r.record.outcome == RunOutcome::collision) ++collisions;
        std::printf("run %d seed %llu: %s (t=%.1fs, min_clearance=%.3fm, freeze=%.1fs)\n", i,
                    static_cast<unsigned long long>(seed + i), to_string(r.record.outcome),
                    r.record.outcome == RunOutcome::success ? r.record.time_to_goal : r.sim_time,
                    r.record.min_clearance, r.record.freeze_duration);
    }
    std::printf("success rate: %.0f%% over %d run(s)\n", aggregate_runs(records), runs);

    if (strict && collisions > 0) return kExitRunFailed;
    return kExitOk;
}

int cmd_replay(const CommonOpts& common, const std::string& frames_path,
               const std::string& gt_dir, bool accumulate, bool dump_grids)
{
    PipelineConfig cfg = section_profile();
    World gt_world;
    bool have_world = false;
    if (!common.scene_path.empty()) {
        Scenario scenario = load_scenario(common.scene_path);
        cfg = scenario.config;
        gt_world = scenario.world;
        have_world = true;
    }
    if (!common.config_path.empty()) apply_config_file(common.config_path, cfg);

    const auto frames = read_frames(frames_path);
    if (frames.empty()) {
        std::fprintf(stderr, "error: %s contains no frames\n", frames_path.c_str());
        return kExitConfigError;
    }

    if (have_world && gt_dir.empty()) {
        ReplayOptions opts{common.out_dir, accumulate, dump_grids};
        const auto result = replay_detection(frames, gt_world, cfg, opts);
        std::printf("replayed %zu frames; final map: f1=%.4f mae=%.4f miou=%.4f pa=%.4f\n",
                    result.per_frame.size(), result.final_map.f1, result.final_map.mae,
                    result.final_map.miou, result.final_map.pa);
        std::printf("metrics: %s\n", result.csv_path.c_str());
        return kExitOk;
    }

    // ground truth supplied as one PGM mask per frame
    fs::create_directories(common.out_dir);
    const GridSpec roi{cfg.roi_m, cfg.grid.s};
    TonHistory history(accumulate ? std::max(cfg.t_past, 1) : 0);
    std::string csv = "granularity,frame,timestamp,tp,fp,fn,tn,miou,pa,f1,mae\n";
    int index = 0;
    for (const PointCloudFrame& frame : frames) {
        const auto layers = build_layers(frame, cfg.grid, cfg.layers);
        const RoiView roi_view = extract_roi(layers, cfg.roi_m);
        TonMask mask = denoise(apply_condition(roi_view, cfg.ton), cfg.ton);
        if (accumulate) {
            const TonMask merged = accumulate_ton_mask(history, mask, frame.robot_pose);
            history.push(mask, frame.robot_pose, frame.timestamp);
            mask = merged;
        }
        char name[64];
        std::snprintf(name, sizeof(name), "gt_%05d.pgm", index);
        const auto gt_raw = read_pgm((fs::path(gt_dir) / name).string(), cfg.grid.s);
        BinaryGrid gt(roi);
        if (gt_raw.side() != cfg.roi_m) {
            std::fprintf(stderr, "error: %s: expected %dx%d mask\n", name, cfg.roi_m, cfg.roi_m);
            return kExitConfigError;
        }
        for (std::size_t i = 0; i < gt.values().size(); ++i)
            gt.values()[i] = gt_raw.values()[i] > 0 ? 1 : 0;

        const Scores s = scores(confusion(mask, gt));
        char row[192];
        std::snprintf(row, sizeof(row), "frame,%d,%.6f,,,,,%.6f,%.6f,%.6f,%.6f\n", index,
                      frame.timestamp, s.miou, s.pa, s.f1, s.mae);
        csv += row;
        ++index;
    }
    std::ofstream out(fs::path(common.out_dir) / "metrics.csv");
    out << csv;
    std::printf("replayed %d frames against %s\n", index, gt_dir.c_str());
    return kExitOk;
}

int cmd_map(const CommonOpts& common, const std::string& frames_path)
{
    PipelineConfig cfg = section_profile();
    World gt_world;
    bool have_world = false;
    if (!common.scene_path.empty()) {
        Scenario scenario = load_scenario(common.scene_path);
        cfg = scenario.config;
        gt_world = scenario.world;
        have_world = true;
    }
    if (!common.config_path.empty()) apply_config_file(common.config_path, cfg);

    const auto frames = read_frames(frames_path);
    if (frames.empty()) {
        std::fprintf(stderr, "error: %s contains no frames\n", frames_path.c_str());
        return kExitConfigError;
    }

    fs::create_directories(common.out_dir);
    TonHistory history(static_cast<int>(frames.size())); // a map spans the whole walk-through
    MultiLayerIntensityMap last_layers;
    TonMask last_mask;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        last_layers = build_layers(frames[i], cfg.grid, cfg.layers);
        const RoiView roi = extract_roi(last_layers, cfg.roi_m);
        last_mask = denoise(apply_condition(roi, cfg.ton), cfg.ton);
        if (i + 1 < frames.size())
            history.push(last_mask, frames[i].robot_pose, frames[i].timestamp);
    }
    const auto& final_frame = frames.back();
    const auto mapping =
        accumulate_mapping(last_layers, history, final_frame.robot_pose, cfg.mapping_weight);
    const auto accumulated = accumulate_ton_mask(history, last_mask, final_frame.robot_pose);

    write_pgm((fs::path(common.out_dir) / "mapping.pgm").string(), mapping);
    write_pgm((fs::path(common.out_dir) / "transparent_map.pgm").string(), accumulated);
    std::printf("accumulated %zu frames into %s\n", frames.size(), common.out_dir.c_str());

    if (have_world) {
        const Pose2D pose{final_frame.robot_pose.dx, final_frame.robot_pose.dy,
                          final_frame.robot_pose.angle};
        const auto gt = ground_truth_grid(gt_world, GridSpec{cfg.roi_m, cfg.grid.s}, pose);
        const Scores s = scores(confusion(accumulated, gt));
        std::printf("final transparent map vs scene: f1=%.4f mae=%.4f\n", s.f1, s.mae);
    }
    return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& profile, int n_frames)
{
    PipelineConfig cfg = profile_by_name(profile);
    if (!config_path.empty()) apply_config_file(config_path, cfg);

    const BenchReport report = bench(cfg, n_frames);
    std::printf("frames: %d, points/frame: %d\n", report.frames, report.points_per_frame);
    std::printf("perception: mean=%.3fms p99=%.3fms rate=%.1fHz\n", report.perception_mean_ms,
                report.perception_p99_ms, report.perception_hz);
    std::printf("full cycle: mean=%.3fms p99=%.3fms rate=%.1fHz\n", report.cycle_mean_ms,
                report.cycle_p99_ms, report.cycle_hz);
    return kExitOk;
}

int cmd_render(const CommonOpts& common, std::vector<double> pose_args)
{
    Scenario scenario = load_scenario(common.scene_path);
    if (!common.config_path.empty()) apply_config_file(common.config_path, scenario.config);
    const PipelineConfig& cfg = scenario.config;

    Pose2D pose = scenario.start;
    if (pose_args.size() == 3) pose = {pose_args[0], pose_args[1], pose_args[2]};

    fs::create_directories(common.out_dir);
    const auto frame = scan(pose, cfg.lidar, scenario.world, 0.0, cfg.layers.i_max);
    const auto fr = process_frame(frame, cfg);

    write_pgm((fs::path(common.out_dir) / "low.pgm").string(), fr.layers.low);
    write_pgm((fs::path(common.out_dir) / "mid.pgm").string(), fr.layers.mid);
    write_pgm((fs::path(common.out_dir) / "high.pgm").string(), fr.layers.high);
    write_pgm((fs::path(common.out_dir) / "mask.pgm").string(), fr.mask);
    write_pgm((fs::path(common.out_dir) / "extrap.pgm").string(), fr.extrap.mask);
    write_pgm((fs::path(common.out_dir) / "nav.pgm").string(), fr.nav.grid);
    write_pgm((fs::path(common.out_dir) / "gt_transparent.pgm").string(),
              ground_truth_grid(scenario.world, cfg.grid, pose));
    std::printf("rendered %zu points into %s\n", frame.points.size(), common.out_dir.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"transparent-obstacle detection, extrapolation, and navigation pipeline"};
    app.require_subcommand(1);

    CommonOpts common;
    std::uint64_t seed = 1;
    int runs = 1;
    int jobs = 1;
    bool dump_grids = false;
    bool dump_frames = false;
    bool strict = false;
    bool accumulate = false;
    std::string frames_path;
    std::string gt_dir;
    std::string profile = "section5a";
    int bench_frames = 200;
    std::vector<double> pose_args;

    auto* run = app.add_subcommand("run", "closed-loop scenario run(s)");
    run->add_option("--scene", common.scene_path, "scene file")->required();
    run->add_option("--out", common.out_dir, "output directory")->required();
    run->add_option("--config", common.config_path, "config overlay file");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--runs", runs, "number of seeded runs")->check(CLI::PositiveNumber);
    run->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
    run->add_flag("--dump-grids", dump_grids, "write per-frame PGM grids");
    run->add_flag("--dump-frames", dump_frames, "write the scanned frames");
    run->add_flag("--strict", strict, "exit nonzero on any collision");

    auto* replay = app.add_subcommand("replay", "detection evaluation over recorded frames");
    replay->add_option("--frames", frames_path, "frames file")->required();
    replay->add_option("--scene", common.scene_path, "scene supplying ground truth");
    replay->add_option("--gt-dir", gt_dir, "directory of gt_%05d.pgm masks");
    replay->add_option("--out", common.out_dir, "output directory")->required();
    replay->add_option("--config", common.config_path, "config overlay file");
    replay->add_flag("--accumulate", accumulate, "accumulate TON masks over time");
    replay->add_flag("--dump-grids", dump_grids, "write per-frame PGM grids");

    auto* map_cmd = app.add_subcommand("map", "accumulate a frame log into a map");
    map_cmd->add_option("--frames", frames_path, "frames file")->required();
    map_cmd->add_option("--out", common.out_dir, "output directory")->required();
    map_cmd->add_option("--scene", common.scene_path, "scene for config and scoring");
    map_cmd->add_option("--config", common.config_path, "config overlay file");

    auto* bench_cmd = app.add_subcommand("bench", "measure pipeline throughput");
    bench_cmd->add_option("--frames", bench_frames, "iterations")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--config", common.config_path, "config overlay file");
    bench_cmd->add_option("--profile", profile, "parameter profile (section5a | appendix)");

    auto* render = app.add_subcommand("render", "render grids for one pose of a scene");
    render->add_option("--scene", common.scene_path, "scene file")->required();
    render->add_option("--out", common.out_dir, "output directory")->required();
    render->add_option("--config", common.config_path, "config overlay file");
    render->add_option("--pose", pose_args, "x y theta (default: scene start)")->expected(3);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(common, seed, runs, jobs, dump_grids, dump_frames, strict);
        if (replay->parsed()) {
            if (common.scene_path.empty() && gt_dir.empty()) {
                std::fprintf(stderr, "error: replay needs --scene or --gt-dir\n");
                return kExitConfigError;
            }
            return cmd_replay(common, frames_path, gt_dir, accumulate, dump_grids);
        }
        if (map_cmd->parsed()) return cmd_map(common, frames_path);
        if (bench_cmd->parsed()) return cmd_bench(common.config_path, profile, bench_frames);
        if (render->parsed()) return cmd_render(common, pose_args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfigError;
    }
    return kExitOk;
}
