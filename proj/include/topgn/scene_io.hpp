#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "topgn/config.hpp"
#include "topgn/simulator.hpp"

namespace topgn {

struct SceneError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A simulation scenario: the world, the task, and the pipeline parameters.
struct Scenario {
    std::string name = "scene";
    World world;
    Pose2D start{};
    Vec2 goal{};
    double start_jitter_xy = 0.0;    // per-seed start randomization, meters
    double start_jitter_theta = 0.0; // radians
    PipelineConfig config{};
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t byte)
{
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

inline Vec2 parse_vec2(const nlohmann::json& j, const std::string& what)
{
    if (!j.is_array() || j.size() != 2) throw SceneError(what + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline MaterialModel parse_material(const nlohmann::json& j, const std::string& name)
{
    MaterialModel mat;
    const std::string kind = j.value("kind", "opaque_diffuse");
    if (kind == "opaque_diffuse")
        mat.kind = MaterialKind::opaque_diffuse;
    else if (kind == "transparent")
        mat.kind = MaterialKind::transparent;
    else if (kind == "mirror")
        mat.kind = MaterialKind::mirror;
    else
        throw SceneError("material '" + name + "': unknown kind '" + kind + "'");
    mat.peak_intensity = j.value("peak_intensity", mat.peak_intensity);
    mat.angular_sigma_deg = j.value("angular_sigma", mat.angular_sigma_deg);
    mat.transmittance = j.value("transmittance", mat.transmittance);
    mat.detection_floor = j.value("detection_floor", mat.detection_floor);
    try {
        mat.validate();
    } catch (const std::exception& e) {
        throw SceneError("material '" + name + "': " + e.what());
    }
    return mat;
}

inline void parse_config_overrides(const nlohmann::json& j, PipelineConfig& cfg)
{
    if (j.contains("grid")) {
        cfg.grid.n = j["grid"].value("n", cfg.grid.n);
        cfg.grid.s = j["grid"].value("s", cfg.grid.s);
    }
    cfg.roi_m = j.value("roi_m", cfg.roi_m);
    if (j.contains("layers")) {
        const auto& l = j["layers"];
        cfg.layers.h_lid = l.value("h_lid", cfg.layers.h_lid);
        cfg.layers.delta = l.value("delta", cfg.layers.delta);
        cfg.layers.i_max = l.value("i_max", cfg.layers.i_max);
        const std::string norm = l.value("normalization", std::string("mean"));
        if (norm == "mean")
            cfg.layers.normalization = Normalization::mean;
        else if (norm == "sum")
            cfg.layers.normalization = Normalization::sum;
        else if (norm == "sum_over_s2")
            cfg.layers.normalization = Normalization::sum_over_s2;
        else
            throw SceneError("layers.normalization: unknown mode '" + norm + "'");
    }
    if (j.contains("ton")) {
        const auto& t = j["ton"];
        cfg.ton.r_low = t.value("r_low", cfg.ton.r_low);
        cfg.ton.r_high = t.value("r_high", cfg.ton.r_high);
        cfg.ton.suppression_ratio = t.value("suppression_ratio", cfg.ton.suppression_ratio);
        cfg.ton.min_contour_area = t.value("min_contour_area", cfg.ton.min_contour_area);
    }
    if (j.contains("robot")) {
        const auto& r = j["robot"];
        cfg.robot.r_rob = r.value("r_rob", cfg.robot.r_rob);
        cfg.robot.h_rob = r.value("h_rob", cfg.robot.h_rob);
        cfg.robot.v_max = r.value("v_max", cfg.robot.v_max);
        cfg.robot.omega_max = r.value("omega_max", cfg.robot.omega_max);
        cfg.robot.a_v = r.value("a_v", cfg.robot.a_v);
        cfg.robot.a_omega = r.value("a_omega", cfg.robot.a_omega);
        cfg.robot.d_thresh = r.value("d_thresh", RobotConfig::default_d_thresh(cfg.robot.r_rob));
    }
    if (j.contains("lidar")) {
        const auto& l = j["lidar"];
        cfg.lidar.channels = l.value("channels", cfg.lidar.channels);
        if (l.contains("vertical_fov")) {
            cfg.lidar.vertical_fov_min_deg = l["vertical_fov"][0].get<double>();
            cfg.lidar.vertical_fov_max_deg = l["vertical_fov"][1].get<double>();
        }
        cfg.lidar.horizontal_fov_deg = l.value("horizontal_fov", cfg.lidar.horizontal_fov_deg);
        cfg.lidar.azimuth_step_deg = l.value("azimuth_step", cfg.lidar.azimuth_step_deg);
        cfg.lidar.max_range = l.value("max_range", cfg.lidar.max_range);
        cfg.lidar.min_range = l.value("min_range", cfg.lidar.min_range);
        cfg.lidar.mount_height = l.value("mount_height", cfg.layers.h_lid);
    }
    if (j.contains("planner")) {
        const auto& p = j["planner"];
        if (p.contains("weights")) {
            cfg.planner.weights.heading = p["weights"][0].get<double>();
            cfg.planner.weights.obstacle = p["weights"][1].get<double>();
            cfg.planner.weights.velocity = p["weights"][2].get<double>();
        }
        cfg.planner.n_v = p.value("n_v", cfg.planner.n_v);
        cfg.planner.n_omega = p.value("n_omega", cfg.planner.n_omega);
        cfg.planner.window_dt = p.value("window_dt", cfg.planner.window_dt);
        cfg.planner.horizon = p.value("horizon", cfg.planner.horizon);
        cfg.planner.dt = p.value("dt", cfg.planner.dt);
    }
    cfg.t_past = j.value("t_past", cfg.t_past);
    cfg.frame_rate = j.value("frame_rate", cfg.frame_rate);
    cfg.occupancy_threshold = j.value("occupancy_threshold", cfg.occupancy_threshold);
    cfg.extrap_weight = j.value("extrap_weight", cfg.extrap_weight);
    cfg.mapping_weight = j.value("mapping_weight", cfg.mapping_weight);
    cfg.freeze_timeout = j.value("freeze_timeout", cfg.freeze_timeout);
    cfg.scenario_timeout = j.value("scenario_timeout", cfg.scenario_timeout);
    cfg.odom_noise_std_xy = j.value("odom_noise_std_xy", cfg.odom_noise_std_xy);
    cfg.odom_noise_std_theta = j.value("odom_noise_std_theta", cfg.odom_noise_std_theta);
    cfg.seed = j.value("seed", cfg.seed);
}

} // namespace detail

inline nlohmann::json parse_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw SceneError("cannot open: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SceneError(path + ":" + std::to_string(detail::line_of_offset(text, e.byte)) + ": " +
                         e.what());
    }
}

inline Scenario load_scenario(const std::string& path)
{
    const nlohmann::json j = parse_json_file(path);

    if (!j.contains("scene_version") || j["scene_version"].get<int>() != 1)
        throw SceneError(path + ": missing or unsupported scene_version (expected 1)");

    Scenario scn;
    scn.name = j.value("name", std::string("scene"));

    if (j.contains("config")) detail::parse_config_overrides(j["config"], scn.config);

    std::map<std::string, MaterialModel> materials;
    if (j.contains("materials"))
        for (const auto& [name, jm] : j["materials"].items())
            materials[name] = detail::parse_material(jm, name);

    const auto resolve_material = [&](const nlohmann::json& jm,
                                      const std::string& ctx) -> std::pair<MaterialModel, std::string> {
        if (jm.is_string()) {
            const std::string name = jm.get<std::string>();
            const auto it = materials.find(name);
            if (it == materials.end()) throw SceneError(ctx + ": unknown material '" + name + "'");
            return {it->second, name};
        }
        return {detail::parse_material(jm, ctx), ""};
    };

    if (j.contains("obstacles")) {
        int index = 0;
        for (const auto& jo : j["obstacles"]) {
            const std::string ctx = "obstacles[" + std::to_string(index++) + "]";
            ObstaclePrimitive prim;
            const std::string shape = jo.value("shape", std::string("polyline"));
            if (shape == "polyline") {
                prim.shape = ObstaclePrimitive::Shape::polyline;
                if (!jo.contains("points")) throw SceneError(ctx + ": polyline needs points");
                for (const auto& jp : jo["points"])
                    prim.points.push_back(detail::parse_vec2(jp, ctx + ".points"));
            } else if (shape == "arc") {
                prim.shape = ObstaclePrimitive::Shape::arc;
                prim.center = detail::parse_vec2(jo.at("center"), ctx + ".center");
                prim.radius = jo.at("radius").get<double>();
                const double a0 = deg_to_rad(jo.at("angles")[0].get<double>());
                const double a1 = deg_to_rad(jo.at("angles")[1].get<double>());
                prim.angle_begin = a0;
                double sweep = std::fmod(a1 - a0, 2.0 * kPi);
                if (sweep <= 0) sweep += 2.0 * kPi;
                prim.sweep = sweep;
            } else {
                throw SceneError(ctx + ": unknown shape '" + shape + "'");
            }
            if (jo.contains("z")) {
                prim.z_min = jo["z"][0].get<double>();
                prim.z_max = jo["z"][1].get<double>();
            }
            auto [mat, name] = resolve_material(jo.at("material"), ctx);
            prim.material = mat;
            prim.material_name = name;
            try {
                prim.validate();
            } catch (const std::exception& e) {
                throw SceneError(ctx + ": " + e.what());
            }
            scn.world.obstacles.push_back(std::move(prim));
        }
    }

    if (j.contains("moving")) {
        int index = 0;
        for (const auto& jm : j["moving"]) {
            const std::string ctx = "moving[" + std::to_string(index++) + "]";
            MovingDisc disc;
            disc.radius = jm.value("radius", disc.radius);
            if (jm.contains("z")) {
                disc.z_min = jm["z"][0].get<double>();
                disc.z_max = jm["z"][1].get<double>();
            }
            disc.speed = jm.value("speed", disc.speed);
            if (!jm.contains("waypoints")) throw SceneError(ctx + ": needs waypoints");
            for (const auto& jw : jm["waypoints"])
                disc.waypoints.push_back(detail::parse_vec2(jw, ctx + ".waypoints"));
            if (jm.contains("material"))
                disc.material = resolve_material(jm["material"], ctx).first;
            try {
                disc.validate();
            } catch (const std::exception& e) {
                throw SceneError(ctx + ": " + e.what());
            }
            scn.world.moving.push_back(std::move(disc));
        }
    }

    scn.world.ref_distance = j.value("ref_distance", scn.world.ref_distance);

    if (j.contains("start")) {
        const auto& js = j["start"];
        if (!js.is_array() || js.size() != 3) throw SceneError("start: expected [x, y, theta]");
        scn.start = {js[0].get<double>(), js[1].get<double>(), js[2].get<double>()};
    }
    if (j.contains("goal")) scn.goal = detail::parse_vec2(j["goal"], "goal");
    if (j.contains("start_jitter")) {
        scn.start_jitter_xy = j["start_jitter"].value("pos", 0.0);
        scn.start_jitter_theta = j["start_jitter"].value("theta", 0.0);
    }

    try {
        scn.config.validate();
    } catch (const std::exception& e) {
        throw SceneError(path + ": config: " + e.what());
    }
    return scn;
}

/// Config overlay file: a bare JSON object with the same keys as a scene's
/// "config" section.
inline void apply_config_file(const std::string& path, PipelineConfig& cfg)
{
    const nlohmann::json j = parse_json_file(path);
    detail::parse_config_overrides(j, cfg);
    cfg.validate();
}

inline nlohmann::json config_to_json(const PipelineConfig& cfg)
{
    const char* norm = cfg.layers.normalization == Normalization::mean
                           ? "mean"
                           : (cfg.layers.normalization == Normalization::sum ? "sum" : "sum_over_s2");
    return nlohmann::json{
        {"grid", {{"n", cfg.grid.n}, {"s", cfg.grid.s}}},
        {"roi_m", cfg.roi_m},
        {"layers",
         {{"h_lid", cfg.layers.h_lid},
          {"delta", cfg.layers.delta},
          {"i_max", cfg.layers.i_max},
          {"normalization", norm}}},
        {"ton",
         {{"r_low", cfg.ton.r_low},
          {"r_high", cfg.ton.r_high},
          {"suppression_ratio", cfg.ton.suppression_ratio},
          {"min_contour_area", cfg.ton.min_contour_area}}},
        {"robot",
         {{"r_rob", cfg.robot.r_rob},
          {"h_rob", cfg.robot.h_rob},
          {"v_max", cfg.robot.v_max},
          {"omega_max", cfg.robot.omega_max},
          {"a_v", cfg.robot.a_v},
          {"a_omega", cfg.robot.a_omega},
          {"d_thresh", cfg.robot.d_thresh}}},
        {"lidar",
         {{"channels", cfg.lidar.channels},
          {"vertical_fov", {cfg.lidar.vertical_fov_min_deg, cfg.lidar.vertical_fov_max_deg}},
          {"horizontal_fov", cfg.lidar.horizontal_fov_deg},
          {"azimuth_step", cfg.lidar.azimuth_step_deg},
          {"max_range", cfg.lidar.max_range},
          {"min_range", cfg.lidar.min_range},
          {"mount_height", cfg.lidar.mount_height}}},
        {"planner",
         {{"weights",
           {cfg.planner.weights.heading, cfg.planner.weights.obstacle, cfg.planner.weights.velocity}},
          {"n_v", cfg.planner.n_v},
          {"n_omega", cfg.planner.n_omega},
          {"window_dt", cfg.planner.window_dt},
          {"horizon", cfg.planner.horizon},
          {"dt", cfg.planner.dt}}},
        {"t_past", cfg.t_past},
        {"frame_rate", cfg.frame_rate},
        {"occupancy_threshold", cfg.occupancy_threshold},
        {"extrap_weight", cfg.extrap_weight},
        {"mapping_weight", cfg.mapping_weight},
        {"freeze_timeout", cfg.freeze_timeout},
        {"scenario_timeout", cfg.scenario_timeout},
        {"odom_noise_std_xy", cfg.odom_noise_std_xy},
        {"odom_noise_std_theta", cfg.odom_noise_std_theta},
        {"seed", cfg.seed}};
}

} // namespace topgn
