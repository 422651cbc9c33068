#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "topgn/geometry.hpp"
#include "topgn/grid.hpp"
#include "topgn/intensity_map.hpp"
#include "topgn/planner.hpp"

namespace topgn {

enum class MaterialKind { opaque_diffuse, transparent, mirror };

inline const char* to_string(MaterialKind k)
{
    switch (k) {
    case MaterialKind::opaque_diffuse: return "opaque_diffuse";
    case MaterialKind::transparent: return "transparent";
    default: return "mirror";
    }
}

/// Surface response model. Transparent and mirror returns follow a Gaussian
/// over the incidence angle (peak at 0 degrees); opaque surfaces return a
/// Lambertian-style cosine response at any angle.
struct MaterialModel {
    MaterialKind kind = MaterialKind::opaque_diffuse;
    double peak_intensity = 120.0;  // at 0 deg incidence, reference distance
    double angular_sigma_deg = 5.0; // Gaussian width (transparent/mirror)
    double transmittance = 0.95;    // transparent only
    double detection_floor = 20.0;  // returns weaker than this are not registered

    void validate() const
    {
        if (kind == MaterialKind::transparent && !(transmittance > 0.9))
            throw std::invalid_argument("MaterialModel: transparent transmittance must be > 0.9");
        if (angular_sigma_deg <= 0.0)
            throw std::invalid_argument("MaterialModel: angular_sigma must be > 0");
    }
};

struct ObstaclePrimitive {
    enum class Shape { polyline, arc };

    Shape shape = Shape::polyline;
    std::vector<Vec2> points; // polyline vertices (>= 2)
    Vec2 center{};            // arc
    double radius = 0.0;      // arc
    double angle_begin = 0.0; // arc, radians
    double sweep = 2.0 * kPi; // arc, CCW extent in (0, 2pi]
    double z_min = 0.0;
    double z_max = 2.0;
    MaterialModel material{};
    std::string material_name;

    void validate() const
    {
        if (z_max <= z_min) throw std::invalid_argument("ObstaclePrimitive: z_max must be > z_min");
        if (shape == Shape::polyline && points.size() < 2)
            throw std::invalid_argument("ObstaclePrimitive: polyline needs >= 2 vertices");
        if (shape == Shape::arc && (radius <= 0.0 || sweep <= 0.0 || sweep > 2.0 * kPi + 1e-9))
            throw std::invalid_argument("ObstaclePrimitive: arc needs radius > 0, sweep in (0, 2pi]");
        material.validate();
    }

    bool arc_contains(double angle) const
    {
        double rel = std::fmod(angle - angle_begin, 2.0 * kPi);
        if (rel < 0) rel += 2.0 * kPi;
        return rel <= sweep + 1e-12;
    }

    /// Distance from a point to the footprint curve.
    double footprint_distance(const Vec2& p) const
    {
        if (shape == Shape::polyline) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i + 1 < points.size(); ++i)
                best = std::min(best, point_segment_dist_sq(p, points[i], points[i + 1]));
            return std::sqrt(best);
        }
        const Vec2 rel = p - center;
        const double angle = std::atan2(rel.y, rel.x);
        if (arc_contains(angle)) return std::abs(rel.norm() - radius);
        const Vec2 e0 = center + Vec2{std::cos(angle_begin), std::sin(angle_begin)} * radius;
        const double end = angle_begin + sweep;
        const Vec2 e1 = center + Vec2{std::cos(end), std::sin(end)} * radius;
        return std::sqrt(std::min((p - e0).squared_norm(), (p - e1).squared_norm()));
    }
};

/// Scripted opaque disc moving at constant speed along waypoints, clamping
/// at the last one.
struct MovingDisc {
    double radius = 0.3;
    double z_min = 0.0;
    double z_max = 1.0;
    double speed = 0.5;
    std::vector<Vec2> waypoints;
    MaterialModel material{MaterialKind::opaque_diffuse};

    void validate() const
    {
        if (radius <= 0 || speed <= 0 || waypoints.empty())
            throw std::invalid_argument("MovingDisc: need radius, speed > 0 and waypoints");
    }

    Vec2 position(double t) const
    {
        double travel = speed * std::max(0.0, t);
        for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
            const double leg = (waypoints[i + 1] - waypoints[i]).norm();
            if (travel <= leg)
                return leg > 0 ? waypoints[i] + (waypoints[i + 1] - waypoints[i]) * (travel / leg)
                               : waypoints[i];
            travel -= leg;
        }
        return waypoints.back();
    }
};

struct World {
    std::vector<ObstaclePrimitive> obstacles;
    std::vector<MovingDisc> moving;
    double ref_distance = 1.0; // falloff reference, meters
};

struct LidarModel {
    int channels = 16;
    double vertical_fov_min_deg = -15.0;
    double vertical_fov_max_deg = 15.0;
    double horizontal_fov_deg = 360.0;
    double azimuth_step_deg = 0.2;
    double max_range = 30.0;
    double min_range = 0.3; // blind-spot radius
    double mount_height = 0.5;

    void validate() const
    {
        if (channels < 1 || azimuth_step_deg <= 0 || horizontal_fov_deg <= 0 ||
            max_range <= min_range || min_range < 0 || mount_height <= 0 ||
            vertical_fov_max_deg < vertical_fov_min_deg)
            throw std::invalid_argument("LidarModel: invalid geometry");
    }

    std::vector<double> channel_elevations_deg() const
    {
        std::vector<double> out;
        if (channels == 1) {
            out.push_back(0.5 * (vertical_fov_min_deg + vertical_fov_max_deg));
            return out;
        }
        for (int i = 0; i < channels; ++i)
            out.push_back(vertical_fov_min_deg + (vertical_fov_max_deg - vertical_fov_min_deg) *
                                                     static_cast<double>(i) / (channels - 1));
        return out;
    }
};

/// Checks that every height layer receives at least one beam at the standoff
/// distance, which the TON condition needs to reject opaque obstacles.
inline bool lidar_covers_layers(const LidarModel& lidar, const LayerConfig& layers,
                                double d_thresh)
{
    bool hit[3] = {false, false, false};
    for (double elev : lidar.channel_elevations_deg()) {
        const double z = lidar.mount_height + d_thresh * std::tan(deg_to_rad(elev));
        const int layer = layers.layer_of(z);
        if (layer >= 0) hit[layer] = true;
    }
    return hit[0] && hit[1] && hit[2];
}

struct RobotState {
    Pose2D pose{};
    VelocityPair velocity{};
    double clock = 0.0;
};

struct BeamReturn {
    Vec3 point;       // world frame
    double intensity; // clamped to [0, i_max]
    MaterialKind kind;
    double range; // path length, meters
};

namespace detail {

struct SurfaceHit {
    double t = 0.0;
    Vec2 normal{}; // horizontal unit normal (sign arbitrary)
    const MaterialModel* material = nullptr;
    double z_min = 0.0;
    double z_max = 0.0;
};

inline void ray_segment_hits(const Vec2& o, const Vec2& d, const Vec2& a, const Vec2& b,
                             const MaterialModel& mat, double z_min, double z_max,
                             std::vector<SurfaceHit>& hits)
{
    const Vec2 ab = b - a;
    const double denom = d.cross(ab);
    if (denom == 0.0) return; // parallel
    const Vec2 ao = a - o;
    const double t = ao.cross(ab) / denom;
    const double u = ao.cross(d) / denom;
    if (t <= 1e-9 || u < 0.0 || u > 1.0) return;
    hits.push_back({t, Vec2{-ab.y, ab.x}.normalized(), &mat, z_min, z_max});
}

inline void ray_circle_hits(const Vec2& o, const Vec2& d, const Vec2& center, double radius,
                            const ObstaclePrimitive* arc, const MaterialModel& mat, double z_min,
                            double z_max, std::vector<SurfaceHit>& hits)
{
    const Vec2 oc = o - center;
    const double a = d.squared_norm();
    if (a == 0.0) return;
    const double b = 2.0 * oc.dot(d);
    const double c = oc.squared_norm() - radius * radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return;
    const double sq = std::sqrt(disc);
    for (const double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
        if (t <= 1e-9) continue;
        const Vec2 p = o + d * t;
        if (arc != nullptr) {
            const double angle = std::atan2(p.y - center.y, p.x - center.x);
            if (!arc->arc_contains(angle)) continue;
        }
        hits.push_back({t, (p - center).normalized(), &mat, z_min, z_max});
    }
}

inline std::vector<SurfaceHit> gather_hits(const Vec3& origin, const Vec3& dir, const World& world,
                                           double time, double max_range)
{
    std::vector<SurfaceHit> hits;
    const Vec2 o = origin.xy();
    const Vec2 d = dir.xy();
    if (d.x == 0.0 && d.y == 0.0) return hits;

    for (const ObstaclePrimitive& prim : world.obstacles) {
        if (prim.shape == ObstaclePrimitive::Shape::polyline) {
            for (std::size_t i = 0; i + 1 < prim.points.size(); ++i)
                ray_segment_hits(o, d, prim.points[i], prim.points[i + 1], prim.material,
                                 prim.z_min, prim.z_max, hits);
        } else {
            ray_circle_hits(o, d, prim.center, prim.radius, &prim, prim.material, prim.z_min,
                            prim.z_max, hits);
        }
    }
    for (const MovingDisc& disc : world.moving)
        ray_circle_hits(o, d, disc.position(time), disc.radius, nullptr, disc.material, disc.z_min,
                        disc.z_max, hits);

    std::erase_if(hits, [&](const SurfaceHit& h) {
        if (h.t > max_range) return true;
        const double z = origin.z + h.t * dir.z;
        return z < h.z_min || z > h.z_max;
    });
    std::sort(hits.begin(), hits.end(),
              [](const SurfaceHit& a, const SurfaceHit& b) { return a.t < b.t; });
    return hits;
}

inline double incidence_deg(const Vec3& dir, const Vec2& normal)
{
    const double cos_inc =
        std::min(1.0, std::abs(dir.x * normal.x + dir.y * normal.y));
    return rad_to_deg(std::acos(cos_inc));
}

inline double gaussian_response(double incidence, double sigma_deg)
{
    return std::exp(-incidence * incidence / (2.0 * sigma_deg * sigma_deg));
}

} // namespace detail

/// Casts one beam. Opaque surfaces always return; transparent surfaces return
/// only when the Gaussian specular response clears the detection floor and
/// otherwise transmit; mirrors retro-return near normal incidence, else
/// bounce once and report the next surface (as a phantom along the original
/// ray). No surface in range gives no return.
inline std::optional<BeamReturn> cast_beam(const Vec3& origin, const Vec3& dir, const World& world,
                                           double time, double i_max, double max_range)
{
    const auto clamp_intensity = [i_max](double v) { return std::clamp(v, 0.0, i_max); };
    const double ref = world.ref_distance;

    Vec3 o = origin;
    Vec3 d = dir;
    double t_offset = 0.0;
    double attenuation = 1.0;
    bool bounced = false;

    for (int pass = 0; pass < 2; ++pass) {
        const auto hits = detail::gather_hits(o, d, world, time, max_range - t_offset);
        for (const detail::SurfaceHit& hit : hits) {
            const double dist = t_offset + hit.t;
            const double incidence = detail::incidence_deg(d, hit.normal);
            const double falloff = (ref / dist) * (ref / dist);
            const MaterialModel& mat = *hit.material;
            const double bounce_scale = bounced ? 0.9 : 1.0;
            const Vec3 report = origin + dir * dist;

            if (mat.kind == MaterialKind::opaque_diffuse) {
                const double cos_inc = std::cos(deg_to_rad(incidence));
                const double intensity =
                    clamp_intensity(i_max * cos_inc * falloff * attenuation * bounce_scale);
                return BeamReturn{report, intensity, MaterialKind::opaque_diffuse, dist};
            }
            if (mat.kind == MaterialKind::transparent) {
                const double intensity =
                    mat.peak_intensity * detail::gaussian_response(incidence, mat.angular_sigma_deg) *
                    falloff * attenuation * bounce_scale;
                if (bounced || intensity >= mat.detection_floor)
                    return BeamReturn{report, clamp_intensity(intensity),
                                      MaterialKind::transparent, dist};
                attenuation *= mat.transmittance;
                continue;
            }
            // mirror
            if (bounced) {
                const double cos_inc = std::cos(deg_to_rad(incidence));
                const double intensity = clamp_intensity(i_max * cos_inc * falloff * attenuation * 0.9);
                return BeamReturn{report, intensity, MaterialKind::mirror, dist};
            }
            const double retro =
                mat.peak_intensity * detail::gaussian_response(incidence, mat.angular_sigma_deg) *
                falloff * attenuation;
            if (retro >= mat.detection_floor)
                return BeamReturn{report, clamp_intensity(retro), MaterialKind::mirror, dist};
            // specular bounce: reflect the horizontal direction about the normal
            const Vec2 dxy = d.xy();
            const double dn = dxy.dot(hit.normal);
            const Vec2 rxy = dxy - hit.normal * (2.0 * dn);
            o = o + d * hit.t;
            d = Vec3{rxy.x, rxy.y, d.z};
            t_offset += hit.t;
            bounced = true;
            break; // restart the walk along the reflected ray
        }
        if (!bounced || pass == 1) return std::nullopt;
    }
    return std::nullopt;
}

/// One full sweep: channels x azimuths, hits converted to the robot frame,
/// blind-spot returns dropped.
inline PointCloudFrame scan(const Pose2D& pose, const LidarModel& lidar, const World& world,
                            double time, double i_max)
{
    lidar.validate();
    PointCloudFrame frame;
    frame.timestamp = time;
    frame.robot_pose = {pose.theta, pose.x, pose.y};

    const Vec3 origin{pose.x, pose.y, lidar.mount_height};
    const int n_az =
        std::max(1, static_cast<int>(std::llround(lidar.horizontal_fov_deg / lidar.azimuth_step_deg)));
    const auto elevations = lidar.channel_elevations_deg();
    frame.points.reserve(static_cast<std::size_t>(n_az) * elevations.size() / 4);

    const double cos_h = std::cos(-pose.theta);
    const double sin_h = std::sin(-pose.theta);
    for (double elev_deg : elevations) {
        const double elev = deg_to_rad(elev_deg);
        const double ce = std::cos(elev);
        const double se = std::sin(elev);
        for (int k = 0; k < n_az; ++k) {
            // lattice symmetric about the heading so narrower FOVs sample a
            // subset of the wide-FOV beams
            const double az = deg_to_rad(lidar.azimuth_step_deg * (k - (n_az - 1) / 2.0));
            const double yaw = pose.theta + az;
            const Vec3 dir{ce * std::cos(yaw), ce * std::sin(yaw), se};
            const auto ret = cast_beam(origin, dir, world, time, i_max, lidar.max_range);
            if (!ret || ret->range < lidar.min_range) continue;
            const double px = ret->point.x - pose.x;
            const double py = ret->point.y - pose.y;
            frame.points.push_back({px * cos_h - py * sin_h, px * sin_h + py * cos_h,
                                    ret->point.z, ret->intensity});
        }
    }
    return frame;
}

/// Ground-truth clearance: distance from a point to the nearest footprint
/// whose height interval overlaps the robot body.
inline double world_clearance(const Vec2& p, const World& world, double time, double h_rob)
{
    double best = std::numeric_limits<double>::infinity();
    for (const ObstaclePrimitive& prim : world.obstacles) {
        if (prim.z_min >= h_rob) continue;
        best = std::min(best, prim.footprint_distance(p));
    }
    for (const MovingDisc& disc : world.moving) {
        if (disc.z_min >= h_rob) continue;
        best = std::min(best, (p - disc.position(time)).norm() - disc.radius);
    }
    return best;
}

/// Material kinds within reach of the robot disc (empty when collision-free).
inline std::vector<MaterialKind> contact_kinds(const Vec2& p, const World& world, double time,
                                               const RobotConfig& cfg)
{
    std::vector<MaterialKind> kinds;
    for (const ObstaclePrimitive& prim : world.obstacles) {
        if (prim.z_min >= cfg.h_rob) continue;
        if (prim.footprint_distance(p) <= cfg.r_rob) kinds.push_back(prim.material.kind);
    }
    for (const MovingDisc& disc : world.moving) {
        if (disc.z_min >= cfg.h_rob) continue;
        if ((p - disc.position(time)).norm() - disc.radius <= cfg.r_rob)
            kinds.push_back(disc.material.kind);
    }
    return kinds;
}

inline bool in_collision(const Pose2D& pose, const World& world, double time,
                         const RobotConfig& cfg)
{
    return world_clearance({pose.x, pose.y}, world, time, cfg.h_rob) <= cfg.r_rob;
}

/// Unicycle step with ground-truth collision detection. A state already in
/// contact stays frozen where it is.
inline std::pair<RobotState, bool> step(const RobotState& robot, const VelocityPair& cmd, double dt,
                                        const World& world, const RobotConfig& cfg)
{
    if (dt <= 0) throw std::invalid_argument("step: dt must be > 0");
    if (in_collision(robot.pose, world, robot.clock, cfg)) return {robot, true};

    RobotState next = robot;
    next.velocity.v = std::clamp(cmd.v, 0.0, cfg.v_max);
    next.velocity.omega = std::clamp(cmd.omega, -cfg.omega_max, cfg.omega_max);
    next.pose.theta = wrap_angle(next.pose.theta + next.velocity.omega * dt);
    next.pose.x += next.velocity.v * std::cos(next.pose.theta) * dt;
    next.pose.y += next.velocity.v * std::sin(next.pose.theta) * dt;
    next.clock += dt;

    const bool collided = in_collision(next.pose, world, next.clock, cfg);
    if (collided) next.velocity = {0.0, 0.0};
    return {next, collided};
}

/// Rasterizes the footprints of the selected material kinds into a
/// robot-frame binary grid by marching each curve at quarter-cell steps.
inline BinaryGrid ground_truth_grid(const World& world, const GridSpec& spec, const Pose2D& pose,
                                    MaterialKind kind = MaterialKind::transparent)
{
    spec.validate();
    BinaryGrid grid(spec);
    const double step = spec.s / 4.0;
    const double cos_h = std::cos(-pose.theta);
    const double sin_h = std::sin(-pose.theta);

    const auto mark = [&](const Vec2& world_pt) {
        const double px = world_pt.x - pose.x;
        const double py = world_pt.y - pose.y;
        if (auto cell = spec.world_to_grid({px * cos_h - py * sin_h, px * sin_h + py * cos_h}))
            grid.at(*cell) = 1;
    };

    for (const ObstaclePrimitive& prim : world.obstacles) {
        if (prim.material.kind != kind) continue;
        if (prim.shape == ObstaclePrimitive::Shape::polyline) {
            for (std::size_t i = 0; i + 1 < prim.points.size(); ++i) {
                const Vec2 a = prim.points[i];
                const Vec2 b = prim.points[i + 1];
                const double len = (b - a).norm();
                const int samples = std::max(1, static_cast<int>(std::ceil(len / step)));
                for (int k = 0; k <= samples; ++k)
                    mark(a + (b - a) * (static_cast<double>(k) / samples));
            }
        } else {
            const double arc_len = prim.radius * prim.sweep;
            const int samples = std::max(1, static_cast<int>(std::ceil(arc_len / step)));
            for (int k = 0; k <= samples; ++k) {
                const double angle = prim.angle_begin + prim.sweep * static_cast<double>(k) / samples;
                mark(prim.center + Vec2{std::cos(angle), std::sin(angle)} * prim.radius);
            }
        }
    }
    return grid;
}

} // namespace topgn
