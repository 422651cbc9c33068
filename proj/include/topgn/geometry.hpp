#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace topgn {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double squared_norm() const { return x * x + y * y; }

    Vec2 normalized() const
    {
        const double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
    }

    Vec2 rotated(double angle) const
    {
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        return {c * x - s * y, s * x + c * y};
    }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Vec2 xy() const { return {x, y}; }
};

constexpr double kPi = std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a)
{
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

/// Rigid motion in the plane: p' = R(angle) * p + (dx, dy).
struct RigidTransform2D {
    double angle = 0.0;
    double dx = 0.0;
    double dy = 0.0;

    static RigidTransform2D identity() { return {}; }

    Vec2 apply(const Vec2& p) const
    {
        const Vec2 r = p.rotated(angle);
        return {r.x + dx, r.y + dy};
    }

    /// this ∘ other: apply `other` first, then this.
    RigidTransform2D compose(const RigidTransform2D& other) const
    {
        const Vec2 t = Vec2{other.dx, other.dy}.rotated(angle);
        return {angle + other.angle, dx + t.x, dy + t.y};
    }

    RigidTransform2D inverse() const
    {
        const Vec2 t = Vec2{-dx, -dy}.rotated(-angle);
        return {-angle, t.x, t.y};
    }
};

/// Squared distance from point p to segment [a, b].
inline double point_segment_dist_sq(const Vec2& p, const Vec2& a, const Vec2& b)
{
    const Vec2 ab = b - a;
    const double len_sq = ab.squared_norm();
    if (len_sq == 0.0) return (p - a).squared_norm();
    double t = (p - a).dot(ab) / len_sq;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 proj = a + ab * t;
    return (p - proj).squared_norm();
}

namespace detail {

inline double orient(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return (b - a).cross(c - a);
}

inline bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p)
{
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

} // namespace detail

/// Whether closed segments [a,b] and [c,d] intersect (touching counts).
inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d)
{
    const double o1 = detail::orient(a, b, c);
    const double o2 = detail::orient(a, b, d);
    const double o3 = detail::orient(c, d, a);
    const double o4 = detail::orient(c, d, b);

    if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) &&
        o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) {
        return true;
    }
    if (o1 == 0 && detail::on_segment(a, b, c)) return true;
    if (o2 == 0 && detail::on_segment(a, b, d)) return true;
    if (o3 == 0 && detail::on_segment(c, d, a)) return true;
    if (o4 == 0 && detail::on_segment(c, d, b)) return true;
    return false;
}

} // namespace topgn
