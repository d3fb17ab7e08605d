#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace forgecam {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double norm2() const { return x * x + y * y + z * z; }

    Vec3 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Angle between two vectors in degrees, clamped into [0, 180].
double angle_deg(const Vec3& a, const Vec3& b);

/// Angle between an outward normal and +Z, in degrees ([0, 180]).
double slope_deg(const Vec3& normal);

bool is_unit(const Vec3& v, double tol = 1e-9);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::sqrt(x * x + y * y); }
    Vec2 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
    }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline Vec2 to_xy(const Vec3& v) { return {v.x, v.y}; }

/// Ordered point chain. Closed iff first == last within 1e-9 mm.
struct Polyline3 {
    std::vector<Vec3> points;

    Polyline3() = default;
    explicit Polyline3(std::vector<Vec3> pts) : points(std::move(pts)) {}

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    const Vec3& front() const { return points.front(); }
    const Vec3& back() const { return points.back(); }

    bool is_closed(double tol = 1e-9) const;
    double length() const;

    /// Point at arc length s (clamped to [0, length]).
    Vec3 point_at(double s) const;

    /// Squared distance from p to the nearest point of the chain.
    double distance_to(const Vec3& p) const;

    Polyline3 reversed() const;

    /// Drops consecutive duplicates (gap <= tol).
    void dedup(double tol = 1e-9);
};

/// Distance from p to segment [a, b].
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);
double point_segment_distance_xy(const Vec2& p, const Vec2& a, const Vec2& b);

/// Simple polygon helpers in the XY plane. Polygons are vertex lists
/// without a repeated closing vertex.
double polygon_area(const std::vector<Vec2>& poly);
Vec2 polygon_centroid(const std::vector<Vec2>& poly);
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly);

/// Signed distance to a polygon-with-holes region: positive inside,
/// negative outside. Holes must be listed after the outer loop.
double region_signed_distance(const Vec2& p, const std::vector<std::vector<Vec2>>& loops);

struct Box2 {
    Vec2 lo{1e300, 1e300};
    Vec2 hi{-1e300, -1e300};
    void expand(const Vec2& p) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    bool valid() const { return lo.x <= hi.x && lo.y <= hi.y; }
    bool overlaps(const Box2& o) const {
        return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y;
    }
    bool contains(const Box2& o) const {
        return lo.x <= o.lo.x && o.hi.x <= hi.x && lo.y <= o.lo.y && o.hi.y <= hi.y;
    }
};

}  // namespace forgecam
