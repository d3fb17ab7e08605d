#include "forgecam/geometry.hpp"

#include <algorithm>

namespace forgecam {

double angle_deg(const Vec3& a, const Vec3& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    const double c = std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
    return rad_to_deg(std::acos(c));
}

double slope_deg(const Vec3& normal) {
    return angle_deg(normal, Vec3{0.0, 0.0, 1.0});
}

bool is_unit(const Vec3& v, double tol) {
    return std::abs(v.norm() - 1.0) <= tol;
}

bool Polyline3::is_closed(double tol) const {
    return points.size() >= 3 && distance(points.front(), points.back()) <= tol;
}

double Polyline3::length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        total += distance(points[i - 1], points[i]);
    return total;
}

Vec3 Polyline3::point_at(double s) const {
    if (points.empty()) return {};
    if (s <= 0.0) return points.front();
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double seg = distance(points[i - 1], points[i]);
        if (s <= seg) {
            const double t = seg > 0.0 ? s / seg : 0.0;
            return points[i - 1] + (points[i] - points[i - 1]) * t;
        }
        s -= seg;
    }
    return points.back();
}

double Polyline3::distance_to(const Vec3& p) const {
    if (points.empty()) return 1e300;
    if (points.size() == 1) return distance(p, points.front());
    double best = 1e300;
    for (std::size_t i = 1; i < points.size(); ++i)
        best = std::min(best, point_segment_distance(p, points[i - 1], points[i]));
    return best;
}

Polyline3 Polyline3::reversed() const {
    Polyline3 out;
    out.points.assign(points.rbegin(), points.rend());
    return out;
}

void Polyline3::dedup(double tol) {
    if (points.size() < 2) return;
    std::vector<Vec3> kept;
    kept.reserve(points.size());
    kept.push_back(points.front());
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (distance(points[i], kept.back()) > tol) kept.push_back(points[i]);
    }
    points = std::move(kept);
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len2 = ab.norm2();
    if (len2 <= 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

double point_segment_distance_xy(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 <= 0.0) return (p - a).norm();
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

double polygon_area(const std::vector<Vec2>& poly) {
    double twice = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return std::abs(twice) * 0.5;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
    double twice = 0.0;
    Vec2 c{0.0, 0.0};
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const double w = a.x * b.y - b.x * a.y;
        twice += w;
        c.x += (a.x + b.x) * w;
        c.y += (a.y + b.y) * w;
    }
    if (std::abs(twice) < 1e-12) {
        if (poly.empty()) return {};
        Vec2 mean{0.0, 0.0};
        for (const Vec2& p : poly) mean = mean + p;
        return mean * (1.0 / static_cast<double>(poly.size()));
    }
    return c * (1.0 / (3.0 * twice));
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

double region_signed_distance(const Vec2& p, const std::vector<std::vector<Vec2>>& loops) {
    if (loops.empty()) return -1e300;
    double dist = 1e300;
    for (const auto& loop : loops) {
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i)
            dist = std::min(dist, point_segment_distance_xy(p, loop[i], loop[(i + 1) % n]));
    }
    bool inside = point_in_polygon(p, loops.front());
    if (inside) {
        for (std::size_t h = 1; h < loops.size(); ++h) {
            if (point_in_polygon(p, loops[h])) {
                inside = false;
                break;
            }
        }
    }
    return inside ? dist : -dist;
}

}  // namespace forgecam
