#include "forgecam/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "forgecam/error.hpp"

namespace forgecam {

const char* to_string(SurfaceKind kind) {
    switch (kind) {
        case SurfaceKind::plane: return "plane";
        case SurfaceKind::extruded: return "extruded";
        case SurfaceKind::ruled: return "ruled";
        case SurfaceKind::revolved: return "revolved";
        case SurfaceKind::blend: return "blend";
    }
    return "?";
}

namespace {

/// Arc-length parametrised polyline evaluator. Tangents are vertex-averaged
/// and interpolated within segments, so chordal samplings of smooth curves
/// recover the analytic tangent to second order.
class CurveEval {
public:
    explicit CurveEval(const Polyline3& poly) : pts_(poly.points) {
        cum_.resize(pts_.size(), 0.0);
        for (std::size_t i = 1; i < pts_.size(); ++i)
            cum_[i] = cum_[i - 1] + distance(pts_[i - 1], pts_[i]);
        total_ = cum_.empty() ? 0.0 : cum_.back();
        vtan_ = vertex_tangents(pts_);
    }

    static std::vector<Vec3> vertex_tangents(const std::vector<Vec3>& pts) {
        std::vector<Vec3> tans(pts.size(), Vec3{1, 0, 0});
        if (pts.size() < 2) return tans;
        const bool closed = distance(pts.front(), pts.back()) <= 1e-9 && pts.size() >= 3;
        auto seg_dir = [&](std::size_t i) { return (pts[i + 1] - pts[i]).normalized(); };
        for (std::size_t i = 0; i < pts.size(); ++i) {
            Vec3 t;
            if (i == 0)
                t = closed ? (seg_dir(pts.size() - 2) + seg_dir(0)) : seg_dir(0);
            else if (i == pts.size() - 1)
                t = closed ? (seg_dir(pts.size() - 2) + seg_dir(0)) : seg_dir(pts.size() - 2);
            else
                t = seg_dir(i - 1) + seg_dir(i);
            tans[i] = t.normalized();
        }
        return tans;
    }

    double length() const { return total_; }
    std::size_t segments() const { return pts_.size() > 0 ? pts_.size() - 1 : 0; }

    Vec3 eval(double t) const {
        if (pts_.size() == 1) return pts_[0];
        const double s = std::clamp(t, 0.0, 1.0) * total_;
        const std::size_t i = segment_index(s);
        const double seg = cum_[i + 1] - cum_[i];
        const double f = seg > 0.0 ? (s - cum_[i]) / seg : 0.0;
        return pts_[i] + (pts_[i + 1] - pts_[i]) * f;
    }

    Vec3 tangent(double t) const {
        if (pts_.size() < 2) return {1.0, 0.0, 0.0};
        const double s = std::clamp(t, 0.0, 1.0) * total_;
        const std::size_t i = segment_index(s);
        const double seg = cum_[i + 1] - cum_[i];
        const double f = seg > 0.0 ? (s - cum_[i]) / seg : 0.0;
        return (vtan_[i] * (1.0 - f) + vtan_[i + 1] * f).normalized();
    }

private:
    std::size_t segment_index(double s) const {
        std::size_t lo = 0;
        std::size_t hi = pts_.size() - 1;
        while (lo + 1 < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cum_[mid] <= s)
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }

    std::vector<Vec3> pts_;
    std::vector<double> cum_;
    std::vector<Vec3> vtan_;
    double total_ = 0.0;
};

Vec3 rotate_about_axis(const Vec3& v, const Vec3& axis_unit, double angle_rad) {
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    return v * c + cross(axis_unit, v) * s + axis_unit * (dot(axis_unit, v) * (1.0 - c));
}

Polyline3 strip_closing_point(const Polyline3& loop) {
    Polyline3 out = loop;
    if (out.points.size() >= 2 && distance(out.points.front(), out.points.back()) <= 1e-9)
        out.points.pop_back();
    return out;
}

Polyline3 close_loop(Polyline3 loop) {
    if (loop.points.size() >= 2 && distance(loop.points.front(), loop.points.back()) > 1e-9)
        loop.points.push_back(loop.points.front());
    return loop;
}

class PlanePatch final : public Patch {
public:
    explicit PlanePatch(const PlaneDef& def) : def_(def) {
        normal_ = def_.normal.normalized();
        const Vec3 ref = std::abs(normal_.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        t1_ = cross(ref, normal_).normalized();
        t2_ = cross(normal_, t1_);
        outer_ = frame_loop(strip_closing_point(def_.boundary));
        for (const Vec2& p : outer_) bbox_.expand(p);
        loops_.push_back(outer_);
        for (const Polyline3& hole : def_.holes)
            loops_.push_back(frame_loop(strip_closing_point(hole)));
    }

    Vec3 point(double u, double v) const override {
        const Vec2 f = frame_of(u, v);
        return def_.origin + t1_ * f.x + t2_ * f.y;
    }

    Vec3 normal(double, double) const override { return normal_; }

    bool contains(double u, double v) const override {
        return region_signed_distance(frame_of(u, v), loops_) >= -1e-7;
    }

    std::optional<SurfaceHit> vertical_hit(double x, double y) const override {
        if (std::abs(normal_.z) < 1e-3) return std::nullopt;
        const double d = dot(normal_, def_.origin);
        const double z = (d - normal_.x * x - normal_.y * y) / normal_.z;
        const Vec3 p{x, y, z};
        const Vec2 f{dot(p - def_.origin, t1_), dot(p - def_.origin, t2_)};
        if (region_signed_distance(f, loops_) < -1e-7) return std::nullopt;
        return SurfaceHit{z, normal_};
    }

    std::vector<Polyline3> boundary_curves() const override {
        std::vector<Polyline3> out;
        out.push_back(close_loop(def_.boundary));
        for (const Polyline3& hole : def_.holes) out.push_back(close_loop(hole));
        return out;
    }

    std::vector<Polyline3> ruling_curves(int count) const override {
        // Steepest-descent segments across the polygon; usable when tilted.
        if (std::abs(normal_.z) > 1.0 - 1e-12) return {};
        const Vec3 level = cross(Vec3{0, 0, 1}, normal_).normalized();
        const Vec3 descent = cross(normal_, level).normalized();
        double lo_l = 1e300, hi_l = -1e300, lo_d = 1e300, hi_d = -1e300;
        const Polyline3 loop = strip_closing_point(def_.boundary);
        for (const Vec3& p : loop.points) {
            lo_l = std::min(lo_l, dot(p, level));
            hi_l = std::max(hi_l, dot(p, level));
            lo_d = std::min(lo_d, dot(p, descent));
            hi_d = std::max(hi_d, dot(p, descent));
        }
        std::vector<Polyline3> rulings;
        const Vec3 anchor = def_.origin;
        for (int k = 0; k < count; ++k) {
            const double t = count > 1 ? static_cast<double>(k) / (count - 1) : 0.5;
            const double c = lo_l + t * (hi_l - lo_l);
            Polyline3 line;
            const Vec3 base = anchor + level * (c - dot(anchor, level));
            line.points.push_back(base + descent * (lo_d - dot(base, descent)));
            line.points.push_back(base + descent * (hi_d - dot(base, descent)));
            rulings.push_back(std::move(line));
        }
        return rulings;
    }

private:
    Vec2 frame_of(double u, double v) const {
        return {bbox_.lo.x + u * (bbox_.hi.x - bbox_.lo.x),
                bbox_.lo.y + v * (bbox_.hi.y - bbox_.lo.y)};
    }

    std::vector<Vec2> frame_loop(const Polyline3& loop) const {
        std::vector<Vec2> out;
        out.reserve(loop.points.size());
        for (const Vec3& p : loop.points)
            out.push_back({dot(p - def_.origin, t1_), dot(p - def_.origin, t2_)});
        return out;
    }

    PlaneDef def_;
    Vec3 normal_, t1_, t2_;
    std::vector<Vec2> outer_;
    std::vector<std::vector<Vec2>> loops_;
    Box2 bbox_;
};

class ExtrudedPatch final : public Patch {
public:
    explicit ExtrudedPatch(const ExtrudedDef& def)
        : def_(def), curve_(def.generatrix), dir_(def.direction.normalized()) {}

    Vec3 point(double u, double v) const override {
        return curve_.eval(u) + dir_ * (v * def_.extent);
    }

    Vec3 normal(double u, double) const override {
        return cross(curve_.tangent(u), dir_).normalized();
    }

    std::optional<SurfaceHit> vertical_hit(double x, double y) const override {
        std::optional<SurfaceHit> best;
        const auto& pts = def_.generatrix.points;
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const Vec3 a = pts[i];
            const Vec3 ab = pts[i + 1] - pts[i];
            const double seg_len = ab.norm();
            const double det = ab.x * dir_.y - ab.y * dir_.x;
            if (std::abs(det) >= 1e-12) {
                const double rx = x - a.x;
                const double ry = y - a.y;
                const double t = (rx * dir_.y - ry * dir_.x) / det;
                const double s = (ab.x * ry - ab.y * rx) / det;
                if (t >= -1e-9 && t <= 1.0 + 1e-9 && s >= -1e-9 && s <= def_.extent + 1e-9) {
                    const double z = a.z + t * ab.z + s * dir_.z;
                    if (!best || z > best->z) {
                        const double u =
                            curve_.length() > 0.0 ? (cum + t * seg_len) / curve_.length() : 0.0;
                        best = SurfaceHit{z, normal(u, s / def_.extent)};
                    }
                }
            }
            cum += seg_len;
        }
        return best;
    }

    std::vector<Polyline3> boundary_curves() const override {
        std::vector<Polyline3> out;
        out.push_back(def_.generatrix);
        Polyline3 far = def_.generatrix;
        for (Vec3& p : far.points) p += dir_ * def_.extent;
        out.push_back(far);
        Polyline3 s0, s1;
        s0.points = {def_.generatrix.points.front(), def_.generatrix.points.front() + dir_ * def_.extent};
        s1.points = {def_.generatrix.points.back(), def_.generatrix.points.back() + dir_ * def_.extent};
        out.push_back(s0);
        out.push_back(s1);
        return out;
    }

    std::vector<Polyline3> ruling_curves(int count) const override {
        std::vector<Polyline3> out;
        for (int k = 0; k < count; ++k) {
            const double u = count > 1 ? static_cast<double>(k) / (count - 1) : 0.5;
            Polyline3 line;
            const Vec3 base = curve_.eval(u);
            line.points = {base, base + dir_ * def_.extent};
            out.push_back(std::move(line));
        }
        return out;
    }

private:
    ExtrudedDef def_;
    CurveEval curve_;
    Vec3 dir_;
};

class RuledPatch final : public Patch {
public:
    explicit RuledPatch(const RuledDef& def) : def_(def) {
        if (def_.rail0.size() != def_.rail1.size())
            throw Error(ErrorCode::invalid_geometry, "ruled rails must have equal point counts");
        n_ = def_.rail0.size();
        tan0_ = CurveEval::vertex_tangents(def_.rail0.points);
        tan1_ = CurveEval::vertex_tangents(def_.rail1.points);
    }

    Vec3 point(double u, double v) const override {
        const auto [i, f] = station(u);
        const Vec3 a = lerp(def_.rail0.points, i, f);
        const Vec3 b = lerp(def_.rail1.points, i, f);
        return a + (b - a) * v;
    }

    Vec3 normal(double u, double v) const override {
        const auto [i, f] = station(u);
        const Vec3 t0 = (tan0_[i] * (1.0 - f) + tan0_[i + 1] * f).normalized();
        const Vec3 t1 = (tan1_[i] * (1.0 - f) + tan1_[i + 1] * f).normalized();
        const Vec3 tangent = t0 + (t1 - t0) * v;
        const Vec3 a = lerp(def_.rail0.points, i, f);
        const Vec3 b = lerp(def_.rail1.points, i, f);
        return cross(tangent, b - a).normalized();
    }

    std::optional<SurfaceHit> vertical_hit(double x, double y) const override {
        std::optional<SurfaceHit> best;
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            double t = 0.5, v = 0.5;
            if (!solve_cell(i, x, y, t, v)) continue;
            const double u = (static_cast<double>(i) + t) / static_cast<double>(n_ - 1);
            const Vec3 p = point(u, v);
            if (!best || p.z > best->z) best = SurfaceHit{p.z, normal(u, v)};
        }
        return best;
    }

    std::vector<Polyline3> boundary_curves() const override {
        std::vector<Polyline3> out{def_.rail0, def_.rail1};
        Polyline3 e0, e1;
        e0.points = {def_.rail0.points.front(), def_.rail1.points.front()};
        e1.points = {def_.rail0.points.back(), def_.rail1.points.back()};
        out.push_back(e0);
        const bool closed = def_.rail0.is_closed() && def_.rail1.is_closed();
        if (!closed) out.push_back(e1);
        return out;
    }

    std::vector<Polyline3> ruling_curves(int count) const override {
        std::vector<Polyline3> out;
        for (int k = 0; k < count; ++k) {
            const double u = count > 1 ? static_cast<double>(k) / (count - 1) : 0.5;
            const auto [i, f] = station(u);
            Polyline3 line;
            line.points = {lerp(def_.rail0.points, i, f), lerp(def_.rail1.points, i, f)};
            out.push_back(std::move(line));
        }
        return out;
    }

private:
    std::pair<std::size_t, double> station(double u) const {
        const double t = std::clamp(u, 0.0, 1.0) * static_cast<double>(n_ - 1);
        std::size_t i = static_cast<std::size_t>(t);
        if (i >= n_ - 1) i = n_ - 2;
        return {i, t - static_cast<double>(i)};
    }

    static Vec3 lerp(const std::vector<Vec3>& pts, std::size_t i, double f) {
        return pts[i] + (pts[i + 1] - pts[i]) * f;
    }

    // Newton on the bilinear cell; xy residual only.
    bool solve_cell(std::size_t i, double x, double y, double& t, double& v) const {
        const Vec3 A = def_.rail0.points[i];
        const Vec3 B = def_.rail0.points[i + 1];
        const Vec3 C = def_.rail1.points[i];
        const Vec3 D = def_.rail1.points[i + 1];
        for (int it = 0; it < 25; ++it) {
            const Vec3 p0 = A + (B - A) * t;
            const Vec3 p1 = C + (D - C) * t;
            const Vec3 p = p0 + (p1 - p0) * v;
            const double fx = p.x - x;
            const double fy = p.y - y;
            if (std::abs(fx) < 1e-10 && std::abs(fy) < 1e-10) break;
            const Vec3 dt = (B - A) + ((D - C) - (B - A)) * v;
            const Vec3 dv = p1 - p0;
            const double det = dt.x * dv.y - dt.y * dv.x;
            if (std::abs(det) < 1e-14) return false;
            t -= (fx * dv.y - fy * dv.x) / det;
            v -= (dt.x * fy - dt.y * fx) / det;
            if (t < -0.5 || t > 1.5 || v < -0.5 || v > 1.5) return false;
        }
        const Vec3 p = (A + (B - A) * t) + ((C + (D - C) * t) - (A + (B - A) * t)) * v;
        if (std::abs(p.x - x) > 1e-7 || std::abs(p.y - y) > 1e-7) return false;
        return t >= -1e-9 && t <= 1.0 + 1e-9 && v >= -1e-9 && v <= 1.0 + 1e-9;
    }

    RuledDef def_;
    std::size_t n_ = 0;
    std::vector<Vec3> tan0_, tan1_;
};

class RevolvedPatch final : public Patch {
public:
    explicit RevolvedPatch(const RevolvedDef& def)
        : def_(def), curve_(def.profile), axis_(def.axis_dir.normalized()) {
        span_rad_ = deg_to_rad(def_.angle_end_deg - def_.angle_start_deg);
        start_rad_ = deg_to_rad(def_.angle_start_deg);
    }

    Vec3 point(double u, double v) const override {
        const Vec3 r = curve_.eval(u) - def_.axis_point;
        return def_.axis_point + rotate_about_axis(r, axis_, start_rad_ + v * span_rad_);
    }

    Vec3 normal(double u, double v) const override {
        const double ang = start_rad_ + v * span_rad_;
        const Vec3 du_ = rotate_about_axis(curve_.tangent(u), axis_, ang);
        const Vec3 r = point(u, v) - def_.axis_point;
        const Vec3 dv_ = cross(axis_, r);
        Vec3 n = cross(du_, dv_);
        if (n.norm() < 1e-12) {
            // profile touches the axis; fall back to the meridian normal
            n = cross(du_, cross(axis_, du_));
        }
        return n.normalized();
    }

    std::optional<SurfaceHit> vertical_hit(double x, double y) const override {
        if (cross(axis_, Vec3{0, 0, 1}).norm() > 1e-9) return vertical_hit_newton(x, y);
        const double dx = x - def_.axis_point.x;
        const double dy = y - def_.axis_point.y;
        const double rho2 = dx * dx + dy * dy;
        double theta = rad_to_deg(std::atan2(dy, dx));
        std::optional<SurfaceHit> best;
        const auto& pts = def_.profile.points;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const Vec2 a{pts[i].x - def_.axis_point.x, pts[i].y - def_.axis_point.y};
            const Vec2 b{pts[i + 1].x - def_.axis_point.x, pts[i + 1].y - def_.axis_point.y};
            const Vec2 d = b - a;
            // |a + t d|^2 = rho2
            const double qa = dot(d, d);
            const double qb = 2.0 * dot(a, d);
            const double qc = dot(a, a) - rho2;
            std::vector<double> roots;
            if (qa < 1e-14) {
                if (std::abs(qb) > 1e-14) roots.push_back(-qc / qb);
            } else {
                const double disc = qb * qb - 4.0 * qa * qc;
                if (disc >= 0.0) {
                    const double sq = std::sqrt(disc);
                    roots.push_back((-qb - sq) / (2.0 * qa));
                    roots.push_back((-qb + sq) / (2.0 * qa));
                }
            }
            for (double t : roots) {
                if (t < -1e-9 || t > 1.0 + 1e-9) continue;
                const Vec2 q = a + d * std::clamp(t, 0.0, 1.0);
                const double prof_theta = rad_to_deg(std::atan2(q.y, q.x));
                double rel = theta - prof_theta - def_.angle_start_deg;
                rel = std::fmod(std::fmod(rel, 360.0) + 360.0, 360.0);
                const double span = def_.angle_end_deg - def_.angle_start_deg;
                if (rel > span + 1e-9 && std::abs(rel - 360.0) > 1e-9) continue;
                const double z = pts[i].z + std::clamp(t, 0.0, 1.0) * (pts[i + 1].z - pts[i].z);
                if (!best || z > best->z) {
                    double s3 = 0.0;
                    for (std::size_t k = 0; k < i; ++k) s3 += distance(pts[k], pts[k + 1]);
                    s3 += std::clamp(t, 0.0, 1.0) * distance(pts[i], pts[i + 1]);
                    const double u = curve_.length() > 0.0 ? s3 / curve_.length() : 0.0;
                    const double v = std::min(rel, span) / span;
                    best = SurfaceHit{z, normal(u, v)};
                }
            }
        }
        return best;
    }

    std::vector<Polyline3> boundary_curves() const override {
        std::vector<Polyline3> out;
        const bool full = std::abs(def_.angle_end_deg - def_.angle_start_deg - 360.0) < 1e-9;
        Polyline3 p0 = def_.profile;
        out.push_back(rotated_profile(0.0));
        if (!full) out.push_back(rotated_profile(1.0));
        out.push_back(arc_at(0.0, full));
        out.push_back(arc_at(1.0, full));
        return out;
    }

    std::vector<Polyline3> ruling_curves(int count) const override {
        if (cross(axis_, Vec3{0, 0, 1}).norm() > 1e-9) return {};
        std::vector<Polyline3> out;
        for (int k = 0; k < count; ++k) {
            const double v = count > 1 ? static_cast<double>(k) / (count - 1) : 0.5;
            out.push_back(rotated_profile(v));
        }
        return out;
    }

private:
    Polyline3 rotated_profile(double v) const {
        Polyline3 out;
        const double ang = start_rad_ + v * span_rad_;
        for (const Vec3& p : def_.profile.points)
            out.points.push_back(def_.axis_point + rotate_about_axis(p - def_.axis_point, axis_, ang));
        return out;
    }

    Polyline3 arc_at(double u, bool full) const {
        Polyline3 out;
        const int n = 65;
        for (int k = 0; k < n; ++k) {
            const double v = static_cast<double>(k) / (n - 1);
            out.points.push_back(point(u, v));
        }
        if (full) out.points.back() = out.points.front();
        return out;
    }

    RevolvedDef def_;
    CurveEval curve_;
    Vec3 axis_;
    double span_rad_ = 0.0, start_rad_ = 0.0;
};

Vec3 slerp_dir(const Vec3& a, const Vec3& b, double t) {
    const double c = std::clamp(dot(a, b), -1.0, 1.0);
    const double phi = std::acos(c);
    if (phi < 1e-9) return (a + (b - a) * t).normalized();
    const double s = std::sin(phi);
    return (a * (std::sin((1.0 - t) * phi) / s) + b * (std::sin(t * phi) / s)).normalized();
}

class BlendPatch final : public Patch {
public:
    BlendPatch(const BlendDef& def, std::vector<BlendFrame> frames)
        : def_(def), frames_(std::move(frames)) {
        if (frames_.size() < 2)
            throw Error(ErrorCode::invalid_geometry, "blend needs at least 2 frames");
        closed_ = def_.spine.is_closed(1e-9);
        build_seed_grid(33);
    }

    Vec3 point(double u, double v) const override {
        const BlendFrame f = frame_at(u);
        return f.centre + slerp_dir(f.dir_a, f.dir_b, v) * def_.radius;
    }

    Vec3 normal(double u, double v) const override {
        const BlendFrame f = frame_at(u);
        const Vec3 dir = slerp_dir(f.dir_a, f.dir_b, v);
        return def_.convex ? dir : -dir;
    }

    std::optional<SurfaceHit> vertical_hit(double x, double y) const override {
        return vertical_hit_newton(x, y);
    }

    std::vector<Polyline3> boundary_curves() const override {
        std::vector<Polyline3> out;
        out.push_back(tangency_curve(0.0));
        out.push_back(tangency_curve(1.0));
        if (!closed_) {
            out.push_back(cross_arc(0.0));
            out.push_back(cross_arc(1.0));
        }
        return out;
    }

    std::vector<Polyline3> ruling_curves(int count) const override {
        std::vector<Polyline3> out;
        for (int k = 0; k < count; ++k) {
            const double u = count > 1 ? static_cast<double>(k) / (count - 1) : 0.5;
            out.push_back(cross_arc(u));
        }
        return out;
    }

private:
    BlendFrame frame_at(double u) const {
        const double t = std::clamp(u, 0.0, 1.0) * static_cast<double>(frames_.size() - 1);
        std::size_t i = static_cast<std::size_t>(t);
        if (i >= frames_.size() - 1) i = frames_.size() - 2;
        const double f = t - static_cast<double>(i);
        BlendFrame out;
        out.centre = frames_[i].centre + (frames_[i + 1].centre - frames_[i].centre) * f;
        out.dir_a = slerp_dir(frames_[i].dir_a, frames_[i + 1].dir_a, f);
        out.dir_b = slerp_dir(frames_[i].dir_b, frames_[i + 1].dir_b, f);
        return out;
    }

    Polyline3 tangency_curve(double v) const {
        Polyline3 out;
        const int n = static_cast<int>(frames_.size());
        for (int k = 0; k < n; ++k)
            out.points.push_back(point(static_cast<double>(k) / (n - 1), v));
        if (closed_) out.points.back() = out.points.front();
        return out;
    }

    Polyline3 cross_arc(double u) const {
        const BlendFrame f = frame_at(u);
        const double phi = std::acos(std::clamp(dot(f.dir_a, f.dir_b), -1.0, 1.0));
        const int n = std::max(5, static_cast<int>(std::ceil(phi * def_.radius / 0.05)) + 1);
        Polyline3 out;
        for (int k = 0; k < n; ++k)
            out.points.push_back(point(u, static_cast<double>(k) / (n - 1)));
        return out;
    }

    BlendDef def_;
    std::vector<BlendFrame> frames_;
    bool closed_ = false;
};

}  // namespace

bool Patch::contains(double u, double v) const {
    return u >= -1e-9 && u <= 1.0 + 1e-9 && v >= -1e-9 && v <= 1.0 + 1e-9;
}

std::optional<SurfaceHit> Patch::vertical_hit(double x, double y) const {
    return vertical_hit_newton(x, y);
}

Vec3 Patch::du(double u, double v) const {
    const double h = 1e-5;
    const double u0 = std::clamp(u, h, 1.0 - h);
    return (point(u0 + h, v) - point(u0 - h, v)) / (2.0 * h);
}

Vec3 Patch::dv(double u, double v) const {
    const double h = 1e-5;
    const double v0 = std::clamp(v, h, 1.0 - h);
    return (point(u, v0 + h) - point(u, v0 - h)) / (2.0 * h);
}

void Patch::build_seed_grid(int n) {
    seeds_.clear();
    seeds_.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double u = static_cast<double>(i) / (n - 1);
            const double v = static_cast<double>(j) / (n - 1);
            const Vec3 p = point(u, v);
            seeds_.push_back({p.x, p.y, u, v});
        }
    }
}

std::optional<SurfaceHit> Patch::vertical_hit_newton(double x, double y) const {
    if (seeds_.empty()) return std::nullopt;
    // four nearest seeds, refined by damped Newton in (u,v)
    std::array<std::pair<double, std::size_t>, 4> best{};
    best.fill({1e300, 0});
    for (std::size_t k = 0; k < seeds_.size(); ++k) {
        const double dx = seeds_[k][0] - x;
        const double dy = seeds_[k][1] - y;
        const double d2 = dx * dx + dy * dy;
        for (std::size_t b = 0; b < best.size(); ++b) {
            if (d2 < best[b].first) {
                for (std::size_t m = best.size() - 1; m > b; --m) best[m] = best[m - 1];
                best[b] = {d2, k};
                break;
            }
        }
    }
    std::optional<SurfaceHit> hit;
    for (const auto& [d2, k] : best) {
        if (d2 >= 1e300) continue;
        double u = seeds_[k][2];
        double v = seeds_[k][3];
        bool ok = false;
        for (int it = 0; it < 30; ++it) {
            const Vec3 p = point(u, v);
            const double fx = p.x - x;
            const double fy = p.y - y;
            if (std::abs(fx) < 1e-9 && std::abs(fy) < 1e-9) {
                ok = true;
                break;
            }
            const Vec3 ju = du(u, v);
            const Vec3 jv = dv(u, v);
            const double det = ju.x * jv.y - ju.y * jv.x;
            if (std::abs(det) < 1e-14) break;
            double su = (fx * jv.y - fy * jv.x) / det;
            double sv = (ju.x * fy - ju.y * fx) / det;
            const double lim = 0.25;
            su = std::clamp(su, -lim, lim);
            sv = std::clamp(sv, -lim, lim);
            u = std::clamp(u - su, -0.05, 1.05);
            v = std::clamp(v - sv, -0.05, 1.05);
        }
        if (!ok) continue;
        const double uc = std::clamp(u, 0.0, 1.0);
        const double vc = std::clamp(v, 0.0, 1.0);
        const Vec3 p = point(uc, vc);
        if (std::abs(p.x - x) > 1e-6 || std::abs(p.y - y) > 1e-6) continue;
        if (!contains(uc, vc)) continue;
        if (!hit || p.z > hit->z) hit = SurfaceHit{p.z, normal(uc, vc)};
    }
    return hit;
}

std::vector<Polyline3> Patch::ruling_curves(int) const { return {}; }

double Patch::max_concave_curvature(double u, double v) const {
    const double h = 1e-4;
    const double u0 = std::clamp(u, h, 1.0 - h);
    const double v0 = std::clamp(v, h, 1.0 - h);
    const Vec3 p = point(u0, v0);
    const Vec3 pu = (point(u0 + h, v0) - point(u0 - h, v0)) / (2.0 * h);
    const Vec3 pv = (point(u0, v0 + h) - point(u0, v0 - h)) / (2.0 * h);
    const Vec3 puu = (point(u0 + h, v0) - p * 2.0 + point(u0 - h, v0)) / (h * h);
    const Vec3 pvv = (point(u0, v0 + h) - p * 2.0 + point(u0, v0 - h)) / (h * h);
    const Vec3 puv = (point(u0 + h, v0 + h) - point(u0 + h, v0 - h) - point(u0 - h, v0 + h) +
                      point(u0 - h, v0 - h)) /
                     (4.0 * h * h);
    const Vec3 n = normal(u0, v0);
    const double E = dot(pu, pu), F = dot(pu, pv), G = dot(pv, pv);
    const double L = dot(puu, n), M = dot(puv, n), N = dot(pvv, n);
    const double a = E * G - F * F;
    if (std::abs(a) < 1e-18) return 0.0;
    const double b = -(E * N + G * L - 2.0 * F * M);
    const double c = L * N - M * M;
    const double disc = std::max(0.0, b * b - 4.0 * a * c);
    const double sq = std::sqrt(disc);
    const double k1 = (-b + sq) / (2.0 * a);
    const double k2 = (-b - sq) / (2.0 * a);
    return std::max(k1, k2);
}

std::unique_ptr<Patch> make_patch(const Surface& surface) {
    switch (surface.kind) {
        case SurfaceKind::plane: return std::make_unique<PlanePatch>(surface.plane());
        case SurfaceKind::extruded: return std::make_unique<ExtrudedPatch>(surface.extruded());
        case SurfaceKind::ruled: return std::make_unique<RuledPatch>(surface.ruled());
        case SurfaceKind::revolved: return std::make_unique<RevolvedPatch>(surface.revolved());
        case SurfaceKind::blend:
            throw Error(ErrorCode::invalid_geometry,
                        "blend patches need fillet frames; use make_blend_patch");
    }
    throw Error(ErrorCode::invalid_geometry, "unknown surface kind");
}

std::unique_ptr<Patch> make_blend_patch(const BlendDef& def, std::vector<BlendFrame> frames) {
    return std::make_unique<BlendPatch>(def, std::move(frames));
}

SampleGrid sample_patch(const Patch& patch, int resolution) {
    if (resolution < 2)
        throw Error(ErrorCode::validation, "sampling resolution must be >= 2");
    SampleGrid grid;
    grid.nu = resolution;
    grid.nv = resolution;
    grid.samples.reserve(static_cast<std::size_t>(resolution) * resolution);
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            const double u = static_cast<double>(i) / (resolution - 1);
            const double v = static_cast<double>(j) / (resolution - 1);
            GridSample s;
            s.point = patch.point(u, v);
            s.normal = patch.normal(u, v);
            s.slope_deg = slope_deg(s.normal);
            grid.samples.push_back(s);
        }
    }
    double area = 0.0;
    for (int i = 0; i + 1 < resolution; ++i) {
        for (int j = 0; j + 1 < resolution; ++j) {
            const Vec3 a = grid.at(i, j).point;
            const Vec3 b = grid.at(i + 1, j).point;
            const Vec3 c = grid.at(i, j + 1).point;
            const Vec3 d = grid.at(i + 1, j + 1).point;
            area += 0.5 * cross(b - a, c - a).norm();
            area += 0.5 * cross(b - d, c - d).norm();
        }
    }
    if (area < 1e-9)
        throw Error(ErrorCode::degenerate_surface, "surface tessellates to zero area");
    return grid;
}

std::pair<double, double> slope_range(const Patch& patch, int resolution) {
    const SampleGrid grid = sample_patch(patch, resolution);
    double lo = 1e300, hi = -1e300;
    for (const GridSample& s : grid.samples) {
        lo = std::min(lo, s.slope_deg);
        hi = std::max(hi, s.slope_deg);
    }
    return {lo, hi};
}

namespace {

struct EdgeKey {
    int i, j, horizontal;  // cell corner + direction
    bool operator<(const EdgeKey& o) const {
        if (i != o.i) return i < o.i;
        if (j != o.j) return j < o.j;
        return horizontal < o.horizontal;
    }
    bool operator==(const EdgeKey& o) const {
        return i == o.i && j == o.j && horizontal == o.horizontal;
    }
};

}  // namespace

std::vector<SectionCurve> horizontal_sections(const Patch& patch, double z, int resolution) {
    const int n = std::max(resolution, 3);
    std::vector<double> fz(static_cast<std::size_t>(n) * n);
    auto f = [&](int i, int j) -> double& { return fz[static_cast<std::size_t>(i) * n + j]; };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double u = static_cast<double>(i) / (n - 1);
            const double v = static_cast<double>(j) / (n - 1);
            double d = patch.point(u, v).z - z;
            if (d == 0.0) d = 1e-12;
            f(i, j) = d;
        }
    }

    // crossing point on the grid edge starting at (i,j), refined on the real surface
    auto crossing = [&](int i, int j, bool horizontal) -> std::pair<Vec2, Vec3> {
        const double f0 = f(i, j);
        const int i1 = horizontal ? i + 1 : i;
        const int j1 = horizontal ? j : j + 1;
        const double f1 = f(i1, j1);
        double t = f0 / (f0 - f1);
        const auto uv_of = [&](double tt) {
            const double u = (static_cast<double>(i) + (horizontal ? tt : 0.0)) / (n - 1);
            const double v = (static_cast<double>(j) + (horizontal ? 0.0 : tt)) / (n - 1);
            return Vec2{u, v};
        };
        double lo = 0.0, hi = 1.0, flo = f0;
        for (int it = 0; it < 12; ++it) {
            const Vec2 uv = uv_of(t);
            const double fm = patch.point(uv.x, uv.y).z - z;
            if (std::abs(fm) < 1e-10) break;
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = t;
                flo = fm;
            } else {
                hi = t;
            }
            t = 0.5 * (lo + hi);
        }
        const Vec2 uv = uv_of(t);
        return {uv, patch.point(uv.x, uv.y)};
    };

    std::map<EdgeKey, std::pair<Vec2, Vec3>> cross_pts;
    auto cross_at = [&](int i, int j, bool horizontal) -> EdgeKey {
        const EdgeKey key{i, j, horizontal ? 1 : 0};
        if (cross_pts.find(key) == cross_pts.end()) cross_pts[key] = crossing(i, j, horizontal);
        return key;
    };

    std::vector<std::pair<EdgeKey, EdgeKey>> segments;
    for (int i = 0; i + 1 < n; ++i) {
        for (int j = 0; j + 1 < n; ++j) {
            const bool b00 = f(i, j) > 0.0;
            const bool b10 = f(i + 1, j) > 0.0;
            const bool b01 = f(i, j + 1) > 0.0;
            const bool b11 = f(i + 1, j + 1) > 0.0;
            std::vector<EdgeKey> hits;
            if (b00 != b10) hits.push_back(cross_at(i, j, true));        // bottom
            if (b10 != b11) hits.push_back(cross_at(i + 1, j, false));   // right
            if (b01 != b11) hits.push_back(cross_at(i, j + 1, true));    // top
            if (b00 != b01) hits.push_back(cross_at(i, j, false));       // left
            if (hits.size() == 2) {
                segments.emplace_back(hits[0], hits[1]);
            } else if (hits.size() == 4) {
                // saddle: decide with the cell centre value
                const double u = (static_cast<double>(i) + 0.5) / (n - 1);
                const double v = (static_cast<double>(j) + 0.5) / (n - 1);
                const bool centre = (patch.point(u, v).z - z) > 0.0;
                if (centre == b00) {
                    segments.emplace_back(hits[0], hits[1]);
                    segments.emplace_back(hits[2], hits[3]);
                } else {
                    segments.emplace_back(hits[0], hits[3]);
                    segments.emplace_back(hits[1], hits[2]);
                }
            }
        }
    }

    // chain segments by shared edge keys
    std::map<EdgeKey, std::vector<std::size_t>> by_key;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        by_key[segments[s].first].push_back(s);
        by_key[segments[s].second].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);
    std::vector<SectionCurve> curves;

    auto walk = [&](std::size_t start, const EdgeKey& from) {
        std::vector<EdgeKey> chain;
        chain.push_back(from);
        EdgeKey cur = from;
        std::size_t seg = start;
        while (true) {
            used[seg] = true;
            const EdgeKey next =
                segments[seg].first == cur ? segments[seg].second : segments[seg].first;
            chain.push_back(next);
            cur = next;
            std::size_t cont = segments.size();
            for (std::size_t cand : by_key[cur]) {
                if (!used[cand]) {
                    cont = cand;
                    break;
                }
            }
            if (cont == segments.size()) break;
            seg = cont;
        }
        return chain;
    };

    auto emit = [&](const std::vector<EdgeKey>& chain) {
        SectionCurve curve;
        for (const EdgeKey& key : chain) {
            const auto& [uv, p] = cross_pts[key];
            if (!patch.contains(uv.x, uv.y)) continue;
            curve.contacts.points.push_back(p);
            curve.normals.push_back(patch.normal(uv.x, uv.y));
        }
        if (curve.contacts.size() < 2) return;
        curve.closed = chain.size() >= 4 && chain.front() == chain.back() &&
                       curve.contacts.size() + 0 == chain.size();
        if (curve.closed) {
            // consistent orientation: counter-clockwise in XY
            double twice = 0.0;
            const auto& pts = curve.contacts.points;
            for (std::size_t k = 0; k + 1 < pts.size(); ++k)
                twice += pts[k].x * pts[k + 1].y - pts[k + 1].x * pts[k].y;
            if (twice < 0.0) {
                std::reverse(curve.contacts.points.begin(), curve.contacts.points.end());
                std::reverse(curve.normals.begin(), curve.normals.end());
            }
        }
        curves.push_back(std::move(curve));
    };

    // open chains first (keys with a single incident unused segment), in key order
    for (const auto& [key, segs] : by_key) {
        if (segs.size() != 1) continue;
        if (used[segs[0]]) continue;
        emit(walk(segs[0], key));
    }
    // remaining loops
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s]) continue;
        emit(walk(s, segments[s].first));
    }

    // stitch chains that meet in 3D: sections crossing the parametric seam of
    // a closed surface arrive as separate open chains
    const double stitch_tol = 1e-6;
    auto reverse_curve = [](SectionCurve& c) {
        std::reverse(c.contacts.points.begin(), c.contacts.points.end());
        std::reverse(c.normals.begin(), c.normals.end());
    };
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < curves.size() && !merged; ++i) {
            if (curves[i].closed) continue;
            for (std::size_t j = i + 1; j < curves.size() && !merged; ++j) {
                if (curves[j].closed) continue;
                SectionCurve& a = curves[i];
                SectionCurve& b = curves[j];
                if (distance(a.contacts.back(), b.contacts.back()) <= stitch_tol)
                    reverse_curve(b);
                else if (distance(a.contacts.front(), b.contacts.front()) <= stitch_tol)
                    reverse_curve(a);
                else if (distance(a.contacts.front(), b.contacts.back()) <= stitch_tol)
                    std::swap(a, b);
                if (distance(a.contacts.back(), b.contacts.front()) > stitch_tol) continue;
                a.contacts.points.insert(a.contacts.points.end(),
                                         b.contacts.points.begin() + 1,
                                         b.contacts.points.end());
                a.normals.insert(a.normals.end(), b.normals.begin() + 1, b.normals.end());
                curves.erase(curves.begin() + static_cast<std::ptrdiff_t>(j));
                merged = true;
            }
        }
    }
    for (SectionCurve& c : curves) {
        if (c.closed || c.contacts.size() < 4) continue;
        if (distance(c.contacts.front(), c.contacts.back()) <= stitch_tol) {
            c.contacts.points.back() = c.contacts.points.front();
            c.closed = true;
        }
    }
    return curves;
}

}  // namespace forgecam
