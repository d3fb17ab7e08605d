#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "forgecam/geometry.hpp"

namespace forgecam {

enum class SurfaceKind { plane, extruded, ruled, revolved, blend };

const char* to_string(SurfaceKind kind);

struct PlaneDef {
    Vec3 origin;
    Vec3 normal;              // unit, outward (away from material)
    Polyline3 boundary;       // loop, repeated end point optional
    std::vector<Polyline3> holes;
};

struct ExtrudedDef {
    Polyline3 generatrix;
    Vec3 direction;           // unit sweep direction
    double extent = 0.0;      // mm along direction
};

struct RuledDef {
    Polyline3 rail0;          // equal point counts
    Polyline3 rail1;
};

struct RevolvedDef {
    Vec3 axis_point;
    Vec3 axis_dir;            // unit
    Polyline3 profile;
    double angle_start_deg = 0.0;
    double angle_end_deg = 360.0;
};

struct BlendDef {
    Polyline3 spine;          // fillet arc centre curve
    double radius = 0.0;
    std::array<std::string, 2> adjacent;
    bool convex = false;      // false: concave fillet (cavity side)
};

struct Surface {
    std::string id;
    SurfaceKind kind = SurfaceKind::plane;
    std::variant<PlaneDef, ExtrudedDef, RuledDef, RevolvedDef, BlendDef> def;

    const PlaneDef& plane() const { return std::get<PlaneDef>(def); }
    const ExtrudedDef& extruded() const { return std::get<ExtrudedDef>(def); }
    const RuledDef& ruled() const { return std::get<RuledDef>(def); }
    const RevolvedDef& revolved() const { return std::get<RevolvedDef>(def); }
    const BlendDef& blend() const { return std::get<BlendDef>(def); }
};

struct GridSample {
    Vec3 point;
    Vec3 normal;              // unit, outward
    double slope_deg = 0.0;   // angle(normal, +Z)
};

/// Rectangular (u,v) sample grid of one surface.
struct SampleGrid {
    int nu = 0;
    int nv = 0;
    std::vector<GridSample> samples;  // row-major, v fastest

    const GridSample& at(int iu, int iv) const { return samples[static_cast<std::size_t>(iu) * nv + iv]; }
};

struct SurfaceHit {
    double z = 0.0;
    Vec3 normal;
};

struct SectionCurve {
    Polyline3 contacts;
    std::vector<Vec3> normals;  // one per contact point
    bool closed = false;
};

/// Per-spine-station frame of a blend fillet: arc centre plus the unit
/// directions from the centre towards the tangency points on the two
/// adjacent surfaces.
struct BlendFrame {
    Vec3 centre;
    Vec3 dir_a;
    Vec3 dir_b;
};

/// Evaluated parametric surface over (u,v) in [0,1]^2.
///
/// Outward-normal construction rules (model authors orient inputs so these
/// point away from material):
///   plane     declared normal
///   extruded  generatrix_tangent x direction
///   ruled     directrix_tangent x ruling(rail0 -> rail1)
///   revolved  dP/du x dP/dv  (u along profile, v along angle)
///   blend     +/- arc direction (convex / concave)
class Patch {
public:
    virtual ~Patch() = default;

    virtual Vec3 point(double u, double v) const = 0;
    virtual Vec3 normal(double u, double v) const = 0;

    /// True when (u,v) lies on the actual surface (plane boundary polygons
    /// shrink the rectangular domain).
    virtual bool contains(double u, double v) const;

    /// Highest surface point straight above/below (x,y), if any.
    virtual std::optional<SurfaceHit> vertical_hit(double x, double y) const;

    /// Boundary curves in 3D. Plane: boundary loop (+ hole loops);
    /// others: the four parametric edges.
    virtual std::vector<Polyline3> boundary_curves() const = 0;

    /// Ruling curves for flank/blend machining, ordered along the directrix.
    /// Empty when the kind has no usable rulings.
    virtual std::vector<Polyline3> ruling_curves(int count) const;

    /// Largest normal curvature (positive = bending towards +normal, i.e.
    /// concave seen from outside the material).
    double max_concave_curvature(double u, double v) const;

    Vec3 du(double u, double v) const;
    Vec3 dv(double u, double v) const;

protected:
    std::optional<SurfaceHit> vertical_hit_newton(double x, double y) const;
    void build_seed_grid(int n);

    std::vector<std::array<double, 4>> seeds_;  // (x, y, u, v)
};

/// Builds the evaluator for a surface. Blend surfaces need their fillet
/// frames precomputed from the adjacent surfaces (die_model does this).
std::unique_ptr<Patch> make_patch(const Surface& surface);
std::unique_ptr<Patch> make_blend_patch(const BlendDef& def, std::vector<BlendFrame> frames);

/// Uniform sampling; resolution = samples per direction, >= 2.
/// Throws Error{degenerate_surface} when the tessellated area vanishes.
SampleGrid sample_patch(const Patch& patch, int resolution);

/// Min and max sampled slope in degrees.
std::pair<double, double> slope_range(const Patch& patch, int resolution);

/// Contact curves of the surface at height z (marching squares over the
/// parametric grid, linearly interpolated, chained into open/closed curves).
std::vector<SectionCurve> horizontal_sections(const Patch& patch, double z, int resolution);

}  // namespace forgecam
