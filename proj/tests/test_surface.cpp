#include <doctest.h>

#include <cmath>

#include "forgecam/error.hpp"
#include "forgecam/geometry.hpp"
#include "forgecam/surface.hpp"

using namespace forgecam;

namespace {

Surface horizontal_plane(double z, double w = 20.0, double h = 20.0) {
    Surface s;
    s.id = "plane";
    s.kind = SurfaceKind::plane;
    PlaneDef def;
    def.origin = {0, 0, z};
    def.normal = {0, 0, 1};
    def.boundary.points = {{0, 0, z}, {w, 0, z}, {w, h, z}, {0, h, z}};
    s.def = def;
    return s;
}

/// Quarter-cylinder fillet: generatrix sweeps from the top (slope 0) down
/// to vertical (slope 90), extruded along +Y.
Surface quarter_cylinder(double r, int n = 257) {
    Surface s;
    s.id = "qcyl";
    s.kind = SurfaceKind::extruded;
    ExtrudedDef def;
    for (int i = 0; i < n; ++i) {
        const double theta = kPi / 2.0 * (1.0 - static_cast<double>(i) / (n - 1));
        def.generatrix.points.push_back({r * std::cos(theta), 0.0, r * std::sin(theta)});
    }
    def.direction = {0, 1, 0};
    def.extent = 30.0;
    s.def = def;
    return s;
}

Surface drafted_wall(double draft_deg, double height = 10.0) {
    Surface s;
    s.id = "wall";
    s.kind = SurfaceKind::extruded;
    ExtrudedDef def;
    const double d = deg_to_rad(draft_deg);
    def.generatrix.points = {{0, 0, 0}, {height * std::sin(d), 0, height * std::cos(d)}};
    def.direction = {0, 1, 0};
    def.extent = 40.0;
    s.def = def;
    return s;
}

}  // namespace

TEST_CASE("horizontal plane sampling") {
    const Surface s = horizontal_plane(10.0);
    auto patch = make_patch(s);
    const SampleGrid grid = sample_patch(*patch, 3);
    CHECK(grid.samples.size() == 9);
    for (const GridSample& gs : grid.samples) {
        CHECK(gs.point.z == doctest::Approx(10.0));
        // declared-normal consistency, 1e-9
        CHECK(std::abs(gs.normal.x) < 1e-9);
        CHECK(std::abs(gs.normal.y) < 1e-9);
        CHECK(std::abs(gs.normal.z - 1.0) < 1e-9);
        CHECK(gs.slope_deg == doctest::Approx(0.0));
    }
}

TEST_CASE("sampling is deterministic bit for bit") {
    const Surface s = quarter_cylinder(5.0);
    auto patch = make_patch(s);
    const SampleGrid a = sample_patch(*patch, 17);
    const SampleGrid b = sample_patch(*patch, 17);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].point.x == b.samples[i].point.x);
        CHECK(a.samples[i].point.y == b.samples[i].point.y);
        CHECK(a.samples[i].point.z == b.samples[i].point.z);
        CHECK(a.samples[i].slope_deg == b.samples[i].slope_deg);
    }
}

TEST_CASE("quarter cylinder slopes run 0 to 90") {
    const Surface s = quarter_cylinder(5.0);
    auto patch = make_patch(s);
    const auto [lo, hi] = slope_range(*patch, 33);
    CHECK(lo == doctest::Approx(0.0).epsilon(0.01));
    CHECK(lo < 0.5);
    CHECK(hi == doctest::Approx(90.0).epsilon(0.01));
    CHECK(hi > 89.5);

    // analytic check: sampled slope matches the cylinder angle
    const SampleGrid grid = sample_patch(*patch, 33);
    for (int i = 0; i < grid.nu; ++i) {
        const GridSample& gs = grid.at(i, 0);
        const double analytic = rad_to_deg(std::atan2(gs.point.x, gs.point.z));
        CHECK(gs.slope_deg == doctest::Approx(analytic).epsilon(0.02));
    }
}

TEST_CASE("drafted wall slope is 87 degrees") {
    const Surface s = drafted_wall(3.0);
    auto patch = make_patch(s);
    const auto [lo, hi] = slope_range(*patch, 9);
    CHECK(lo == doctest::Approx(87.0));
    CHECK(hi == doctest::Approx(87.0));
}

TEST_CASE("ruled surface between parallel lines at different z") {
    Surface s;
    s.id = "ramp";
    s.kind = SurfaceKind::ruled;
    RuledDef def;
    def.rail0.points = {{0, 0, 0}, {10, 0, 0}, {20, 0, 0}};
    def.rail1.points = {{0, 5, 5}, {10, 5, 5}, {20, 5, 5}};
    s.def = def;
    auto patch = make_patch(s);
    const auto [lo, hi] = slope_range(*patch, 17);
    CHECK(lo == doctest::Approx(45.0));
    CHECK(hi == doctest::Approx(45.0));
}

TEST_CASE("slope range contains finer sample slopes within tolerance") {
    const Surface s = quarter_cylinder(5.0, 65);
    auto patch = make_patch(s);
    const auto [lo, hi] = slope_range(*patch, 17);
    const SampleGrid fine = sample_patch(*patch, 65);
    for (const GridSample& gs : fine.samples) {
        CHECK(gs.slope_deg >= lo - 1.0);
        CHECK(gs.slope_deg <= hi + 1.0);
    }
}

TEST_CASE("degenerate surface rejected") {
    Surface s;
    s.id = "degen";
    s.kind = SurfaceKind::ruled;
    RuledDef def;
    def.rail0.points = {{0, 0, 0}, {10, 0, 0}};
    def.rail1.points = {{0, 0, 0}, {10, 0, 0}};  // coincident rails
    s.def = def;
    auto patch = make_patch(s);
    CHECK_THROWS_AS(sample_patch(*patch, 9), Error);
}

TEST_CASE("vertical hit on plane and extrusion") {
    const Surface sp = horizontal_plane(10.0);
    auto plane = make_patch(sp);
    auto hit = plane->vertical_hit(5.0, 5.0);
    REQUIRE(hit.has_value());
    CHECK(hit->z == doctest::Approx(10.0));
    CHECK_FALSE(plane->vertical_hit(25.0, 5.0).has_value());

    const Surface sq = quarter_cylinder(5.0);
    auto cyl = make_patch(sq);
    // height field of the quarter cylinder: z = sqrt(r^2 - x^2)
    for (double x : {0.5, 2.0, 4.0, 4.9}) {
        auto h = cyl->vertical_hit(x, 10.0);
        REQUIRE(h.has_value());
        CHECK(h->z == doctest::Approx(std::sqrt(25.0 - x * x)).epsilon(1e-4));
    }
}

TEST_CASE("revolved cone: meridian rulings and vertical hit") {
    Surface s;
    s.id = "cone";
    s.kind = SurfaceKind::revolved;
    RevolvedDef def;
    def.axis_point = {0, 0, 0};
    def.axis_dir = {0, 0, 1};
    def.profile.points = {{10, 0, 0}, {6, 0, 8}};  // flank narrowing upward
    s.def = def;
    auto patch = make_patch(s);

    auto hit = patch->vertical_hit(8.0, 0.0);
    REQUIRE(hit.has_value());
    CHECK(hit->z == doctest::Approx(4.0).epsilon(1e-6));

    const auto rulings = patch->ruling_curves(8);
    CHECK(rulings.size() == 8);
    for (const Polyline3& r : rulings) CHECK(r.length() == doctest::Approx(std::sqrt(16.0 + 64.0)));
}

TEST_CASE("horizontal sections of a drafted wall") {
    const Surface s = drafted_wall(3.0, 10.0);
    auto patch = make_patch(s);
    const auto curves = horizontal_sections(*patch, 5.0, 65);
    REQUIRE(curves.size() == 1);
    CHECK_FALSE(curves[0].closed);
    // the section of the wall at z=5 runs along Y at x = 5*tan(3 deg)
    const double expect_x = 5.0 * std::tan(deg_to_rad(3.0));
    for (const Vec3& p : curves[0].contacts.points) {
        CHECK(p.z == doctest::Approx(5.0).epsilon(1e-6));
        CHECK(p.x == doctest::Approx(expect_x).epsilon(1e-4));
    }
    CHECK(curves[0].contacts.length() == doctest::Approx(40.0).epsilon(0.01));
}

TEST_CASE("horizontal sections of a closed ruled pocket wall are loops") {
    // drafted rounded-square wall ring, rails closed
    Surface s;
    s.id = "pocketwall";
    s.kind = SurfaceKind::ruled;
    RuledDef def;
    const int n = 129;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * static_cast<double>(i) / (n - 1);
        const double r_bot = 8.0, r_top = 8.6;
        def.rail0.points.push_back({r_bot * std::cos(t), r_bot * std::sin(t), 0.0});
        def.rail1.points.push_back({r_top * std::cos(t), r_top * std::sin(t), 6.0});
    }
    s.def = def;
    auto patch = make_patch(s);
    const auto curves = horizontal_sections(*patch, 3.0, 129);
    REQUIRE(curves.size() == 1);
    CHECK(curves[0].closed);
    const double expect_r = 8.3;
    for (const Vec3& p : curves[0].contacts.points) {
        CHECK(std::hypot(p.x, p.y) == doctest::Approx(expect_r).epsilon(0.002));
        CHECK(p.z == doctest::Approx(3.0).epsilon(1e-6));
    }
}

TEST_CASE("curvature: concave fillet vs convex dome") {
    // concave quarter-round seen from the cavity side: outward normals point
    // towards the arc centre, max curvature ~ +1/r
    Surface s;
    s.id = "fillet";
    s.kind = SurfaceKind::blend;
    BlendDef def;
    def.spine.points = {{0, 0, 2}, {40, 0, 2}};
    def.radius = 2.0;
    def.adjacent = {"a", "b"};
    def.convex = false;
    std::vector<BlendFrame> frames;
    for (int i = 0; i < 33; ++i) {
        BlendFrame f;
        f.centre = {40.0 * i / 32.0, 0.0, 2.0};
        f.dir_a = {0, 0, -1};
        f.dir_b = {0, -1, 0};
        frames.push_back(f);
    }
    auto patch = make_blend_patch(def, frames);
    CHECK(patch->max_concave_curvature(0.5, 0.5) == doctest::Approx(0.5).epsilon(0.01));

    // convex dome: curvature towards the outward normal is negative
    Surface dome;
    dome.kind = SurfaceKind::revolved;
    RevolvedDef rd;
    rd.axis_point = {0, 0, 0};
    rd.axis_dir = {0, 0, 1};
    const int n = 65;
    for (int i = 0; i < n; ++i) {
        const double th = kPi / 2.0 * (1.0 - static_cast<double>(i) / (n - 1));
        rd.profile.points.push_back({10.0 * std::cos(th) + 1e-6 * i, 0.0, 10.0 * std::sin(th)});
    }
    dome.def = rd;
    auto dpatch = make_patch(dome);
    CHECK(dpatch->max_concave_curvature(0.5, 0.5) < 0.0);
}

TEST_CASE("blend patch geometry matches the fillet arc") {
    BlendDef def;
    def.spine.points = {{0, 10, 5}, {30, 10, 5}};
    def.radius = 3.0;
    def.adjacent = {"floor", "wall"};
    def.convex = false;
    std::vector<BlendFrame> frames;
    for (int i = 0; i < 17; ++i) {
        BlendFrame f;
        f.centre = {30.0 * i / 16.0, 10.0, 5.0};
        f.dir_a = {0, 0, -1};   // towards the floor below
        f.dir_b = {0, 1, 0};    // towards the wall at y > 10
        frames.push_back(f);
    }
    auto patch = make_blend_patch(def, frames);
    // v=0 touches the floor level, v=1 touches the wall
    CHECK(patch->point(0.5, 0.0).z == doctest::Approx(2.0));
    CHECK(patch->point(0.5, 1.0).y == doctest::Approx(13.0));
    // outward normal points away from the material (towards the centre)
    const Vec3 n = patch->normal(0.5, 0.0);
    CHECK(n.z == doctest::Approx(1.0));
    // every point sits on the arc
    for (double v : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const Vec3 p = patch->point(0.3, v);
        const Vec3 c{9.0, 10.0, 5.0};
        CHECK(distance(p, c) == doctest::Approx(3.0).epsilon(1e-9));
    }
}
