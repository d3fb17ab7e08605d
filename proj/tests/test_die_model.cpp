#include <doctest.h>

#include <cmath>

#include "forgecam/die_model.hpp"
#include "forgecam/error.hpp"

using namespace forgecam;

namespace {

const char* kMinimalDie = R"({
  "surfaces": [
    {"id": "top", "kind": "plane", "origin": [0,0,0], "normal": [0,0,1],
     "boundary": [[0,0,0],[10,0,0],[10,10,0],[0,10,0]]}
  ],
  "technology": {
    "extraction_direction": [0,0,1],
    "slope_angle_deg": 3.0,
    "target_scallop_mm": 0.01,
    "programmed_feed_mm_min": 6000.0,
    "clearance_z_mm": 20.0
  }
})";

}  // namespace

TEST_CASE("minimal die parses") {
    const DieModel model = parse_die_model(kMinimalDie);
    REQUIRE(model.surfaces.size() == 1);
    CHECK(model.surfaces[0].kind == SurfaceKind::plane);
    CHECK(model.surfaces[0].id == "top");
    CHECK(model.technology.slope_angle_deg == doctest::Approx(3.0));
}

TEST_CASE("dangling blend reference is rejected") {
    const char* doc = R"({
      "surfaces": [
        {"id": "floor", "kind": "plane", "origin": [0,0,0], "normal": [0,0,1],
         "boundary": [[0,0,0],[10,0,0],[10,10,0],[0,10,0]]},
        {"id": "B1", "kind": "blend", "spine": [[0,0,1],[10,0,1]], "radius": 1.0,
         "adjacent": ["floor", "S99"]}
      ],
      "technology": {"extraction_direction": [0,0,1], "slope_angle_deg": 3,
                     "target_scallop_mm": 0.01, "programmed_feed_mm_min": 6000,
                     "clearance_z_mm": 20}
    })";
    try {
        parse_die_model(doc);
        FAIL("expected dangling reference error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::dangling_reference);
        CHECK(std::string(e.what()).find("S99") != std::string::npos);
    }
}

TEST_CASE("downward extraction direction is rejected") {
    const char* doc = R"({
      "surfaces": [
        {"id": "top", "kind": "plane", "origin": [0,0,0], "normal": [0,0,1],
         "boundary": [[0,0,0],[10,0,0],[10,10,0],[0,10,0]]}
      ],
      "technology": {"extraction_direction": [0,0,-1], "slope_angle_deg": 3,
                     "target_scallop_mm": 0.01, "programmed_feed_mm_min": 6000,
                     "clearance_z_mm": 20}
    })";
    CHECK_THROWS_AS(parse_die_model(doc), Error);
}

TEST_CASE("schema violations carry context") {
    CHECK_THROWS_AS(parse_die_model("{}"), Error);
    CHECK_THROWS_AS(parse_die_model("not json"), Error);
    CHECK_THROWS_AS(parse_die_model(R"({"surfaces": [], "technology": {}})"), Error);
}

TEST_CASE("die model round trips through serialisation") {
    const DieModel model = parse_die_model(kMinimalDie);
    const std::string text = serialize_die_model(model);
    const DieModel again = parse_die_model(text);
    CHECK(again.surfaces.size() == model.surfaces.size());
    CHECK(serialize_die_model(again) == text);
}

TEST_CASE("machinability: flat die with drafted walls is clean") {
    const char* doc = R"({
      "surfaces": [
        {"id": "floor", "kind": "plane", "origin": [0,0,0], "normal": [0,0,1],
         "boundary": [[0,0,0],[20,0,0],[20,20,0],[0,20,0]]},
        {"id": "wall", "kind": "extruded",
         "generatrix": [[-0.524,0,9.986],[0,0,0]], "direction": [0,1,0], "extent": 20}
      ],
      "technology": {"extraction_direction": [0,0,1], "slope_angle_deg": 3,
                     "target_scallop_mm": 0.01, "programmed_feed_mm_min": 6000,
                     "clearance_z_mm": 20}
    })";
    CompiledDie die(parse_die_model(doc));
    const MachinabilityReport report = check_machinability(die, 17);
    CHECK(report.machinable);
    CHECK(report.undercuts.empty());
    CHECK(report.machining_direction.z == doctest::Approx(1.0));
}

TEST_CASE("machinability: overhanging revolve is reported at all resolutions") {
    // radius grows with z: outward normals dip below the horizon
    const char* doc = R"({
      "surfaces": [
        {"id": "overhang", "kind": "revolved", "axis_point": [0,0,0], "axis_dir": [0,0,1],
         "profile": [[5,0,5],[4,0,0]], "angle_start_deg": 0, "angle_end_deg": 360}
      ],
      "technology": {"extraction_direction": [0,0,1], "slope_angle_deg": 3,
                     "target_scallop_mm": 0.01, "programmed_feed_mm_min": 6000,
                     "clearance_z_mm": 20}
    })";
    CompiledDie die(parse_die_model(doc));
    for (int res : {9, 17, 33, 65}) {
        const MachinabilityReport report = check_machinability(die, res);
        CHECK_FALSE(report.machinable);
        CHECK_FALSE(report.undercuts.empty());
        for (const UndercutSample& u : report.undercuts) CHECK(u.normal.z < -1e-6);
    }
}

TEST_CASE("blend frames derive tangency from neighbours") {
    // floor at z=0 and a vertical-ish wall at y=10; concave fillet r=1 between
    const char* doc = R"({
      "surfaces": [
        {"id": "floor", "kind": "plane", "origin": [0,0,0], "normal": [0,0,1],
         "boundary": [[0,0,0],[30,0,0],[30,9,0],[0,9,0]]},
        {"id": "wall", "kind": "extruded",
         "generatrix": [[0,10,1],[30,10,1]], "direction": [-0.0523,0,0.99863], "extent": 8},
        {"id": "B1", "kind": "blend", "spine": [[0,9,1],[30,9,1]], "radius": 1.0,
         "adjacent": ["floor", "wall"], "convex": false}
      ],
      "technology": {"extraction_direction": [0,0,1], "slope_angle_deg": 3,
                     "target_scallop_mm": 0.01, "programmed_feed_mm_min": 6000,
                     "clearance_z_mm": 20}
    })";
    CompiledDie die(parse_die_model(doc));
    const std::size_t bi = die.index_of("B1");
    const Patch& blend = die.patch(bi);
    const SampleGrid grid = sample_patch(blend, 17);
    // fillet spans floor tangency (slope 0) to near-wall tangency (slope ~87)
    double lo = 180.0, hi = 0.0;
    for (const GridSample& s : grid.samples) {
        lo = std::min(lo, s.slope_deg);
        hi = std::max(hi, s.slope_deg);
    }
    CHECK(lo < 1.0);
    CHECK(hi > 80.0);
    // tangency point at the floor side sits at floor level
    bool touches_floor = false;
    for (const GridSample& s : grid.samples)
        if (std::abs(s.point.z) < 1e-6) touches_floor = true;
    CHECK(touches_floor);
}

TEST_CASE("tools parse and validate") {
    const char* doc = R"({"tools": [
      {"id": "D10_flat", "shape": "flat_end", "cutting_radius_mm": 5.0},
      {"id": "R5_ball", "shape": "ball_end", "cutting_radius_mm": 5.0,
       "body_radius_mm": 5.0, "overall_length_mm": 70.0}
    ]})";
    const std::vector<Tool> tools = parse_tools(doc);
    REQUIRE(tools.size() == 2);
    CHECK(tools[0].shape == ToolShape::flat_end);
    CHECK(tools[1].cutting_radius_mm == doctest::Approx(5.0));
    CHECK_THROWS_AS(parse_tools(R"({"tools": [{"id":"x","shape":"ball_end","cutting_radius_mm":-1}]})"),
                    Error);
}
