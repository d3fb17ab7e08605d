#include <doctest.h>

#include "forgecam/geometry.hpp"

using namespace forgecam;

TEST_CASE("vector basics") {
    const Vec3 a{1, 2, 3};
    const Vec3 b{4, 5, 6};
    CHECK(dot(a, b) == doctest::Approx(32.0));
    const Vec3 c = cross(Vec3{1, 0, 0}, Vec3{0, 1, 0});
    CHECK(c.z == doctest::Approx(1.0));
    CHECK(Vec3{3, 4, 0}.norm() == doctest::Approx(5.0));
    CHECK(is_unit(Vec3{0, 0, 1}));
    CHECK_FALSE(is_unit(Vec3{0, 0, 1.1}));
}

TEST_CASE("angles and slope") {
    CHECK(angle_deg({1, 0, 0}, {0, 1, 0}) == doctest::Approx(90.0));
    CHECK(angle_deg({1, 0, 0}, {1, 0, 0}) == doctest::Approx(0.0));
    CHECK(slope_deg({0, 0, 1}) == doctest::Approx(0.0));
    CHECK(slope_deg({1, 0, 0}) == doctest::Approx(90.0));
    CHECK(slope_deg({0, 0, -1}) == doctest::Approx(180.0));
}

TEST_CASE("polyline arc length and closure") {
    Polyline3 p;
    p.points = {{0, 0, 0}, {10, 0, 0}, {10, 5, 0}};
    CHECK(p.length() == doctest::Approx(15.0));
    CHECK_FALSE(p.is_closed());
    const Vec3 mid = p.point_at(12.0);
    CHECK(mid.x == doctest::Approx(10.0));
    CHECK(mid.y == doctest::Approx(2.0));

    Polyline3 loop;
    loop.points = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 0, 0}};
    CHECK(loop.is_closed());
}

TEST_CASE("polyline distance") {
    Polyline3 p;
    p.points = {{0, 0, 0}, {10, 0, 0}};
    CHECK(p.distance_to({5, 3, 0}) == doctest::Approx(3.0));
    CHECK(p.distance_to({-4, 0, 3}) == doctest::Approx(5.0));
}

TEST_CASE("polygon area centroid containment") {
    const std::vector<Vec2> square{{0, 0}, {4, 0}, {4, 4}, {0, 4}};
    CHECK(polygon_area(square) == doctest::Approx(16.0));
    const Vec2 c = polygon_centroid(square);
    CHECK(c.x == doctest::Approx(2.0));
    CHECK(c.y == doctest::Approx(2.0));
    CHECK(point_in_polygon({2, 2}, square));
    CHECK_FALSE(point_in_polygon({5, 2}, square));
}

TEST_CASE("region signed distance with hole") {
    const std::vector<std::vector<Vec2>> loops{
        {{0, 0}, {10, 0}, {10, 10}, {0, 10}},
        {{4, 4}, {6, 4}, {6, 6}, {4, 6}},
    };
    CHECK(region_signed_distance({2, 5}, loops) == doctest::Approx(2.0));
    CHECK(region_signed_distance({5, 5}, loops) == doctest::Approx(-1.0));  // inside hole
    CHECK(region_signed_distance({12, 5}, loops) == doctest::Approx(-2.0));
}
