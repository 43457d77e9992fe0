#include <doctest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "mmho/geometry.hpp"

using namespace mmho;

TEST_CASE("distance_3d examples") {
  CHECK(distance_3d({0, 0, 0}, {0, 0, 0}) == 0.0);
  CHECK(distance_3d({3, 4, 0}, {0, 0, 0}) == 5.0);
  CHECK(distance_3d({0, 0, 10}, {0, 0, 1.5}) == 8.5);
  const Point3 a{1.5, -2.0, 7.0}, b{-4.0, 3.25, 0.5};
  CHECK(distance_3d(a, b) == distance_3d(b, a));
  CHECK(planar_distance({3, 4, 10}, {0, 0, 1.5}) == 5.0);
}

TEST_CASE("step length is speed times slot") {
  CHECK(step_length(5.0, 0.1) == doctest::Approx(5000.0 / 3600.0 * 0.1).epsilon(1e-15));
  CHECK(step_length(5.0, 0.1) == doctest::Approx(0.1389).epsilon(1e-3));
  CHECK(step_length(60.0, 0.1) == doctest::Approx(1.667).epsilon(1e-3));
}

TEST_CASE("slot count and trajectory length") {
  CHECK(slot_count(100.0, 0.1) == 1000);
  CHECK(slot_count(20.0, 0.1) == 200);
  const auto traj = generate_trajectory(7, 5.0, quadrant_zone(), 100.0, 0.1);
  CHECK(traj.positions.size() == 1001);
}

TEST_CASE("quadrant zone places four BSs at the quadrant centers") {
  const Zone z = quadrant_zone();
  REQUIRE(z.num_bs() == 4);
  CHECK(z.bs_positions[0] == Point3{25, 25, 10});
  CHECK(z.bs_positions[3] == Point3{75, 75, 10});
  CHECK_NOTHROW(validate_zone(z));
  Zone bad = z;
  bad.bs_positions.push_back({120, 10, 10});
  CHECK_THROWS_AS(validate_zone(bad), std::invalid_argument);
}

TEST_CASE("trajectories stay inside the zone with exact step lengths") {
  const Zone zone = quadrant_zone(40.0, 25.0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    for (double speed : {5.0, 60.0, 300.0}) {
      const auto traj = generate_trajectory(seed, speed, zone, 30.0, 0.1, 3);
      const double step = step_length(speed, 0.1);
      for (std::size_t t = 0; t < traj.positions.size(); ++t) {
        const Point3& p = traj.positions[t];
        REQUIRE(p.x >= 0.0);
        REQUIRE(p.x <= zone.width);
        REQUIRE(p.y >= 0.0);
        REQUIRE(p.y <= zone.depth);
        REQUIRE(p.z == 1.5);
        if (t > 0) REQUIRE(std::abs(planar_distance(p, traj.positions[t - 1]) - step) < 1e-9);
      }
    }
  }
}

TEST_CASE("same seed gives a byte-identical trajectory") {
  const auto a = generate_trajectory(42, 60.0, quadrant_zone(), 20.0, 0.1);
  const auto b = generate_trajectory(42, 60.0, quadrant_zone(), 20.0, 0.1);
  const auto c = generate_trajectory(43, 60.0, quadrant_zone(), 20.0, 0.1);
  REQUIRE(a.positions.size() == b.positions.size());
  CHECK(std::memcmp(a.positions.data(), b.positions.data(), a.positions.size() * sizeof(Point3)) == 0);
  CHECK_FALSE(a.positions == c.positions);
}

TEST_CASE("headings change over a long walk") {
  // With turn probability 0.05 and reflections, a 100 s walk is not a straight line.
  const auto traj = generate_trajectory(3, 5.0, quadrant_zone(), 100.0, 0.1);
  const Point3 first = traj.positions[1], last = traj.positions.back();
  const double dx0 = first.x - traj.positions[0].x;
  const double dxn = last.x - traj.positions[traj.positions.size() - 2].x;
  const double dy0 = first.y - traj.positions[0].y;
  const double dyn = last.y - traj.positions[traj.positions.size() - 2].y;
  CHECK((std::abs(dx0 - dxn) > 1e-9 || std::abs(dy0 - dyn) > 1e-9));
}

TEST_CASE("invalid trajectory requests are rejected") {
  CHECK_THROWS_AS(generate_trajectory(1, 0.0, quadrant_zone(), 10.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(generate_trajectory(1, 5.0, quadrant_zone(), 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(generate_trajectory(1, 5.0, quadrant_zone(), 10.0, -0.1), std::invalid_argument);
  // 60 km/h over 1 s slots is a 16.7 m step; a 20 m wide area cannot hold two.
  CHECK_THROWS_AS(generate_trajectory(1, 60.0, quadrant_zone(20.0, 100.0), 10.0, 1.0), std::invalid_argument);
}
