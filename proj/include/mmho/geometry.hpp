#pragma once

#include <cstdint>
#include <vector>

namespace mmho {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

double distance_3d(const Point3& a, const Point3& b);
double planar_distance(const Point3& a, const Point3& b);

/// Rectangular service area managed by one agent, with its base stations.
struct Zone {
  double width = 100.0;
  double depth = 100.0;
  std::vector<Point3> bs_positions;

  bool contains(const Point3& p, double slack = 1e-9) const;
  int num_bs() const { return static_cast<int>(bs_positions.size()); }
};

/// Four BSs at the quadrant centers of a width x depth area.
Zone quadrant_zone(double width = 100.0, double depth = 100.0, double bs_height = 10.0);

/// Throws std::invalid_argument when a BS lies outside the area or the area is degenerate.
void validate_zone(const Zone& zone);

struct Trajectory {
  int ue_id = 0;
  double speed_kmh = 0.0;
  std::vector<Point3> positions;  // one per slot boundary, length T+1
};

struct MobilityParams {
  double ue_height = 1.5;
  double turn_probability = 0.05;  // per slot
};

double step_length(double speed_kmh, double slot_s);

/// Number of slots T in an episode of the given duration.
int slot_count(double duration_s, double slot_s);

/// Random-heading straight-line walk with specular reflection at the zone
/// walls. Deterministic in `seed`. Every planar step has length
/// speed*slot exactly; a step that would leave the zone flips the offending
/// heading component before moving.
Trajectory generate_trajectory(std::uint64_t seed, double speed_kmh, const Zone& zone,
                               double duration_s, double slot_s, int ue_id = 0,
                               const MobilityParams& params = {});

}  // namespace mmho
