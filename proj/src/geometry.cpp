#include "mmho/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "mmho/rng.hpp"

namespace mmho {

double distance_3d(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double planar_distance(const Point3& a, const Point3& b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool Zone::contains(const Point3& p, double slack) const {
  return p.x >= -slack && p.x <= width + slack && p.y >= -slack && p.y <= depth + slack &&
         p.z >= 0.0;
}

Zone quadrant_zone(double width, double depth, double bs_height) {
  Zone zone;
  zone.width = width;
  zone.depth = depth;
  for (int qy = 0; qy < 2; ++qy)
    for (int qx = 0; qx < 2; ++qx)
      zone.bs_positions.push_back({width * (0.25 + 0.5 * qx), depth * (0.25 + 0.5 * qy), bs_height});
  return zone;
}

void validate_zone(const Zone& zone) {
  if (!(zone.width > 0.0) || !(zone.depth > 0.0))
    throw std::invalid_argument("zone dimensions must be positive");
  if (zone.bs_positions.empty()) throw std::invalid_argument("zone has no base stations");
  for (std::size_t j = 0; j < zone.bs_positions.size(); ++j) {
    if (!zone.contains(zone.bs_positions[j], 0.0))
      throw std::invalid_argument("base station " + std::to_string(j) + " lies outside the zone");
  }
}

double step_length(double speed_kmh, double slot_s) { return speed_kmh / 3.6 * slot_s; }

int slot_count(double duration_s, double slot_s) {
  // Small epsilon so 100 / 0.1 does not floor to 999.
  return static_cast<int>(std::floor(duration_s / slot_s + 1e-9));
}

Trajectory generate_trajectory(std::uint64_t seed, double speed_kmh, const Zone& zone,
                               double duration_s, double slot_s, int ue_id,
                               const MobilityParams& params) {
  if (!(duration_s > 0.0) || !(slot_s > 0.0) || !(speed_kmh > 0.0))
    throw std::invalid_argument("trajectory needs positive duration, slot and speed");
  const double step = step_length(speed_kmh, slot_s);
  if (zone.width < 2.0 * step || zone.depth < 2.0 * step)
    throw std::invalid_argument("zone too small to hold one mobility step of " +
                                std::to_string(step) + " m");

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> heading_dist(0.0, 2.0 * std::numbers::pi);

  const int slots = slot_count(duration_s, slot_s);
  Trajectory traj;
  traj.ue_id = ue_id;
  traj.speed_kmh = speed_kmh;
  traj.positions.reserve(static_cast<std::size_t>(slots) + 1);

  Point3 p{zone.width * unit(rng), zone.depth * unit(rng), params.ue_height};
  double heading = heading_dist(rng);
  double dx = step * std::cos(heading);
  double dy = step * std::sin(heading);
  traj.positions.push_back(p);

  for (int t = 0; t < slots; ++t) {
    if (unit(rng) < params.turn_probability) {
      heading = heading_dist(rng);
      dx = step * std::cos(heading);
      dy = step * std::sin(heading);
    }
    if (p.x + dx < 0.0 || p.x + dx > zone.width) dx = -dx;
    if (p.y + dy < 0.0 || p.y + dy > zone.depth) dy = -dy;
    p.x += dx;
    p.y += dy;
    traj.positions.push_back(p);
  }
  return traj;
}

}  // namespace mmho
