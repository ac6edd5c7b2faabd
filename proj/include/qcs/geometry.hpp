#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcs/constants.hpp"

namespace qcs {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

struct GroundStation {
  std::string name;
  double latitude_deg = 0.0;   // [-90, 90]
  double longitude_deg = 0.0;  // [-180, 180]
  double altitude_m = 0.0;

  void validate() const {
    if (latitude_deg < -90.0 || latitude_deg > 90.0)
      throw std::invalid_argument("station '" + name + "': latitude out of range");
    if (longitude_deg < -180.0 || longitude_deg > 180.0)
      throw std::invalid_argument("station '" + name + "': longitude out of range");
  }
};

// A circular orbit. tilt_deg follows the "polar orbit tilted by theta"
// convention: 0 is a polar orbit, +/-90 an equatorial one. The standard
// inclination relative to the equator is 90 - tilt.
struct CircularOrbit {
  double altitude_m = 500e3;
  double tilt_deg = 0.0;
  double raan_deg = 0.0;
  double phase_deg = 0.0;
  int n_satellites = 1;

  void validate() const {
    if (altitude_m <= 0.0) throw std::invalid_argument("orbit: altitude_m must be > 0");
    if (n_satellites < 1) throw std::invalid_argument("orbit: n_satellites must be >= 1");
  }
};

struct Constellation {
  std::vector<CircularOrbit> orbits;

  int total_satellites() const {
    int n = 0;
    for (const auto& o : orbits) n += o.n_satellites;
    return n;
  }

  // Flat satellite index -> (orbit, index within orbit). Indexing is the
  // declaration order, so it is stable across a run.
  std::pair<const CircularOrbit*, int> locate(int sat_index) const {
    int base = 0;
    for (const auto& o : orbits) {
      if (sat_index < base + o.n_satellites) return {&o, sat_index - base};
      base += o.n_satellites;
    }
    throw std::out_of_range("satellite index out of range");
  }
};

struct LinkGeometry {
  double distance_m = 0.0;
  double zenith_angle_rad = 0.0;
  bool visible = false;
};

inline double orbital_period_s(double altitude_m) {
  const double r = kEarthRadiusM + altitude_m;
  return 2.0 * kPi * std::sqrt(r * r * r / kEarthMuM3S2);
}

inline double orbital_period(const CircularOrbit& orbit) {
  return orbital_period_s(orbit.altitude_m);
}

// Inertial-frame position of one satellite at time t. The orbit circle starts
// in the equatorial plane, is rotated about x by the inclination (90 - tilt),
// then about z by the RAAN.
inline Vec3 satellite_position(const CircularOrbit& orbit, int sat_index, double t) {
  if (sat_index < 0 || sat_index >= orbit.n_satellites)
    throw std::out_of_range("satellite index out of range");
  const double r = kEarthRadiusM + orbit.altitude_m;
  const double period = orbital_period(orbit);
  const double alpha =
      deg2rad(orbit.phase_deg + 360.0 * sat_index / orbit.n_satellites) +
      2.0 * kPi * t / period;
  const double ca = std::cos(alpha), sa = std::sin(alpha);

  const double inc = deg2rad(90.0 - orbit.tilt_deg);
  const double ci = std::cos(inc), si = std::sin(inc);
  // Rx(inc) applied to (r*ca, r*sa, 0)
  const double x1 = r * ca, y1 = r * sa * ci, z1 = r * sa * si;

  const double raan = deg2rad(orbit.raan_deg);
  const double cr = std::cos(raan), sr = std::sin(raan);
  return {x1 * cr - y1 * sr, x1 * sr + y1 * cr, z1};
}

// Inertial-frame position of a ground station on the rotating Earth.
// At t = 0 the inertial longitude equals the catalog longitude.
inline Vec3 ground_position(const GroundStation& gs, double t) {
  const double r = kEarthRadiusM + gs.altitude_m;
  const double lat = deg2rad(gs.latitude_deg);
  const double lon = deg2rad(gs.longitude_deg) + kEarthOmegaRadS * t;
  const double cl = std::cos(lat);
  return {r * cl * std::cos(lon), r * cl * std::sin(lon), r * std::sin(lat)};
}

inline constexpr double kDefaultZenithMaskDeg = 80.0;

// Line-of-sight geometry between a satellite position and a station at time t.
// The local vertical on the spherical Earth is the radial direction.
inline LinkGeometry link_geometry(const Vec3& sat_pos, const GroundStation& gs,
                                  double t,
                                  double zenith_mask_deg = kDefaultZenithMaskDeg) {
  const Vec3 g = ground_position(gs, t);
  const Vec3 d = sat_pos - g;
  LinkGeometry lg;
  lg.distance_m = norm(d);
  const double up = dot(d, g) / (lg.distance_m * norm(g));
  lg.zenith_angle_rad = std::acos(std::min(1.0, std::max(-1.0, up)));
  lg.visible = lg.zenith_angle_rad <= deg2rad(zenith_mask_deg);
  return lg;
}

// CSV dump of the raw geometry over a sampling grid:
// t_s, sat_id, gs_name, distance_m, zenith_deg, visible
inline void write_trajectory_csv(std::ostream& out, const Constellation& cons,
                                 const std::vector<GroundStation>& stations,
                                 double span_s, double step_s,
                                 double zenith_mask_deg = kDefaultZenithMaskDeg) {
  out << "t_s,sat_id,gs_name,distance_m,zenith_deg,visible\n";
  const int n_sats = cons.total_satellites();
  char buf[160];
  for (double t = 0.0; t <= span_s; t += step_s) {
    for (int s = 0; s < n_sats; ++s) {
      auto [orbit, local] = cons.locate(s);
      const Vec3 p = satellite_position(*orbit, local, t);
      for (const auto& gs : stations) {
        const LinkGeometry lg = link_geometry(p, gs, t, zenith_mask_deg);
        std::snprintf(buf, sizeof buf, "%.3f,%d,%s,%.3f,%.6f,%d\n", t, s,
                      gs.name.c_str(), lg.distance_m,
                      rad2deg(lg.zenith_angle_rad), lg.visible ? 1 : 0);
        out << buf;
      }
    }
  }
}

}  // namespace qcs
