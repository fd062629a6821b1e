#pragma once

namespace bustop {

inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kPi = 3.14159265358979323846;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  bool operator==(const LatLon&) const = default;
};

// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
double haversine(LatLon a, LatLon b);

// Point `meters` due north (negative: south) of `from`, along its meridian.
LatLon offset_north(LatLon from, double meters);
// Point `meters` due east along the parallel through `from` (small offsets).
LatLon offset_east(LatLon from, double meters);

}  // namespace bustop
