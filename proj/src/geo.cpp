#include "bustop/geo.hpp"

#include <algorithm>
#include <cmath>

namespace bustop {

namespace {
constexpr double deg2rad(double d) { return d * kPi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / kPi; }
}  // namespace

double haversine(LatLon a, LatLon b) {
  const double phi1 = deg2rad(a.lat), phi2 = deg2rad(b.lat);
  const double dphi = phi2 - phi1;
  const double dlam = deg2rad(b.lon - a.lon);
  const double s1 = std::sin(dphi / 2), s2 = std::sin(dlam / 2);
  const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

LatLon offset_north(LatLon from, double meters) {
  return {from.lat + rad2deg(meters / kEarthRadiusM), from.lon};
}

LatLon offset_east(LatLon from, double meters) {
  return {from.lat, from.lon + rad2deg(meters / (kEarthRadiusM * std::cos(deg2rad(from.lat))))};
}

}  // namespace bustop
