#include <array>
#include <cmath>

#include "bustop/error.hpp"
#include "bustop/trace.hpp"

namespace bustop {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Minimal rotation taking unit vector u onto +z (Rodrigues form).
// `one_plus_c` is 1 + u.z, passed in so callers can form it without
// cancellation when u points nearly straight down.
Mat3 rotation_onto_z(double ux, double uy, double one_plus_c) {
  // v = u x z
  const double vx = uy, vy = -ux, vz = 0.0;
  if (one_plus_c < 1e-12) {
    // antiparallel: half-turn about x
    return {{{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}};
  }
  const double k = 1.0 / one_plus_c;
  // R = I + [v]x + [v]x^2 / (1 + c)
  Mat3 r{};
  r[0][0] = 1.0 - (vy * vy + vz * vz) * k;
  r[0][1] = -vz + vx * vy * k;
  r[0][2] = vy + vx * vz * k;
  r[1][0] = vz + vx * vy * k;
  r[1][1] = 1.0 - (vx * vx + vz * vz) * k;
  r[1][2] = -vx + vy * vz * k;
  r[2][0] = -vy + vx * vz * k;
  r[2][1] = vx + vy * vz * k;
  r[2][2] = 1.0 - (vx * vx + vy * vy) * k;
  return r;
}

}  // namespace

std::vector<ImuSample> reorient_imu(const std::vector<ImuSample>& imu) {
  if (imu.size() < kMinImuSamplesForGravity) {
    throw Error(ErrorCode::InsufficientSamples,
                std::to_string(imu.size()) + " IMU samples, need " + std::to_string(kMinImuSamplesForGravity));
  }
  double mx = 0, my = 0, mz = 0;
  for (const auto& s : imu) {
    mx += s.ax;
    my += s.ay;
    mz += s.az;
  }
  const double n = static_cast<double>(imu.size());
  mx /= n;
  my /= n;
  mz /= n;
  const double g = std::sqrt(mx * mx + my * my + mz * mz);
  if (!(g >= 1.0)) {
    throw Error(ErrorCode::DegenerateGravity, "mean acceleration magnitude " + std::to_string(g) + " m/s^2");
  }
  // 1 + mz/g, rewritten as (mx^2 + my^2) / (g (g - mz)) when mz < 0.
  const double one_plus_c = mz >= 0 ? 1.0 + mz / g : (mx * mx + my * my) / (g * (g - mz));
  const auto r = rotation_onto_z(mx / g, my / g, one_plus_c);

  std::vector<ImuSample> out;
  out.reserve(imu.size());
  for (const auto& s : imu) {
    out.push_back({s.t, r[0][0] * s.ax + r[0][1] * s.ay + r[0][2] * s.az,
                   r[1][0] * s.ax + r[1][1] * s.ay + r[1][2] * s.az,
                   r[2][0] * s.ax + r[2][1] * s.ay + r[2][2] * s.az});
  }
  return out;
}

}  // namespace bustop
