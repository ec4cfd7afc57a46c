// Planar array geometry, angular conventions, and far-field steering vectors.
//
// Directions are azimuth/elevation pairs in the local frame of an array:
// boresight is the outward normal of the aperture, azimuth rotates toward
// the local "right" axis, elevation toward the local "up" axis.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace risac {

using Vec3 = Eigen::Vector3d;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kSpeedOfLight = 299792458.0;

inline double deg2rad(double d) { return d * M_PI / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / M_PI; }

struct Direction {
  double az_deg = 0.0;
  double el_deg = 0.0;
};

// Orthonormal local frame of a planar array; up is chosen as close to the
// global +z axis as the boresight allows.
struct ArrayFrame {
  Vec3 right{1, 0, 0};
  Vec3 up{0, 0, 1};
  Vec3 boresight{0, 1, 0};

  static ArrayFrame from_boresight(const Vec3& b) {
    ArrayFrame f;
    f.boresight = b.normalized();
    Vec3 z(0, 0, 1);
    if (std::abs(f.boresight.dot(z)) > 0.999) z = Vec3(0, 1, 0);
    f.right = f.boresight.cross(z).normalized();
    f.up = f.right.cross(f.boresight);
    return f;
  }

  Vec3 unit_toward(const Direction& d) const {
    const double az = deg2rad(d.az_deg), el = deg2rad(d.el_deg);
    return std::sin(az) * std::cos(el) * right + std::cos(az) * std::cos(el) * boresight +
           std::sin(el) * up;
  }

  Direction angles_of(const Vec3& unit_global) const {
    const double x = unit_global.dot(right);
    const double y = unit_global.dot(boresight);
    const double z = std::clamp(unit_global.dot(up), -1.0, 1.0);
    return {rad2deg(std::atan2(x, y)), rad2deg(std::asin(z))};
  }
};

struct ArrayGeometry {
  std::vector<Vec3> positions;  // global coordinates, meters
  ArrayFrame frame;

  // Center of gravity; phase reference of the steering vector.
  Vec3 reference() const {
    Vec3 c = Vec3::Zero();
    for (const auto& p : positions) c += p;
    return c / static_cast<double>(positions.size());
  }

  // Largest distance between any element pair.
  double aperture() const {
    double m = 0.0;
    for (size_t i = 0; i < positions.size(); ++i)
      for (size_t j = i + 1; j < positions.size(); ++j)
        m = std::max(m, (positions[i] - positions[j]).norm());
    return m;
  }

  static ArrayGeometry planar(const Vec3& center, const Vec3& boresight, int nx, int nz,
                              double spacing) {
    if (nx < 1 || nz < 1 || spacing <= 0.0)
      throw std::invalid_argument("planar array needs nx,nz >= 1 and spacing > 0");
    ArrayGeometry g;
    g.frame = ArrayFrame::from_boresight(boresight);
    g.positions.reserve(static_cast<size_t>(nx) * nz);
    const double x0 = -0.5 * (nx - 1) * spacing;
    const double z0 = -0.5 * (nz - 1) * spacing;
    for (int iz = 0; iz < nz; ++iz)
      for (int ix = 0; ix < nx; ++ix)
        g.positions.push_back(center + (x0 + ix * spacing) * g.frame.right +
                              (z0 + iz * spacing) * g.frame.up);
    return g;
  }
};

// Far-field steering vector at frequency freq_hz: entry d carries the phase
// advance of element d relative to the array reference for a plane wave
// propagating toward `dir`. All entries have unit magnitude.
inline CVec steering_vector(const ArrayGeometry& geom, const Direction& dir, double freq_hz) {
  if (freq_hz <= 0.0) throw std::invalid_argument("steering_vector: freq must be positive");
  const Vec3 u = geom.frame.unit_toward(dir);
  const Vec3 ref = geom.reference();
  const double k = 2.0 * M_PI * freq_hz / kSpeedOfLight;
  CVec t(static_cast<Eigen::Index>(geom.positions.size()));
  for (Eigen::Index d = 0; d < t.size(); ++d) {
    const double phase = k * (geom.positions[static_cast<size_t>(d)] - ref).dot(u);
    t[d] = std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return t;
}

// Element power gain pi*cos(az)*cos(el); zero behind the aperture plane.
inline double element_gain(const Direction& dir) {
  const double ca = std::cos(deg2rad(dir.az_deg));
  const double ce = std::cos(deg2rad(dir.el_deg));
  if (ca <= 0.0 || ce <= 0.0) return 0.0;
  return M_PI * ca * ce;
}

}  // namespace risac
