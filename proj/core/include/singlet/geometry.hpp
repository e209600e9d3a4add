#pragma once

#include <array>
#include <iosfwd>

#include "singlet/random.hpp"

namespace singlet {

/// A direction on the unit sphere. The only ways to obtain one normalize or
/// validate, so every instance has |v| = 1 to within 1e-12.
class UnitVec3 {
 public:
  /// Normalizes (x, y, z). Throws std::invalid_argument for zero or non-finite input.
  static UnitVec3 normalized(double x, double y, double z);
  static UnitVec3 normalized(const std::array<double, 3>& c) { return normalized(c[0], c[1], c[2]); }

  static UnitVec3 ex() noexcept { return UnitVec3(1.0, 0.0, 0.0); }
  static UnitVec3 ey() noexcept { return UnitVec3(0.0, 1.0, 0.0); }
  static UnitVec3 ez() noexcept { return UnitVec3(0.0, 0.0, 1.0); }

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  double z() const noexcept { return z_; }
  std::array<double, 3> components() const noexcept { return {x_, y_, z_}; }

  UnitVec3 operator-() const noexcept { return UnitVec3(-x_, -y_, -z_); }

  friend bool operator==(const UnitVec3&, const UnitVec3&) = default;

 private:
  UnitVec3(double x, double y, double z) noexcept : x_(x), y_(y), z_(z) {}

  double x_;
  double y_;
  double z_;
};

/// sign * v for sign = +1 or -1. Throws std::invalid_argument otherwise.
UnitVec3 operator*(int sign, const UnitVec3& v);

std::ostream& operator<<(std::ostream& os, const UnitVec3& v);

/// Detector orientations of the two stations.
struct Settings {
  UnitVec3 a;
  UnitVec3 b;

  friend bool operator==(const Settings&, const Settings&) = default;
};

/// Euclidean inner product clamped to [-1, 1].
double dot(const UnitVec3& u, const UnitVec3& v) noexcept;

/// Euclidean distance |u - v|.
double distance(const UnitVec3& u, const UnitVec3& v) noexcept;

/// True when u and v lie on the same line through the origin (u = +-v) within tol.
bool collinear(const UnitVec3& u, const UnitVec3& v, double tol = 1e-9) noexcept;

/// (cos angle, sin angle, 0). Throws std::invalid_argument for a non-finite angle.
UnitVec3 planar_direction(double angle_rad);

/// Same as planar_direction but in degrees.
UnitVec3 planar_direction_deg(double angle_deg);

/// Uniform direction on the sphere from two uniforms u1, u2 of `stream`:
/// z = 1 - 2 u1, phi = 2 pi u2, (x, y) = sqrt(1 - z^2) (cos phi, sin phi).
UnitVec3 random_direction(Stream& stream);

}  // namespace singlet
