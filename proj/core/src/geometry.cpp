#include "singlet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace singlet {

UnitVec3 UnitVec3::normalized(double x, double y, double z) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    throw std::invalid_argument("UnitVec3: non-finite component");
  }
  const double norm = std::hypot(x, y, z);
  if (norm == 0.0) throw std::invalid_argument("UnitVec3: zero vector has no direction");
  return UnitVec3(x / norm, y / norm, z / norm);
}

UnitVec3 operator*(int sign, const UnitVec3& v) {
  if (sign == 1) return v;
  if (sign == -1) return -v;
  throw std::invalid_argument("UnitVec3: sign must be +1 or -1");
}

std::ostream& operator<<(std::ostream& os, const UnitVec3& v) {
  return os << '(' << v.x() << ", " << v.y() << ", " << v.z() << ')';
}

double dot(const UnitVec3& u, const UnitVec3& v) noexcept {
  return std::clamp(u.x() * v.x() + u.y() * v.y() + u.z() * v.z(), -1.0, 1.0);
}

double distance(const UnitVec3& u, const UnitVec3& v) noexcept {
  return std::hypot(u.x() - v.x(), u.y() - v.y(), u.z() - v.z());
}

bool collinear(const UnitVec3& u, const UnitVec3& v, double tol) noexcept {
  return distance(u, v) <= tol || distance(u, -v) <= tol;
}

UnitVec3 planar_direction(double angle_rad) {
  if (!std::isfinite(angle_rad)) throw std::invalid_argument("planar_direction: non-finite angle");
  return UnitVec3::normalized(std::cos(angle_rad), std::sin(angle_rad), 0.0);
}

UnitVec3 planar_direction_deg(double angle_deg) {
  if (!std::isfinite(angle_deg)) throw std::invalid_argument("planar_direction: non-finite angle");
  // Exact values on the axes so that 90-degree settings are exactly orthogonal.
  const double reduced = std::fmod(angle_deg, 360.0);
  const double turn = reduced < 0 ? reduced + 360.0 : reduced;
  if (turn == 0.0) return UnitVec3::ex();
  if (turn == 90.0) return UnitVec3::ey();
  if (turn == 180.0) return -UnitVec3::ex();
  if (turn == 270.0) return -UnitVec3::ey();
  return planar_direction(angle_deg * std::numbers::pi / 180.0);
}

UnitVec3 random_direction(Stream& stream) {
  const double z = 1.0 - 2.0 * stream.uniform();
  const double phi = 2.0 * std::numbers::pi * stream.uniform();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return UnitVec3::normalized(r * std::cos(phi), r * std::sin(phi), z);
}

}  // namespace singlet
