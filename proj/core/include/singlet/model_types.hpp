#pragma once

#include <array>
#include <optional>

#include "singlet/geometry.hpp"

namespace singlet {

/// A measurement result, +1 or -1.
enum class Spin : int { down = -1, up = 1 };

constexpr int value(Spin s) noexcept { return static_cast<int>(s); }
constexpr Spin flip(Spin s) noexcept { return s == Spin::up ? Spin::down : Spin::up; }
inline constexpr std::array<Spin, 2> kSpins{Spin::up, Spin::down};

/// Throws std::invalid_argument unless v is +1 or -1.
Spin spin_from_int(int v);

/// Results at both stations: sigma at A, tau at B.
struct Outcome {
  Spin sigma;
  Spin tau;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Hidden vectors carried by the particle flying to A (u) and to B (v).
struct HiddenPair {
  UnitVec3 u;
  UnitVec3 v;

  friend bool operator==(const HiddenPair&, const HiddenPair&) = default;
};

/// sqrt(|du|^2 + |dv|^2).
double distance(const HiddenPair& p, const HiddenPair& q) noexcept;

/// 2x2 probability table over (sigma, tau), with optional standard errors when
/// the table comes from counts.
struct JointTable {
  static constexpr std::size_t index(Spin sigma, Spin tau) noexcept {
    return (sigma == Spin::up ? 0 : 2) + (tau == Spin::up ? 0 : 1);
  }

  double& at(Spin sigma, Spin tau) noexcept { return p[index(sigma, tau)]; }
  double at(Spin sigma, Spin tau) const noexcept { return p[index(sigma, tau)]; }
  double at(const Outcome& o) const noexcept { return at(o.sigma, o.tau); }

  double sum() const noexcept { return p[0] + p[1] + p[2] + p[3]; }

  /// Sum over cells of sigma * tau * p.
  double correlator() const noexcept { return p[0] - p[1] - p[2] + p[3]; }

  /// Largest |p - other.p| over the four cells.
  double max_abs_difference(const JointTable& other) const noexcept;

  std::array<double, 4> p{};
  std::optional<std::array<double, 4>> std_error;
};

}  // namespace singlet
