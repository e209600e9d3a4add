#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "singlet/model_types.hpp"

namespace singlet {

enum class Normalization {
  required,   ///< weights must sum to 1 within 1e-12
  unchecked,  ///< any positive total; only for deliberately broken models
};

template <class Point>
struct Atom {
  double weight;
  Point point;
};

/// A finite set of weighted point masses.
///
/// Points closer than kMergeTolerance (Euclidean) are merged into one atom with
/// the summed weight, so two delta functions at the same place never double
/// count. The point type fixes the space: pair space (HiddenPair) or single
/// vector space (UnitVec3). Mixing spaces does not compile.
template <class Point>
class AtomicDist {
 public:
  static constexpr double kMergeTolerance = 1e-9;
  static constexpr double kNormTolerance = 1e-12;

  /// Throws std::invalid_argument for an empty list, a non-positive or
  /// non-finite weight, or (with Normalization::required) a total weight
  /// away from 1.
  static AtomicDist from_atoms(std::vector<Atom<Point>> atoms, Normalization norm = Normalization::required);

  std::span<const Atom<Point>> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  double total_weight() const noexcept;

  /// Weight at the atom within kMergeTolerance of p, or 0.
  double weight_at(const Point& p) const noexcept;

 private:
  explicit AtomicDist(std::vector<Atom<Point>> atoms) : atoms_(std::move(atoms)) {}

  std::vector<Atom<Point>> atoms_;
};

using PairDistribution = AtomicDist<HiddenPair>;
using DirectionDistribution = AtomicDist<UnitVec3>;

/// mu(u, v | a, b) = 1/4 sum over p in {+a, -a, +b, -b} of delta(u - p) delta(v + p).
/// Collinear settings collapse to two atoms of weight 1/2.
PairDistribution build_distribution(const Settings& s);

/// The same atoms rescaled to `total_weight` and left unnormalized.
PairDistribution build_unnormalized_distribution(const Settings& s, double total_weight);

/// Projection onto the u slot (the distribution seen by station A).
DirectionDistribution marginal_u(const PairDistribution& d);

/// Projection onto the v slot.
DirectionDistribution marginal_v(const PairDistribution& d);

/// (1/2) sum over the union of supports of |w1 - w2|.
template <class Point>
double tv_distance(const AtomicDist<Point>& d1, const AtomicDist<Point>& d2) noexcept;

/// tv_distance between the model distributions at two setting pairs.
double measurement_dependence(const Settings& s1, const Settings& s2);

// Serialized as [{"w": .., "u": [x,y,z], "v": [x,y,z]}, ...]; single-vector
// distributions omit "v".
void to_json(nlohmann::json& j, const UnitVec3& v);
void to_json(nlohmann::json& j, const Settings& s);
void to_json(nlohmann::json& j, const PairDistribution& d);
void to_json(nlohmann::json& j, const DirectionDistribution& d);

extern template class AtomicDist<HiddenPair>;
extern template class AtomicDist<UnitVec3>;
extern template double tv_distance(const PairDistribution&, const PairDistribution&) noexcept;
extern template double tv_distance(const DirectionDistribution&, const DirectionDistribution&) noexcept;

}  // namespace singlet
