#include "singlet/hv_distribution.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace singlet {

namespace {

double point_distance(const UnitVec3& p, const UnitVec3& q) noexcept { return distance(p, q); }
double point_distance(const HiddenPair& p, const HiddenPair& q) noexcept { return distance(p, q); }

DirectionDistribution project(const PairDistribution& d, UnitVec3 (*slot)(const HiddenPair&)) {
  std::vector<Atom<UnitVec3>> atoms;
  atoms.reserve(d.size());
  for (const auto& atom : d.atoms()) atoms.push_back({atom.weight, slot(atom.point)});
  const bool normalized = std::abs(d.total_weight() - 1.0) <= PairDistribution::kNormTolerance;
  return DirectionDistribution::from_atoms(std::move(atoms),
                                           normalized ? Normalization::required : Normalization::unchecked);
}

UnitVec3 u_slot(const HiddenPair& hv) { return hv.u; }
UnitVec3 v_slot(const HiddenPair& hv) { return hv.v; }

std::vector<Atom<HiddenPair>> model_atoms(const Settings& s, double weight) {
  std::vector<Atom<HiddenPair>> atoms;
  atoms.reserve(4);
  for (const UnitVec3& p : {s.a, -s.a, s.b, -s.b}) atoms.push_back({weight, HiddenPair{p, -p}});
  return atoms;
}

}  // namespace

template <class Point>
AtomicDist<Point> AtomicDist<Point>::from_atoms(std::vector<Atom<Point>> atoms, Normalization norm) {
  if (atoms.empty()) throw std::invalid_argument("AtomicDist: no atoms");
  std::vector<Atom<Point>> merged;
  merged.reserve(atoms.size());
  for (const auto& atom : atoms) {
    if (!std::isfinite(atom.weight) || atom.weight <= 0.0) {
      throw std::invalid_argument("AtomicDist: atom weights must be positive and finite");
    }
    bool absorbed = false;
    for (auto& existing : merged) {
      if (point_distance(existing.point, atom.point) <= kMergeTolerance) {
        existing.weight += atom.weight;
        absorbed = true;
        break;
      }
    }
    if (!absorbed) merged.push_back(atom);
  }
  AtomicDist dist(std::move(merged));
  if (norm == Normalization::required && std::abs(dist.total_weight() - 1.0) > kNormTolerance) {
    throw std::invalid_argument("AtomicDist: weights do not sum to 1");
  }
  return dist;
}

template <class Point>
double AtomicDist<Point>::total_weight() const noexcept {
  return std::accumulate(atoms_.begin(), atoms_.end(), 0.0,
                         [](double acc, const Atom<Point>& a) { return acc + a.weight; });
}

template <class Point>
double AtomicDist<Point>::weight_at(const Point& p) const noexcept {
  for (const auto& atom : atoms_) {
    if (point_distance(atom.point, p) <= kMergeTolerance) return atom.weight;
  }
  return 0.0;
}

template <class Point>
double tv_distance(const AtomicDist<Point>& d1, const AtomicDist<Point>& d2) noexcept {
  double total = 0.0;
  for (const auto& atom : d1.atoms()) total += std::abs(atom.weight - d2.weight_at(atom.point));
  for (const auto& atom : d2.atoms()) {
    if (d1.weight_at(atom.point) == 0.0) total += atom.weight;
  }
  return 0.5 * total;
}

template class AtomicDist<HiddenPair>;
template class AtomicDist<UnitVec3>;
template double tv_distance(const PairDistribution&, const PairDistribution&) noexcept;
template double tv_distance(const DirectionDistribution&, const DirectionDistribution&) noexcept;

PairDistribution build_distribution(const Settings& s) {
  return PairDistribution::from_atoms(model_atoms(s, 0.25));
}

PairDistribution build_unnormalized_distribution(const Settings& s, double total_weight) {
  return PairDistribution::from_atoms(model_atoms(s, total_weight / 4.0), Normalization::unchecked);
}

DirectionDistribution marginal_u(const PairDistribution& d) { return project(d, &u_slot); }
DirectionDistribution marginal_v(const PairDistribution& d) { return project(d, &v_slot); }

double measurement_dependence(const Settings& s1, const Settings& s2) {
  return tv_distance(build_distribution(s1), build_distribution(s2));
}

void to_json(nlohmann::json& j, const UnitVec3& v) { j = nlohmann::json::array({v.x(), v.y(), v.z()}); }

void to_json(nlohmann::json& j, const Settings& s) { j = nlohmann::json{{"a", s.a}, {"b", s.b}}; }

void to_json(nlohmann::json& j, const PairDistribution& d) {
  j = nlohmann::json::array();
  for (const auto& atom : d.atoms()) {
    j.push_back({{"w", atom.weight}, {"u", atom.point.u}, {"v", atom.point.v}});
  }
}

void to_json(nlohmann::json& j, const DirectionDistribution& d) {
  j = nlohmann::json::array();
  for (const auto& atom : d.atoms()) j.push_back({{"w", atom.weight}, {"u", atom.point}});
}

}  // namespace singlet
