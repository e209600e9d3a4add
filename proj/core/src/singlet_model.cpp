#include "singlet/singlet_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace singlet {

Spin spin_from_int(int v) {
  if (v == 1) return Spin::up;
  if (v == -1) return Spin::down;
  throw std::invalid_argument("outcome must be +1 or -1");
}

double distance(const HiddenPair& p, const HiddenPair& q) noexcept {
  return std::hypot(distance(p.u, q.u), distance(p.v, q.v));
}

double JointTable::max_abs_difference(const JointTable& other) const noexcept {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(p[i] - other.p[i]));
  return worst;
}

double p_joint_given_hv(const Outcome& out, const HiddenPair& hv, const Settings& s) noexcept {
  return 0.25 * (1.0 + value(out.sigma) * dot(hv.u, s.a)) * (1.0 + value(out.tau) * dot(hv.v, s.b));
}

double p_marginal_a(Spin sigma, const HiddenPair& hv, const Settings& s) noexcept {
  return 0.5 * (1.0 + value(sigma) * dot(hv.u, s.a));
}

double p_marginal_b(Spin tau, const HiddenPair& hv, const Settings& s) noexcept {
  return 0.5 * (1.0 + value(tau) * dot(hv.v, s.b));
}

ConditionalProbability p_cond_b_given_a(Spin tau, Spin sigma, const HiddenPair& hv, const Settings& s) noexcept {
  return {0.5 * (1.0 + value(tau) * dot(hv.v, s.b)), p_marginal_a(sigma, hv, s) == 0.0};
}

double p_joint_averaged(const Outcome& out, const Settings& s, const PairDistribution& dist) noexcept {
  double total = 0.0;
  for (const auto& atom : dist.atoms()) total += atom.weight * p_joint_given_hv(out, atom.point, s);
  return total;
}

double p_joint_averaged(const Outcome& out, const Settings& s) {
  return p_joint_averaged(out, s, build_distribution(s));
}

JointTable averaged_table(const Settings& s, const PairDistribution& dist) {
  JointTable table;
  for (Spin sigma : kSpins) {
    for (Spin tau : kSpins) table.at(sigma, tau) = p_joint_averaged({sigma, tau}, s, dist);
  }
  return table;
}

JointTable averaged_table(const Settings& s) { return averaged_table(s, build_distribution(s)); }

double correlator(const Settings& s, const PairDistribution& dist) {
  return averaged_table(s, dist).correlator();
}

double correlator(const Settings& s) { return correlator(s, build_distribution(s)); }

double qm_singlet_joint(const Outcome& out, const Settings& s) noexcept {
  const auto a = s.a.components();
  const auto b = s.b.components();
  const double cos_ab = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  const double product = out.sigma == out.tau ? 1.0 : -1.0;
  return 0.25 * (1.0 - product * cos_ab);
}

JointTable qm_singlet_table(const Settings& s) noexcept {
  JointTable table;
  for (Spin sigma : kSpins) {
    for (Spin tau : kSpins) table.at(sigma, tau) = qm_singlet_joint({sigma, tau}, s);
  }
  return table;
}

}  // namespace singlet
