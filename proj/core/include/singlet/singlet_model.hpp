#pragma once

#include "singlet/hv_distribution.hpp"
#include "singlet/model_types.hpp"

namespace singlet {

/// (1/4)(1 + sigma u.a)(1 + tau v.b)
double p_joint_given_hv(const Outcome& out, const HiddenPair& hv, const Settings& s) noexcept;

/// (1/2)(1 + sigma u.a). Depends on neither v nor b.
double p_marginal_a(Spin sigma, const HiddenPair& hv, const Settings& s) noexcept;

/// (1/2)(1 + tau v.b).
double p_marginal_b(Spin tau, const HiddenPair& hv, const Settings& s) noexcept;

struct ConditionalProbability {
  double value;
  /// Set when P_A(sigma) = 0, i.e. the ratio joint/marginal is undefined.
  /// `value` still holds the closed form.
  bool degenerate;
};

/// P(tau | sigma, u, v, Sigma) = (1/2)(1 + tau v.b), independent of sigma.
ConditionalProbability p_cond_b_given_a(Spin tau, Spin sigma, const HiddenPair& hv, const Settings& s) noexcept;

/// Weighted sum of p_joint_given_hv over the atoms of `dist`.
double p_joint_averaged(const Outcome& out, const Settings& s, const PairDistribution& dist) noexcept;

/// Average over the model distribution build_distribution(s).
double p_joint_averaged(const Outcome& out, const Settings& s);

JointTable averaged_table(const Settings& s);
JointTable averaged_table(const Settings& s, const PairDistribution& dist);

/// Sum over (sigma, tau) of sigma tau P^HV. Equals -a.b for the model distribution.
double correlator(const Settings& s);
double correlator(const Settings& s, const PairDistribution& dist);

/// Quantum prediction for the singlet, (1/4)(1 - sigma tau a.b). Shares no code
/// with the hidden-variable path and serves as its oracle.
double qm_singlet_joint(const Outcome& out, const Settings& s) noexcept;

JointTable qm_singlet_table(const Settings& s) noexcept;

}  // namespace singlet
