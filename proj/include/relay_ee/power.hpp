#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "relay_ee/config.hpp"
#include "relay_ee/subcarrier.hpp"
#include "relay_ee/virtual_link.hpp"

namespace relay_ee {

/// One user's subcarriers, sorted by ascending virtual CNR (ties by index).
struct UserProfile {
  std::vector<std::size_t> subcarriers;
  std::vector<double> upsilon;
  double alpha = 1.0;
  /// Rate (bit/s/Hz) the user gets "for free" from CNR spread above its weakest subcarrier:
  /// sum over S_k of log2(upsilon_n / upsilon_min) / (2N).
  double q = 0.0;

  [[nodiscard]] double weakest() const { return upsilon.front(); }
  [[nodiscard]] std::size_t size() const { return upsilon.size(); }
};

/// Everything needed to evaluate the fairness-exact power profile as a
/// function of the common rate-to-weight ratio delta.
struct DeltaProfile {
  std::vector<UserProfile> users;
  std::size_t num_subcarriers = 0;
  /// max_k q_k / alpha_k; below it the weakest subcarrier of some user would need negative power.
  double delta_min = 0.0;

  [[nodiscard]] double sum_alpha() const;
};

/// One relayed or direct pair's node powers inside a solution.
struct PairSplit {
  std::size_t user = 0;
  std::size_t subcarrier = 0;
  NodePowerSplit split;
};

struct PowerSolution {
  double delta = 0.0;               // bit/s/Hz per unit weight
  Matrix<double> p_kn;              // N x K pair budgets, W; zero where unassigned
  std::vector<PairSplit> splits;    // filled only when decisions were supplied
  std::vector<double> rates;        // R_k, bit/s/Hz
  double p_trans = 0.0;             // W
  double p_total = 0.0;             // W
  double ee = 0.0;                  // bit/Hz/J
  bool budget_binding = false;
  bool clamped_to_floor = false;    // EE already decreasing at delta_min
  std::vector<std::string> diagnostics;

  [[nodiscard]] double sum_rate() const;
};

/// Throws ValidationError for an empty user set, mismatched sizes, or non-positive CNRs.
[[nodiscard]] DeltaProfile build_profile(const Assignment& assignment, const Matrix<double>& upsilon,
                                         std::span<const double> alpha, std::size_t num_subcarriers);

/// Pair budget of user k on subcarrier n (a subcarrier index, which must belong to S_k):
///   P = (2^(2N (delta alpha_k - q_k) / |S_k|) - 1) / upsilon_min + (upsilon_n - upsilon_min) / (upsilon_n upsilon_min)
/// Throws DomainError when delta < delta_min.
[[nodiscard]] double per_subcarrier_power(const DeltaProfile& profile, double delta, std::size_t k, std::size_t n);

/// Same as above for every subcarrier of user k, in the profile's sorted order.
[[nodiscard]] std::vector<double> user_powers(const DeltaProfile& profile, double delta, std::size_t k);

/// Closed-form sum of all pair budgets at delta.
[[nodiscard]] double total_transmit_power(const DeltaProfile& profile, double delta);

/// d P_trans / d delta = sum_k 2N alpha_k ln2 2^(e_k) / upsilon_min,k.
[[nodiscard]] double transmit_power_derivative(const DeltaProfile& profile, double delta);

/// d^2 P_trans / d delta^2.
[[nodiscard]] double transmit_power_second_derivative(const DeltaProfile& profile, double delta);

/// eta P_trans + P_static + xi delta sum(alpha).
[[nodiscard]] double total_power(const DeltaProfile& profile, double delta, const SystemConfig& config);

/// delta sum(alpha) / total_power. At delta = 0 with zero total power the
/// ratio is replaced by its right limit.
[[nodiscard]] double ee_of_delta(const DeltaProfile& profile, double delta, const SystemConfig& config);

/// eta P_trans + P_static - delta eta dP_trans/d delta; same sign as dEE/d delta.
[[nodiscard]] double g_function(const DeltaProfile& profile, double delta, const SystemConfig& config);

/// Budget-constrained EE maximizer.
///
/// The unconstrained optimum is the root of g_function, bracketed by doubling
/// a step above delta_min and refined by bisection to machine precision. If
/// the total power there exceeds P_max, the ratio is lowered to where total
/// power meets P_max. Throws InfeasibleBudget when even delta_min costs more
/// than P_max.
[[nodiscard]] PowerSolution find_delta_star(const DeltaProfile& profile, const SystemConfig& config);

/// As above, also recovering each pair's node powers from `decisions` (N x K).
[[nodiscard]] PowerSolution find_delta_star(const DeltaProfile& profile, const SystemConfig& config,
                                            const DecisionGrid& decisions, const ChannelRealization& ch);

/// Full solution at a fixed delta (no optimization, no budget check).
[[nodiscard]] PowerSolution solution_at(const DeltaProfile& profile, double delta, const SystemConfig& config);

}  // namespace relay_ee
