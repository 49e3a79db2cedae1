#include "relay_ee/power.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace relay_ee {

double DeltaProfile::sum_alpha() const {
  double s = 0.0;
  for (const auto& u : users) {
    s += u.alpha;
  }
  return s;
}

double PowerSolution::sum_rate() const { return std::accumulate(rates.begin(), rates.end(), 0.0); }

DeltaProfile build_profile(const Assignment& assignment, const Matrix<double>& upsilon, std::span<const double> alpha,
                           std::size_t num_subcarriers) {
  const std::size_t k_total = assignment.sets.size();
  if (alpha.size() != k_total || upsilon.cols() != k_total) {
    throw ValidationError("profile inputs disagree on the number of users");
  }
  if (num_subcarriers == 0) {
    throw ValidationError("profile needs at least one subcarrier");
  }
  const double two_n = 2.0 * static_cast<double>(num_subcarriers);
  DeltaProfile profile;
  profile.num_subcarriers = num_subcarriers;
  profile.users.resize(k_total);
  for (std::size_t k = 0; k < k_total; ++k) {
    const auto& set = assignment.sets[k];
    if (set.empty()) {
      throw ValidationError("user " + std::to_string(k) + " has no subcarrier");
    }
    UserProfile& user = profile.users[k];
    user.alpha = alpha[k];
    user.subcarriers = set;
    std::sort(user.subcarriers.begin(), user.subcarriers.end(), [&](std::size_t a, std::size_t b) {
      const double ua = upsilon(a, k);
      const double ub = upsilon(b, k);
      return ua < ub || (ua == ub && a < b);
    });
    user.upsilon.reserve(set.size());
    for (std::size_t n : user.subcarriers) {
      const double u = upsilon(n, k);
      if (!(std::isfinite(u) && u > 0.0)) {
        throw ValidationError("virtual CNRs must be positive and finite");
      }
      user.upsilon.push_back(u);
    }
    double q = 0.0;
    for (double u : user.upsilon) {
      q += std::log2(u / user.weakest());
    }
    user.q = q / two_n;
    profile.delta_min = std::max(profile.delta_min, user.q / user.alpha);
  }
  return profile;
}

namespace {

void check_domain(const DeltaProfile& profile, double delta) {
  if (!(delta >= profile.delta_min)) {
    std::ostringstream msg;
    msg << "delta " << delta << " is below the water-filling floor " << profile.delta_min;
    throw DomainError(msg.str());
  }
}

// 2N (delta alpha - q) / |S|, floored at zero to absorb rounding at delta_min.
double exponent(const DeltaProfile& profile, const UserProfile& user, double delta) {
  const double two_n = 2.0 * static_cast<double>(profile.num_subcarriers);
  return std::max(0.0, two_n * (delta * user.alpha - user.q) / static_cast<double>(user.size()));
}

double spread_term(double u, double weakest) { return (u - weakest) / (u * weakest); }

}  // namespace

std::vector<double> user_powers(const DeltaProfile& profile, double delta, std::size_t k) {
  check_domain(profile, delta);
  const UserProfile& user = profile.users.at(k);
  const double base = std::expm1(exponent(profile, user, delta) * std::numbers::ln2) / user.weakest();
  std::vector<double> powers;
  powers.reserve(user.size());
  for (double u : user.upsilon) {
    powers.push_back(base + spread_term(u, user.weakest()));
  }
  return powers;
}

double per_subcarrier_power(const DeltaProfile& profile, double delta, std::size_t k, std::size_t n) {
  const UserProfile& user = profile.users.at(k);
  const auto it = std::find(user.subcarriers.begin(), user.subcarriers.end(), n);
  if (it == user.subcarriers.end()) {
    throw ValidationError("subcarrier " + std::to_string(n) + " is not assigned to user " + std::to_string(k));
  }
  return user_powers(profile, delta, k)[static_cast<std::size_t>(it - user.subcarriers.begin())];
}

double total_transmit_power(const DeltaProfile& profile, double delta) {
  check_domain(profile, delta);
  double total = 0.0;
  for (const auto& user : profile.users) {
    const double size = static_cast<double>(user.size());
    double spread = 0.0;
    for (double u : user.upsilon) {
      spread += spread_term(u, user.weakest());
    }
    total += size * std::expm1(exponent(profile, user, delta) * std::numbers::ln2) / user.weakest() + spread;
  }
  return total;
}

double transmit_power_derivative(const DeltaProfile& profile, double delta) {
  check_domain(profile, delta);
  const double two_n = 2.0 * static_cast<double>(profile.num_subcarriers);
  double total = 0.0;
  for (const auto& user : profile.users) {
    total += two_n * user.alpha * std::numbers::ln2 * std::exp2(exponent(profile, user, delta)) / user.weakest();
  }
  return total;
}

double transmit_power_second_derivative(const DeltaProfile& profile, double delta) {
  check_domain(profile, delta);
  const double two_n = 2.0 * static_cast<double>(profile.num_subcarriers);
  double total = 0.0;
  for (const auto& user : profile.users) {
    const double slope = two_n * user.alpha * std::numbers::ln2;
    total += slope * slope * std::exp2(exponent(profile, user, delta)) /
             (static_cast<double>(user.size()) * user.weakest());
  }
  return total;
}

double total_power(const DeltaProfile& profile, double delta, const SystemConfig& config) {
  return config.eta * total_transmit_power(profile, delta) + config.p_static_w +
         config.xi * delta * profile.sum_alpha();
}

double ee_of_delta(const DeltaProfile& profile, double delta, const SystemConfig& config) {
  const double rate = delta * profile.sum_alpha();
  const double power = total_power(profile, delta, config);
  if (power == 0.0) {
    return profile.sum_alpha() /
           (config.eta * transmit_power_derivative(profile, delta) + config.xi * profile.sum_alpha());
  }
  return rate / power;
}

double g_function(const DeltaProfile& profile, double delta, const SystemConfig& config) {
  return config.eta * total_transmit_power(profile, delta) + config.p_static_w -
         delta * config.eta * transmit_power_derivative(profile, delta);
}

namespace {

// Largest x in [lo, hi] with pred(x) true, assuming pred(lo) and a single
// true->false transition; iterates until the interval stops shrinking.
template <class Pred>
double bisect_last_true(double lo, double hi, Pred pred) {
  for (int i = 0; i < 2000; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) {
      break;
    }
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double unconstrained_optimum(const DeltaProfile& profile, const SystemConfig& config) {
  const auto increasing = [&](double d) { return g_function(profile, d, config) > 0.0; };
  double lo = profile.delta_min;
  double step = std::max(1e-3, 1e-3 * profile.delta_min);
  double hi = profile.delta_min + step;
  while (increasing(hi)) {
    lo = hi;
    step *= 2.0;
    hi = profile.delta_min + step;
    if (!std::isfinite(hi)) {
      throw DomainError("could not bracket the EE maximizer");
    }
  }
  return bisect_last_true(lo, hi, increasing);
}

}  // namespace

PowerSolution solution_at(const DeltaProfile& profile, double delta, const SystemConfig& config) {
  check_domain(profile, delta);
  const std::size_t k_total = profile.users.size();
  PowerSolution sol;
  sol.delta = delta;
  sol.p_kn = Matrix<double>(profile.num_subcarriers, k_total, 0.0);
  sol.rates.assign(k_total, 0.0);
  for (std::size_t k = 0; k < k_total; ++k) {
    const UserProfile& user = profile.users[k];
    const auto powers = user_powers(profile, delta, k);
    for (std::size_t i = 0; i < user.size(); ++i) {
      sol.p_kn(user.subcarriers[i], k) = powers[i];
      sol.rates[k] += e2e_rate(user.upsilon[i], powers[i], profile.num_subcarriers);
      sol.p_trans += powers[i];
    }
  }
  const double sum_rate = sol.sum_rate();
  sol.p_total = config.eta * sol.p_trans + config.p_static_w + config.xi * sum_rate;
  sol.ee = sol.p_total > 0.0 ? sum_rate / sol.p_total : ee_of_delta(profile, delta, config);
  return sol;
}

PowerSolution find_delta_star(const DeltaProfile& profile, const SystemConfig& config) {
  if (!(config.p_max_w > config.p_static_w)) {
    throw ValidationError("p_max_w must exceed p_static_w");
  }
  const double floor = profile.delta_min;
  const double floor_power = total_power(profile, floor, config);
  if (floor_power > config.p_max_w) {
    std::ostringstream msg;
    msg << "power budget " << config.p_max_w << " W cannot cover the water-filling floor, which needs "
        << floor_power << " W";
    throw InfeasibleBudget(msg.str());
  }

  double delta = floor;
  bool clamped = false;
  if (!(g_function(profile, floor, config) > 0.0)) {
    clamped = true;
  } else {
    delta = unconstrained_optimum(profile, config);
  }

  bool binding = false;
  if (total_power(profile, delta, config) > config.p_max_w) {
    binding = true;
    delta = bisect_last_true(floor, delta,
                             [&](double d) { return total_power(profile, d, config) <= config.p_max_w; });
  }

  PowerSolution sol = solution_at(profile, delta, config);
  sol.budget_binding = binding;
  sol.clamped_to_floor = clamped;
  if (clamped) {
    std::ostringstream msg;
    msg << "EE is non-increasing from the water-filling floor; delta clamped to " << floor;
    sol.diagnostics.push_back(msg.str());
  }
  return sol;
}

PowerSolution find_delta_star(const DeltaProfile& profile, const SystemConfig& config, const DecisionGrid& decisions,
                              const ChannelRealization& ch) {
  PowerSolution sol = find_delta_star(profile, config);
  for (std::size_t k = 0; k < profile.users.size(); ++k) {
    for (std::size_t n : profile.users[k].subcarriers) {
      sol.splits.push_back({k, n, df_optimal_split(sol.p_kn(n, k), decisions(n, k), ch)});
    }
  }
  return sol;
}

}  // namespace relay_ee
