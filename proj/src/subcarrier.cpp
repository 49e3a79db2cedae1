#include "relay_ee/subcarrier.hpp"

#include <cmath>
#include <string>

#include "relay_ee/virtual_link.hpp"

namespace relay_ee {

double equal_power_rate(double upsilon, double p_trans, std::size_t num_subcarriers) {
  if (!(upsilon > 0.0)) {
    throw ValidationError("virtual CNRs must be positive");
  }
  return e2e_rate(upsilon, p_trans / static_cast<double>(num_subcarriers), num_subcarriers);
}

namespace {

void check_upsilon(const Matrix<double>& upsilon) {
  for (double u : upsilon.flat()) {
    if (!(std::isfinite(u) && u > 0.0)) {
      throw ValidationError("virtual CNRs must be positive and finite");
    }
  }
}

}  // namespace

Assignment assign_subcarriers(const Matrix<double>& upsilon, double p_trans, std::span<const double> alpha,
                              UserPick pick) {
  const std::size_t n_total = upsilon.rows();
  const std::size_t k_total = upsilon.cols();
  if (n_total < k_total) {
    throw ValidationError("cannot give each of " + std::to_string(k_total) + " users a subcarrier out of " +
                          std::to_string(n_total));
  }
  if (alpha.size() != k_total) {
    throw ValidationError("alpha size does not match the number of users");
  }
  for (double a : alpha) {
    if (!(a > 0.0)) {
      throw ValidationError("alpha entries must be positive");
    }
  }
  if (!(p_trans > 0.0)) {
    throw ValidationError("transmit power must be positive");
  }
  check_upsilon(upsilon);

  Matrix<double> rate(n_total, k_total);
  for (std::size_t n = 0; n < n_total; ++n) {
    for (std::size_t k = 0; k < k_total; ++k) {
      rate(n, k) = equal_power_rate(upsilon(n, k), p_trans, n_total);
    }
  }

  Assignment out;
  out.sets.assign(k_total, {});
  out.theta = Matrix<int>(n_total, k_total, 0);
  out.rates_equal_power.assign(k_total, 0.0);
  std::vector<bool> taken(n_total, false);

  auto give_best = [&](std::size_t k) {
    std::size_t best = n_total;
    for (std::size_t n = 0; n < n_total; ++n) {
      if (!taken[n] && (best == n_total || rate(n, k) > rate(best, k))) {
        best = n;
      }
    }
    taken[best] = true;
    out.sets[k].push_back(best);
    out.theta(best, k) = 1;
    out.rates_equal_power[k] += rate(best, k);
  };

  for (std::size_t k = 0; k < k_total; ++k) {
    give_best(k);
  }
  for (std::size_t remaining = n_total - k_total; remaining > 0; --remaining) {
    std::size_t chosen = 0;
    double chosen_ratio = out.rates_equal_power[0] / alpha[0];
    for (std::size_t k = 1; k < k_total; ++k) {
      const double ratio = out.rates_equal_power[k] / alpha[k];
      const bool better = pick == UserPick::MostUnderserved ? ratio < chosen_ratio : ratio > chosen_ratio;
      if (better) {
        chosen = k;
        chosen_ratio = ratio;
      }
    }
    give_best(chosen);
  }
  return out;
}

Assignment make_assignment(std::vector<std::vector<std::size_t>> sets, const Matrix<double>& upsilon,
                           double p_trans) {
  const std::size_t n_total = upsilon.rows();
  const std::size_t k_total = upsilon.cols();
  if (sets.size() != k_total) {
    throw ValidationError("assignment must list one subcarrier set per user");
  }
  Assignment out;
  out.theta = Matrix<int>(n_total, k_total, 0);
  out.rates_equal_power.assign(k_total, 0.0);
  for (std::size_t k = 0; k < k_total; ++k) {
    for (std::size_t n : sets[k]) {
      if (n >= n_total) {
        throw ValidationError("subcarrier index out of range");
      }
      out.theta(n, k) += 1;
      out.rates_equal_power[k] += equal_power_rate(upsilon(n, k), p_trans, n_total);
    }
  }
  out.sets = std::move(sets);
  check_partition(out);
  return out;
}

void check_partition(const Assignment& a) {
  const std::size_t n_total = a.theta.rows();
  const std::size_t k_total = a.theta.cols();
  if (a.sets.size() != k_total) {
    throw ValidationError("assignment sets and theta disagree on the number of users");
  }
  for (std::size_t n = 0; n < n_total; ++n) {
    int owners = 0;
    for (std::size_t k = 0; k < k_total; ++k) {
      owners += a.theta(n, k);
    }
    if (owners != 1) {
      throw ValidationError("subcarrier " + std::to_string(n) + " has " + std::to_string(owners) + " owners");
    }
  }
  for (std::size_t k = 0; k < k_total; ++k) {
    if (a.sets[k].empty()) {
      throw ValidationError("user " + std::to_string(k) + " holds no subcarrier");
    }
    std::size_t in_theta = 0;
    for (std::size_t n = 0; n < n_total; ++n) {
      in_theta += static_cast<std::size_t>(a.theta(n, k));
    }
    if (in_theta != a.sets[k].size()) {
      throw ValidationError("subcarrier sets disagree with theta for user " + std::to_string(k));
    }
    for (std::size_t n : a.sets[k]) {
      if (n >= n_total || a.theta(n, k) != 1) {
        throw ValidationError("subcarrier sets disagree with theta for user " + std::to_string(k));
      }
    }
  }
}

}  // namespace relay_ee
