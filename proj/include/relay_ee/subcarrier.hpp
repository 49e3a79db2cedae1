#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relay_ee/common.hpp"

namespace relay_ee {

/// Partition of the subcarriers among users.
struct Assignment {
  std::vector<std::vector<std::size_t>> sets;  // S_k, ascending order of assignment
  Matrix<int> theta;                           // N x K, 1 iff subcarrier n belongs to user k
  std::vector<double> rates_equal_power;       // R_k at P_trans / N per subcarrier, bit/s/Hz

  [[nodiscard]] std::size_t num_users() const noexcept { return sets.size(); }
  [[nodiscard]] std::size_t num_subcarriers() const noexcept { return theta.rows(); }
};

/// Which user receives the next subcarrier after every user holds one.
enum class UserPick {
  /// The user furthest below its proportional target (lowest R_k / alpha_k).
  MostUnderserved,
  /// The user furthest above its target; kept for comparison studies only.
  MostServed,
};

/// Rate of one virtual link when the transmit budget is spread evenly over all subcarriers.
/// Throws ValidationError for a non-positive CNR.
[[nodiscard]] double equal_power_rate(double upsilon, double p_trans, std::size_t num_subcarriers);

/// Greedy equal-power subcarrier assignment.
///
/// Every user, in index order, first takes its best free subcarrier. The
/// remaining subcarriers go one at a time to the user chosen by `pick`,
/// which takes its best free subcarrier. User ties go to the lower index,
/// subcarrier ties to the lower index.
///
/// `upsilon` is N x K. Throws ValidationError when N < K, when alpha does not
/// have K positive entries, or when any CNR is non-positive.
[[nodiscard]] Assignment assign_subcarriers(const Matrix<double>& upsilon, double p_trans,
                                            std::span<const double> alpha,
                                            UserPick pick = UserPick::MostUnderserved);

/// Builds an Assignment from explicit sets, recomputing theta and equal-power rates.
/// Throws ValidationError unless `sets` partition {0..N-1}.
[[nodiscard]] Assignment make_assignment(std::vector<std::vector<std::size_t>> sets, const Matrix<double>& upsilon,
                                         double p_trans);

/// Throws ValidationError unless every subcarrier is owned by exactly one
/// user, every user owns at least one, and `sets` agrees with `theta`.
void check_partition(const Assignment& assignment);

}  // namespace relay_ee
