#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "relay_ee/channel.hpp"
#include "relay_ee/power.hpp"
#include "relay_ee/subcarrier.hpp"
#include "relay_ee/virtual_link.hpp"

namespace testkit {

using namespace relay_ee;

inline bool close_rel(double a, double b, double tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= tol * scale;
}

/// One-subcarrier, one-user channel with the given BS->user CNR, per-relay
/// BS->relay CNRs and relay->user CNRs.
inline ChannelRealization single_pair(double direct, const std::vector<double>& first_hop,
                                      const std::vector<double>& second_hop) {
  ChannelRealization ch(1, 1, first_hop.size());
  ch.bs_user(0, 0) = direct;
  for (std::size_t r = 0; r < first_hop.size(); ++r) {
    ch.bs_relay(0, r) = first_hop[r];
    ch.relay_user(0, r, 0) = second_hop[r];
  }
  return ch;
}

/// Random single-pair channel; CNRs log-uniform over four decades.
inline ChannelRealization random_pair(std::mt19937_64& gen, std::size_t relays) {
  std::uniform_real_distribution<double> expo(-2.0, 2.0);
  auto draw = [&] { return std::pow(10.0, expo(gen)); };
  std::vector<double> first(relays), second(relays);
  const double direct = draw();
  for (std::size_t r = 0; r < relays; ++r) {
    first[r] = draw();
    second[r] = draw();
  }
  return single_pair(direct, first, second);
}

/// Best destination SNR of DF beamforming with a given helper set, found by
/// searching the BS slot-1 power over [0, 2P] directly on the two hop SNRs.
/// Slot 2 uses maximum-ratio beamforming, so its SNR is the MISO CNR times
/// the slot-2 power.
inline double searched_df_snr(double direct, const std::vector<double>& first_hop,
                              const std::vector<double>& second_hop, double p_pair) {
  const double weakest = *std::min_element(first_hop.begin(), first_hop.end());
  double miso = direct;
  for (double g : second_hop) {
    miso += g;
  }
  auto snr = [&](double p_bs) {
    const double relay_decodes = weakest * p_bs;
    const double destination = direct * p_bs + miso * (2.0 * p_pair - p_bs);
    return std::min(relay_decodes, destination);
  };
  // min of an increasing and a non-increasing line is unimodal.
  double lo = 0.0;
  double hi = 2.0 * p_pair;
  for (int i = 0; i < 300; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (snr(m1) < snr(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return snr(0.5 * (lo + hi));
}

/// Gain over the direct link of the best searched DF SNR for a relay subset
/// (bitmask over the relays of a single-pair channel); 1 for the empty set.
inline double searched_gain(const ChannelRealization& ch, std::uint64_t mask) {
  if (mask == 0) {
    return 1.0;
  }
  std::vector<double> first, second;
  for (std::size_t r = 0; r < ch.num_relays(); ++r) {
    if (mask & (std::uint64_t{1} << r)) {
      first.push_back(ch.bs_relay(0, r));
      second.push_back(ch.relay_user(0, r, 0));
    }
  }
  const double direct = ch.bs_user(0, 0);
  return searched_df_snr(direct, first, second, 1.0) / (2.0 * direct);
}

/// Random profile: K users, random subset sizes summing to N, random CNRs.
inline DeltaProfile random_profile(std::mt19937_64& gen, std::size_t users, std::size_t subcarriers,
                                   std::vector<double> alpha = {}) {
  std::uniform_real_distribution<double> expo(-1.0, 2.0);
  Matrix<double> upsilon(subcarriers, users);
  for (double& u : upsilon.flat()) {
    u = std::pow(10.0, expo(gen));
  }
  std::vector<std::size_t> owner(subcarriers);
  for (std::size_t n = 0; n < subcarriers; ++n) {
    owner[n] = n < users ? n : static_cast<std::size_t>(gen() % users);
  }
  std::shuffle(owner.begin(), owner.end(), gen);
  std::vector<std::vector<std::size_t>> sets(users);
  for (std::size_t n = 0; n < subcarriers; ++n) {
    sets[owner[n]].push_back(n);
  }
  if (alpha.empty()) {
    std::uniform_real_distribution<double> weight(0.5, 4.0);
    for (std::size_t k = 0; k < users; ++k) {
      alpha.push_back(weight(gen));
    }
  }
  return build_profile(make_assignment(sets, upsilon, 1.0), upsilon, alpha, subcarriers);
}

/// Rate of one user at a given per-subcarrier power vector, bit/s/Hz.
inline double user_rate(const UserProfile& user, const std::vector<double>& powers, std::size_t n_total) {
  double r = 0.0;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    r += std::log2(1.0 + user.upsilon[i] * powers[i]) / (2.0 * static_cast<double>(n_total));
  }
  return r;
}

}  // namespace testkit
