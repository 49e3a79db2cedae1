#include "relay_ee/virtual_link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace relay_ee {

RelaySet::RelaySet(std::vector<std::size_t> members, std::size_t num_relays) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw ValidationError("relay set contains a duplicate index");
  }
  if (!members_.empty() && members_.back() >= num_relays) {
    throw ValidationError("relay index " + std::to_string(members_.back()) + " out of range (L=" +
                          std::to_string(num_relays) + ")");
  }
}

double NodePowerSplit::energy() const {
  double slot2_sum = 0.0;
  for (const auto& node : slot2) {
    slot2_sum += node.power_w;
  }
  return 0.5 * (p_bs_slot1 + slot2_sum);
}

namespace {

double relay_sum(const RelaySet& set, std::size_t k, std::size_t n, const ChannelRealization& ch) {
  double sum = 0.0;
  for (std::size_t r : set.members()) {
    sum += ch.relay_user(n, r, k);
  }
  return sum;
}

void require_nonempty(const RelaySet& set, const char* what) {
  if (set.empty()) {
    throw ValidationError(std::string(what) + " is undefined for an empty relay set");
  }
}

VirtualLinkDecision direct_link(std::size_t k, std::size_t n, const ChannelRealization& ch) {
  VirtualLinkDecision d;
  d.user = k;
  d.subcarrier = n;
  d.beta = 1.0;
  d.relayed = false;
  d.upsilon = 2.0 * ch.bs_user(n, k);
  return d;
}

}  // namespace

double miso_cnr(const RelaySet& set, std::size_t k, std::size_t n, const ChannelRealization& ch) {
  return ch.bs_user(n, k) + relay_sum(set, k, n, ch);
}

double bottleneck_cnr(const RelaySet& set, std::size_t n, const ChannelRealization& ch) {
  require_nonempty(set, "bottleneck CNR");
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t r : set.members()) {
    lowest = std::min(lowest, ch.bs_relay(n, r));
  }
  return lowest;
}

double beta(const RelaySet& set, std::size_t k, std::size_t n, const ChannelRealization& ch) {
  require_nonempty(set, "beamforming gain");
  const double g_direct = ch.bs_user(n, k);
  const double g_relays = relay_sum(set, k, n, ch);
  const double g_min = bottleneck_cnr(set, n, ch);
  return (g_relays + g_direct) * g_min / (g_min * g_direct + g_relays * g_direct);
}

double bottleneck_gap(const RelaySet& set, std::size_t n, const ChannelRealization& ch) {
  if (set.size() < 2) {
    throw ValidationError("bottleneck gap needs at least two relays");
  }
  std::vector<double> first_hop;
  first_hop.reserve(set.size());
  for (std::size_t r : set.members()) {
    first_hop.push_back(ch.bs_relay(n, r));
  }
  std::partial_sort(first_hop.begin(), first_hop.begin() + 2, first_hop.end());
  return first_hop[1] - first_hop[0];
}

double phi_threshold(const RelaySet& set, std::size_t k, std::size_t n, const ChannelRealization& ch) {
  if (set.size() < 2) {
    throw ValidationError("removal threshold needs at least two relays");
  }
  const auto members = set.members();
  const std::size_t bottleneck = *std::min_element(members.begin(), members.end(), [&](auto a, auto b) {
    return ch.bs_relay(n, a) < ch.bs_relay(n, b);
  });
  const double g_direct = ch.bs_user(n, k);
  const double g_relays = relay_sum(set, k, n, ch);
  const double g_min = ch.bs_relay(n, bottleneck);
  const double g_rk = ch.relay_user(n, bottleneck, k);

  const double numerator = g_rk * g_min * g_min - g_direct * g_rk * g_min;
  const double denominator = g_relays * g_relays + g_direct * g_relays - g_min * g_rk - g_relays * g_rk;
  if (denominator <= 0.0 && numerator >= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return numerator / denominator;
}

VirtualLinkDecision decision_for_set(const RelaySet& set, std::size_t k, std::size_t n,
                                     const ChannelRealization& ch) {
  if (set.empty()) {
    return direct_link(k, n, ch);
  }
  const double gain = beta(set, k, n, ch);
  if (!(gain > 1.0)) {
    return direct_link(k, n, ch);
  }
  VirtualLinkDecision d;
  d.user = k;
  d.subcarrier = n;
  d.relay_set = set;
  d.beta = gain;
  d.relayed = true;
  d.upsilon = 2.0 * gain * ch.bs_user(n, k);
  return d;
}

VirtualLinkDecision select_relay_set(std::size_t k, std::size_t n, const ChannelRealization& ch) {
  const double g_direct = ch.bs_user(n, k);
  std::vector<std::size_t> eligible;
  for (std::size_t r = 0; r < ch.num_relays(); ++r) {
    if (ch.bs_relay(n, r) > g_direct) {
      eligible.push_back(r);
    }
  }
  if (eligible.empty()) {
    return direct_link(k, n, ch);
  }
  // Strongest first hop first; the tail is always the current bottleneck.
  std::stable_sort(eligible.begin(), eligible.end(),
                   [&](std::size_t a, std::size_t b) { return ch.bs_relay(n, a) > ch.bs_relay(n, b); });

  RelaySet best;
  double best_beta = -1.0;
  for (std::size_t size = eligible.size(); size >= 1; --size) {
    RelaySet candidate({eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(size)},
                       ch.num_relays());
    const double gain = beta(candidate, k, n, ch);
    if (gain >= best_beta) {
      best_beta = gain;
      best = std::move(candidate);
    }
  }
  return decision_for_set(best, k, n, ch);
}

NodePowerSplit df_optimal_split(double p_pair, const VirtualLinkDecision& decision, const ChannelRealization& ch) {
  const std::size_t k = decision.user;
  const std::size_t n = decision.subcarrier;
  const double g_direct = ch.bs_user(n, k);
  NodePowerSplit split;
  if (!decision.relayed) {
    split.p_bs_slot1 = p_pair;
    split.slot2.push_back({std::nullopt, p_pair});
    return split;
  }
  const double g_min = bottleneck_cnr(decision.relay_set, n, ch);
  if (!(g_min > g_direct)) {
    throw ValidationError("relayed decision whose bottleneck does not beat the direct link");
  }
  const double g_relays = relay_sum(decision.relay_set, k, n, ch);
  const double denom = g_min + g_relays;
  split.p_bs_slot1 = 2.0 * p_pair * (g_relays + g_direct) / denom;
  const double pool = 2.0 * p_pair * (g_min - g_direct) / denom;
  const double g_miso = g_direct + g_relays;
  split.slot2.reserve(decision.relay_set.size() + 1);
  split.slot2.push_back({std::nullopt, pool * g_direct / g_miso});
  for (std::size_t r : decision.relay_set.members()) {
    split.slot2.push_back({r, pool * ch.relay_user(n, r, k) / g_miso});
  }
  return split;
}

HopSnr hop_snr(const NodePowerSplit& split, const VirtualLinkDecision& decision, const ChannelRealization& ch) {
  const std::size_t k = decision.user;
  const std::size_t n = decision.subcarrier;
  const double g_direct = ch.bs_user(n, k);
  double amplitude = 0.0;
  for (const auto& node : split.slot2) {
    const double g = node.relay ? ch.relay_user(n, *node.relay, k) : g_direct;
    amplitude += std::sqrt(g * node.power_w);
  }
  const double destination = g_direct * split.p_bs_slot1 + amplitude * amplitude;
  if (!decision.relayed) {
    return {destination, destination};
  }
  return {bottleneck_cnr(decision.relay_set, n, ch) * split.p_bs_slot1, destination};
}

double e2e_rate(double upsilon, double p_pair, std::size_t num_subcarriers) {
  return std::log2(1.0 + upsilon * p_pair) / (2.0 * static_cast<double>(num_subcarriers));
}

double split_rate(const NodePowerSplit& split, const VirtualLinkDecision& decision, const ChannelRealization& ch,
                  std::size_t num_subcarriers) {
  const HopSnr snr = hop_snr(split, decision, ch);
  return std::log2(1.0 + std::min(snr.first_hop, snr.destination)) / (2.0 * static_cast<double>(num_subcarriers));
}

DecisionGrid select_all(const ChannelRealization& ch) {
  DecisionGrid grid(ch.num_subcarriers(), ch.num_users());
  for (std::size_t n = 0; n < ch.num_subcarriers(); ++n) {
    for (std::size_t k = 0; k < ch.num_users(); ++k) {
      grid(n, k) = select_relay_set(k, n, ch);
    }
  }
  return grid;
}

Matrix<double> upsilon_matrix(const DecisionGrid& decisions) {
  Matrix<double> upsilon(decisions.rows(), decisions.cols());
  for (std::size_t n = 0; n < decisions.rows(); ++n) {
    for (std::size_t k = 0; k < decisions.cols(); ++k) {
      upsilon(n, k) = decisions(n, k).upsilon;
    }
  }
  return upsilon;
}

}  // namespace relay_ee
