#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "relay_ee/channel.hpp"

namespace relay_ee {

/// Helping relays for one (user, subcarrier) pair. Members are kept sorted
/// ascending and unique; the BS is an implicit member of the second-slot
/// transmit set and is never listed here.
class RelaySet {
public:
  RelaySet() = default;
  /// Throws ValidationError on duplicates or indices >= num_relays.
  RelaySet(std::vector<std::size_t> members, std::size_t num_relays);

  [[nodiscard]] std::span<const std::size_t> members() const noexcept { return members_; }
  [[nodiscard]] bool empty() const noexcept { return members_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }

  friend bool operator==(const RelaySet&, const RelaySet&) = default;

private:
  std::vector<std::size_t> members_;
};

/// Best transmission mode for one (user, subcarrier) pair, collapsed into an
/// equivalent direct link of CNR `upsilon`.
struct VirtualLinkDecision {
  std::size_t user = 0;
  std::size_t subcarrier = 0;
  RelaySet relay_set;
  double beta = 1.0;
  bool relayed = false;  // DF beamforming (true) or repetition direct link (false)
  double upsilon = 0.0;
};

/// Power of one second-slot transmitter. `relay` is empty for the BS.
struct NodePower {
  std::optional<std::size_t> relay;
  double power_w = 0.0;
};

/// Powers of one pair inside its block: BS broadcast power in slot 1 and the
/// beamforming powers in slot 2. Each slot lasts half the block, so the pair
/// energy is (p_bs_slot1 + sum(slot2)) / 2.
struct NodePowerSplit {
  double p_bs_slot1 = 0.0;
  std::vector<NodePower> slot2;

  [[nodiscard]] double energy() const;
};

/// gamma_Bk + sum of member relay->user CNRs (second-slot MISO CNR).
[[nodiscard]] double miso_cnr(const RelaySet& set, std::size_t k, std::size_t n, const ChannelRealization& ch);

/// min over members of the BS->relay CNR. Throws ValidationError for an empty set.
[[nodiscard]] double bottleneck_cnr(const RelaySet& set, std::size_t n, const ChannelRealization& ch);

/// DF beamforming power gain of a nonempty set under the hop-equalizing split:
///   beta = (g_R + g_Bk) g_min / (g_min g_Bk + g_R g_Bk),
/// with g_R the relay-only second-hop sum. Values above 1 beat the direct link.
[[nodiscard]] double beta(const RelaySet& set, std::size_t k, std::size_t n, const ChannelRealization& ch);

/// First-hop gap between the bottleneck relay and the next-weakest member.
/// Requires at least two members.
[[nodiscard]] double bottleneck_gap(const RelaySet& set, std::size_t n, const ChannelRealization& ch);

/// Threshold on the bottleneck gap above which dropping the bottleneck relay
/// raises beta, below which it lowers it:
///
///   Phi = g_rk g_min (g_min - g_Bk) / (g_R^2 + g_Bk g_R - g_min g_rk - g_R g_rk)
///
/// where g_rk is the bottleneck's relay->user CNR. When the denominator is
/// non-positive and g_min >= g_Bk, removal lowers beta for every gap and the
/// threshold is +infinity. Throws ValidationError for fewer than two members.
[[nodiscard]] double phi_threshold(const RelaySet& set, std::size_t k, std::size_t n,
                                   const ChannelRealization& ch);

/// Relay-set and mode selection for one pair.
///
/// Relays whose BS->relay CNR does not strictly exceed the direct CNR are
/// dropped; survivors are ordered by BS->relay CNR, and the nested sets
/// obtained by repeatedly removing the weakest first hop are scored by beta.
/// The highest beta wins, ties going to the smaller set.
[[nodiscard]] VirtualLinkDecision select_relay_set(std::size_t k, std::size_t n, const ChannelRealization& ch);

/// Decision for an explicitly chosen set (possibly empty). Falls back to the
/// direct link whenever the set's beta does not exceed 1.
[[nodiscard]] VirtualLinkDecision decision_for_set(const RelaySet& set, std::size_t k, std::size_t n,
                                                   const ChannelRealization& ch);

/// Optimal intra-pair split of the pair budget `p_pair` (energy per block).
/// Relayed pairs equalize the two hop SNRs; direct pairs repeat the BS
/// transmission at power p_pair in both slots.
/// Throws ValidationError when a relayed decision's bottleneck does not beat
/// the direct link.
[[nodiscard]] NodePowerSplit df_optimal_split(double p_pair, const VirtualLinkDecision& decision,
                                              const ChannelRealization& ch);

/// The two SNR arguments of the DF rate min: slot-1 decodability at the
/// bottleneck relay, and the destination's combined SNR (slot-1 direct plus
/// coherent slot-2 beamforming, (sum_i sqrt(g_i P_i))^2). For a direct-link
/// decision both entries are the MRC SNR of the repetition.
struct HopSnr {
  double first_hop = 0.0;
  double destination = 0.0;
};

[[nodiscard]] HopSnr hop_snr(const NodePowerSplit& split, const VirtualLinkDecision& decision,
                             const ChannelRealization& ch);

/// Rate (bit/s/Hz) of a virtual link: log2(1 + upsilon p) / (2N).
[[nodiscard]] double e2e_rate(double upsilon, double p_pair, std::size_t num_subcarriers);

/// Rate (bit/s/Hz) implied by an arbitrary split, min over the two hops.
[[nodiscard]] double split_rate(const NodePowerSplit& split, const VirtualLinkDecision& decision,
                                const ChannelRealization& ch, std::size_t num_subcarriers);

/// All decisions of a realization, indexed (n, k).
using DecisionGrid = Matrix<VirtualLinkDecision>;

[[nodiscard]] DecisionGrid select_all(const ChannelRealization& ch);

/// The N x K matrix of virtual CNRs.
[[nodiscard]] Matrix<double> upsilon_matrix(const DecisionGrid& decisions);

}  // namespace relay_ee
