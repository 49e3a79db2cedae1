#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "relay_ee/channel.hpp"
#include "relay_ee/power.hpp"
#include "relay_ee/subcarrier.hpp"
#include "relay_ee/virtual_link.hpp"

namespace relay_ee {

enum class Scheme { Proposed, Oracle, RandROPA, BeamEPA };

[[nodiscard]] std::string_view scheme_name(Scheme scheme);
/// Accepts "proposed", "oracle", "randr-opa", "beam-epa".
[[nodiscard]] std::optional<Scheme> parse_scheme(std::string_view name);

struct RunResult {
  Scheme scheme = Scheme::Proposed;
  PowerSolution solution;
  Assignment assignment;
  DecisionGrid decisions;
  int iterations = 0;  // power-stage solves
  bool converged = false;
  bool cycled = false;  // reassignment revisited an earlier partition
  std::uint64_t seed = 0;
  SystemConfig config;
};

/// Reassignment loop limit and the relative transmit-power change that ends it.
inline constexpr int kMaxIterations = 5;
inline constexpr double kConvergenceTolerance = 1e-6;

/// Largest instance the exhaustive search accepts: K^N partitions and 2^L relay subsets.
inline constexpr std::uint64_t kOracleMaxPartitions = 1'000'000;
inline constexpr std::size_t kOracleMaxRelays = 10;

/// Grid resolution over the transmit power for the equal-power baseline.
inline constexpr std::size_t kBeamEpaGridPoints = 128;

/// Initial transmit power assumed by the assignment: the whole budget net of
/// static power, divided by the amplifier factor.
[[nodiscard]] double initial_transmit_power(const SystemConfig& config);

/// Three-step scheme: relay-set/mode selection per pair, equal-power
/// subcarrier assignment, then the EE-optimal fairness-exact power profile.
/// Steps two and three repeat with the updated transmit power until it moves
/// by at most kConvergenceTolerance (relative), the reassignment reproduces
/// a partition already solved, or kMaxIterations power solves have run. On a
/// revisit to an earlier partition the best visited solution is returned.
[[nodiscard]] RunResult optimize(const SystemConfig& config, const ChannelRealization& ch,
                                 UserPick pick = UserPick::MostUnderserved);

/// Steps two and three for externally supplied decisions.
[[nodiscard]] RunResult allocate(const SystemConfig& config, const ChannelRealization& ch, DecisionGrid decisions,
                                 Scheme scheme, UserPick pick = UserPick::MostUnderserved);

/// Exhaustive reference: best relay subset per pair over all 2^L subsets and
/// best EE over every partition that leaves no user empty.
/// Throws GuardRailError beyond kOracleMaxPartitions or kOracleMaxRelays.
[[nodiscard]] RunResult oracle(const SystemConfig& config, const ChannelRealization& ch);

/// Max beta over every subset of all relays (1 for the direct link), with its decision.
[[nodiscard]] VirtualLinkDecision exhaustive_relay_choice(std::size_t k, std::size_t n, const ChannelRealization& ch);

/// One uniformly drawn relay per pair (seeded by config.seed), optimal power
/// afterwards. Requires at least one relay.
[[nodiscard]] RunResult baseline_randr_opa(const SystemConfig& config, const ChannelRealization& ch);

/// Equal split of each pair's energy between the two slots and equally among
/// second-slot transmitters, equal power across subcarriers, and the transmit
/// power chosen on a grid to maximize EE. The credited rate is the
/// fairness-limited delta * sum(alpha) with delta = min_k R_k / alpha_k.
[[nodiscard]] RunResult baseline_beam_epa(const SystemConfig& config, const ChannelRealization& ch);

/// Equal-power split used by the baseline, for a pair budget p_pair.
[[nodiscard]] NodePowerSplit equal_split(double p_pair, const VirtualLinkDecision& decision);

[[nodiscard]] RunResult run_scheme(Scheme scheme, const SystemConfig& config, const ChannelRealization& ch);

}  // namespace relay_ee
