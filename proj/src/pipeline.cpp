#include "relay_ee/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <sstream>

#include "relay_ee/rng.hpp"

namespace relay_ee {

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::Proposed:
      return "proposed";
    case Scheme::Oracle:
      return "oracle";
    case Scheme::RandROPA:
      return "randr-opa";
    case Scheme::BeamEPA:
      return "beam-epa";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::Proposed, Scheme::Oracle, Scheme::RandROPA, Scheme::BeamEPA}) {
    if (scheme_name(s) == name) {
      return s;
    }
  }
  return std::nullopt;
}

double initial_transmit_power(const SystemConfig& config) {
  return (config.p_max_w - config.p_static_w) / config.eta;
}

namespace {

void check_inputs(const SystemConfig& config, const ChannelRealization& ch) {
  validate(config);
  ch.check(config);
}

RunResult base_result(Scheme scheme, const SystemConfig& config) {
  RunResult result;
  result.scheme = scheme;
  result.seed = config.seed;
  result.config = config;
  return result;
}

}  // namespace

RunResult allocate(const SystemConfig& config, const ChannelRealization& ch, DecisionGrid decisions, Scheme scheme,
                   UserPick pick) {
  check_inputs(config, ch);
  const Matrix<double> upsilon = upsilon_matrix(decisions);
  RunResult result = base_result(scheme, config);

  double assumed_p_trans = initial_transmit_power(config);
  Assignment assignment = assign_subcarriers(upsilon, assumed_p_trans, config.alpha, pick);
  std::vector<std::pair<Assignment, PowerSolution>> visited;
  for (int iteration = 1; iteration <= kMaxIterations; ++iteration) {
    result.iterations = iteration;
    const DeltaProfile profile = build_profile(assignment, upsilon, config.alpha, config.num_subcarriers);
    PowerSolution solution = find_delta_star(profile, config, decisions, ch);
    const double updated = solution.p_trans;
    visited.emplace_back(std::move(assignment), std::move(solution));
    if (std::abs(updated - assumed_p_trans) <= kConvergenceTolerance * assumed_p_trans || !(updated > 0.0)) {
      result.converged = true;
      break;
    }
    Assignment next = assign_subcarriers(upsilon, updated, config.alpha, pick);
    const auto seen = std::find_if(visited.begin(), visited.end(),
                                   [&](const auto& v) { return v.first.sets == next.sets; });
    if (seen != visited.end()) {
      // Only already-solved partitions can follow from here.
      result.converged = true;
      result.cycled = seen + 1 != visited.end();
      break;
    }
    assignment = std::move(next);
    assumed_p_trans = updated;
  }
  auto pick_it = std::prev(visited.end());
  if (result.cycled) {
    pick_it = std::max_element(visited.begin(), visited.end(),
                               [](const auto& a, const auto& b) { return a.second.ee < b.second.ee; });
  }
  result.assignment = std::move(pick_it->first);
  result.solution = std::move(pick_it->second);
  if (result.cycled) {
    result.solution.diagnostics.push_back("reassignment cycled between partitions; kept the best one visited");
  }
  result.decisions = std::move(decisions);
  return result;
}

RunResult optimize(const SystemConfig& config, const ChannelRealization& ch, UserPick pick) {
  check_inputs(config, ch);
  return allocate(config, ch, select_all(ch), Scheme::Proposed, pick);
}

VirtualLinkDecision exhaustive_relay_choice(std::size_t k, std::size_t n, const ChannelRealization& ch) {
  const std::size_t l_total = ch.num_relays();
  RelaySet best;
  double best_beta = 1.0;
  std::vector<std::size_t> members;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << l_total); ++mask) {
    members.clear();
    for (std::size_t r = 0; r < l_total; ++r) {
      if (mask & (std::uint64_t{1} << r)) {
        members.push_back(r);
      }
    }
    RelaySet set(members, l_total);
    const double gain = beta(set, k, n, ch);
    if (gain > best_beta) {
      best_beta = gain;
      best = std::move(set);
    }
  }
  return decision_for_set(best, k, n, ch);
}

RunResult oracle(const SystemConfig& config, const ChannelRealization& ch) {
  check_inputs(config, ch);
  const std::size_t n_total = config.num_subcarriers;
  const std::size_t k_total = config.num_users;
  if (config.num_relays > kOracleMaxRelays) {
    std::ostringstream msg;
    msg << "exhaustive search needs L <= " << kOracleMaxRelays << " (got L=" << config.num_relays << ")";
    throw GuardRailError(msg.str());
  }
  std::uint64_t partitions = 1;
  for (std::size_t i = 0; i < n_total; ++i) {
    partitions *= k_total;
    if (partitions > kOracleMaxPartitions) {
      std::ostringstream msg;
      msg << "exhaustive search needs K^N <= " << kOracleMaxPartitions << " (got K=" << k_total << ", N=" << n_total
          << ")";
      throw GuardRailError(msg.str());
    }
  }

  DecisionGrid decisions(n_total, k_total);
  for (std::size_t n = 0; n < n_total; ++n) {
    for (std::size_t k = 0; k < k_total; ++k) {
      decisions(n, k) = exhaustive_relay_choice(k, n, ch);
    }
  }
  const Matrix<double> upsilon = upsilon_matrix(decisions);
  const double p_trans = initial_transmit_power(config);

  std::optional<Assignment> best_assignment;
  double best_ee = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::size_t>> sets(k_total);
  for (std::uint64_t code = 0; code < partitions; ++code) {
    std::uint64_t rest = code;
    for (auto& s : sets) {
      s.clear();
    }
    for (std::size_t n = 0; n < n_total; ++n) {
      sets[rest % k_total].push_back(n);
      rest /= k_total;
    }
    if (std::any_of(sets.begin(), sets.end(), [](const auto& s) { return s.empty(); })) {
      continue;
    }
    Assignment assignment = make_assignment(sets, upsilon, p_trans);
    const DeltaProfile profile = build_profile(assignment, upsilon, config.alpha, n_total);
    try {
      const PowerSolution sol = find_delta_star(profile, config);
      if (sol.ee > best_ee) {
        best_ee = sol.ee;
        best_assignment = std::move(assignment);
      }
    } catch (const InfeasibleBudget&) {
      continue;
    }
  }
  if (!best_assignment) {
    throw InfeasibleBudget("no subcarrier partition fits the power budget");
  }

  RunResult result = base_result(Scheme::Oracle, config);
  result.assignment = std::move(*best_assignment);
  const DeltaProfile profile = build_profile(result.assignment, upsilon, config.alpha, n_total);
  result.solution = find_delta_star(profile, config, decisions, ch);
  result.decisions = std::move(decisions);
  result.iterations = 1;
  result.converged = true;
  return result;
}

RunResult baseline_randr_opa(const SystemConfig& config, const ChannelRealization& ch) {
  check_inputs(config, ch);
  if (config.num_relays == 0) {
    throw ValidationError("random single-relay baseline needs at least one relay");
  }
  CounterRng rng(config.seed, streams::kRandomRelay);
  DecisionGrid decisions(config.num_subcarriers, config.num_users);
  for (std::size_t n = 0; n < config.num_subcarriers; ++n) {
    for (std::size_t k = 0; k < config.num_users; ++k) {
      const auto relay = static_cast<std::size_t>(rng.below(config.num_relays));
      decisions(n, k) = decision_for_set(RelaySet({relay}, config.num_relays), k, n, ch);
    }
  }
  return allocate(config, ch, std::move(decisions), Scheme::RandROPA);
}

NodePowerSplit equal_split(double p_pair, const VirtualLinkDecision& decision) {
  NodePowerSplit split;
  split.p_bs_slot1 = p_pair;
  if (!decision.relayed) {
    split.slot2.push_back({std::nullopt, p_pair});
    return split;
  }
  const double share = p_pair / static_cast<double>(decision.relay_set.size() + 1);
  split.slot2.push_back({std::nullopt, share});
  for (std::size_t r : decision.relay_set.members()) {
    split.slot2.push_back({r, share});
  }
  return split;
}

RunResult baseline_beam_epa(const SystemConfig& config, const ChannelRealization& ch) {
  check_inputs(config, ch);
  const std::size_t n_total = config.num_subcarriers;
  const std::size_t k_total = config.num_users;
  DecisionGrid decisions = select_all(ch);
  const Matrix<double> upsilon = upsilon_matrix(decisions);
  const double cap = initial_transmit_power(config);
  const double total_alpha = sum_alpha(config);

  struct Candidate {
    double ee = -1.0;
    std::size_t grid_index = 0;
    double p_trans = 0.0;
    double delta = 0.0;
    double p_total = 0.0;
    std::vector<double> rates;
    Assignment assignment;
  };
  std::optional<Candidate> best;
  std::size_t last_feasible = 0;

  for (std::size_t i = 1; i <= kBeamEpaGridPoints; ++i) {
    const double p_trans = cap * static_cast<double>(i) / static_cast<double>(kBeamEpaGridPoints);
    const double p_pair = p_trans / static_cast<double>(n_total);
    Assignment assignment = assign_subcarriers(upsilon, p_trans, config.alpha);
    std::vector<double> rates(k_total, 0.0);
    for (std::size_t k = 0; k < k_total; ++k) {
      for (std::size_t n : assignment.sets[k]) {
        rates[k] += split_rate(equal_split(p_pair, decisions(n, k)), decisions(n, k), ch, n_total);
      }
    }
    double delta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < k_total; ++k) {
      delta = std::min(delta, rates[k] / config.alpha[k]);
    }
    const double delivered = delta * total_alpha;
    const double p_total = config.eta * p_trans + config.p_static_w + config.xi * delivered;
    if (p_total > config.p_max_w * (1.0 + 1e-12)) {
      continue;
    }
    last_feasible = i;
    const double ee = delivered / p_total;
    if (!best || ee > best->ee) {
      best = Candidate{ee, i, p_trans, delta, p_total, std::move(rates), std::move(assignment)};
    }
  }
  if (!best) {
    throw InfeasibleBudget("no transmit power on the grid fits the budget");
  }

  RunResult result = base_result(Scheme::BeamEPA, config);
  PowerSolution& sol = result.solution;
  sol.delta = best->delta;
  sol.rates = best->rates;
  sol.p_trans = best->p_trans;
  sol.p_total = best->p_total;
  sol.ee = best->ee;
  sol.budget_binding = best->grid_index == last_feasible;
  sol.p_kn = Matrix<double>(n_total, k_total, 0.0);
  const double p_pair = best->p_trans / static_cast<double>(n_total);
  for (std::size_t k = 0; k < k_total; ++k) {
    for (std::size_t n : best->assignment.sets[k]) {
      sol.p_kn(n, k) = p_pair;
      sol.splits.push_back({k, n, equal_split(p_pair, decisions(n, k))});
    }
  }
  result.assignment = std::move(best->assignment);
  result.decisions = std::move(decisions);
  result.iterations = 1;
  result.converged = true;
  return result;
}

RunResult run_scheme(Scheme scheme, const SystemConfig& config, const ChannelRealization& ch) {
  switch (scheme) {
    case Scheme::Proposed:
      return optimize(config, ch);
    case Scheme::Oracle:
      return oracle(config, ch);
    case Scheme::RandROPA:
      return baseline_randr_opa(config, ch);
    case Scheme::BeamEPA:
      return baseline_beam_epa(config, ch);
  }
  throw ValidationError("unknown scheme");
}

}  // namespace relay_ee
