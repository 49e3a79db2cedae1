#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace relay_ee {

/// Scenario constants for one multi-relay OFDM downlink.
///
/// Rates are carried in bit/s/Hz throughout, so `xi` is watts per
/// (bit/s/Hz) of delivered sum rate.
struct SystemConfig {
  double bandwidth_hz = 1.0e6;
  std::size_t num_subcarriers = 4;
  std::size_t num_users = 2;
  std::size_t num_relays = 5;
  double noise_psd = 3.98e-21;  // -174 dBm/Hz
  double avg_cnr_db = 10.0;
  double p_max_w = 1.0;
  double p_static_w = 0.2;
  double xi = 0.0;
  double eta = 0.38;
  std::vector<double> alpha = {1.0, 1.0};
  std::uint64_t seed = 1;

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

/// Throws ValidationError on the first violated invariant.
void validate(const SystemConfig& config);

/// Mean CNR of every link in linear scale.
[[nodiscard]] double mean_cnr(const SystemConfig& config);

[[nodiscard]] double sum_alpha(const SystemConfig& config);

void to_json(nlohmann::json& j, const SystemConfig& config);
void from_json(const nlohmann::json& j, SystemConfig& config);

}  // namespace relay_ee
