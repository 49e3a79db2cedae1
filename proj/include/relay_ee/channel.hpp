#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "relay_ee/common.hpp"
#include "relay_ee/config.hpp"

namespace relay_ee {

/// CNR tensors (1/W) of one fading block.
///
/// Flat storage is row-major and subcarrier-major:
///   gamma_bk[n*K + k], gamma_br[n*L + r], gamma_rk[(n*L + r)*K + k].
class ChannelRealization {
public:
  ChannelRealization() = default;
  ChannelRealization(std::size_t num_subcarriers, std::size_t num_users, std::size_t num_relays);

  [[nodiscard]] std::size_t num_subcarriers() const noexcept { return n_; }
  [[nodiscard]] std::size_t num_users() const noexcept { return k_; }
  [[nodiscard]] std::size_t num_relays() const noexcept { return l_; }

  /// BS -> user k on subcarrier n.
  double& bs_user(std::size_t n, std::size_t k) { return bk_[n * k_ + k]; }
  [[nodiscard]] double bs_user(std::size_t n, std::size_t k) const { return bk_[n * k_ + k]; }

  /// BS -> relay r on subcarrier n.
  double& bs_relay(std::size_t n, std::size_t r) { return br_[n * l_ + r]; }
  [[nodiscard]] double bs_relay(std::size_t n, std::size_t r) const { return br_[n * l_ + r]; }

  /// Relay r -> user k on subcarrier n.
  double& relay_user(std::size_t n, std::size_t r, std::size_t k) { return rk_[(n * l_ + r) * k_ + k]; }
  [[nodiscard]] double relay_user(std::size_t n, std::size_t r, std::size_t k) const {
    return rk_[(n * l_ + r) * k_ + k];
  }

  [[nodiscard]] const std::vector<double>& gamma_bk() const noexcept { return bk_; }
  [[nodiscard]] const std::vector<double>& gamma_br() const noexcept { return br_; }
  [[nodiscard]] const std::vector<double>& gamma_rk() const noexcept { return rk_; }

  /// Throws ValidationError if dimensions disagree with `config` or any entry
  /// is non-positive or non-finite.
  void check(const SystemConfig& config) const;

  friend bool operator==(const ChannelRealization&, const ChannelRealization&) = default;

private:
  friend ChannelRealization channel_from_json(const nlohmann::json&, SystemConfig*);

  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::size_t l_ = 0;
  std::vector<double> bk_;
  std::vector<double> br_;
  std::vector<double> rk_;
};

/// I.i.d. exponential CNRs with mean 10^(avg_cnr_db/10), drawn from
/// `CounterRng(config.seed, streams::kChannel)` in the order gamma_bk,
/// gamma_br, gamma_rk (flat index order).
[[nodiscard]] ChannelRealization draw_channels(const SystemConfig& config);

struct CnrValue {
  double value = 0.0;
  /// Set when the coefficient is zero; callers needing a positive CNR must reject it.
  bool degenerate = false;
};

/// |h|^2 / ((W/N) N0).
[[nodiscard]] CnrValue cnr_from_coefficient(double h_mag_sq, const SystemConfig& config);

inline constexpr int kChannelFileVersion = 1;

[[nodiscard]] nlohmann::json channel_to_json(const SystemConfig& config, const ChannelRealization& ch);

/// Parses a channel document. If `config_out` is non-null it receives the header config.
[[nodiscard]] ChannelRealization channel_from_json(const nlohmann::json& doc, SystemConfig* config_out);

/// Serialized text of the channel document (stable key order, shortest round-trip numbers).
[[nodiscard]] std::string dump_channel_file(const SystemConfig& config, const ChannelRealization& ch);

void save_channel_file(const std::filesystem::path& path, const SystemConfig& config,
                       const ChannelRealization& ch);

[[nodiscard]] ChannelRealization load_channel_file(const std::filesystem::path& path,
                                                   SystemConfig* config_out = nullptr);

}  // namespace relay_ee
