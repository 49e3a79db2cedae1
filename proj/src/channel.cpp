#include "relay_ee/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "relay_ee/rng.hpp"

namespace relay_ee {

ChannelRealization::ChannelRealization(std::size_t num_subcarriers, std::size_t num_users,
                                       std::size_t num_relays)
    : n_(num_subcarriers),
      k_(num_users),
      l_(num_relays),
      bk_(num_subcarriers * num_users, 0.0),
      br_(num_subcarriers * num_relays, 0.0),
      rk_(num_subcarriers * num_relays * num_users, 0.0) {}

void ChannelRealization::check(const SystemConfig& config) const {
  if (n_ != config.num_subcarriers || k_ != config.num_users || l_ != config.num_relays) {
    std::ostringstream msg;
    msg << "channel dimensions " << n_ << "x" << k_ << "x" << l_ << " (N x K x L) do not match config "
        << config.num_subcarriers << "x" << config.num_users << "x" << config.num_relays;
    throw ValidationError(msg.str());
  }
  auto all_positive = [](const std::vector<double>& v) {
    for (double x : v) {
      if (!(std::isfinite(x) && x > 0.0)) {
        return false;
      }
    }
    return true;
  };
  if (!all_positive(bk_) || !all_positive(br_) || !all_positive(rk_)) {
    throw ValidationError("channel contains a non-positive or non-finite CNR");
  }
}

ChannelRealization draw_channels(const SystemConfig& config) {
  validate(config);
  ChannelRealization ch(config.num_subcarriers, config.num_users, config.num_relays);
  CounterRng rng(config.seed, streams::kChannel);
  const double mean = mean_cnr(config);
  const std::size_t n_total = config.num_subcarriers;
  for (std::size_t n = 0; n < n_total; ++n) {
    for (std::size_t k = 0; k < config.num_users; ++k) {
      ch.bs_user(n, k) = rng.exponential(mean);
    }
  }
  for (std::size_t n = 0; n < n_total; ++n) {
    for (std::size_t r = 0; r < config.num_relays; ++r) {
      ch.bs_relay(n, r) = rng.exponential(mean);
    }
  }
  for (std::size_t n = 0; n < n_total; ++n) {
    for (std::size_t r = 0; r < config.num_relays; ++r) {
      for (std::size_t k = 0; k < config.num_users; ++k) {
        ch.relay_user(n, r, k) = rng.exponential(mean);
      }
    }
  }
  return ch;
}

CnrValue cnr_from_coefficient(double h_mag_sq, const SystemConfig& config) {
  if (!(h_mag_sq >= 0.0) || !std::isfinite(h_mag_sq)) {
    throw ValidationError("|h|^2 must be a finite non-negative number");
  }
  const double subcarrier_noise =
      config.bandwidth_hz / static_cast<double>(config.num_subcarriers) * config.noise_psd;
  return CnrValue{h_mag_sq / subcarrier_noise, h_mag_sq == 0.0};
}

nlohmann::json channel_to_json(const SystemConfig& config, const ChannelRealization& ch) {
  nlohmann::json doc;
  doc["spec_version"] = kChannelFileVersion;
  doc["config"] = config;
  doc["rng"] = std::string(CounterRng::kAlgorithm);
  doc["gamma_bk"] = ch.gamma_bk();
  doc["gamma_br"] = ch.gamma_br();
  doc["gamma_rk"] = ch.gamma_rk();
  return doc;
}

ChannelRealization channel_from_json(const nlohmann::json& doc, SystemConfig* config_out) {
  if (!doc.is_object()) {
    throw ValidationError("channel document must be a JSON object");
  }
  const int version = doc.value("spec_version", -1);
  if (version != kChannelFileVersion) {
    throw ValidationError("unsupported channel file version " + std::to_string(version));
  }
  if (!doc.contains("config")) {
    throw ValidationError("channel document lacks a config header");
  }
  SystemConfig config;
  from_json(doc.at("config"), config);
  validate(config);

  ChannelRealization ch(config.num_subcarriers, config.num_users, config.num_relays);
  auto read = [&doc](const char* key, std::vector<double>& dst) {
    if (!doc.contains(key) || !doc.at(key).is_array()) {
      throw ValidationError(std::string("channel document lacks array '") + key + "'");
    }
    auto values = doc.at(key).get<std::vector<double>>();
    if (values.size() != dst.size()) {
      throw ValidationError(std::string("array '") + key + "' has " + std::to_string(values.size()) +
                            " entries, expected " + std::to_string(dst.size()));
    }
    dst = std::move(values);
  };
  read("gamma_bk", ch.bk_);
  read("gamma_br", ch.br_);
  read("gamma_rk", ch.rk_);
  ch.check(config);
  if (config_out != nullptr) {
    *config_out = config;
  }
  return ch;
}

std::string dump_channel_file(const SystemConfig& config, const ChannelRealization& ch) {
  return channel_to_json(config, ch).dump(2) + "\n";
}

void save_channel_file(const std::filesystem::path& path, const SystemConfig& config,
                       const ChannelRealization& ch) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  out << dump_channel_file(config, ch);
  if (!out) {
    throw std::runtime_error("write to '" + path.string() + "' failed");
  }
}

ChannelRealization load_channel_file(const std::filesystem::path& path, SystemConfig* config_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path.string() + "'");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return channel_from_json(doc, config_out);
}

}  // namespace relay_ee
