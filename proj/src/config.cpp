#include "relay_ee/config.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "relay_ee/common.hpp"

namespace relay_ee {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw ValidationError("invalid config: " + what);
  }
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void validate(const SystemConfig& c) {
  require(positive_finite(c.bandwidth_hz), "bandwidth_hz must be positive");
  require(c.num_subcarriers >= 1, "num_subcarriers must be at least 1");
  require(c.num_users >= 1, "num_users must be at least 1");
  require(c.num_subcarriers >= c.num_users,
          "num_subcarriers (" + std::to_string(c.num_subcarriers) + ") must be >= num_users (" +
              std::to_string(c.num_users) + ")");
  require(positive_finite(c.noise_psd), "noise_psd must be positive");
  require(std::isfinite(c.avg_cnr_db), "avg_cnr_db must be finite");
  require(positive_finite(c.p_max_w), "p_max_w must be positive");
  require(std::isfinite(c.p_static_w) && c.p_static_w >= 0.0, "p_static_w must be non-negative");
  require(c.p_max_w > c.p_static_w, "p_max_w must exceed p_static_w");
  require(std::isfinite(c.xi) && c.xi >= 0.0, "xi must be non-negative");
  require(positive_finite(c.eta), "eta must be positive");
  require(c.alpha.size() == c.num_users,
          "alpha has " + std::to_string(c.alpha.size()) + " entries, expected " + std::to_string(c.num_users));
  for (double a : c.alpha) {
    require(positive_finite(a), "every alpha must be positive");
  }
}

double mean_cnr(const SystemConfig& config) { return std::pow(10.0, config.avg_cnr_db / 10.0); }

double sum_alpha(const SystemConfig& config) {
  return std::accumulate(config.alpha.begin(), config.alpha.end(), 0.0);
}

void to_json(nlohmann::json& j, const SystemConfig& c) {
  j = nlohmann::json{{"bandwidth_hz", c.bandwidth_hz}, {"num_subcarriers", c.num_subcarriers},
                     {"num_users", c.num_users},       {"num_relays", c.num_relays},
                     {"noise_psd", c.noise_psd},       {"avg_cnr_db", c.avg_cnr_db},
                     {"p_max_w", c.p_max_w},           {"p_static_w", c.p_static_w},
                     {"xi", c.xi},                     {"eta", c.eta},
                     {"alpha", c.alpha},               {"seed", c.seed}};
}

// Missing keys keep their current value so partial files layer over defaults.
void from_json(const nlohmann::json& j, SystemConfig& c) {
  if (!j.is_object()) {
    throw ValidationError("config must be a JSON object");
  }
  auto take = [&j](const char* key, auto& field) {
    if (auto it = j.find(key); it != j.end()) {
      try {
        it->get_to(field);
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config field '") + key + "': " + e.what());
      }
    }
  };
  take("bandwidth_hz", c.bandwidth_hz);
  take("num_subcarriers", c.num_subcarriers);
  take("num_users", c.num_users);
  take("num_relays", c.num_relays);
  take("noise_psd", c.noise_psd);
  take("avg_cnr_db", c.avg_cnr_db);
  take("p_max_w", c.p_max_w);
  take("p_static_w", c.p_static_w);
  take("xi", c.xi);
  take("eta", c.eta);
  take("alpha", c.alpha);
  take("seed", c.seed);
}

}  // namespace relay_ee
