#include "relay_ee/monte_carlo.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <thread>

#include "relay_ee/channel.hpp"

namespace relay_ee {

std::string_view axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::CnrDb:
      return "cnr_db";
    case SweepAxis::PStatic:
      return "p_static";
    case SweepAxis::Xi:
      return "xi";
    case SweepAxis::PMax:
      return "p_max";
    case SweepAxis::Users:
      return "K";
    case SweepAxis::Subcarriers:
      return "N";
  }
  return "unknown";
}

std::optional<SweepAxis> parse_axis(std::string_view name) {
  for (SweepAxis a : {SweepAxis::CnrDb, SweepAxis::PStatic, SweepAxis::Xi, SweepAxis::PMax, SweepAxis::Users,
                      SweepAxis::Subcarriers}) {
    if (axis_name(a) == name) {
      return a;
    }
  }
  return std::nullopt;
}

namespace {

std::size_t as_count(double value, std::string_view axis) {
  if (!(value >= 1.0) || std::round(value) != value) {
    throw ValidationError("axis " + std::string(axis) + " needs positive integer values, got " + format_number(value));
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

SystemConfig apply_axis(SystemConfig config, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::CnrDb:
      config.avg_cnr_db = value;
      break;
    case SweepAxis::PStatic:
      config.p_static_w = value;
      break;
    case SweepAxis::Xi:
      config.xi = value;
      break;
    case SweepAxis::PMax:
      config.p_max_w = value;
      break;
    case SweepAxis::Users:
      config.num_users = as_count(value, axis_name(axis));
      config.alpha.resize(config.num_users, 1.0);
      break;
    case SweepAxis::Subcarriers:
      config.num_subcarriers = as_count(value, axis_name(axis));
      break;
  }
  return config;
}

std::vector<double> linear_grid(double from, double to, std::size_t steps) {
  if (steps == 0) {
    throw ValidationError("sweep grid needs at least one step");
  }
  std::vector<double> grid(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    grid[i] = steps == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return grid;
}

namespace {

struct TrialOutcome {
  bool ok = false;
  double ee = 0.0;
  double se = 0.0;
  double p_trans = 0.0;
  double delta = 0.0;
  std::vector<double> rates;
};

// One (grid point, trial) task evaluates every scheme on the same draw.
std::vector<TrialOutcome> run_trial(const SystemConfig& point_config, std::size_t trial,
                                    const std::vector<Scheme>& schemes) {
  std::vector<TrialOutcome> out(schemes.size());
  SystemConfig config = point_config;
  config.seed = point_config.seed + trial;
  ChannelRealization ch;
  try {
    ch = draw_channels(config);
  } catch (const std::exception&) {
    return out;
  }
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    try {
      const RunResult result = run_scheme(schemes[s], config, ch);
      out[s] = {true, result.solution.ee, result.solution.sum_rate(), result.solution.p_trans,
                result.solution.delta, result.solution.rates};
    } catch (const std::exception&) {
      out[s].ok = false;
    }
  }
  return out;
}

}  // namespace

std::vector<CurveRow> monte_carlo(const SweepSpec& spec) {
  if (spec.grid.empty()) {
    throw ValidationError("sweep grid is empty");
  }
  if (spec.trials == 0) {
    throw ValidationError("sweep needs at least one trial");
  }
  if (spec.schemes.empty()) {
    throw ValidationError("sweep needs at least one scheme");
  }
  std::vector<SystemConfig> point_configs;
  for (double value : spec.grid) {
    point_configs.push_back(apply_axis(spec.base, spec.axis, value));
    validate(point_configs.back());
  }

  const std::size_t tasks = spec.grid.size() * spec.trials;
  std::vector<std::vector<TrialOutcome>> outcomes(tasks);
  const std::size_t jobs = std::clamp<std::size_t>(spec.jobs, 1, tasks);
  auto worker = [&](std::size_t first) {
    for (std::size_t task = first; task < tasks; task += jobs) {
      const std::size_t point = task / spec.trials;
      outcomes[task] = run_trial(point_configs[point], task % spec.trials, spec.schemes);
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) {
      pool.emplace_back(worker, j);
    }
  }

  std::vector<CurveRow> rows;
  for (std::size_t point = 0; point < spec.grid.size(); ++point) {
    const std::size_t k_total = point_configs[point].num_users;
    for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
      CurveRow row;
      row.axis = spec.axis;
      row.value = spec.grid[point];
      row.scheme = spec.schemes[s];
      row.user_rate_means.assign(k_total, 0.0);
      double ee_sq = 0.0;
      for (std::size_t t = 0; t < spec.trials; ++t) {
        const TrialOutcome& o = outcomes[point * spec.trials + t][s];
        if (!o.ok) {
          continue;
        }
        ++row.trials_ok;
        row.ee_mean += o.ee;
        ee_sq += o.ee * o.ee;
        row.se_mean += o.se;
        row.ptrans_mean += o.p_trans;
        row.delta_mean += o.delta;
        for (std::size_t k = 0; k < k_total; ++k) {
          row.user_rate_means[k] += o.rates[k];
        }
      }
      if (row.trials_ok > 0) {
        const double count = static_cast<double>(row.trials_ok);
        row.ee_mean /= count;
        row.se_mean /= count;
        row.ptrans_mean /= count;
        row.delta_mean /= count;
        for (double& r : row.user_rate_means) {
          r /= count;
        }
        if (row.trials_ok > 1) {
          const double var = std::max(0.0, (ee_sq - count * row.ee_mean * row.ee_mean) / (count - 1.0));
          row.ee_stderr = std::sqrt(var / count);
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) {
    return "nan";
  }
  return std::string(buf.data(), end);
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  std::size_t max_users = 0;
  for (const auto& row : rows) {
    max_users = std::max(max_users, row.user_rate_means.size());
  }
  out << "axis,value,scheme,trials_ok,ee_mean,ee_stderr,se_mean,ptrans_mean,delta_mean";
  for (std::size_t k = 1; k <= max_users; ++k) {
    out << ",r_user_" << k;
  }
  out << '\n';
  for (const auto& row : rows) {
    out << axis_name(row.axis) << ',' << format_number(row.value) << ',' << scheme_name(row.scheme) << ','
        << row.trials_ok << ',' << format_number(row.ee_mean) << ',' << format_number(row.ee_stderr) << ','
        << format_number(row.se_mean) << ',' << format_number(row.ptrans_mean) << ','
        << format_number(row.delta_mean);
    for (std::size_t k = 0; k < max_users; ++k) {
      out << ',';
      if (k < row.user_rate_means.size()) {
        out << format_number(row.user_rate_means[k]);
      }
    }
    out << '\n';
  }
}

}  // namespace relay_ee
