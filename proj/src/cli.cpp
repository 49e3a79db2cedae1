#include "relay_ee/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "relay_ee/channel.hpp"
#include "relay_ee/monte_carlo.hpp"
#include "relay_ee/pipeline.hpp"

namespace relay_ee::cli {

namespace {

// Flag values; unset optionals leave the file/default value alone.
struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> num_subcarriers;
  std::optional<std::size_t> num_users;
  std::optional<std::size_t> num_relays;
  std::optional<double> avg_cnr_db;
  std::optional<double> p_max_w;
  std::optional<double> p_static_w;
  std::optional<double> xi;
  std::optional<double> eta;
  std::optional<double> bandwidth_hz;
  std::optional<double> noise_psd;
  std::vector<double> alpha;
  bool print_config = false;
};

void add_config_flags(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config_path, "JSON config file (missing keys keep defaults)");
  cmd.add_option("--seed", o.seed, "RNG seed (falls back to RELAY_EE_SEED, then the config file)");
  cmd.add_option("--num-subcarriers", o.num_subcarriers, "N");
  cmd.add_option("--num-users", o.num_users, "K");
  cmd.add_option("--num-relays", o.num_relays, "L");
  cmd.add_option("--cnr-db", o.avg_cnr_db, "average CNR in dB");
  cmd.add_option("--p-max", o.p_max_w, "power budget, W");
  cmd.add_option("--p-static", o.p_static_w, "static circuit power, W");
  cmd.add_option("--xi", o.xi, "rate-proportional circuit power, W per bit/s/Hz");
  cmd.add_option("--eta", o.eta, "amplifier inefficiency factor");
  cmd.add_option("--bandwidth", o.bandwidth_hz, "total bandwidth, Hz");
  cmd.add_option("--noise-psd", o.noise_psd, "noise PSD, W/Hz");
  cmd.add_option("--alpha", o.alpha, "rate weights, comma separated")->delimiter(',');
  cmd.add_flag("--print-config", o.print_config, "print the resolved config as JSON before running");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open " + path.string());
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* text = std::getenv("RELAY_EE_SEED");
  if (text == nullptr || *text == '\0') {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != std::string(text).size()) {
      throw std::invalid_argument("trailing text");
    }
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string("RELAY_EE_SEED is not an unsigned integer: ") + text);
  }
}

// defaults < `base` (file or channel header) < RELAY_EE_SEED (seed only) < flags.
SystemConfig resolve(const Overrides& o, std::optional<SystemConfig> base = std::nullopt) {
  SystemConfig config = base.value_or(SystemConfig{});
  bool alpha_given = base.has_value();
  if (!o.config_path.empty()) {
    const nlohmann::json doc = read_json_file(o.config_path);
    from_json(doc, config);
    alpha_given = alpha_given || doc.contains("alpha");
  }
  if (const auto s = env_seed()) {
    config.seed = *s;
  }
  if (o.seed) config.seed = *o.seed;
  if (o.num_subcarriers) config.num_subcarriers = *o.num_subcarriers;
  if (o.num_users) config.num_users = *o.num_users;
  if (o.num_relays) config.num_relays = *o.num_relays;
  if (o.avg_cnr_db) config.avg_cnr_db = *o.avg_cnr_db;
  if (o.p_max_w) config.p_max_w = *o.p_max_w;
  if (o.p_static_w) config.p_static_w = *o.p_static_w;
  if (o.xi) config.xi = *o.xi;
  if (o.eta) config.eta = *o.eta;
  if (o.bandwidth_hz) config.bandwidth_hz = *o.bandwidth_hz;
  if (o.noise_psd) config.noise_psd = *o.noise_psd;
  if (!o.alpha.empty()) {
    config.alpha = o.alpha;
    alpha_given = true;
  }
  if (!alpha_given) {
    config.alpha.assign(config.num_users, 1.0);
  }
  validate(config);
  return config;
}

void maybe_print_config(const Overrides& o, const SystemConfig& config, std::ostream& out) {
  if (o.print_config) {
    out << nlohmann::json(config).dump(2) << '\n';
  }
}

Scheme scheme_from(const std::string& name) {
  const auto s = parse_scheme(name);
  if (!s) {
    throw ValidationError("unknown scheme '" + name + "' (expected proposed, oracle, randr-opa or beam-epa)");
  }
  return *s;
}

bool needs_header(const std::filesystem::path& path) {
  std::error_code ec;
  return !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file || !(file << text) || !file.flush()) {
    throw ValidationError("cannot write " + path);
  }
}

int cmd_generate(const Overrides& o, const std::string& out_path, std::ostream& out) {
  const SystemConfig config = resolve(o);
  maybe_print_config(o, config, out);
  write_text(out_path, dump_channel_file(config, draw_channels(config)), out);
  return kExitOk;
}

int cmd_run(const Overrides& o, const std::string& channel_path, const std::string& scheme_text,
            const std::string& out_path, std::ostream& out) {
  std::optional<SystemConfig> header;
  ChannelRealization ch;
  if (!channel_path.empty()) {
    SystemConfig from_file;
    ch = channel_from_json(read_json_file(channel_path), &from_file);
    header = from_file;
  }
  const SystemConfig config = resolve(o, header);
  maybe_print_config(o, config, out);
  if (channel_path.empty()) {
    ch = draw_channels(config);
  }
  const Scheme scheme = scheme_from(scheme_text);
  const RunResult result = run_scheme(scheme, config, ch);
  const PowerSolution& sol = result.solution;

  out << "scheme     " << scheme_name(scheme) << '\n'
      << "seed       " << config.seed << '\n'
      << "ee         " << format_number(sol.ee) << " bit/Hz/J\n"
      << "se         " << format_number(sol.sum_rate()) << " bit/s/Hz\n"
      << "delta      " << format_number(sol.delta) << '\n'
      << "p_trans    " << format_number(sol.p_trans) << " W\n"
      << "p_total    " << format_number(sol.p_total) << " W\n"
      << "iterations " << result.iterations << (result.converged ? "" : " (not converged)") << '\n';
  for (std::size_t k = 0; k < sol.rates.size(); ++k) {
    out << "r_user_" << k + 1 << "   " << format_number(sol.rates[k]) << " bit/s/Hz (alpha "
        << format_number(config.alpha[k]) << ")\n";
  }
  for (const auto& d : sol.diagnostics) {
    out << "note       " << d << '\n';
  }

  if (!out_path.empty()) {
    const bool header_row = needs_header(out_path);
    std::ofstream csv(out_path, std::ios::app);
    if (!csv) {
      throw ValidationError("cannot write " + out_path);
    }
    if (header_row) {
      csv << "scheme,seed,ee,se,delta,p_trans,p_total,iterations,converged";
      for (std::size_t k = 1; k <= sol.rates.size(); ++k) {
        csv << ",r_user_" << k;
      }
      csv << '\n';
    }
    csv << scheme_name(scheme) << ',' << config.seed << ',' << format_number(sol.ee) << ','
        << format_number(sol.sum_rate()) << ',' << format_number(sol.delta) << ',' << format_number(sol.p_trans)
        << ',' << format_number(sol.p_total) << ',' << result.iterations << ',' << (result.converged ? 1 : 0);
    for (double r : sol.rates) {
      csv << ',' << format_number(r);
    }
    csv << '\n';
  }
  return kExitOk;
}

struct SweepFlags {
  std::string axis = "cnr_db";
  double from = 0.0;
  double to = 30.0;
  std::size_t steps = 7;
  std::size_t trials = 10;
  std::size_t jobs = 1;
  std::vector<std::string> schemes = {"proposed"};
  std::string out_path;
};

int cmd_sweep(const Overrides& o, const SweepFlags& f, std::ostream& out) {
  SweepSpec spec;
  spec.base = resolve(o);
  maybe_print_config(o, spec.base, out);
  const auto axis = parse_axis(f.axis);
  if (!axis) {
    throw ValidationError("unknown axis '" + f.axis + "' (expected cnr_db, p_static, xi, p_max, K or N)");
  }
  spec.axis = *axis;
  spec.grid = linear_grid(f.from, f.to, f.steps);
  spec.trials = f.trials;
  spec.jobs = f.jobs;
  spec.schemes.clear();
  for (const auto& name : f.schemes) {
    spec.schemes.push_back(scheme_from(name));
  }
  std::ostringstream text;
  write_curve_csv(text, monte_carlo(spec));
  write_text(f.out_path, text.str(), out);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy-efficient resource allocation for relay-assisted OFDMA downlinks", "relay-ee"};
  app.require_subcommand(1);

  Overrides gen_o;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("generate", "draw one channel realization and write it as JSON");
  add_config_flags(*gen, gen_o);
  gen->add_option("--out", gen_out, "output path (stdout when omitted)");

  Overrides run_o;
  std::string run_channel;
  std::string run_scheme_name = "proposed";
  std::string run_out;
  CLI::App* run = app.add_subcommand("run", "allocate resources on one channel realization");
  add_config_flags(*run, run_o);
  run->add_option("--channel", run_channel, "channel file from `generate` (drawn from the seed when omitted)");
  run->add_option("--scheme", run_scheme_name, "proposed, oracle, randr-opa or beam-epa");
  run->add_option("--out", run_out, "CSV file to append one result row to");

  Overrides sweep_o;
  SweepFlags sweep_f;
  CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep of one parameter, written as CSV");
  add_config_flags(*sweep, sweep_o);
  sweep->add_option("--axis", sweep_f.axis, "cnr_db, p_static, xi, p_max, K or N");
  sweep->add_option("--from", sweep_f.from, "first grid value");
  sweep->add_option("--to", sweep_f.to, "last grid value");
  sweep->add_option("--steps", sweep_f.steps, "number of grid points");
  sweep->add_option("--trials", sweep_f.trials, "channel draws per grid point");
  sweep->add_option("--jobs", sweep_f.jobs, "worker threads");
  sweep->add_option("--scheme", sweep_f.schemes, "schemes, comma separated")->delimiter(',');
  sweep->add_option("--out", sweep_f.out_path, "output CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (gen->parsed()) {
      return cmd_generate(gen_o, gen_out, out);
    }
    if (run->parsed()) {
      return cmd_run(run_o, run_channel, run_scheme_name, run_out, out);
    }
    return cmd_sweep(sweep_o, sweep_f, out);
  } catch (const InfeasibleBudget& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const GuardRailError& e) {
    err << "guard rail: " << e.what() << '\n';
    return kExitGuardRail;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace relay_ee::cli
