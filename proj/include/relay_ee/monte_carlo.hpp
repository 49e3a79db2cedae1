#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relay_ee/config.hpp"
#include "relay_ee/pipeline.hpp"

namespace relay_ee {

enum class SweepAxis { CnrDb, PStatic, Xi, PMax, Users, Subcarriers };

[[nodiscard]] std::string_view axis_name(SweepAxis axis);
/// Accepts "cnr_db", "p_static", "xi", "p_max", "K", "N".
[[nodiscard]] std::optional<SweepAxis> parse_axis(std::string_view name);

/// `config` with the swept parameter set to `value`. For the user-count axis
/// alpha keeps its prefix when long enough and is padded with ones otherwise.
[[nodiscard]] SystemConfig apply_axis(SystemConfig config, SweepAxis axis, double value);

/// `steps` evenly spaced points from `from` to `to` inclusive (one point when steps == 1).
[[nodiscard]] std::vector<double> linear_grid(double from, double to, std::size_t steps);

struct SweepSpec {
  SweepAxis axis = SweepAxis::CnrDb;
  std::vector<double> grid;
  std::size_t trials = 1;
  std::vector<Scheme> schemes = {Scheme::Proposed};
  SystemConfig base;
  std::size_t jobs = 1;
};

/// Means over the successful trials of one (grid point, scheme) cell.
struct CurveRow {
  SweepAxis axis = SweepAxis::CnrDb;
  double value = 0.0;
  Scheme scheme = Scheme::Proposed;
  std::size_t trials_ok = 0;
  double ee_mean = 0.0;
  double ee_stderr = 0.0;
  double se_mean = 0.0;  // sum rate, bit/s/Hz
  double ptrans_mean = 0.0;
  double delta_mean = 0.0;
  std::vector<double> user_rate_means;
};

/// Runs every scheme on `trials` channel draws per grid point. Trial t uses
/// seed base.seed + t at every grid point. Failed trials are skipped and
/// excluded from trials_ok. Rows come out ordered by grid point, then scheme
/// in the order given, independent of `jobs`.
[[nodiscard]] std::vector<CurveRow> monte_carlo(const SweepSpec& spec);

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_number(double value);

/// Header plus one line per row. User-rate columns run to the largest K present;
/// cells beyond a row's K are left empty.
void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows);

}  // namespace relay_ee
