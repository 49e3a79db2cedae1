#include <doctest.h>

#include <cmath>
#include <random>

#include "relay_ee/power.hpp"
#include "support.hpp"

using namespace relay_ee;
using testkit::close_rel;

namespace {

/// K users owning the given CNR lists, N = total subcarrier count.
DeltaProfile make_profile(const std::vector<std::vector<double>>& per_user, std::vector<double> alpha) {
  std::size_t n_total = 0;
  for (const auto& u : per_user) n_total += u.size();
  Matrix<double> upsilon(n_total, per_user.size(), 1.0);
  std::vector<std::vector<std::size_t>> sets(per_user.size());
  std::size_t n = 0;
  for (std::size_t k = 0; k < per_user.size(); ++k) {
    for (double u : per_user[k]) {
      upsilon(n, k) = u;
      sets[k].push_back(n++);
    }
  }
  return build_profile(make_assignment(sets, upsilon, 1.0), upsilon, alpha, n_total);
}

SystemConfig plain_config() {
  SystemConfig c;
  c.p_max_w = 1e9;
  return c;
}

}  // namespace

TEST_CASE("spread term of a profile") {
  const auto flat = make_profile({{3.0, 3.0, 3.0}, {0.5}}, {1.0, 1.0});
  CHECK(flat.users[0].q == 0.0);
  CHECK(flat.users[1].q == 0.0);
  CHECK(flat.delta_min == 0.0);

  const auto pair = make_profile({{4.0, 2.0}}, {1.0});
  CHECK(pair.num_subcarriers == 2);
  CHECK(pair.users[0].upsilon == std::vector<double>{2.0, 4.0});
  CHECK(pair.users[0].q == doctest::Approx(0.25).epsilon(1e-15));

  std::mt19937_64 gen(1);
  for (int i = 0; i < 100; ++i) {
    const auto p = testkit::random_profile(gen, 3, 9);
    double expect = 0.0;
    for (const auto& u : p.users) expect = std::max(expect, u.q / u.alpha);
    CHECK(p.delta_min == expect);
  }
  CHECK_THROWS_AS((void)build_profile(Assignment{{{0}, {}}, Matrix<int>(1, 2), {0, 0}}, Matrix<double>(1, 2, 1.0),
                                      std::vector<double>{1, 1}, 1),
                  ValidationError);
}

TEST_CASE("per-subcarrier power of the two-subcarrier example") {
  const auto p = make_profile({{2.0, 4.0}}, {1.0});
  const double p1 = per_subcarrier_power(p, 2.0, 0, 0);
  const double p2 = per_subcarrier_power(p, 2.0, 0, 1);
  CHECK(p1 == doctest::Approx((std::pow(2.0, 3.5) - 1.0) / 2.0).epsilon(1e-14));
  CHECK(p1 == doctest::Approx(5.1569).epsilon(1e-4));
  CHECK(p2 == doctest::Approx(p1 + 0.25).epsilon(1e-14));
  CHECK(p2 == doctest::Approx(5.4069).epsilon(1e-4));
  const double rates = std::log2(1.0 + 2.0 * p1) / 4.0 + std::log2(1.0 + 4.0 * p2) / 4.0;
  CHECK(rates == doctest::Approx(2.0).epsilon(1e-13));
  CHECK_THROWS_AS((void)per_subcarrier_power(p, 2.0, 0, 5), ValidationError);
}

TEST_CASE("at the floor the weakest subcarrier of the binding user gets nothing") {
  const auto p = make_profile({{2.0, 4.0, 8.0}, {1.0, 1.5}}, {1.0, 1.0});
  const std::size_t binding = p.users[0].q >= p.users[1].q ? 0 : 1;
  CHECK(user_powers(p, p.delta_min, binding).front() == 0.0);
  CHECK_THROWS_AS((void)user_powers(p, p.delta_min * 0.999, binding), DomainError);
  CHECK_THROWS_AS((void)total_transmit_power(p, p.delta_min * 0.999), DomainError);
}

TEST_CASE("equal CNRs get equal power") {
  const auto p = make_profile({{3.0, 3.0, 3.0, 3.0}}, {2.0});
  const auto powers = user_powers(p, 0.7, 0);
  for (double x : powers) CHECK(x == powers.front());
}

TEST_CASE("closed-form transmit power equals the sum of the profile") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> above(0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const auto p = testkit::random_profile(gen, 1 + i % 5, 5 + i % 11);
    const double delta = p.delta_min + above(gen);
    double sum = 0.0;
    for (std::size_t k = 0; k < p.users.size(); ++k) {
      for (double x : user_powers(p, delta, k)) sum += x;
    }
    CHECK(close_rel(total_transmit_power(p, delta), sum, 1e-12));
  }
}

TEST_CASE("transmit power is increasing and convex in delta") {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 50; ++i) {
    const auto p = testkit::random_profile(gen, 3, 10);
    const double h = 0.01;
    double prev = total_transmit_power(p, p.delta_min);
    double prev_step = -1.0;
    for (int j = 1; j < 300; ++j) {
      const double cur = total_transmit_power(p, p.delta_min + h * j);
      CHECK(cur > prev);
      if (prev_step >= 0.0) CHECK(cur - prev > prev_step);
      prev_step = cur - prev;
      prev = cur;
    }
  }
}

TEST_CASE("analytic derivative matches a central difference") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> above(1e-3, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const auto p = testkit::random_profile(gen, 1 + i % 4, 4 + i % 9);
    const double delta = p.delta_min + above(gen);
    const double h = 1e-6;
    const double fd = (total_transmit_power(p, delta + h) - total_transmit_power(p, delta - h)) / (2.0 * h);
    CHECK(close_rel(transmit_power_derivative(p, delta), fd, 1e-6));
    const double fd2 =
        (transmit_power_derivative(p, delta + h) - transmit_power_derivative(p, delta - h)) / (2.0 * h);
    CHECK(close_rel(transmit_power_second_derivative(p, delta), fd2, 1e-6));
    CHECK(transmit_power_derivative(p, p.delta_min) > 0.0);
  }
}

TEST_CASE("scaling the weights rescales the delta axis") {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 100; ++i) {
    auto base = testkit::random_profile(gen, 3, 9);
    const double c = 0.25 + 0.5 * i / 10.0;
    DeltaProfile scaled = base;
    scaled.delta_min = 0.0;
    for (auto& u : scaled.users) {
      u.alpha *= c;
      scaled.delta_min = std::max(scaled.delta_min, u.q / u.alpha);
    }
    const double delta = base.delta_min + 0.3;
    CHECK(close_rel(total_transmit_power(scaled, delta / c), total_transmit_power(base, delta), 1e-12));
    CHECK(close_rel(transmit_power_derivative(scaled, delta / c), c * transmit_power_derivative(base, delta),
                    1e-12));
  }
}

TEST_CASE("energy efficiency of the ideal single link decreases in the rate") {
  auto c = plain_config();
  c.xi = 0.0;
  c.p_static_w = 0.0;
  c.eta = 1.0;
  const auto p = make_profile({{1.0}}, {1.0});  // rate factor 1/(2N) = 1/2
  double prev = INFINITY;
  for (int i = 1; i <= 200; ++i) {
    const double delta = 0.01 * i;
    const double ee = ee_of_delta(p, delta, c);
    CHECK(close_rel(ee, delta / (std::exp2(2.0 * delta) - 1.0), 1e-12));
    CHECK(ee < prev);
    prev = ee;
  }
  CHECK(ee_of_delta(p, 0.0, c) == doctest::Approx(1.0 / (2.0 * std::log(2.0))).epsilon(1e-12));
}

TEST_CASE("energy efficiency identities") {
  std::mt19937_64 gen(6);
  auto c = plain_config();
  c.xi = 0.02;
  for (int i = 0; i < 200; ++i) {
    const auto p = testkit::random_profile(gen, 2, 6);
    const double delta = p.delta_min + 0.05;
    const double ee = ee_of_delta(p, delta, c);
    CHECK(close_rel(ee * total_power(p, delta, c), delta * p.sum_alpha(), 1e-12));
    auto heavy = c;
    heavy.p_static_w *= 10.0;
    CHECK(ee_of_delta(p, delta, heavy) < ee);
  }
}

TEST_CASE("G is decreasing, positive near the floor, and signs the EE slope") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> above(1e-3, 3.0);
  auto c = plain_config();
  int samples = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = testkit::random_profile(gen, 1 + i % 3, 3 + i % 6);
    c.xi = (i % 2) * 0.01;
    if (i < 50) {
      double prev = g_function(p, p.delta_min, c);
      for (int j = 1; j < 200; ++j) {
        const double cur = g_function(p, p.delta_min + 0.02 * j, c);
        CHECK(cur < prev);
        prev = cur;
      }
    }
    const double delta = p.delta_min + above(gen);
    const double g = g_function(p, delta, c);
    const double h = 1e-6 * delta;
    const double slope = ee_of_delta(p, delta + h, c) - ee_of_delta(p, delta - h, c);
    if (std::abs(g) > 1e-6) {
      ++samples;
      CHECK((g > 0.0) == (slope > 0.0));
    }
  }
  CHECK(samples > 900);

  // Equal CNRs put the floor at zero, where G equals the static power and
  // stays positive just above it.
  std::uniform_real_distribution<double> cnr(0.1, 50.0);
  for (int i = 0; i < 200; ++i) {
    const double a = cnr(gen), b = cnr(gen);
    const auto flat = make_profile({{a, a, a}, {b, b}}, {1.0, 1.0 + i % 3});
    CHECK(flat.delta_min == 0.0);
    CHECK(g_function(flat, 0.0, c) == doctest::Approx(c.p_static_w).epsilon(1e-14));
    CHECK(g_function(flat, 1e-9, c) > 0.0);
  }
}

TEST_CASE("unconstrained optimum of the single-link toy matches a grid scan") {
  SystemConfig c;
  c.eta = 1.0;
  c.p_static_w = 0.2;
  c.xi = 0.0;
  c.p_max_w = 1e9;
  // Rate factor 1/2: with u = 2 delta the ratio is (u/2) / ((2^u - 1) + 0.2).
  const auto p = make_profile({{1.0}}, {1.0});
  const auto sol = find_delta_star(p, c);
  CHECK_FALSE(sol.budget_binding);
  const double u_star = 2.0 * sol.delta;
  CHECK(std::abs(std::exp2(u_star) - 1.0 + 0.2 - u_star * std::exp2(u_star) * std::log(2.0)) < 1e-12);

  double lo = 0.0, hi = 5.0;
  double best = 0.0;
  for (int round = 0; round < 6; ++round) {
    double best_val = -1.0;
    const int points = 10000;
    for (int i = 0; i <= points; ++i) {
      const double u = lo + (hi - lo) * i / points;
      const double val = u / (std::exp2(u) - 1.0 + 0.2);
      if (val > best_val) {
        best_val = val;
        best = u;
      }
    }
    const double step = (hi - lo) / points;
    lo = std::max(0.0, best - 2.0 * step);
    hi = best + 2.0 * step;
  }
  CHECK(close_rel(u_star, best, 1e-6));
}

TEST_CASE("budget handling") {
  std::mt19937_64 gen(8);
  for (int i = 0; i < 200; ++i) {
    const auto p = testkit::random_profile(gen, 2, 8, {1.0, 2.0});
    SystemConfig loose;
    loose.p_max_w = 1e30;
    loose.p_max_w = std::max(1e12, 1e3 * total_power(p, p.delta_min, loose));
    const auto free = find_delta_star(p, loose);
    CHECK_FALSE(free.budget_binding);
    if (free.clamped_to_floor) continue;
    CHECK(std::abs(g_function(p, free.delta, loose)) <= 1e-9 * loose.p_static_w + 1e-9);

    SystemConfig tight = loose;
    tight.p_max_w = 0.5 * (free.p_total + total_power(p, p.delta_min, loose));
    if (!(tight.p_max_w > tight.p_static_w)) continue;
    const auto bound = find_delta_star(p, tight);
    CHECK(bound.budget_binding);
    CHECK(std::abs(bound.p_total - tight.p_max_w) <= 1e-9);
    CHECK(bound.delta < free.delta);

    SystemConfig impossible = loose;
    impossible.p_max_w = 0.5 * (total_power(p, p.delta_min, loose) + loose.p_static_w);
    if (total_power(p, p.delta_min, loose) > impossible.p_max_w) {
      CHECK_THROWS_AS((void)find_delta_star(p, impossible), InfeasibleBudget);
    }
  }
}

TEST_CASE("solutions are exactly fair, water-filled, and EE-optimal on the feasible grid") {
  std::mt19937_64 gen(9);
  for (int i = 0; i < 100; ++i) {
    const auto p = testkit::random_profile(gen, 1 + i % 4, 4 + i % 8);
    SystemConfig c;
    c.xi = (i % 2) * 0.01;
    c.p_max_w = total_power(p, p.delta_min, c) + (i % 3 == 0 ? 0.05 : 50.0);
    const auto sol = find_delta_star(p, c);
    for (std::size_t k = 0; k < p.users.size(); ++k) {
      CHECK(close_rel(sol.rates[k] / p.users[k].alpha, sol.delta, 1e-10));
      if (sol.delta > p.delta_min) {
        const auto powers = user_powers(p, sol.delta, k);
        const auto& u = p.users[k];
        const double level = u.upsilon[0] / (1.0 + powers[0] * u.upsilon[0]);
        for (std::size_t j = 1; j < powers.size(); ++j) {
          CHECK(close_rel(u.upsilon[j] / (1.0 + powers[j] * u.upsilon[j]), level, 1e-10));
        }
      }
    }
    CHECK(close_rel(sol.p_total, c.eta * sol.p_trans + c.p_static_w + c.xi * sol.sum_rate(), 1e-12));
    CHECK(sol.p_total <= c.p_max_w + 1e-9);
    const double top = 4.0 * std::max(sol.delta, p.delta_min + 1e-3);
    for (int j = 0; j <= 2000; ++j) {
      const double d = p.delta_min + (top - p.delta_min) * j / 2000.0;
      if (total_power(p, d, c) <= c.p_max_w) {
        CHECK(ee_of_delta(p, d, c) <= sol.ee * (1.0 + 1e-8));
      }
    }
  }
}

TEST_CASE("a floor with falling efficiency is clamped with a diagnostic") {
  SystemConfig c;
  c.p_static_w = 0.0;
  c.p_max_w = 100.0;
  const auto p = make_profile({{0.01, 100.0}}, {1.0});
  REQUIRE(g_function(p, p.delta_min, c) <= 0.0);
  const auto sol = find_delta_star(p, c);
  CHECK(sol.clamped_to_floor);
  CHECK(sol.delta == p.delta_min);
  CHECK_FALSE(sol.diagnostics.empty());
}

TEST_CASE("closed-form user profile maximizes the user's rate at its budget") {
  // Projected gradient ascent on the simplex {P >= 0, sum P = budget}.
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> expo(-1.0, 1.5);
  for (int i = 0; i < 100; ++i) {
    const auto p = make_profile({{std::pow(10.0, expo(gen)), std::pow(10.0, expo(gen)), std::pow(10.0, expo(gen))}},
                                {1.0});
    const double delta = p.delta_min + 0.05 + 0.5 * (i % 7);
    const auto closed = user_powers(p, delta, 0);
    const double budget = closed[0] + closed[1] + closed[2];
    const auto& u = p.users[0];

    std::vector<double> x(3, budget / 3.0);
    auto project = [&](std::vector<double>& v) {
      // Euclidean projection onto the scaled simplex.
      std::vector<double> s = v;
      std::sort(s.rbegin(), s.rend());
      double cum = 0.0, theta = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) {
        cum += s[j];
        const double t = (cum - budget) / static_cast<double>(j + 1);
        if (s[j] - t > 0.0) theta = t;
      }
      for (double& e : v) e = std::max(0.0, e - theta);
    };
    double step = budget;
    for (int it = 0; it < 20000; ++it) {
      std::vector<double> grad(3);
      for (std::size_t j = 0; j < 3; ++j) grad[j] = u.upsilon[j] / (1.0 + u.upsilon[j] * x[j]);
      std::vector<double> next = x;
      for (std::size_t j = 0; j < 3; ++j) next[j] += step * grad[j];
      project(next);
      if (testkit::user_rate(u, next, 3) >= testkit::user_rate(u, x, 3)) {
        x = next;
      } else {
        step *= 0.5;
      }
      if (step < 1e-18 * budget) break;
    }
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(x[j] - closed[j]) <= 1e-6 * budget);
    }
  }
}
