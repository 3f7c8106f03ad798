#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "opqkd/analysis.hpp"
#include "opqkd/errors.hpp"
#include "opqkd/stats.hpp"
#include "test_support.hpp"

using namespace opqkd;
using opqkd::testing::JointSpaceOracle;

namespace {

SetParameters with_moduli(double c2, double g2) {
  SetParameters p = SetParameters::uniform();
  p.c = std::sqrt(c2);
  p.d = std::sqrt(1 - c2);
  p.g = std::sqrt(g2);
  p.h = std::sqrt(1 - g2);
  return p;
}

// Replaces the two ring columns of build_symmetric(5) (tiles 6 and 8) by
// shorter column tiles of length `piece`, hosting the same labels.
StateSet split_ring_columns(int piece) {
  DominoLayout layout = build_symmetric(5).layout();
  std::vector<Tile> tiles(layout.tiles.begin(), layout.tiles.end());
  std::vector<Tile> out;
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    const Tile& tile = tiles[t];
    if (t != 6 && t != 8) {
      out.push_back(tile);
      continue;
    }
    REQUIRE(tile.orientation == Orientation::column);
    for (std::size_t start = 0; start < tile.length(); start += static_cast<std::size_t>(piece)) {
      Tile part;
      part.orientation = piece == 1 ? Orientation::singleton : Orientation::column;
      part.fixed_index = tile.fixed_index;
      const auto len = static_cast<std::size_t>(piece);
      part.cells.assign(tile.cells.begin() + static_cast<long>(start),
                        tile.cells.begin() + static_cast<long>(start + len));
      part.hosted.assign(tile.hosted.begin() + static_cast<long>(start),
                         tile.hosted.begin() + static_cast<long>(start + len));
      part.amplitudes = fourier_amplitudes(len);
      out.push_back(std::move(part));
    }
  }
  layout.tiles = std::move(out);
  return StateSet::from_layout(std::move(layout));
}

}  // namespace

TEST_CASE("enumeration agrees with the dense joint-space oracle") {
  std::mt19937_64 gen(71);
  std::vector<StateSet> sets;
  for (int i = 0; i < 5; ++i) sets.push_back(build_3x3(opqkd::testing::random_params(gen)));
  for (int n = 3; n <= 7; ++n) sets.push_back(build_symmetric(n));
  sets.push_back(split_ring_columns(2));
  sets.push_back(split_ring_columns(1));
  for (const auto& set : sets) {
    const JointSpaceOracle oracle(set);
    for (Variant v : {Variant::intercept_resend, Variant::measure_second_only, Variant::substitute}) {
      const auto r = exact_undetected_prob(set, v);
      CHECK(std::abs(r.value - oracle.undetected(v)) < 1e-12);
      for (std::size_t i = 0; i < set.size(); ++i) CHECK(std::abs(r.per_state[i] - oracle.per_state(i, v)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(exact_undetected_prob(build_symmetric(3), Variant::none), std::invalid_argument);
}

TEST_CASE("serial and parallel enumeration are bitwise equal") {
  const StateSet set = build_symmetric(6);
  for (Variant v : {Variant::intercept_resend, Variant::measure_second_only, Variant::substitute}) {
    set_thread_count(3);
    const auto par = exact_undetected_prob(set, v, Execution::parallel);
    set_thread_count(1);
    const auto ser = exact_undetected_prob(set, v, Execution::serial);
    CHECK(par.value == ser.value);
    CHECK(par.per_state == ser.per_state);
  }
}

TEST_CASE("3x3 intercept-resend matches the quartic formula on random draws") {
  std::mt19937_64 gen(72);
  for (int trial = 0; trial < 100; ++trial) {
    const SetParameters p = opqkd::testing::random_params(gen);
    const StateSet set = build_3x3(p);
    const double oracle = JointSpaceOracle(set).undetected(Variant::intercept_resend);
    CHECK(std::abs(oracle - p3_formula(p)) < 1e-12);
    CHECK(std::abs(exact_undetected_prob(set, Variant::intercept_resend).value - p3_formula(p)) < 1e-12);
  }
}

TEST_CASE("quartic formula: named points") {
  CHECK(std::abs(p3_formula(SetParameters::uniform()) - 7.0 / 9.0) < 1e-12);
  CHECK(std::abs(p3_formula(SetParameters::computational()) - 1.0) < 1e-12);
  CHECK(std::abs(p3_formula(with_moduli(0.9, 0.5)) - (5.0 / 9 + 2 * (0.81 + 0.01 + 0.5) / 9)) < 1e-12);
  CHECK(std::abs(p3_formula(with_moduli(0.9, 0.9)) - (5.0 / 9 + 2.0 * 1.64 / 9)) < 1e-12);
}

TEST_CASE("balanced moduli are the unique grid minimum") {
  double best = 2.0;
  int best_i = -1, best_j = -1, ties = 0;
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const double v = p3_formula(with_moduli(i / 10.0, j / 10.0));
      if (v < best - 1e-12) {
        best = v;
        best_i = i;
        best_j = j;
        ties = 0;
      } else if (std::abs(v - best) <= 1e-12) {
        ++ties;
      }
    }
  }
  CHECK(best_i == 5);
  CHECK(best_j == 5);
  CHECK(ties == 0);
  CHECK(std::abs(best - 7.0 / 9.0) < 1e-12);
}

TEST_CASE("odd pinwheel minimum") {
  CHECK(std::abs(min_p_odd(1) - 7.0 / 9.0) < 1e-15);
  CHECK(std::abs(min_p_odd(2) - 17.0 / 25.0) < 1e-15);
  CHECK(std::abs(min_p_odd(3) - 31.0 / 49.0) < 1e-15);
  double prev = 1.0;
  for (int m = 1; m <= 50; ++m) {
    const double closed = min_p_odd(m);
    CHECK(std::abs(min_p_odd_recurrence(m) - closed) < 1e-12);
    const double n = 2.0 * m + 1;
    CHECK(std::abs((closed - 0.5) - (1 + 4.0 * m) / (2 * n * n)) < 1e-15);
    CHECK(closed < prev);
    CHECK(closed > 0.5);
    prev = closed;
  }
  CHECK_THROWS_AS(min_p_odd(0), std::invalid_argument);
}

TEST_CASE("odd pinwheel minimum matches enumeration") {
  for (int m = 1; m <= 4; ++m) {
    const StateSet set = build_symmetric(2 * m + 1);
    CHECK(std::abs(exact_undetected_prob(set, Variant::intercept_resend).value - min_p_odd(m)) < 1e-12);
  }
}

TEST_CASE("even pinwheel minimum") {
  CHECK(std::abs(min_p_even(2) - 0.75) < 1e-12);
  CHECK(std::abs(min_p_even(3) - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(exact_undetected_prob(build_symmetric(4), Variant::intercept_resend).value - 0.75) < 1e-12);
  CHECK(std::abs(exact_undetected_prob(build_symmetric(6), Variant::intercept_resend).value - 2.0 / 3.0) < 1e-12);
  double prev = 1.0;
  for (int m = 2; m <= 40; ++m) {
    const double v = min_p_even(m);  // enumeration up to n = 8, recurrence beyond
    CHECK(std::abs(v - min_p_even_closed_form(m)) < 1e-12);
    CHECK(std::abs(min_p_even_recurrence(m) - (0.5 + 1.0 / (2 * m))) < 1e-12);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(std::abs(min_p_even(5, 0) - 0.6) < 1e-12);
}

TEST_CASE("ring recurrence step") {
  CHECK(std::abs(p_recurrence_step(7.0 / 9.0, 2, 2.0) - 17.0 / 25.0) < 1e-12);
  CHECK(std::abs(p_recurrence_step(7.0 / 9.0, 2, 4.0) - 19.0 / 25.0) < 1e-12);
  CHECK(std::abs(p_recurrence_step(7.0 / 9.0, 2, 6.0) - 21.0 / 25.0) < 1e-12);
  CHECK(std::abs(p_recurrence_step(1.0, 1, 2.0) - 7.0 / 9.0) < 1e-12);
  CHECK_THROWS_AS(p_recurrence_step(1.5, 2, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(p_recurrence_step(0.5, 0, 2.0), std::invalid_argument);
}

TEST_CASE("ring recurrence step matches enumeration on altered rings") {
  // Two length-2 column tiles per ring column: fourth moments sum to 4.
  const StateSet dominoes = split_ring_columns(2);
  CHECK(std::abs(exact_undetected_prob(dominoes, Variant::intercept_resend).value -
                 p_recurrence_step(7.0 / 9.0, 2, 4.0)) < 1e-12);
  CHECK(std::abs(exact_undetected_prob(dominoes, Variant::intercept_resend).value - 19.0 / 25.0) < 1e-12);
  // Singletons: every column state is a computational product, moments 8.
  const StateSet singles = split_ring_columns(1);
  CHECK(std::abs(exact_undetected_prob(singles, Variant::intercept_resend).value -
                 p_recurrence_step(7.0 / 9.0, 2, 8.0)) < 1e-12);
}

TEST_CASE("closed-form values per variant") {
  CHECK(std::abs(closed_form_value(5, Variant::intercept_resend) - 17.0 / 25) < 1e-15);
  CHECK(std::abs(closed_form_value(5, Variant::measure_second_only) - 17.0 / 25) < 1e-15);
  CHECK(std::abs(closed_form_value(6, Variant::intercept_resend) - 2.0 / 3) < 1e-15);
  CHECK(std::abs(closed_form_value(7, Variant::substitute) - 1.0 / 7) < 1e-15);
  CHECK_THROWS_AS(closed_form_value(2, Variant::intercept_resend), UnsupportedDimension);
}

TEST_CASE("Monte Carlo estimates") {
  const StateSet s3 = build_symmetric(3);
  const auto mc = monte_carlo_estimate(s3, Variant::intercept_resend, 100000, 21);
  CHECK(std::abs(mc.estimate - 7.0 / 9.0) < 0.005);
  CHECK(mc.trials == 100000);
  CHECK(mc.ci_low <= mc.estimate);
  CHECK(mc.estimate <= mc.ci_high);
  // Half-width is z * SE to leading order.
  const double se = std::sqrt(mc.estimate * (1 - mc.estimate) / 1e5);
  CHECK(std::abs((mc.ci_high - mc.ci_low) / 2 - kZ95 * se) < 1e-5);

  const auto sub = monte_carlo_estimate(s3, Variant::substitute, 100000, 22);
  CHECK(std::abs(sub.estimate - 1.0 / 3.0) < 0.005);
  CHECK(sub.inference_accuracy == 1.0);

  const auto sub5 = monte_carlo_estimate(build_symmetric(5), Variant::substitute, 100000, 23);
  CHECK(std::abs(sub5.estimate - 0.2) < 0.01);

  const auto comp = monte_carlo_estimate(build_symmetric(4), Variant::measure_second_only, 50000, 24);
  CHECK(std::abs(comp.estimate - 0.75) < 5 * std::sqrt(0.75 * 0.25 / 50000));

  CHECK_THROWS_AS(monte_carlo_estimate(s3, Variant::intercept_resend, 0, 1), InsufficientData);
}

TEST_CASE("Monte Carlo is identical serially and in parallel") {
  const StateSet set = build_symmetric(5);
  set_thread_count(4);
  const auto par = monte_carlo_estimate(set, Variant::intercept_resend, 20000, 77, Execution::parallel);
  set_thread_count(1);
  const auto ser = monte_carlo_estimate(set, Variant::intercept_resend, 20000, 77, Execution::serial);
  CHECK(par.successes == ser.successes);
  CHECK(par.estimate == ser.estimate);
  CHECK(par.inference_accuracy == ser.inference_accuracy);
}

TEST_CASE("dimension sweep") {
  SweepOptions opts;
  opts.enumeration_budget = 9;
  const auto rows = dimension_sweep(21, Variant::intercept_resend, opts);
  REQUIRE(rows.size() == 19);
  CHECK(rows.front().n == 3);
  CHECK(std::abs(*rows[0].exact - 7.0 / 9) < 1e-12);
  CHECK(std::abs(rows[0].gap_to_half - 5.0 / 18) < 1e-12);
  CHECK(std::abs(*rows[2].exact - 17.0 / 25) < 1e-12);
  CHECK(std::abs(rows[2].gap_to_half - 9.0 / 50) < 1e-12);
  for (const auto& r : rows) {
    CHECK(r.exact.has_value() == (r.n <= 9));
    CHECK_FALSE(r.mc.has_value());
    if (r.exact) CHECK(std::abs(*r.exact - r.closed_form) < 1e-12);
  }
  CHECK(rows.back().n == 21);
  CHECK(std::abs(rows.back().gap_to_half - 41.0 / 882) < 1e-12);
  CHECK(rows.back().gap_to_half == doctest::Approx(0.0465).epsilon(1e-3));
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(rows[i].gap_to_half < rows[i - 2].gap_to_half);

  const std::string csv = sweep_csv(rows);
  CHECK(csv.rfind("n,strategy,exact,closed_form,gap_to_half,mc_estimate,ci_low,ci_high,trials,seed\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 20);

  opts.mc_trials = 2000;
  opts.seed = 5;
  const auto with_mc = dimension_sweep(5, Variant::substitute, opts);
  for (const auto& r : with_mc) {
    REQUIRE(r.mc.has_value());
    CHECK(r.mc->trials == 2000);
    CHECK(std::abs(r.mc->estimate - 1.0 / r.n) < 5 * std::sqrt((1.0 / r.n) * (1 - 1.0 / r.n) / 2000));
  }
  CHECK_THROWS_AS(dimension_sweep(2, Variant::intercept_resend), UnsupportedDimension);
}

TEST_CASE("Wilson interval") {
  auto w = wilson_interval(0, 10);
  CHECK(w.low == 0.0);
  CHECK(std::abs(w.high - 0.2775327998628892) < 1e-12);
  w = wilson_interval(5, 10);
  CHECK(std::abs(w.low - 0.236593090512564) < 1e-12);
  CHECK(std::abs(w.high - 0.7634069094874361) < 1e-12);
  w = wilson_interval(81, 100);
  CHECK(std::abs(w.low - 0.7222115462093562) < 1e-12);
  CHECK(std::abs(w.high - 0.8748524849023126) < 1e-12);
  w = wilson_interval(10, 10);
  CHECK(w.high == 1.0);
  CHECK_THROWS_AS(wilson_interval(0, 0), InsufficientData);
}

TEST_CASE("fractions") {
  CHECK(as_fraction(7.0 / 9.0) == "7/9");
  CHECK(as_fraction(17.0 / 25.0) == "17/25");
  CHECK(as_fraction(31.0 / 49.0) == "31/49");
  CHECK(as_fraction(1.0) == "1");
  CHECK(as_fraction(0.75) == "3/4");
  CHECK(as_fraction(std::sqrt(2.0)).empty());
}
