#include "opqkd/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "opqkd/errors.hpp"
#include "opqkd/protocol.hpp"
#include "opqkd/stats.hpp"

namespace opqkd {

namespace {

// P(Bob returns label i | he holds x (x) y).
double bob_success(const ProductState& s, const Ket& x, const Ket& y) {
  return std::norm(inner(s.ket_a, x)) * std::norm(inner(s.ket_b, y));
}

double intercept_branch_sum(const StateSet& set, const std::vector<MeasurementBasis>& conditional,
                            const ProductState& s) {
  const auto n = static_cast<std::size_t>(set.n());
  double total = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double p_a = std::norm(s.ket_a[m]);
    if (p_a == 0.0) continue;
    const Ket a = Ket::basis(n, m);
    for (const Ket& v : conditional[m].vectors()) {
      const double p_b = std::norm(inner(v, s.ket_b));
      if (p_b == 0.0) continue;
      total += p_a * p_b * bob_success(s, a, v);
    }
  }
  return total;
}

double second_only_branch_sum(const StateSet& set, const ProductState& s) {
  const auto n = static_cast<std::size_t>(set.n());
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double p_b = std::norm(s.ket_b[k]);
    if (p_b == 0.0) continue;
    total += p_b * bob_success(s, s.ket_a, Ket::basis(n, k));
  }
  return total;
}

double substitute_branch_sum(const StateSet& set, const ProductState& s) {
  const auto n = static_cast<std::size_t>(set.n());
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const Ket decoy = Ket::basis(n, r);
    // Eve's joint measurement of the genuine pair, then D = B-part of her outcome.
    for (const ProductState& outcome : set.states()) {
      const double p_eve = bob_success(outcome, s.ket_a, s.ket_b);
      if (p_eve == 0.0) continue;
      total += p_eve * bob_success(s, decoy, outcome.ket_b) / static_cast<double>(n);
    }
  }
  return total;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ExactResult exact_undetected_prob(const StateSet& set, Variant variant, Execution exec) {
  if (variant == Variant::none) {
    throw std::invalid_argument("exact_undetected_prob: no eavesdropper to analyse");
  }
  std::vector<MeasurementBasis> conditional;
  if (variant == Variant::intercept_resend) {
    for (int m = 0; m < set.n(); ++m) conditional.push_back(conditional_b_basis(set, m));
  }
  ExactResult result;
  result.per_state.assign(set.size(), 0.0);
  const auto count = static_cast<std::int64_t>(set.size());
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (std::int64_t i = 0; i < count; ++i) {
    const ProductState& s = set[static_cast<std::size_t>(i)];
    double v = 0.0;
    switch (variant) {
      case Variant::intercept_resend: v = intercept_branch_sum(set, conditional, s); break;
      case Variant::measure_second_only: v = second_only_branch_sum(set, s); break;
      case Variant::substitute: v = substitute_branch_sum(set, s); break;
      case Variant::none: break;
    }
    result.per_state[static_cast<std::size_t>(i)] = v;
  }
  double sum = 0.0;
  for (double v : result.per_state) sum += v;
  result.value = sum / static_cast<double>(set.size());
  return result;
}

double p3_formula(const SetParameters& p) {
  auto q = [](Complex z) { return std::norm(z) * std::norm(z); };
  return 5.0 / 9.0 + 2.0 * (q(p.c) + q(p.d) + q(p.h) + q(p.g)) / 9.0;
}

double min_p_odd(int m) {
  if (m < 1) throw std::invalid_argument("min_p_odd: m must be at least 1");
  const double n = 2.0 * m + 1.0;
  return 0.5 + (1.0 + 4.0 * m) / (2.0 * n * n);
}

double p_recurrence_step(double prev, int m, double column_fourth_moments) {
  if (m < 1) throw std::invalid_argument("p_recurrence_step: m must be at least 1");
  if (prev < 0.0 || prev > 1.0 || column_fourth_moments < 0.0) {
    throw std::invalid_argument("p_recurrence_step: prev must lie in [0,1] and moments be >= 0");
  }
  const double inner_n = 2.0 * m - 1.0;
  const double n = 2.0 * m + 1.0;
  return (inner_n * inner_n * prev + 4.0 * m + column_fourth_moments) / (n * n);
}

double min_p_odd_recurrence(int m) {
  if (m < 1) throw std::invalid_argument("min_p_odd_recurrence: m must be at least 1");
  // The two ring columns hold 4m states with |amplitude|^2 = 1/(2m) on 2m
  // cells each: total fourth moment 4m * 2m / (2m)^2 = 2.
  double p = 1.0;
  for (int k = 1; k <= m; ++k) p = p_recurrence_step(p, k, 2.0);
  return p;
}

double min_p_even_recurrence(int m) {
  if (m < 2) throw std::invalid_argument("min_p_even_recurrence: m must be at least 2");
  double p = 1.0;  // 2x2 centre of computational product states
  for (int k = 2; k <= m; ++k) {
    const double n = 2.0 * k;
    const double core = n - 2.0;
    p = (core * core * p + 2.0 * (n - 1.0) + 2.0) / (n * n);
  }
  return p;
}

double min_p_even_closed_form(int m) {
  if (m < 2) throw std::invalid_argument("min_p_even_closed_form: m must be at least 2");
  return 0.5 + 1.0 / (2.0 * m);
}

double min_p_even(int m, int enumeration_budget) {
  if (m < 2) throw std::invalid_argument("min_p_even: m must be at least 2");
  const double value = 2 * m <= enumeration_budget
                           ? exact_undetected_prob(build_symmetric(2 * m), Variant::intercept_resend).value
                           : min_p_even_recurrence(m);
  if (std::abs(value - min_p_even_closed_form(m)) > 1e-12) {
    throw std::logic_error("min_p_even: value departs from 1/2 + 1/(2m)");
  }
  return value;
}

double closed_form_value(int n, Variant variant) {
  if (n < 3) throw UnsupportedDimension("closed_form_value: n must be at least 3");
  switch (variant) {
    case Variant::intercept_resend:
    case Variant::measure_second_only:
      return n % 2 == 1 ? min_p_odd((n - 1) / 2) : min_p_even_closed_form(n / 2);
    case Variant::substitute: return 1.0 / n;
    case Variant::none: return 1.0;
  }
  return 1.0;
}

EstimateResult monte_carlo_estimate(const StateSet& set, Variant variant, std::uint64_t trials,
                                    std::uint64_t seed, Execution exec) {
  if (trials == 0) throw InsufficientData("monte_carlo_estimate: zero trials");
  // Non-owning handle; `set` outlives the strategy.
  const std::shared_ptr<const StateSet> handle(std::shared_ptr<const StateSet>{}, &set);
  const EveStrategy strategy = variant == Variant::none ? EveStrategy{} : EveStrategy(variant, handle, seed);

  std::uint64_t successes = 0;
  std::uint64_t correct = 0;
  const auto count = static_cast<std::int64_t>(trials);
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) reduction(+ : successes, correct) if (exec == Execution::parallel)
  for (std::int64_t t = 0; t < count; ++t) {
    try {
      const auto o = simulate_round(set, strategy, seed, static_cast<std::uint64_t>(t));
      successes += o.record.mismatch ? 0 : 1;
      correct += o.eve.inferred_state == o.record.alice_index ? 1 : 0;
    } catch (...) {
#pragma omp critical(opqkd_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  EstimateResult r;
  r.trials = trials;
  r.successes = successes;
  r.seed = seed;
  r.estimate = static_cast<double>(successes) / static_cast<double>(trials);
  const auto ci = wilson_interval(successes, trials);
  r.ci_low = ci.low;
  r.ci_high = ci.high;
  r.inference_accuracy = static_cast<double>(correct) / static_cast<double>(trials);
  return r;
}

std::vector<SweepRow> dimension_sweep(int max_n, Variant variant, const SweepOptions& options) {
  if (max_n < 3) throw UnsupportedDimension("dimension_sweep: max n must be at least 3");
  if (variant == Variant::none) throw std::invalid_argument("dimension_sweep: pick an eavesdropper");
  std::vector<SweepRow> rows;
  for (int n = 3; n <= max_n; ++n) {
    SweepRow row{n, variant, std::nullopt, closed_form_value(n, variant), 0.0, std::nullopt};
    const bool enumerate = n <= options.enumeration_budget;
    if (enumerate || options.mc_trials > 0) {
      const StateSet set = build_symmetric(n);
      if (enumerate) row.exact = exact_undetected_prob(set, variant).value;
      if (options.mc_trials > 0) {
        row.mc = monte_carlo_estimate(set, variant, options.mc_trials, options.seed);
      }
    }
    row.gap_to_half = row.exact.value_or(row.closed_form) - 0.5;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "n,strategy,exact,closed_form,gap_to_half,mc_estimate,ci_low,ci_high,trials,seed\n";
  for (const auto& r : rows) {
    out << r.n << ',' << to_string(r.variant) << ',' << (r.exact ? format_double(*r.exact) : "") << ','
        << format_double(r.closed_form) << ',' << format_double(r.gap_to_half) << ',';
    if (r.mc) {
      out << format_double(r.mc->estimate) << ',' << format_double(r.mc->ci_low) << ','
          << format_double(r.mc->ci_high) << ',' << r.mc->trials << ',' << r.mc->seed;
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace opqkd
