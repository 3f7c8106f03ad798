#pragma once

// Undetected-eavesdropping probabilities: exact outcome-tree enumeration,
// closed forms and recurrences over the pinwheel family, and Monte Carlo.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opqkd/adversary.hpp"
#include "opqkd/parallel.hpp"
#include "opqkd/stateset.hpp"

namespace opqkd {

/// P(Bob's outcome equals Alice's label) under a uniform prior over labels.
struct ExactResult {
  double value = 0.0;
  std::vector<double> per_state;  // conditional success for each label
};

/// Enumerates every measurement branch of `variant` for every state. Per-state
/// terms are independent, so the parallel and serial runs are bitwise equal.
/// Throws std::invalid_argument for Variant::none.
ExactResult exact_undetected_prob(const StateSet& set, Variant variant,
                                  Execution exec = Execution::parallel);

/// 5/9 + 2(|c|^4 + |d|^4 + |g|^4 + |h|^4)/9 for the 3x3 family.
double p3_formula(const SetParameters& params);

/// Minimum for n = 2m+1: 1/2 + (1+4m) / (2(2m+1)^2). m >= 1.
double min_p_odd(int m);
/// Same minimum via the ring recurrence from the 1x1 grid (P = 1).
double min_p_odd_recurrence(int m);

/// One ring step for n = 2m+1 around an n-2 core with success `prev`:
/// [(2m-1)^2 prev + 4m + moments] / (2m+1)^2, where `moments` sums the
/// fourth powers of the column-tile amplitudes in the two ring columns.
double p_recurrence_step(double prev, int m, double column_fourth_moments);

/// Even pinwheel sets n = 2m, m >= 2: exact oracle on build_symmetric(2m)
/// when 2m <= budget, the ring recurrence otherwise. Throws std::logic_error
/// if the result disagrees with min_p_even_closed_form beyond 1e-12.
double min_p_even(int m, int enumeration_budget = 9);
/// Ring recurrence from the 2x2 centre (P = 1).
double min_p_even_recurrence(int m);
/// 1/2 + 1/(2m).
double min_p_even_closed_form(int m);

/// Closed-form value of `variant` on build_symmetric(n): the pinwheel minima
/// for the two intercepting strategies, 1/n for substitution.
double closed_form_value(int n, Variant variant);

struct EstimateResult {
  double estimate = 0.0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
  double inference_accuracy = 0.0;  // fraction of trials where Eve's guess was right
};

/// `trials` independent single rounds through protocol + strategy. Throws
/// InsufficientData for zero trials.
EstimateResult monte_carlo_estimate(const StateSet& set, Variant variant, std::uint64_t trials,
                                    std::uint64_t seed, Execution exec = Execution::parallel);

struct SweepOptions {
  int enumeration_budget = 9;
  std::uint64_t mc_trials = 0;  // 0 disables the Monte Carlo columns
  std::uint64_t seed = 0;
};

struct SweepRow {
  int n;
  Variant variant;
  std::optional<double> exact;
  double closed_form;
  double gap_to_half;  // exact - 1/2 when available, else closed form - 1/2
  std::optional<EstimateResult> mc;
};

/// Rows for n = 3..max_n.
std::vector<SweepRow> dimension_sweep(int max_n, Variant variant, const SweepOptions& options = {});

/// Header: n,strategy,exact,closed_form,gap_to_half,mc_estimate,ci_low,ci_high,trials,seed
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace opqkd
