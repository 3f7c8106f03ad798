#pragma once

// Two-step transmission session: Alice prepares, sends A, waits for Bob's
// acknowledgment, sends B; Bob measures jointly; a random subset is checked.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "opqkd/adversary.hpp"
#include "opqkd/parallel.hpp"
#include "opqkd/stateset.hpp"

namespace opqkd {

struct ProtocolConfig {
  std::shared_ptr<const StateSet> set;
  std::uint64_t rounds = 0;
  double check_fraction = 0.1;
  std::uint64_t seed = 0;
  EveStrategy strategy;

  /// Throws std::invalid_argument for zero rounds, a check fraction outside
  /// (0, 1), a missing set, or a strategy built for a different dimension.
  void validate() const;
};

struct RoundRecord {
  std::uint64_t round_id = 0;
  int alice_index = 0;
  int bob_index = 0;
  bool checked = false;
  bool mismatch = false;
};

struct SessionResult {
  int n = 0;
  std::vector<RoundRecord> records;
  std::vector<EveRecord> eve;  // one per round, empty when strategy is none
  bool detected = false;
  std::vector<int> key_indices;  // unchecked rounds' Bob outcomes; empty if detected
  double bits_per_round = 0.0;   // log2(n^2)

  [[nodiscard]] std::size_t checked_count() const;
  [[nodiscard]] std::size_t mismatch_count() const;
  /// Fraction of rounds not spent on checking.
  [[nodiscard]] double key_fraction() const;
};

/// Classical acknowledgment between the legs: the second particle may only be
/// released once the first has been delivered and acknowledged.
class TwoLegChannel {
 public:
  Ket deliver_first(const LegHooks& hooks, const Ket& a);
  void acknowledge();
  Ket deliver_second(const LegHooks& hooks, const Ket& b);

 private:
  enum class Phase { idle, first_delivered, acknowledged, done };
  Phase phase_ = Phase::idle;
};

/// Builds the hooks for one round; the default dispatches on the strategy.
using HookFactory = std::function<LegHooks(EveRound&)>;

struct RoundOutcome {
  RoundRecord record;
  EveRecord eve;
};

/// One complete transmission (without the check phase).
RoundOutcome simulate_round(const StateSet& set, const EveStrategy& strategy,
                            std::uint64_t seed, std::uint64_t round_id,
                            const HookFactory& factory = {});

/// Probabilities of each label when Bob measures x (x) y in bob_basis(set),
/// computed from the product structure <Ai Bi|x y> = <Ai|x><Bi|y>.
std::vector<double> bob_outcome_probabilities(const StateSet& set, const Ket& x, const Ket& y);
int bob_measure(const StateSet& set, const Ket& x, const Ket& y, RngStream& rng);

/// Rounds run across OpenMP threads; results are identical to the serial
/// reference for the same config.
SessionResult run_session(const ProtocolConfig& config, const HookFactory& factory = {});
SessionResult run_session_serial(const ProtocolConfig& config, const HookFactory& factory = {});

/// Round ids chosen for the check phase: ceil(check_fraction * rounds) of them,
/// sorted ascending.
std::vector<std::uint64_t> select_check_rounds(std::uint64_t rounds, double check_fraction,
                                               std::uint64_t seed);

struct DetectionEstimate {
  double rate;
  double ci_low;
  double ci_high;
  std::size_t checked;
  std::size_t mismatches;
};

/// Mismatch fraction over checked rounds with a 95% Wilson interval.
/// Throws InsufficientData when no round was checked.
DetectionEstimate detection_probability(const SessionResult& result);

/// Reads the label sequence as base-`radix` digits (most significant first)
/// and returns the binary expansion, left-padded to ceil(len * log2(radix))
/// bits.
std::string key_bitstring(std::span<const int> digits, int radix);

}  // namespace opqkd
