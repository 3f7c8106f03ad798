#pragma once

// Eavesdropping strategies as per-round channel hooks.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opqkd/qcore.hpp"
#include "opqkd/stateset.hpp"

namespace opqkd {

enum class Variant {
  none,
  intercept_resend,     // measure A, then B in a basis conditioned on A's outcome
  measure_second_only,  // leave A alone, measure B computationally
  substitute,           // hold A, send a decoy, measure A (x) B jointly
};

const char* to_string(Variant v);
/// Accepts the canonical names above plus "intercept", "complementary",
/// "second-only". Throws std::invalid_argument otherwise.
Variant variant_from_string(const std::string& name);

/// Distinct B-parts of every state whose A-part overlaps |m>, completed with
/// computational vectors to a full basis. Throws InvalidSet when those
/// B-parts are not mutually orthogonal.
MeasurementBasis conditional_b_basis(std::span<const ProductState> states, int n, int m);
MeasurementBasis conditional_b_basis(const StateSet& set, int m);

/// Eve's public knowledge (the state family) plus her randomness source.
/// Copies share one immutable cache of measurement bases, so a strategy can be
/// read from many worker threads at once.
class EveStrategy {
 public:
  EveStrategy() = default;  // Variant::none
  EveStrategy(Variant variant, std::shared_ptr<const StateSet> set, std::uint64_t seed);

  [[nodiscard]] Variant variant() const { return variant_; }
  [[nodiscard]] const StateSet* set() const { return set_.get(); }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }

  [[nodiscard]] const MeasurementBasis& conditional_basis(int m) const;
  [[nodiscard]] const MeasurementBasis& joint_basis() const;
  [[nodiscard]] RngStream round_stream(std::uint64_t round_id) const;

 private:
  struct Cache {
    std::vector<MeasurementBasis> conditional;
    std::optional<MeasurementBasis> joint;
  };

  Variant variant_ = Variant::none;
  std::shared_ptr<const StateSet> set_;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const Cache> cache_;
};

struct EveRecord {
  std::uint64_t round_id = 0;
  Variant variant = Variant::none;
  std::optional<int> a_outcome;
  std::optional<int> b_outcome;
  std::optional<int> inferred_state;
  std::vector<int> candidates;  // labels with nonzero posterior
};

/// Eve's state for one round, alive between the two legs.
class EveRound {
 public:
  EveRound(const EveStrategy& strategy, std::uint64_t round_id);

  [[nodiscard]] const EveStrategy& strategy() const { return *strategy_; }
  [[nodiscard]] const EveRecord& record() const { return record_; }
  EveRecord& record() { return record_; }
  RngStream& rng() { return rng_; }

  std::optional<Ket> held;  // particle A under the substitute attack
  bool first_leg_done = false;

 private:
  const EveStrategy* strategy_;
  EveRecord record_;
  RngStream rng_;
};

/// Transformations applied to particle A and then particle B in transit.
struct LegHooks {
  std::function<Ket(const Ket&)> first_leg;
  std::function<Ket(const Ket&)> second_leg;
};

LegHooks intercept_resend_hooks(EveRound& round);
LegHooks measure_second_only_hooks(EveRound& round);
LegHooks substitute_hooks(EveRound& round);
/// Dispatch on the round's strategy variant; `none` passes both legs through.
LegHooks make_hooks(EveRound& round);

}  // namespace opqkd
