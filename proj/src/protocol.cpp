#include "opqkd/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "opqkd/errors.hpp"
#include "opqkd/stats.hpp"

namespace opqkd {

namespace {

constexpr std::uint64_t kAliceTag = 0xA11CE;
constexpr std::uint64_t kBobTag = 0xB0B;
constexpr std::uint64_t kCheckStream = ~std::uint64_t{0};

SessionResult assemble(const ProtocolConfig& config, std::vector<RoundOutcome> outcomes) {
  SessionResult result;
  const int n = config.set->n();
  result.n = n;
  result.bits_per_round = std::log2(static_cast<double>(n) * n);
  result.records.reserve(outcomes.size());
  const bool eavesdropped = config.strategy.variant() != Variant::none;
  for (auto& o : outcomes) {
    result.records.push_back(o.record);
    if (eavesdropped) result.eve.push_back(std::move(o.eve));
  }
  for (std::uint64_t id : select_check_rounds(config.rounds, config.check_fraction, config.seed)) {
    auto& r = result.records[id];
    r.checked = true;
    if (r.mismatch) result.detected = true;
  }
  if (!result.detected) {
    for (const auto& r : result.records) {
      if (!r.checked) result.key_indices.push_back(r.bob_index);
    }
  }
  return result;
}

}  // namespace

void ProtocolConfig::validate() const {
  if (!set) throw std::invalid_argument("protocol: no state set");
  if (rounds == 0) throw std::invalid_argument("protocol: rounds must be positive");
  if (!(check_fraction > 0.0 && check_fraction < 1.0)) {
    throw std::invalid_argument("protocol: check fraction must lie in (0, 1)");
  }
  if (strategy.variant() != Variant::none &&
      (strategy.set() == nullptr || strategy.set()->n() != set->n())) {
    throw std::invalid_argument("protocol: strategy dimension does not match the state set");
  }
}

std::size_t SessionResult::checked_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const RoundRecord& r) { return r.checked; }));
}

std::size_t SessionResult::mismatch_count() const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [](const RoundRecord& r) { return r.checked && r.mismatch; }));
}

double SessionResult::key_fraction() const {
  if (records.empty()) return 0.0;
  return static_cast<double>(records.size() - checked_count()) / static_cast<double>(records.size());
}

Ket TwoLegChannel::deliver_first(const LegHooks& hooks, const Ket& a) {
  if (phase_ != Phase::idle) throw ProtocolOrderError("channel: first leg already sent");
  Ket out = hooks.first_leg(a);
  phase_ = Phase::first_delivered;
  return out;
}

void TwoLegChannel::acknowledge() {
  if (phase_ != Phase::first_delivered) {
    throw ProtocolOrderError("channel: acknowledgment without a delivered first particle");
  }
  phase_ = Phase::acknowledged;
}

Ket TwoLegChannel::deliver_second(const LegHooks& hooks, const Ket& b) {
  if (phase_ != Phase::acknowledged) {
    throw ProtocolOrderError("channel: second particle released before acknowledgment");
  }
  Ket out = hooks.second_leg(b);
  phase_ = Phase::done;
  return out;
}

std::vector<double> bob_outcome_probabilities(const StateSet& set, const Ket& x, const Ket& y) {
  std::vector<double> p(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    p[i] = std::norm(inner(set[i].ket_a, x)) * std::norm(inner(set[i].ket_b, y));
  }
  return p;
}

int bob_measure(const StateSet& set, const Ket& x, const Ket& y, RngStream& rng) {
  const auto p = bob_outcome_probabilities(set, x, y);
  return static_cast<int>(rng.sample(p));
}

RoundOutcome simulate_round(const StateSet& set, const EveStrategy& strategy, std::uint64_t seed,
                            std::uint64_t round_id, const HookFactory& factory) {
  const RngStream base(seed, round_id);
  RngStream alice = base.fork(kAliceTag);
  RngStream bob = base.fork(kBobTag);

  const auto label = static_cast<std::size_t>(alice.uniform_index(set.size()));
  const ProductState& prepared = set[label];

  EveRound eve(strategy, round_id);
  const LegHooks hooks = factory ? factory(eve) : make_hooks(eve);

  TwoLegChannel channel;
  const Ket received_a = channel.deliver_first(hooks, prepared.ket_a);
  channel.acknowledge();
  const Ket received_b = channel.deliver_second(hooks, prepared.ket_b);

  RoundOutcome out;
  out.record.round_id = round_id;
  out.record.alice_index = prepared.index;
  out.record.bob_index = bob_measure(set, received_a, received_b, bob);
  out.record.mismatch = out.record.bob_index != out.record.alice_index;
  out.eve = eve.record();
  return out;
}

SessionResult run_session_serial(const ProtocolConfig& config, const HookFactory& factory) {
  config.validate();
  std::vector<RoundOutcome> outcomes;
  outcomes.reserve(config.rounds);
  for (std::uint64_t r = 0; r < config.rounds; ++r) {
    outcomes.push_back(simulate_round(*config.set, config.strategy, config.seed, r, factory));
  }
  return assemble(config, std::move(outcomes));
}

SessionResult run_session(const ProtocolConfig& config, const HookFactory& factory) {
  config.validate();
  const auto rounds = static_cast<std::int64_t>(config.rounds);
  std::vector<RoundOutcome> outcomes(config.rounds);
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rounds; ++r) {
    try {
      outcomes[static_cast<std::size_t>(r)] =
          simulate_round(*config.set, config.strategy, config.seed, static_cast<std::uint64_t>(r), factory);
    } catch (...) {
#pragma omp critical(opqkd_session_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(config, std::move(outcomes));
}

std::vector<std::uint64_t> select_check_rounds(std::uint64_t rounds, double check_fraction,
                                               std::uint64_t seed) {
  const auto want = std::min<std::uint64_t>(
      rounds, static_cast<std::uint64_t>(std::ceil(check_fraction * static_cast<double>(rounds))));
  std::vector<std::uint64_t> ids(rounds);
  for (std::uint64_t i = 0; i < rounds; ++i) ids[i] = i;
  RngStream rng(seed, kCheckStream);
  // Partial Fisher-Yates: the first `want` slots become a uniform subset.
  for (std::uint64_t i = 0; i < want; ++i) {
    const std::uint64_t j = i + rng.uniform_index(rounds - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(want);
  std::sort(ids.begin(), ids.end());
  return ids;
}

DetectionEstimate detection_probability(const SessionResult& result) {
  const std::size_t checked = result.checked_count();
  if (checked == 0) throw InsufficientData("detection_probability: no checked rounds");
  const std::size_t mismatches = result.mismatch_count();
  const auto ci = wilson_interval(mismatches, checked);
  return {static_cast<double>(mismatches) / static_cast<double>(checked), ci.low, ci.high, checked,
          mismatches};
}

std::string key_bitstring(std::span<const int> digits, int radix) {
  if (radix < 2) throw std::invalid_argument("key_bitstring: radix must be at least 2");
  // Little-endian base-2^32 limbs of the accumulated value.
  std::vector<std::uint32_t> limbs;
  for (int d : digits) {
    if (d < 0 || d >= radix) throw std::invalid_argument("key_bitstring: digit out of range");
    std::uint64_t carry = static_cast<std::uint64_t>(d);
    for (auto& limb : limbs) {
      const std::uint64_t v = static_cast<std::uint64_t>(limb) * static_cast<std::uint64_t>(radix) + carry;
      limb = static_cast<std::uint32_t>(v);
      carry = v >> 32;
    }
    if (carry != 0) limbs.push_back(static_cast<std::uint32_t>(carry));
  }
  const auto uradix = static_cast<unsigned>(radix);
  const std::size_t width =
      std::has_single_bit(uradix)
          ? digits.size() * static_cast<std::size_t>(std::countr_zero(uradix))
          : static_cast<std::size_t>(std::ceil(static_cast<double>(digits.size()) * std::log2(radix)));
  std::string bits(width, '0');
  for (std::size_t k = 0; k < limbs.size(); ++k) {
    for (std::size_t bit = 0; bit < 32; ++bit) {
      const std::size_t pos = k * 32 + bit;
      if (pos >= width) break;
      if ((limbs[k] >> bit) & 1U) bits[width - 1 - pos] = '1';
    }
  }
  return bits;
}

}  // namespace opqkd
