#include "opqkd/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "opqkd/errors.hpp"
#include "opqkd/tolerance.hpp"

namespace opqkd {

namespace {

constexpr std::uint64_t kEveStreamTag = 0xE7E;

// Residual of e_k after removing its projection on `kept`, twice for stability.
std::vector<Complex> orthogonal_residual(std::vector<Complex> v, const std::vector<Ket>& kept) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Ket& q : kept) {
      const Complex c = inner(q.amplitudes(), v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
    }
  }
  return v;
}

// Maximum-posterior label with lowest-label tie breaking; fills candidates.
void infer(EveRecord& rec, const std::vector<double>& weight) {
  const double best = *std::max_element(weight.begin(), weight.end());
  rec.candidates.clear();
  rec.inferred_state.reset();
  for (std::size_t i = 0; i < weight.size(); ++i) {
    if (weight[i] > tol::kZero) rec.candidates.push_back(static_cast<int>(i));
    if (!rec.inferred_state && weight[i] >= best * (1.0 - 1e-12)) {
      rec.inferred_state = static_cast<int>(i);
    }
  }
}

void require_variant(const EveRound& round, Variant v) {
  if (round.strategy().variant() != v || round.strategy().set() == nullptr) {
    throw std::invalid_argument(std::string("hooks requested for '") + to_string(v) +
                                "' on a strategy of another variant");
  }
}

}  // namespace

const char* to_string(Variant v) {
  switch (v) {
    case Variant::none: return "none";
    case Variant::intercept_resend: return "intercept-resend";
    case Variant::measure_second_only: return "measure-second-only";
    case Variant::substitute: return "substitute";
  }
  return "?";
}

Variant variant_from_string(const std::string& name) {
  if (name == "none") return Variant::none;
  if (name == "intercept" || name == "intercept-resend") return Variant::intercept_resend;
  if (name == "complementary" || name == "second-only" || name == "measure-second-only") {
    return Variant::measure_second_only;
  }
  if (name == "substitute") return Variant::substitute;
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

MeasurementBasis conditional_b_basis(std::span<const ProductState> states, int n, int m) {
  if (m < 0 || m >= n) throw std::invalid_argument("conditional_b_basis: outcome out of range");
  const auto un = static_cast<std::size_t>(n);
  std::vector<Ket> parts;
  for (const auto& s : states) {
    if (s.ket_a.dim() != un || s.ket_b.dim() != un) {
      throw InvalidSet("conditional_b_basis: state dimension disagrees with n");
    }
    if (std::abs(s.ket_a[static_cast<std::size_t>(m)]) <= tol::kExact) continue;
    const bool seen = std::any_of(parts.begin(), parts.end(),
                                  [&](const Ket& k) { return states_equivalent(k, s.ket_b); });
    if (seen) continue;
    for (const Ket& k : parts) {
      if (!states_orthogonal(k, s.ket_b)) {
        throw InvalidSet("conditional_b_basis: consistent B-parts are not mutually orthogonal");
      }
    }
    parts.push_back(s.ket_b.canonical_phase());
  }
  if (parts.size() > un) throw InvalidSet("conditional_b_basis: too many B-parts");
  for (std::size_t k = 0; k < un && parts.size() < un; ++k) {
    std::vector<Complex> e(un);
    e[k] = 1.0;
    auto r = orthogonal_residual(std::move(e), parts);
    double norm2 = 0.0;
    for (const auto& z : r) norm2 += std::norm(z);
    if (norm2 > 1e-6) parts.push_back(Ket::from_amplitudes(std::move(r)).canonical_phase());
  }
  return MeasurementBasis(std::move(parts));
}

MeasurementBasis conditional_b_basis(const StateSet& set, int m) {
  return conditional_b_basis(set.states(), set.n(), m);
}

EveStrategy::EveStrategy(Variant variant, std::shared_ptr<const StateSet> set, std::uint64_t seed)
    : variant_(variant), set_(std::move(set)), seed_(seed) {
  if (variant_ == Variant::none) return;
  if (!set_) throw std::invalid_argument("EveStrategy: a state family is required");
  auto cache = std::make_shared<Cache>();
  if (variant_ == Variant::intercept_resend) {
    for (int m = 0; m < set_->n(); ++m) cache->conditional.push_back(conditional_b_basis(*set_, m));
  }
  if (variant_ == Variant::substitute) cache->joint = bob_basis(*set_);
  cache_ = std::move(cache);
}

const MeasurementBasis& EveStrategy::conditional_basis(int m) const {
  if (!cache_ || cache_->conditional.empty()) {
    throw std::logic_error("conditional bases are only cached for intercept-resend");
  }
  return cache_->conditional.at(static_cast<std::size_t>(m));
}

const MeasurementBasis& EveStrategy::joint_basis() const {
  if (!cache_ || !cache_->joint) throw std::logic_error("joint basis is only cached for substitute");
  return *cache_->joint;
}

RngStream EveStrategy::round_stream(std::uint64_t round_id) const {
  return RngStream(seed_, round_id).fork(kEveStreamTag);
}

EveRound::EveRound(const EveStrategy& strategy, std::uint64_t round_id)
    : strategy_(&strategy), rng_(strategy.round_stream(round_id)) {
  record_.round_id = round_id;
  record_.variant = strategy.variant();
}

LegHooks intercept_resend_hooks(EveRound& round) {
  require_variant(round, Variant::intercept_resend);
  LegHooks hooks;
  hooks.first_leg = [&round](const Ket& a) {
    const auto n = static_cast<std::size_t>(round.strategy().set()->n());
    auto m = projective_measure(a, MeasurementBasis::computational(n), round.rng());
    round.record().a_outcome = static_cast<int>(m.outcome);
    round.first_leg_done = true;
    return m.collapsed;
  };
  hooks.second_leg = [&round](const Ket& b) {
    auto& rec = round.record();
    if (!round.first_leg_done || !rec.a_outcome) {
      throw ProtocolOrderError("intercept-resend: particle B arrived before particle A");
    }
    const StateSet& set = *round.strategy().set();
    const int m = *rec.a_outcome;
    const MeasurementBasis& basis = round.strategy().conditional_basis(m);
    auto meas = projective_measure(b, basis, round.rng());
    rec.b_outcome = static_cast<int>(meas.outcome);
    std::vector<double> w(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
      w[i] = std::norm(set[i].ket_a[static_cast<std::size_t>(m)]) *
             std::norm(inner(basis[meas.outcome], set[i].ket_b));
    }
    infer(rec, w);
    return meas.collapsed;
  };
  return hooks;
}

LegHooks measure_second_only_hooks(EveRound& round) {
  require_variant(round, Variant::measure_second_only);
  LegHooks hooks;
  hooks.first_leg = [&round](const Ket& a) {
    round.first_leg_done = true;
    return a;
  };
  hooks.second_leg = [&round](const Ket& b) {
    const StateSet& set = *round.strategy().set();
    auto meas = projective_measure(b, MeasurementBasis::computational(b.dim()), round.rng());
    auto& rec = round.record();
    rec.b_outcome = static_cast<int>(meas.outcome);
    std::vector<double> w(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) w[i] = std::norm(set[i].ket_b[meas.outcome]);
    infer(rec, w);
    return meas.collapsed;
  };
  return hooks;
}

LegHooks substitute_hooks(EveRound& round) {
  require_variant(round, Variant::substitute);
  LegHooks hooks;
  hooks.first_leg = [&round](const Ket& a) {
    round.held = a;
    round.first_leg_done = true;
    const auto n = a.dim();
    return Ket::basis(n, static_cast<std::size_t>(round.rng().uniform_index(n)));
  };
  hooks.second_leg = [&round](const Ket& b) {
    if (!round.first_leg_done || !round.held) {
      throw ProtocolOrderError("substitute: particle B arrived before particle A was held");
    }
    const StateSet& set = *round.strategy().set();
    auto meas = projective_measure(tensor(*round.held, b), round.strategy().joint_basis(), round.rng());
    auto& rec = round.record();
    const int label = static_cast<int>(meas.outcome);
    rec.b_outcome = label;
    rec.inferred_state = label;
    rec.candidates = {label};
    round.held.reset();
    return set[meas.outcome].ket_b;
  };
  return hooks;
}

LegHooks make_hooks(EveRound& round) {
  switch (round.strategy().variant()) {
    case Variant::intercept_resend: return intercept_resend_hooks(round);
    case Variant::measure_second_only: return measure_second_only_hooks(round);
    case Variant::substitute: return substitute_hooks(round);
    case Variant::none: break;
  }
  LegHooks pass;
  pass.first_leg = [&round](const Ket& a) {
    round.first_leg_done = true;
    return a;
  };
  pass.second_leg = [](const Ket& b) { return b; };
  return pass;
}

}  // namespace opqkd
