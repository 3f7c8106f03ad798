#include "opqkd/cli.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "opqkd/analysis.hpp"
#include "opqkd/errors.hpp"
#include "opqkd/parallel.hpp"
#include "opqkd/protocol.hpp"
#include "opqkd/report.hpp"
#include "opqkd/serialize.hpp"
#include "opqkd/stats.hpp"

namespace opqkd::cli {

namespace {

using nlohmann::json;

constexpr const char* kKeyDerivation =
    "key labels are read as base-n^2 digits, most significant first; the key bits are the "
    "binary expansion of that number, left-padded to ceil(len * log2(n^2)) bits";

struct Options {
  int dim = 3;
  std::string params;
  std::string input;
  std::string strategy = "intercept";
  std::uint64_t rounds = 10000;
  std::uint64_t trials = 0;
  double check_fraction = 0.1;
  std::uint64_t seed = 1;
  std::string output;
  std::string set_output;
  std::string transcript;
  std::string eve_transcript;
  std::string key_output;
  int threads = 0;
  int max_dim = 21;
  int budget = 9;
};

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string fmt_complex(Complex z) {
  if (std::abs(z.imag()) < 1e-15) return fmt_short(z.real());
  if (std::abs(z.real()) < 1e-15) return fmt_short(z.imag()) + "i";
  return "(" + fmt_short(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt_short(std::abs(z.imag())) + "i)";
}

std::string fmt_ket(const Ket& k, char subsystem) {
  std::string s;
  for (std::size_t i = 0; i < k.dim(); ++i) {
    const Complex z = k[i];
    if (std::abs(z) < 1e-12) continue;
    if (!s.empty()) s += " + ";
    const bool unit = std::abs(z - 1.0) < 1e-12;
    s += (unit ? "" : fmt_complex(z)) + "|" + std::to_string(i) + ">_" + subsystem;
  }
  return s;
}

std::string params_text(const SetParameters& p) {
  std::string s;
  for (Complex z : {p.a, p.b, p.c, p.d, p.e, p.f, p.g, p.h}) {
    if (!s.empty()) s += ',';
    s += fmt_double(z.real());
    if (z.imag() != 0.0) s += ":" + fmt_double(z.imag());
  }
  return s;
}

json params_json(const SetParameters& p) {
  json j;
  const char* names = "abcdefgh";
  int k = 0;
  for (Complex z : {p.a, p.b, p.c, p.d, p.e, p.f, p.g, p.h}) j[std::string(1, names[k++])] = {z.real(), z.imag()};
  return j;
}

// The state family named by --input, --params or --dim, plus its echo flags.
struct LoadedSet {
  std::shared_ptr<const StateSet> set;
  std::string echo;
  std::optional<SetParameters> params;
  bool symmetric_family = false;
};

LoadedSet load_set(const Options& o) {
  LoadedSet out;
  if (!o.input.empty()) {
    out.set = std::make_shared<const StateSet>(stateset_from_json(read_file(o.input)));
    out.echo = " --input " + o.input;
    return out;
  }
  if (o.dim < 3) {
    throw UnsupportedDimension(
        "unsupported dimension " + std::to_string(o.dim) +
        ": in a 2x2 system any two orthogonal product states are orthogonal on one of the "
        "particles, so no set can meet the usability conditions (need n >= 3)");
  }
  if (!o.params.empty()) {
    if (o.dim != 3) throw std::invalid_argument("--params describes the 3x3 family; use --dim 3");
    const SetParameters p = parse_params(o.params);
    out.set = std::make_shared<const StateSet>(build_3x3(p));
    out.params = p;
    out.echo = " --dim 3 --params " + params_text(p);
    return out;
  }
  out.set = std::make_shared<const StateSet>(build_symmetric(o.dim));
  out.symmetric_family = true;
  out.echo = " --dim " + std::to_string(o.dim);
  return out;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

int cmd_validate(const Options& o, std::ostream& out) {
  const LoadedSet loaded = load_set(o);
  const StateSet& set = *loaded.set;
  const SetDiagnostics d = diagnose(set);
  const ConditionReport cond = check_conditions(set);
  const bool symmetric = is_four_fold_symmetric(set.layout());
  std::size_t cond_passed = 0;
  for (const auto& c : cond.states) cond_passed += (c.a_ok ? 1 : 0) + (c.b_ok ? 1 : 0);

  const bool orthonormal = d.gram_deviation < 1e-9;
  const bool complete = set.size() == static_cast<std::size_t>(set.n() * set.n()) && d.partition_ok;
  const bool unitary = d.tile_unitarity < 1e-9;
  const bool short_tiles = d.max_tile_length < static_cast<std::size_t>(set.n());
  const bool pass = orthonormal && complete && unitary && short_tiles && cond.pass && symmetric;
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };

  std::string echo = "opqkd validate" + loaded.echo;
  if (!o.set_output.empty()) echo += " --set-output " + o.set_output;
  out << "command: " << echo << '\n'
      << "dimension: " << set.n() << '\n'
      << "states: " << set.size() << '\n'
      << "orthonormality: " << verdict(orthonormal) << " (max Gram deviation "
      << fmt_short(d.gram_deviation) << ")\n"
      << "completeness: " << verdict(complete) << '\n'
      << "tile unitarity: " << verdict(unitary) << " (max deviation " << fmt_short(d.tile_unitarity)
      << ")\n"
      << "tile length below n: " << verdict(short_tiles) << " (longest " << d.max_tile_length << ")\n"
      << "usability conditions: " << verdict(cond.pass) << " (" << cond_passed << "/"
      << 2 * cond.states.size() << " subsystem checks)\n"
      << "four-fold rotation symmetry: " << verdict(symmetric) << '\n'
      << "result: " << verdict(pass) << '\n';
  if (!o.set_output.empty()) write_file_atomic(o.set_output, stateset_to_json(set));
  return pass ? kExitOk : kExitValidationFailed;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Variant variant = variant_from_string(o.strategy);
  const LoadedSet loaded = load_set(o);
  set_thread_count(o.threads);

  ProtocolConfig config;
  config.set = loaded.set;
  config.rounds = o.rounds;
  config.check_fraction = o.check_fraction;
  config.seed = o.seed;
  if (variant != Variant::none) config.strategy = EveStrategy(variant, loaded.set, o.seed);
  config.validate();

  const SessionResult result = run_session(config);

  std::string echo = "opqkd simulate" + loaded.echo + " --strategy " + to_string(variant) +
                     " --rounds " + std::to_string(o.rounds) + " --check-fraction " +
                     fmt_double(o.check_fraction) + " --seed " + std::to_string(o.seed);
  if (!o.output.empty()) echo += " --output " + o.output;
  if (!o.transcript.empty()) echo += " --transcript " + o.transcript;
  if (!o.eve_transcript.empty()) echo += " --eve-transcript " + o.eve_transcript;
  if (!o.key_output.empty()) echo += " --key-output " + o.key_output;

  std::size_t correct = 0;
  for (const auto& r : result.records) correct += r.mismatch ? 0 : 1;

  json doc;
  doc["command"] = echo;
  doc["config"] = {{"dim", loaded.set->n()},
                   {"strategy", to_string(variant)},
                   {"rounds", o.rounds},
                   {"check_fraction", o.check_fraction},
                   {"seed", o.seed}};
  if (loaded.params) doc["config"]["params"] = params_json(*loaded.params);
  if (!o.input.empty()) doc["config"]["input"] = o.input;
  doc["key_derivation"] = kKeyDerivation;

  json res;
  res["rounds"] = result.records.size();
  res["checked_rounds"] = result.checked_count();
  res["mismatches"] = result.mismatch_count();
  res["detected"] = result.detected;
  const auto det = detection_probability(result);
  res["mismatch_rate"] = det.rate;
  res["mismatch_rate_ci95"] = {det.ci_low, det.ci_high};
  res["undetected_correct_rate"] = static_cast<double>(correct) / static_cast<double>(result.records.size());
  res["key_rounds"] = result.key_indices.size();
  res["key_fraction"] = result.key_fraction();
  res["bits_per_round"] = result.bits_per_round;
  const int radix = result.n * result.n;
  const std::string bits = result.key_indices.empty() ? std::string{} : key_bitstring(result.key_indices, radix);
  res["key_bits"] = bits.size();
  if (variant != Variant::none) res["eve_inference_accuracy"] = eve_inference_accuracy(result);
  doc["results"] = std::move(res);

  if (!o.transcript.empty()) write_file_atomic(o.transcript, transcript_csv(result));
  if (!o.eve_transcript.empty()) write_file_atomic(o.eve_transcript, eve_transcript_csv(result));
  if (!o.key_output.empty()) write_file_atomic(o.key_output, bits + "\n");
  emit(o.output, doc.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_exact(const Options& o, std::ostream& out) {
  const Variant variant = variant_from_string(o.strategy);
  const LoadedSet loaded = load_set(o);
  set_thread_count(o.threads);
  const ExactResult r = exact_undetected_prob(*loaded.set, variant);

  std::string echo = "opqkd exact" + loaded.echo + " --strategy " + to_string(variant);
  if (!o.output.empty()) echo += " --output " + o.output;
  json doc;
  doc["command"] = echo;
  doc["config"] = {{"dim", loaded.set->n()}, {"strategy", to_string(variant)}};
  if (loaded.params) {
    doc["config"]["params"] = params_json(*loaded.params);
    if (variant == Variant::intercept_resend) doc["p3_formula"] = p3_formula(*loaded.params);
  }
  doc["value"] = r.value;
  doc["fraction"] = as_fraction(r.value);
  if (loaded.symmetric_family) doc["closed_form"] = closed_form_value(loaded.set->n(), variant);
  doc["per_state"] = r.per_state;
  emit(o.output, doc.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const Variant variant = variant_from_string(o.strategy);
  if (o.max_dim < 3) throw UnsupportedDimension("sweep needs --max-dim >= 3");
  set_thread_count(o.threads);
  SweepOptions opts;
  opts.enumeration_budget = o.budget;
  opts.mc_trials = o.trials;
  opts.seed = o.seed;
  const auto rows = dimension_sweep(o.max_dim, variant, opts);
  const std::string csv = sweep_csv(rows);
  if (o.output.empty() || o.output == "-") {
    out << csv;
  } else {
    write_file_atomic(o.output, csv);
    out << "command: opqkd sweep --max-dim " << o.max_dim << " --strategy " << to_string(variant)
        << " --budget " << o.budget << " --trials " << o.trials << " --seed " << o.seed
        << " --output " << o.output << '\n'
        << "rows: " << rows.size() << '\n';
  }
  return kExitOk;
}

int cmd_demo(const Options& o, std::ostream& out) {
  const SetParameters p = o.params.empty() ? SetParameters::uniform() : parse_params(o.params);
  const StateSet set = build_3x3(p);
  out << "command: opqkd demo --params " << params_text(p) << "\n\n"
      << "Nine orthogonal product states of the 3x3 family:\n";
  for (const auto& s : set.states()) {
    out << "  Psi" << s.index + 1 << " = (" << fmt_ket(s.ket_a, 'A') << ") (x) (" << fmt_ket(s.ket_b, 'B')
        << ")\n";
  }

  const ProductState& psi3 = set[2];
  out << "\nWalkthrough: Alice prepares Psi3 and Eve runs intercept-resend.\n";
  double total = 0.0;
  for (int m = 0; m < 3; ++m) {
    const double p_a = std::norm(psi3.ket_a[static_cast<std::size_t>(m)]);
    if (p_a < 1e-15) continue;
    const MeasurementBasis basis = conditional_b_basis(set, m);
    out << "  Eve finds A in |" << m << "> with probability " << fmt_short(p_a)
        << "; she measures B in {";
    for (std::size_t k = 0; k < basis.dim(); ++k) out << (k ? ", " : "") << fmt_ket(basis[k], 'B');
    out << "}\n";
    const Ket a = Ket::basis(3, static_cast<std::size_t>(m));
    for (std::size_t k = 0; k < basis.dim(); ++k) {
      const double p_b = std::norm(inner(basis[k], psi3.ket_b));
      if (p_b < 1e-15) continue;
      const auto bob = bob_outcome_probabilities(set, a, basis[k]);
      out << "    B found in " << fmt_ket(basis[k], 'B') << " (probability " << fmt_short(p_b)
          << "); the pair is now |" << m << ">_A (x) that state and Bob recovers Psi3 with probability "
          << fmt_short(bob[2]) << '\n';
      total += p_a * p_b * bob[2];
    }
  }
  out << "  P(Bob recovers Psi3) = |c|^4 + |d|^4 = " << fmt_short(total) << '\n';
  const ExactResult all = exact_undetected_prob(set, Variant::intercept_resend);
  out << "\nAveraged over all nine states: " << fmt_short(all.value) << " (closed form "
      << fmt_short(p3_formula(p)) << ")\n";
  return kExitOk;
}

}  // namespace

SetParameters parse_params(const std::string& text) {
  std::vector<Complex> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    try {
      std::size_t used = 0;
      const double re = std::stod(item.substr(0, colon), &used);
      double im = 0.0;
      if (colon != std::string::npos) im = std::stod(item.substr(colon + 1));
      values.emplace_back(re, im);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("--params: cannot parse coefficient '" + item + "'");
    }
  }
  if (values.size() != 8) throw std::invalid_argument("--params: expected 8 coefficients a..h");
  SetParameters p{values[0], values[1], values[2], values[3], values[4], values[5], values[6], values[7]};
  p.validate();
  return p;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Orthogonal-product-state QKD simulator and analysis toolkit", "opqkd"};
  app.require_subcommand(1);

  auto add_set_flags = [&](CLI::App* cmd) {
    cmd->add_option("--dim", o.dim, "Dimension n of each particle (pinwheel family unless --params)");
    cmd->add_option("--params", o.params, "3x3 family coefficients a..h, each re or re:im");
    cmd->add_option("--input", o.input, "Read the state set from a stateset JSON file");
  };
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "Random seed")->envname("OPQKD_SEED");
    cmd->add_option("--threads", o.threads, "Worker threads (results do not depend on it)");
  };

  auto* validate = app.add_subcommand("validate", "Check orthonormality, completeness, usability and symmetry");
  add_set_flags(validate);
  validate->add_option("--set-output", o.set_output, "Write the state set as JSON");

  auto* simulate = app.add_subcommand("simulate", "Run a protocol session");
  add_set_flags(simulate);
  add_seed(simulate);
  simulate->add_option("--strategy", o.strategy, "none | intercept | complementary | substitute");
  simulate->add_option("--rounds", o.rounds, "Transmission rounds");
  simulate->add_option("--check-fraction", o.check_fraction, "Fraction of rounds compared publicly");
  simulate->add_option("--output", o.output, "Report JSON path (default stdout)");
  simulate->add_option("--transcript", o.transcript, "Per-round transcript CSV path");
  simulate->add_option("--eve-transcript", o.eve_transcript, "Eve transcript CSV path");
  simulate->add_option("--key-output", o.key_output, "Write the key bitstring");

  auto* exact = app.add_subcommand("exact", "Exact undetected-eavesdropping probability");
  add_set_flags(exact);
  exact->add_option("--strategy", o.strategy, "intercept | complementary | substitute");
  exact->add_option("--output", o.output, "Report JSON path (default stdout)");
  exact->add_option("--threads", o.threads, "Worker threads");

  auto* sweep = app.add_subcommand("sweep", "Tabulate the pinwheel family over dimensions");
  add_seed(sweep);
  sweep->add_option("--max-dim", o.max_dim, "Largest dimension");
  sweep->add_option("--strategy", o.strategy, "intercept | complementary | substitute");
  sweep->add_option("--budget", o.budget, "Largest n evaluated by exact enumeration");
  sweep->add_option("--trials", o.trials, "Monte Carlo trials per row (0 = none)");
  sweep->add_option("--output", o.output, "CSV path (default stdout)");

  auto* demo = app.add_subcommand("demo", "Print the 3x3 states and an intercept-resend walkthrough");
  demo->add_option("--params", o.params, "3x3 family coefficients a..h");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUnsupported;
  }

  try {
    if (*validate) return cmd_validate(o, out);
    if (*simulate) return cmd_simulate(o, out);
    if (*exact) return cmd_exact(o, out);
    if (*sweep) return cmd_sweep(o, out);
    if (*demo) return cmd_demo(o, out);
  } catch (const UnsupportedDimension& e) {
    err << "opqkd: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const std::invalid_argument& e) {
    err << "opqkd: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const std::exception& e) {
    err << "opqkd: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace opqkd::cli
