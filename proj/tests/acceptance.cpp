// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "opqkd/analysis.hpp"
#include "opqkd/protocol.hpp"
#include "opqkd/report.hpp"
#include "opqkd/stats.hpp"
#include "test_support.hpp"

using namespace opqkd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

int shell_status(const std::string& command) {
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome orthogonality_of_random_sets() {
  Outcome o;
  std::mt19937_64 gen(1001);
  double worst_pair = 0.0, worst_gram = 0.0;
  for (int draw = 0; draw < 1000; ++draw) {
    const StateSet set = build_3x3(testing::random_params(gen));
    for (std::size_t i = 0; i < set.size(); ++i) {
      const Ket x = set.joint_state(i);
      for (std::size_t j = i + 1; j < set.size(); ++j) {
        worst_pair = std::max(worst_pair, std::abs(inner(x, set.joint_state(j))));
      }
    }
    worst_gram = std::max(worst_gram, gram_deviation(bob_basis(set).vectors()));
  }
  o.require(worst_pair < 1e-10, "pairwise overlap " + num(worst_pair));
  o.require(worst_gram < 1e-9, "Gram deviation " + num(worst_gram));
  o.detail = o.detail.empty() ? "max overlap " + num(worst_pair) + ", max Gram deviation " + num(worst_gram)
                              : o.detail;
  return o;
}

Outcome quartic_formula() {
  Outcome o;
  std::mt19937_64 gen(1002);
  double worst = 0.0, worst_dense = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const SetParameters p = testing::random_params(gen);
    const StateSet set = build_3x3(p);
    const double v = exact_undetected_prob(set, Variant::intercept_resend).value;
    worst = std::max(worst, std::abs(v - p3_formula(p)));
    worst_dense = std::max(worst_dense, std::abs(testing::JointSpaceOracle(set).undetected(Variant::intercept_resend) -
                                                 p3_formula(p)));
  }
  const double uniform = exact_undetected_prob(build_3x3(SetParameters::uniform()), Variant::intercept_resend).value;
  o.require(worst < 1e-12, "enumeration vs formula " + num(worst));
  o.require(worst_dense < 1e-12, "dense oracle vs formula " + num(worst_dense));
  o.require(std::abs(uniform - 7.0 / 9.0) < 1e-12 && as_fraction(uniform) == "7/9",
            "balanced set gives " + num(uniform));
  if (o.ok) o.detail = "max |diff| " + num(std::max(worst, worst_dense)) + ", balanced = " + as_fraction(uniform);
  return o;
}

Outcome odd_minima() {
  Outcome o;
  const double p5 = exact_undetected_prob(build_symmetric(5), Variant::intercept_resend).value;
  const double p7 = exact_undetected_prob(build_symmetric(7), Variant::intercept_resend).value;
  o.require(std::abs(p5 - 17.0 / 25.0) < 1e-12, "n=5 gives " + num(p5));
  o.require(std::abs(p7 - 31.0 / 49.0) < 1e-12, "n=7 gives " + num(p7));
  if (o.ok) o.detail = "n=5 " + as_fraction(p5) + ", n=7 " + as_fraction(p7);
  return o;
}

Outcome recurrence_identity() {
  Outcome o;
  double worst = 0.0, worst_gap = 0.0;
  double prev_gap = 1.0;
  bool decreasing = true;
  for (int m = 1; m <= 50; ++m) {
    const double closed = min_p_odd(m);
    worst = std::max(worst, std::abs(min_p_odd_recurrence(m) - closed));
    const double n = 2.0 * m + 1;
    const double gap = closed - 0.5;
    worst_gap = std::max(worst_gap, std::abs(gap - (1 + 4.0 * m) / (2 * n * n)));
    decreasing = decreasing && gap < prev_gap && gap > 0.0;
    prev_gap = gap;
  }
  o.require(worst < 1e-12, "recurrence vs closed form " + num(worst));
  o.require(worst_gap < 1e-12, "gap formula " + num(worst_gap));
  o.require(decreasing, "gap not strictly decreasing");
  if (o.ok) o.detail = "m=1..50, max |diff| " + num(worst) + ", gap at m=50 " + num(prev_gap);
  return o;
}

Outcome even_minima() {
  Outcome o;
  const double p4 = exact_undetected_prob(build_symmetric(4), Variant::intercept_resend).value;
  const double p6 = exact_undetected_prob(build_symmetric(6), Variant::intercept_resend).value;
  o.require(std::abs(p4 - 0.75) < 1e-12, "n=4 gives " + num(p4));
  o.require(std::abs(p6 - 2.0 / 3.0) < 1e-12, "n=6 gives " + num(p6));
  if (o.ok) o.detail = "n=4 " + as_fraction(p4) + ", n=6 " + as_fraction(p6);
  return o;
}

Outcome clean_channel() {
  Outcome o;
  ProtocolConfig c;
  c.set = std::make_shared<const StateSet>(build_symmetric(3));
  c.rounds = 100000;
  c.seed = 1006;
  const SessionResult r = run_session(c);
  std::size_t wrong = 0;
  for (const auto& rec : r.records) wrong += rec.alice_index == rec.bob_index ? 0 : 1;
  o.require(wrong == 0, std::to_string(wrong) + " rounds decoded wrongly");
  o.require(r.mismatch_count() == 0 && !r.detected, "check rounds flagged a mismatch");
  o.require(std::abs(r.bits_per_round - std::log2(9.0)) < 1e-12, "bits per round " + num(r.bits_per_round));
  if (o.ok) o.detail = "0 mismatches in 1e5 rounds, " + std::to_string(r.bits_per_round) + " bits/round";
  return o;
}

Outcome strategy_monte_carlo() {
  Outcome o;
  const StateSet set = build_symmetric(3);
  const auto intercept = monte_carlo_estimate(set, Variant::intercept_resend, 100000, 1007);
  const auto sub = monte_carlo_estimate(set, Variant::substitute, 100000, 1008);
  o.require(std::abs(intercept.estimate - 7.0 / 9.0) <= 0.007, "intercept estimate " + num(intercept.estimate));
  o.require(std::abs(sub.estimate - 1.0 / 3.0) <= 0.008, "substitute estimate " + num(sub.estimate));
  o.require(sub.inference_accuracy == 1.0, "substitute inference accuracy " + num(sub.inference_accuracy));
  if (o.ok) {
    o.detail = "intercept " + std::to_string(intercept.estimate) + ", substitute " + std::to_string(sub.estimate) +
               ", inference accuracy " + std::to_string(sub.inference_accuracy);
  }
  return o;
}

Outcome strategy_symmetry() {
  Outcome o;
  double worst = 0.0;
  for (int n : {3, 4, 5, 7}) {
    const StateSet set = build_symmetric(n);
    worst = std::max(worst, std::abs(exact_undetected_prob(set, Variant::intercept_resend).value -
                                     exact_undetected_prob(set, Variant::measure_second_only).value));
  }
  SetParameters p = SetParameters::uniform();
  p.c = std::sqrt(0.9);
  p.d = std::sqrt(0.1);
  const StateSet skew = build_3x3(p);
  const double pi = exact_undetected_prob(skew, Variant::intercept_resend).value;
  const double pc = exact_undetected_prob(skew, Variant::measure_second_only).value;
  o.require(worst < 1e-12, "pinwheel difference " + num(worst));
  o.require(std::max(pi, pc) > 7.0 / 9.0, "skewed set max " + num(std::max(pi, pc)));
  if (o.ok) o.detail = "max difference " + num(worst) + "; skewed set " + num(pi) + " / " + num(pc);
  return o;
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("opqkd-accept-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string tool = OPQKD_TOOL_PATH;
  std::vector<std::string> transcripts, eves, reports;
  for (int threads : {1, 4}) {
    const std::string tag = std::to_string(threads);
    const std::string t = (dir / ("t" + tag + ".csv")).string();
    const std::string e = (dir / ("e" + tag + ".csv")).string();
    const std::string r = (dir / ("r" + tag + ".json")).string();
    const std::string cmd = tool + " simulate --dim 5 --strategy intercept --rounds 50000 --seed 1009 --threads " +
                            tag + " --transcript " + t + " --eve-transcript " + e + " --output " + r;
    const int status = shell_status(cmd + " >/dev/null 2>&1");
    o.require(status == 0, "simulate exited " + std::to_string(status));
    if (status != 0) break;
    transcripts.push_back(read_file(t));
    eves.push_back(read_file(e));
    reports.push_back(read_file(r));
  }
  fs::remove_all(dir);
  if (!o.ok) return o;
  o.require(transcripts[0] == transcripts[1], "transcripts differ");
  o.require(eves[0] == eves[1], "Eve transcripts differ");
  // Reports name their own output path, so compare them with it stripped.
  auto strip = [](std::string s) {
    for (const char* tag : {"1.csv", "4.csv", "1.json", "4.json"}) {
      for (auto at = s.find(tag); at != std::string::npos; at = s.find(tag)) s.replace(at, 1, "N");
    }
    return s;
  };
  o.require(strip(reports[0]) == strip(reports[1]), "reports differ");
  if (o.ok) o.detail = "1 vs 4 threads, " + std::to_string(transcripts[0].size()) + " transcript bytes identical";
  return o;
}

Outcome impossibility_gate() {
  Outcome o;
  const int status = shell_status(std::string(OPQKD_TOOL_PATH) + " validate --dim 2 >/dev/null 2>&1");
  o.require(status == 2, "exit status " + std::to_string(status));
  if (o.ok) o.detail = "exit status 2";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"3x3 family is an orthonormal product basis (1000 draws)", 5, orthogonality_of_random_sets},
      {"3x3 intercept-resend equals the quartic formula; balanced minimum 7/9", 5, quartic_formula},
      {"odd pinwheel minima 17/25 (n=5) and 31/49 (n=7)", 30, odd_minima},
      {"ring recurrence equals the closed form, gap to 1/2 shrinks", 1, recurrence_identity},
      {"even pinwheel minima 3/4 (n=4) and 2/3 (n=6)", 30, even_minima},
      {"no eavesdropper: zero mismatches, log2(9) bits per round", 10, clean_channel},
      {"Monte Carlo: intercept 7/9 +-0.007, substitute 1/3 +-0.008 with exact inference", 30,
       strategy_monte_carlo},
      {"intercept and complementary agree on pinwheel sets; skewed set exceeds 7/9", 60, strategy_symmetry},
      {"simulate transcripts are byte-identical across thread counts", 20, determinism},
      {"validate --dim 2 exits with the unsupported-dimension status", 10, impossibility_gate},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.budget_s) {
      o.ok = false;
      o.detail += " (over the " + num(c.budget_s) + " s budget)";
    }
    std::printf("%s [%zu] %s: %s (%.2f s)\n", o.ok ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs);
    failures += o.ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
