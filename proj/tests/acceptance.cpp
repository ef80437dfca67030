// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ccsched/analytics.hpp"
#include "ccsched/capacity.hpp"
#include "ccsched/codec.hpp"
#include "ccsched/policies.hpp"
#include "ccsched/scenario.hpp"
#include "oracles.hpp"

using namespace ccsched;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string pct(double x) {
  std::ostringstream s;
  s.precision(3);
  s << 100 * x << "%";
  return s.str();
}

std::string num(double x, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXd two_class(int K, double strong, double weak) {
  Eigen::VectorXd g(K);
  for (int i = 0; i < K; ++i) g[i] = i < K / 2 ? strong : weak;
  return g;
}

UtilityEstimate scenario_utility(Scheme s, int K, double P_dB, double m, double alpha, std::int64_t slots = 0) {
  ScenarioConfig c;
  c.scheme = s;
  c.K = K;
  c.P_dB = P_dB;
  c.m = m;
  c.alpha = alpha;
  c.slots = slots;
  const Eigen::VectorXd gamma = c.resolved_gamma();
  const ChannelStats stats(gamma);
  const CacheParams params(m, K);
  const std::int64_t n = c.resolved_slots();
  RunStats rs;
  if (s == Scheme::baseline) {
    rs = run_fixed(PolicyKind::baseline(), n, stats, params, Rng(c.seed, 0));
  } else if (s == Scheme::threshold) {
    rs = run_fixed(PolicyKind::threshold(optimal_threshold(gamma, alpha).c_star), n, stats, params, Rng(c.seed, 0));
  } else {
    Rng rng(c.seed, 1);
    rs = run_gradient(s == Scheme::full_csit ? PolicyKind::full_csit() : PolicyKind::superposition(), n, stats,
                      params, alpha, rng)
             .stats;
  }
  return estimate_utility(rs, alpha);
}

Outcome criterion1() {
  struct Case {
    int K;
    double gamma, m;
  };
  double worst = 0, slowest = 0;
  for (const Case c : {Case{1, 1, 0.5}, Case{5, 10, 0.5}, Case{20, 10, 0.1}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const ChannelStats stats(Eigen::VectorXd::Constant(c.K, c.gamma));
    const RunStats rs = run_fixed(PolicyKind::baseline(), 100000, stats, CacheParams(c.m, c.K), Rng(2024, c.K));
    const double closed = baseline_rate_closed_form(c.K, c.gamma, c.m);
    worst = std::max(worst, std::abs(rs.rate.sum() / closed - 1));
    slowest = std::max(slowest, seconds_since(t0));
  }
  return {worst <= 0.01 && slowest < 10,
          "max rel. error " + pct(worst) + " (tol 1%), slowest case " + num(slowest, 3) + " s (limit 10 s)"};
}

Outcome criterion2() {
  const double r = baseline_rate_closed_form(500, 10, 0.5);
  const double err = std::abs(r / 10 - 1);
  return {err <= 0.02, "R_bl(500) = " + num(r) + ", rel. distance to 10 is " + pct(err) + " (tol 2%)"};
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U(0.5, 20);
  std::uniform_int_distribution<int> Kdist(2, 40);
  double worst = 0;
  bool methods_ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd g(Kdist(gen));
    for (auto& x : g) x = U(gen);
    for (double alpha : {1.0, 1.5, 2.0}) {
      const ThresholdSolution sol = optimal_threshold(g, alpha);
      methods_ok &= sol.method == (alpha == 1.0 ? ThresholdMethod::lambert_closed_form : ThresholdMethod::monotone_root);
      const double ref =
          oracle::grid_argmax([&](double c) { return threshold_objective(c, g, alpha); }, 0.0, sol.c_max, 4096);
      worst = std::max(worst, std::abs(sol.c_star - ref));
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-3 && elapsed < 5 && methods_ok,
          "max |dc*| " + num(worst, 3) + " (tol 1e-3) over 150 solves, " + num(elapsed, 3) + " s (limit 5 s)" +
              (methods_ok ? "" : ", unexpected solver path")};
}

Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const int K = 200;
  const Eigen::VectorXd g = two_class(K, 10, 2);
  const ThresholdSolution sol = optimal_threshold(g, 1.0);
  const RunStats rs = run_fixed(PolicyKind::threshold(sol.c_star), 20000, ChannelStats(g), CacheParams(0.5, K), Rng(4, 0));
  const double strong = rs.rate.head(K / 2).mean(), weak = rs.rate.tail(K / 2).mean();
  const double es = std::abs(strong / threshold_rate_limit(10, sol.c_star, 0.5) - 1);
  const double ew = std::abs(weak / threshold_rate_limit(2, sol.c_star, 0.5) - 1);
  const double elapsed = seconds_since(t0);
  return {es <= 0.03 && ew <= 0.03 && elapsed < 60,
          "class-mean rel. error strong " + pct(es) + ", weak " + pct(ew) + " (tol 3%), " + num(elapsed, 3) +
              " s (limit 60 s)"};
}

Outcome criterion5() {
  auto gap = [](int K) {
    const UtilityEstimate full = scenario_utility(Scheme::full_csit, K, 10, 0.1, 1.0);
    const UtilityEstimate th = scenario_utility(Scheme::threshold, K, 10, 0.1, 1.0);
    return std::pair{full.value - th.value, std::hypot(full.std_error, th.std_error)};
  };
  const auto [g10, se10] = gap(10);
  const auto [g100, se100] = gap(100);
  const bool ok = g100 <= 0.5 * g10 && se10 < 0.2 * g10 && se100 < 0.2 * g10;
  return {ok, "gap K=10 " + num(g10) + " (se " + num(se10, 2) + "), K=100 " + num(g100) + " (se " + num(se100, 2) +
                  "), ratio " + num(g100 / g10, 3) + " (limit 0.5)"};
}

Outcome criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> U(0, 1);
  int mismatches = 0;
  const int K = 10;
  for (int trial = 0; trial < 1000; ++trial) {
    const double alpha = trial % 3;
    const double m = 0.05 + 0.9 * U(gen);
    Eigen::VectorXd h(K), u(K);
    for (int i = 0; i < K; ++i) {
      h[i] = -std::log(1 - U(gen)) * (1 + 19 * U(gen));
      u[i] = 0.05 + 3 * U(gen);
    }
    const Eigen::VectorXd w = alpha == 0 ? Eigen::VectorXd::Ones(K) : Eigen::VectorXd(u.array().pow(-alpha));
    const SlotDecision d = schedule_full_csit(ChannelRealization{h}, u, alpha, CacheParams(m, K));
    std::uint32_t mask = 0;
    for (int i : d.selected_group) mask |= 1u << i;
    if (oracle::group_objective(h, w, mask, m) != oracle::best_group(h, w, m).value) ++mismatches;
  }
  const double elapsed = seconds_since(t0);
  return {mismatches == 0 && elapsed < 10,
          std::to_string(mismatches) + "/1000 instances differ from the exhaustive maximum, " + num(elapsed, 3) +
              " s (limit 10 s)"};
}

Outcome criterion7() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> U(0, 1);
  double worst_shortfall = 0, worst_overshoot = 0, worst_refined = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 1 + trial % 3;
    const double m = 0.05 + 0.9 * U(gen);
    Eigen::VectorXd h(K), tau(K);
    for (int i = 0; i < K; ++i) {
      h[i] = -std::log(1 - U(gen)) * 10;
      tau[i] = 3 * U(gen);
    }
    const auto sorted = capacity::sort_channel(ChannelRealization{h});
    const auto reduced = capacity::reduce_weights(tau, m);
    const auto alloc = capacity::allocate_power(sorted, reduced);
    const double f = capacity::weighted_sum_rate(sorted, reduced.theta_tilde, alloc);
    const double grid = oracle::wsr_grid_max(sorted.h_sorted, reduced.theta_tilde, 1e-3);
    const double refined = oracle::wsr_refined_max(sorted.h_sorted, reduced.theta_tilde, 1e-3);
    worst_shortfall = std::max(worst_shortfall, grid - f);
    worst_overshoot = std::max(worst_overshoot, f - grid);
    worst_refined = std::max(worst_refined, std::abs(f - refined));
  }
  int reduce_mismatch = 0;
  double worst_rel = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const int K = 1 + trial % 12;
    const double m = 0.05 + 0.9 * U(gen);
    Eigen::VectorXd tau(K);
    for (int i = 0; i < K; ++i) tau[i] = 3 * U(gen);
    const auto r = capacity::reduce_weights(tau, m);
    const Eigen::VectorXd ref = oracle::reduced_weights(tau, m);
    for (int k = 0; k < K; ++k) {
      // value of the chosen subset, summed the way the oracle sums
      double sum = tau[k];
      for (int i = 0; i < k; ++i) {
        if (std::find(r.argmax_subset[k].begin(), r.argmax_subset[k].end(), i) != r.argmax_subset[k].end()) sum += tau[i];
      }
      const double chosen = sum / oracle::delivery_time(m, static_cast<int>(r.argmax_subset[k].size()));
      if (chosen != ref[k]) ++reduce_mismatch;
      worst_rel = std::max(worst_rel, std::abs(r.theta_tilde[k] / ref[k] - 1));
    }
  }
  const bool ok = worst_shortfall <= 1e-3 && worst_refined <= 1e-3 && reduce_mismatch == 0 && worst_rel <= 1e-12;
  return {ok, "greedy below 1e-3 grid by at most " + num(std::max(worst_shortfall, 0.0), 3) + ", above it by at most " +
                  num(worst_overshoot, 3) + ", |greedy - refined grid| " + num(worst_refined, 3) +
                  " (tol 1e-3); reduce_weights: " +
                  std::to_string(reduce_mismatch) + " argmax mismatches, max rel. diff " + num(worst_rel, 3)};
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  bool decoded = true;
  for (int K : {2, 3}) {
    for (double m : {0.1, 0.5}) {
      Rng rng(8, static_cast<std::uint64_t>(K * 10 + m * 10));
      const auto lib = codec::Library::random(K, 200000, rng);
      const auto cache = codec::place(lib, K, m, rng);
      std::vector<int> d(K);
      for (int k = 0; k < K; ++k) d[k] = k;
      const auto words = codec::deliver(lib, cache, d);
      for (int k = 0; k < K; ++k) decoded &= codec::decode(k, cache, words, d) == lib.files[k];
      worst = std::max(worst, std::abs(codec::empirical_load(words, lib.F) / delivery_time(m, K) - 1));
    }
  }
  const double elapsed = seconds_since(t0);
  return {decoded && worst <= 0.02 && elapsed < 30,
          std::string(decoded ? "all demands decoded" : "decode mismatch") + ", max load rel. error " + pct(worst) +
              " (tol 2%), " + num(elapsed, 3) + " s (limit 30 s)"};
}

Outcome criterion9() {
  const auto sup = scenario_utility(Scheme::superposition, 20, 10, 0.1, 0.0, 100000);
  const auto full = scenario_utility(Scheme::full_csit, 20, 10, 0.1, 0.0, 100000);
  const auto th = scenario_utility(Scheme::threshold, 20, 10, 0.1, 0.0, 100000);
  const auto bl = scenario_utility(Scheme::baseline, 20, 10, 0.1, 0.0, 100000);
  auto geq = [](const UtilityEstimate& a, const UtilityEstimate& b) {
    return a.value >= b.value - 3 * std::hypot(a.std_error, b.std_error);
  };
  return {geq(sup, full) && geq(full, th) && geq(th, bl),
          "superposition " + num(sup.value) + ", full_csit " + num(full.value) + ", threshold " + num(th.value) +
              ", baseline " + num(bl.value)};
}

Outcome criterion10() {
  std::string detail;
  bool ok = true;
  for (double m : {0.1, 0.6}) {
    const auto th = scenario_utility(Scheme::threshold, 20, 30, m, 0.0);
    const auto bl = scenario_utility(Scheme::baseline, 20, 30, m, 0.0);
    const double rel = std::abs(th.value - bl.value) / std::abs(bl.value);
    ok &= rel <= 0.05;
    detail += (detail.empty() ? "" : "; ") + std::string("m=") + num(m, 2) + ": U_th " + num(th.value) + ", U_bl " +
              num(bl.value) + ", rel. gap " + pct(rel);
  }
  return {ok, detail + " (tol 5%)"};
}

int run_cli(const std::string& bin, const std::string& args, std::string& out) {
  const std::string cmd = bin + " " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return -1;
  char buf[4096];
  out.clear();
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int raw = pclose(pipe);
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome criterion11(const std::string& bin) {
  const auto dir = std::filesystem::temp_directory_path() / ("ccsched_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::vector<std::string> configs = {
      R"({"scheme":"baseline","K":20,"P_dB":10,"m":0.1,"alpha":0,"slots":50000,"seed":11})",
      R"({"scheme":"threshold","K":30,"P_dB":20,"m":0.5,"alpha":1,"slots":50000,"seed":12})",
      R"({"scheme":"gradient_full_csit","K":10,"P_dB":10,"m":0.1,"alpha":2,"slots":20000,"seed":13})",
      R"({"scheme":"gradient_superposition","K":8,"P_dB":10,"m":0.6,"alpha":1,"slots":5000,"seed":14})",
      R"({"scheme":"baseline","K":10,"P_dB":10,"m":0.1,"alpha":0,"slots":5000,"seed":15,"sweep_param":"K","sweep_values":[4,8],"schemes":["baseline","threshold","full_csit","superposition"]})",
  };
  int compared = 0, differing = 0, errors = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto path = dir / ("c" + std::to_string(i) + ".json");
    std::ofstream(path) << configs[i];
    const std::string cmd = (i + 1 == configs.size() ? "sweep" : "run") + std::string(" --config ") + path.string();
    std::string first, again, parallel;
    errors += run_cli(bin, cmd + " --workers 1", first) != 0;
    errors += run_cli(bin, cmd + " --workers 1", again) != 0;
    errors += run_cli(bin, cmd + " --workers 4", parallel) != 0;
    compared += 2;
    differing += (first != again) + (first != parallel);
    errors += first.empty();
  }
  std::filesystem::remove_all(dir);
  return {differing == 0 && errors == 0, std::to_string(compared - differing) + "/" + std::to_string(compared) +
                                             " repeated CLI outputs byte-identical (workers 1 vs 1 and 1 vs 4)" +
                                             (errors ? ", " + std::to_string(errors) + " invocation errors" : "")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string bin = argc > 1 ? argv[1] : "ccsched";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"baseline closed form vs Monte Carlo", criterion1},
      {"baseline large-K asymptote", criterion2},
      {"optimal threshold vs grid maximization", criterion3},
      {"threshold per-user rate limit at K=200", criterion4},
      {"full-CSIT vs threshold gap shrinks with K", criterion5},
      {"O(K^2) selection vs exhaustive search", criterion6},
      {"power allocation and weight reduction oracles", criterion7},
      {"codec round trip and load", criterion8},
      {"scheme ordering at K=20, 10 dB", criterion9},
      {"threshold and baseline coincide at 30 dB", criterion10},
      {"CLI determinism across worker counts", [&] { return criterion11(bin); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << "  ["
              << o.detail << "]  (" << num(seconds_since(t0), 3) << " s)" << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures;
}
