// Command-line front end: scenario runs, sweeps, closed forms and the codec demo.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccsched/analytics.hpp"
#include "ccsched/codec.hpp"
#include "ccsched/errors.hpp"
#include "ccsched/model.hpp"
#include "ccsched/report.hpp"
#include "ccsched/scenario.hpp"

namespace {

using namespace ccsched;

enum Exit { kOk = 0, kValidation = 1, kNumerical = 2, kDecode = 3 };

struct ScenarioFlags {
  std::string config_path;
  std::string scheme;
  std::optional<int> K;
  std::optional<double> P_dB, m, alpha;
  std::optional<std::int64_t> slots;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string svg;
  int workers = 1;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON scenario file");
  cmd->add_option("--scheme", f.scheme, "baseline | threshold | full_csit | superposition");
  cmd->add_option("--K", f.K, "number of users");
  cmd->add_option("--P-dB", f.P_dB, "transmit SNR in dB");
  cmd->add_option("--m", f.m, "normalized cache size");
  cmd->add_option("--alpha", f.alpha, "fairness parameter");
  cmd->add_option("--slots", f.slots, "simulated slots");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--out", f.out, "CSV output path (default: stdout)");
  cmd->add_option("--svg", f.svg, "also write an SVG plot of the summary rows");
  cmd->add_option("--workers", f.workers, "worker threads for fixed policies")->check(CLI::PositiveNumber);
}

ScenarioConfig resolve(const ScenarioFlags& f) {
  ScenarioConfig c = f.config_path.empty() ? ScenarioConfig{} : load_config(f.config_path);
  if (!f.scheme.empty()) c.scheme = parse_scheme(f.scheme);
  if (f.K) c.K = *f.K;
  if (f.P_dB) c.P_dB = *f.P_dB;
  if (f.m) c.m = *f.m;
  if (f.alpha) c.alpha = *f.alpha;
  if (f.slots) c.slots = *f.slots;
  if (f.seed) c.seed = *f.seed;
  c.validate();
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output", "cannot write '" + path + "'");
  out << text;
}

void emit(const ResultTable& table, const ScenarioFlags& f, const std::string& x) {
  const std::string csv = to_csv(table);
  if (f.out.empty()) {
    std::cout << csv;
  } else {
    write_text(f.out, csv);
  }
  if (!f.svg.empty()) write_text(f.svg, emit_plot(summary_rows(table), x, "utility", "scheme"));
}

int codec_demo(int K, double m, std::size_t F, std::uint64_t seed) {
  if (K < 1 || K > codec::kMaxUsers) throw ConfigError("K", "codec demo needs 1 <= K <= 20");
  if (F < 1) throw ConfigError("F", "must be >= 1");
  CacheParams(m, K);
  Rng rng(seed, 0);
  const codec::Library lib = codec::Library::random(K, F, rng);
  const codec::CacheState cache = codec::place(lib, K, m, rng);
  std::vector<int> demands(static_cast<std::size_t>(K));
  std::iota(demands.begin(), demands.end(), 0);
  const codec::CodewordSet words = codec::deliver(lib, cache, demands);

  std::cout << "subset,length\n";
  for (const auto& [subset, bits] : words.codewords) {
    std::string name = "{";
    for (int k = 0; k < K; ++k) {
      if (subset & (codec::UserSet{1} << k)) name += (name.size() > 1 ? " " : "") + std::to_string(k + 1);
    }
    std::cout << '"' << name << "}\"," << bits.size() << '\n';
  }
  const double load = codec::empirical_load(words, F);
  const double expected = delivery_time(m, K);
  std::cout << "empirical_load " << format_number(load) << '\n'
            << "T(m,K) " << format_number(expected) << '\n'
            << "relative_error " << format_number(std::abs(load - expected) / expected) << '\n';
  for (int k = 0; k < K; ++k) {
    const codec::BitArray got = codec::decode(k, cache, words, demands);
    if (got != lib.files[demands[k]]) {
      std::cout << "decode FAIL (user " << k + 1 << ")\n";
      return kDecode;
    }
  }
  std::cout << "decode PASS\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduling and coded-caching simulator for fading broadcast channels"};
  app.require_subcommand(1);

  ScenarioFlags run_flags;
  auto* run = app.add_subcommand("run", "simulate one scenario and write a CSV");
  add_scenario_flags(run, run_flags);

  ScenarioFlags sweep_flags;
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::vector<std::string> sweep_schemes;
  auto* sw = app.add_subcommand("sweep", "run a scenario over a list of parameter values");
  add_scenario_flags(sw, sweep_flags);
  sw->add_option("--param", sweep_param, "K | P_dB | alpha | m");
  sw->add_option("--values", sweep_values, "parameter values");
  sw->add_option("--schemes", sweep_schemes, "schemes to run for every value");

  std::vector<double> th_gamma;
  double th_alpha = 1.0;
  ScenarioFlags th_flags;
  auto* th = app.add_subcommand("threshold", "print the optimal threshold c* and the method used");
  th->add_option("--gamma", th_gamma, "mean SNRs (linear); overrides --config");
  th->add_option("--alpha", th_alpha, "fairness parameter");
  th->add_option("--config", th_flags.config_path, "take gamma and alpha from a scenario file");

  double tmk_m = 0.5;
  std::string tmk_k = "inf";
  auto* tmk = app.add_subcommand("tmk", "print the delivery time T(m,k)");
  tmk->add_option("--m", tmk_m, "normalized cache size")->required();
  tmk->add_option("--k", tmk_k, "number of users, or inf");

  int demo_K = 3;
  double demo_m = 0.5;
  std::size_t demo_F = 200000;
  std::uint64_t demo_seed = 1;
  auto* demo = app.add_subcommand("codec-demo", "place, deliver and decode one coded-caching round");
  demo->add_option("--K", demo_K, "number of users (<= 20)");
  demo->add_option("--m", demo_m, "normalized cache size");
  demo->add_option("--F", demo_F, "file size in bits");
  demo->add_option("--seed", demo_seed, "random seed");

  std::string plot_in, plot_svg, plot_x = "K", plot_y = "utility", plot_group = "scheme";
  bool plot_all = false;
  auto* plot = app.add_subcommand("plot", "render a CSV result table as SVG");
  plot->add_option("--in", plot_in, "input CSV")->required();
  plot->add_option("--svg", plot_svg, "output SVG (default: stdout)");
  plot->add_option("--x", plot_x, "x field");
  plot->add_option("--y", plot_y, "y field");
  plot->add_option("--group-by", plot_group, "field that separates the curves");
  plot->add_flag("--all-rows", plot_all, "plot per-user rows as well as summary rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run) {
      const ScenarioConfig c = resolve(run_flags);
      emit(run_scenario(c, run_flags.workers), run_flags, "K");
    } else if (*sw) {
      const ScenarioConfig c = resolve(sweep_flags);
      const std::string param = sweep_param.empty() ? c.sweep_param : sweep_param;
      const std::vector<double> values = sweep_values.empty() ? c.sweep_values : sweep_values;
      std::vector<Scheme> schemes = c.schemes;
      if (!sweep_schemes.empty()) {
        schemes.clear();
        for (const auto& s : sweep_schemes) schemes.push_back(parse_scheme(s));
      }
      if (param.empty()) throw ConfigError("sweep_param", "missing (use --param or the config key)");
      emit(sweep(c, param, values, schemes, sweep_flags.workers), sweep_flags, param);
    } else if (*th) {
      Eigen::VectorXd gamma;
      double alpha = th_alpha;
      if (!th_gamma.empty()) {
        gamma = Eigen::Map<const Eigen::VectorXd>(th_gamma.data(), static_cast<Eigen::Index>(th_gamma.size()));
      } else if (!th_flags.config_path.empty()) {
        const ScenarioConfig c = load_config(th_flags.config_path);
        gamma = c.resolved_gamma();
        if (th->count("--alpha") == 0) alpha = c.alpha;
      } else {
        throw ConfigError("gamma", "give --gamma or --config");
      }
      const ThresholdSolution sol = optimal_threshold(gamma, alpha);
      std::cout << "c_star " << format_number(sol.c_star) << '\n'
                << "method " << to_string(sol.method) << '\n'
                << "objective " << format_number(sol.objective_value) << '\n';
    } else if (*tmk) {
      const double T = tmk_k == "inf" ? delivery_time_limit(tmk_m) : [&] {
        std::size_t pos = 0;
        int k = 0;
        try {
          k = std::stoi(tmk_k, &pos);
        } catch (const std::exception&) {
          pos = 0;
        }
        if (pos == 0 || pos != tmk_k.size()) throw ConfigError("k", "expected an integer or inf");
        return delivery_time(tmk_m, k);
      }();
      std::cout << format_number(T) << '\n';
    } else if (*demo) {
      return codec_demo(demo_K, demo_m, demo_F, demo_seed);
    } else if (*plot) {
      std::ifstream in(plot_in, std::ios::binary);
      if (!in) throw ConfigError("in", "cannot open '" + plot_in + "'");
      const ResultTable table = parse_csv(in);
      const std::string svg = emit_plot(plot_all ? table.rows : summary_rows(table), plot_x, plot_y, plot_group);
      if (plot_svg.empty()) {
        std::cout << svg;
      } else {
        write_text(plot_svg, svg);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const SolverError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const DecodeError& e) {
    std::cerr << "decode failure: " << e.what() << '\n';
    return kDecode;
  }
  return kOk;
}
