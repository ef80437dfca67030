#include "ccsched/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ccsched/analytics.hpp"
#include "ccsched/errors.hpp"

namespace ccsched {

namespace {

using nlohmann::json;

constexpr std::uint64_t kGradientStream = std::uint64_t{1} << 40;

double number(const json& j, const char* field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const char* field) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
  }
  throw ConfigError(field, "expected an integer");
}

std::vector<double> number_list(const json& j, const char* field) {
  if (!j.is_array()) throw ConfigError(field, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, field));
  return out;
}

std::string join(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_number(v[i]);
  }
  return out + "]";
}

void set_param(ScenarioConfig& config, const std::string& param, double value) {
  if (param == "K") {
    if (value != std::floor(value) || !(value >= 1.0) || value > 1e9)
      throw ConfigError("sweep_values", "K values must be positive integers");
    config.K = static_cast<int>(value);
  } else if (param == "P_dB") {
    config.P_dB = value;
  } else if (param == "alpha") {
    config.alpha = value;
  } else if (param == "m") {
    config.m = value;
  } else {
    throw ConfigError("sweep_param", "must be one of K, P_dB, alpha, m (got '" + param + "')");
  }
}

}  // namespace

Scheme parse_scheme(const std::string& name) {
  if (name == "baseline") return Scheme::baseline;
  if (name == "threshold") return Scheme::threshold;
  if (name == "full_csit" || name == "gradient_full_csit") return Scheme::full_csit;
  if (name == "superposition" || name == "gradient_superposition") return Scheme::superposition;
  throw ConfigError("scheme", "unknown scheme '" + name + "'");
}

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::baseline: return "baseline";
    case Scheme::threshold: return "threshold";
    case Scheme::full_csit: return "full_csit";
    case Scheme::superposition: return "superposition";
  }
  return "unknown";
}

bool is_gradient(Scheme scheme) { return scheme == Scheme::full_csit || scheme == Scheme::superposition; }

std::int64_t ScenarioConfig::resolved_slots() const {
  if (slots > 0) return slots;
  return is_gradient(scheme) ? kDefaultGradientSlots : kDefaultFixedSlots;
}

Eigen::VectorXd ScenarioConfig::resolved_gamma() const {
  if (gamma) return Eigen::Map<const Eigen::VectorXd>(gamma->data(), static_cast<Eigen::Index>(gamma->size()));
  const double P = std::pow(10.0, P_dB / 10.0);
  const auto strong = static_cast<Eigen::Index>(std::lround(two_class.strong_fraction * K));
  Eigen::VectorXd g(K);
  for (Eigen::Index i = 0; i < K; ++i) g[i] = i < strong ? P : two_class.weak_ratio * P;
  return g;
}

void ScenarioConfig::validate() const {
  if (K < 1) throw ConfigError("K", "must be >= 1");
  if (!std::isfinite(P_dB)) throw ConfigError("P_dB", "must be finite");
  if (!(m > 0.0 && m < 1.0)) throw ConfigError("m", "must lie in (0, 1)");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha", "must be finite and >= 0");
  if (slots < 0) throw ConfigError("slots", "must be >= 1 (or 0 for the default)");
  if (!(two_class.strong_fraction >= 0.0 && two_class.strong_fraction <= 1.0))
    throw ConfigError("strong_fraction", "must lie in [0, 1]");
  if (!(two_class.weak_ratio > 0.0) || !std::isfinite(two_class.weak_ratio))
    throw ConfigError("weak_ratio", "must be finite and > 0");
  if (gamma) {
    if (static_cast<int>(gamma->size()) != K)
      throw ConfigError("gamma", "needs exactly K = " + std::to_string(K) + " entries");
    for (double g : *gamma) {
      if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("gamma", "entries must be finite and > 0");
    }
  }
  if (threshold && !(*threshold >= 0.0 && std::isfinite(*threshold)))
    throw ConfigError("threshold", "must be finite and >= 0");
  if (!(u0 > 0.0) || !std::isfinite(u0)) throw ConfigError("u0", "must be finite and > 0");
}

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config", "top level must be an object");

  ScenarioConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "scheme") {
      if (!v.is_string()) throw ConfigError("scheme", "expected a string");
      c.scheme = parse_scheme(v.get<std::string>());
    } else if (key == "K") {
      const std::int64_t K = integer(v, "K");
      if (K < 1 || K > 1000000) throw ConfigError("K", "must lie in [1, 1e6]");
      c.K = static_cast<int>(K);
    } else if (key == "P_dB") {
      c.P_dB = number(v, "P_dB");
    } else if (key == "m") {
      c.m = number(v, "m");
    } else if (key == "alpha") {
      c.alpha = number(v, "alpha");
    } else if (key == "slots") {
      c.slots = integer(v, "slots");
      if (c.slots < 1) throw ConfigError("slots", "must be >= 1");
    } else if (key == "seed") {
      const std::int64_t s = integer(v, "seed");
      if (s < 0) throw ConfigError("seed", "must be >= 0");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "gamma_profile") {
      if (!v.is_string() || (v != "two_class" && v != "explicit"))
        throw ConfigError("gamma_profile", "must be \"two_class\" or \"explicit\"");
    } else if (key == "strong_fraction") {
      c.two_class.strong_fraction = number(v, "strong_fraction");
    } else if (key == "weak_ratio") {
      c.two_class.weak_ratio = number(v, "weak_ratio");
    } else if (key == "gamma") {
      c.gamma = number_list(v, "gamma");
    } else if (key == "threshold") {
      c.threshold = number(v, "threshold");
    } else if (key == "u0") {
      c.u0 = number(v, "u0");
    } else if (key == "sweep_param") {
      if (!v.is_string()) throw ConfigError("sweep_param", "expected a string");
      c.sweep_param = v.get<std::string>();
    } else if (key == "sweep_values") {
      c.sweep_values = number_list(v, "sweep_values");
    } else if (key == "schemes") {
      if (!v.is_array()) throw ConfigError("schemes", "expected a list of scheme names");
      for (const auto& s : v) {
        if (!s.is_string()) throw ConfigError("schemes", "expected a list of scheme names");
        c.schemes.push_back(parse_scheme(s.get<std::string>()));
      }
    } else {
      throw ConfigError(key, "unknown configuration key");
    }
  }
  if (j.contains("gamma_profile") && j["gamma_profile"] == "explicit" && !c.gamma)
    throw ConfigError("gamma", "explicit profile requires a gamma list");
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const ScenarioConfig& c) {
  // Built by hand so the key order and number format are fixed.
  std::ostringstream out;
  out << "{\"scheme\":\"" << scheme_name(c.scheme) << "\",\"K\":" << c.K
      << ",\"P_dB\":" << format_number(c.P_dB) << ",\"m\":" << format_number(c.m)
      << ",\"alpha\":" << format_number(c.alpha) << ",\"slots\":" << c.resolved_slots()
      << ",\"seed\":" << c.seed;
  if (c.gamma) {
    out << ",\"gamma_profile\":\"explicit\"";
  } else {
    out << ",\"gamma_profile\":\"two_class\",\"strong_fraction\":"
        << format_number(c.two_class.strong_fraction)
        << ",\"weak_ratio\":" << format_number(c.two_class.weak_ratio);
  }
  out << ",\"gamma\":" << join(c.resolved_gamma());
  if (c.threshold) out << ",\"threshold\":" << format_number(*c.threshold);
  out << ",\"u0\":" << format_number(c.u0) << '}';
  return out.str();
}

ResultTable run_scenario(const ScenarioConfig& config, int workers) {
  config.validate();
  const Eigen::VectorXd gamma = config.resolved_gamma();
  const ChannelStats stats(gamma);
  const CacheParams params(config.m, config.K);
  const std::int64_t slots = config.resolved_slots();

  ResultTable table;
  std::string run_note = "run scheme=" + scheme_name(config.scheme);

  RunStats rs;
  switch (config.scheme) {
    case Scheme::baseline:
      rs = run_fixed(PolicyKind::baseline(), slots, stats, params, Rng(config.seed, 0), workers);
      break;
    case Scheme::threshold: {
      double c = 0.0;
      if (config.threshold) {
        c = *config.threshold;
        run_note += " c=" + format_number(c) + " method=fixed";
      } else {
        const ThresholdSolution sol = optimal_threshold(gamma, config.alpha);
        c = sol.c_star;
        run_note += " c_star=" + format_number(c) + " method=" + to_string(sol.method);
      }
      rs = run_fixed(PolicyKind::threshold(c), slots, stats, params, Rng(config.seed, 0), workers);
      break;
    }
    case Scheme::full_csit:
    case Scheme::superposition: {
      Rng rng(config.seed, kGradientStream);
      const PolicyKind kind =
          config.scheme == Scheme::full_csit ? PolicyKind::full_csit() : PolicyKind::superposition();
      rs = run_gradient(kind, slots, stats, params, config.alpha, rng, config.u0).stats;
      break;
    }
  }

  const UtilityEstimate util = estimate_utility(rs, config.alpha);
  const Eigen::VectorXd mean_batches = rs.batch_means.colwise().mean().transpose();
  const int B = static_cast<int>(mean_batches.size());
  double mean_se = 0.0;
  if (B > 1) {
    const double mu = mean_batches.mean();
    mean_se = std::sqrt((mean_batches.array() - mu).square().sum() / (B - 1) / B);
  }

  table.comments.push_back("config " + config_to_json(config));
  table.comments.push_back(run_note + " K=" + std::to_string(config.K) + " P_dB=" +
                           format_number(config.P_dB) + " m=" + format_number(config.m) +
                           " alpha=" + format_number(config.alpha) + " slots=" +
                           std::to_string(slots) + " gamma=" + join(gamma) +
                           " utility=" + format_number(util.value) +
                           " utility_stderr=" + format_number(util.std_error));

  const std::string name = scheme_name(config.scheme);
  for (int i = 0; i < config.K; ++i) {
    table.rows.push_back({name, config.K, config.P_dB, config.m, config.alpha, i + 1, gamma[i],
                          rs.rate[i], rs.rate_stderr[i], util.value});
  }
  table.rows.push_back({name, config.K, config.P_dB, config.m, config.alpha, 0, gamma.mean(),
                        rs.rate.mean(), mean_se, util.value});
  return table;
}

ResultTable sweep(const ScenarioConfig& base, const std::string& param,
                  const std::vector<double>& values, const std::vector<Scheme>& schemes,
                  int workers) {
  if (values.empty()) throw ConfigError("sweep_values", "must be nonempty");
  const std::vector<Scheme> list = schemes.empty() ? std::vector<Scheme>{base.scheme} : schemes;
  ScenarioConfig probe = base;
  set_param(probe, param, values.front());  // rejects unknown parameters early

  ResultTable out;
  std::ostringstream head;
  head << "sweep param=" << param << " values=[";
  for (std::size_t i = 0; i < values.size(); ++i) head << (i ? "," : "") << format_number(values[i]);
  head << "] schemes=[";
  for (std::size_t i = 0; i < list.size(); ++i) head << (i ? "," : "") << scheme_name(list[i]);
  head << ']';
  out.comments.push_back(head.str());

  for (double v : values) {
    for (Scheme s : list) {
      ScenarioConfig c = base;
      set_param(c, param, v);
      c.scheme = s;
      if (param == "K" && c.gamma) throw ConfigError("gamma", "an explicit gamma list cannot be swept over K");
      ResultTable t = run_scenario(c, workers);
      out.comments.insert(out.comments.end(), t.comments.begin(), t.comments.end());
      out.rows.insert(out.rows.end(), t.rows.begin(), t.rows.end());
    }
  }
  return out;
}

std::vector<ResultRow> summary_rows(const ResultTable& table) {
  std::vector<ResultRow> out;
  for (const auto& r : table.rows) {
    if (r.user_id == 0) out.push_back(r);
  }
  return out;
}

}  // namespace ccsched
