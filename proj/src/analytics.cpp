#include "ccsched/analytics.hpp"

#include <cmath>
#include <limits>

#include "ccsched/errors.hpp"
#include "ccsched/model.hpp"

namespace ccsched {

namespace {

void check_gammas(const Eigen::Ref<const Eigen::VectorXd>& gammas) {
  if (gammas.size() == 0) throw DomainError("empty gamma vector");
  if (!(gammas.array() > 0.0).all() || !gammas.allFinite())
    throw DomainError("gamma entries must be positive and finite");
}

}  // namespace

double baseline_rate_closed_form(int K, double gamma, double m) {
  if (K < 1) throw DomainError("baseline_rate_closed_form: K must be >= 1");
  if (!(gamma > 0.0)) throw DomainError("baseline_rate_closed_form: gamma must be > 0");
  const double x = static_cast<double>(K) / gamma;
  return static_cast<double>(K) / delivery_time(m, K) * exp_integral_e1_scaled(x);
}

double baseline_rate_asymptote(double gamma, double m) {
  if (!(gamma > 0.0)) throw DomainError("baseline_rate_asymptote: gamma must be > 0");
  if (!(m > 0.0 && m < 1.0)) throw DomainError("baseline_rate_asymptote: m must lie in (0,1)");
  return gamma * m / (1.0 - m);
}

double threshold_objective(double c, const Eigen::Ref<const Eigen::VectorXd>& gammas, double alpha) {
  if (!(c >= 0.0)) throw DomainError("threshold_objective: c must be >= 0");
  const double loglog = std::log(std::log1p(c));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < gammas.size(); ++i) {
    const double log_x = loglog - c / gammas[i];
    if (alpha == 1.0) {
      sum += log_x;
    } else {
      sum += (std::exp((1.0 - alpha) * log_x) - 1.0) / (1.0 - alpha);
    }
  }
  return sum / static_cast<double>(gammas.size());
}

std::string to_string(ThresholdMethod method) {
  switch (method) {
    case ThresholdMethod::lambert_closed_form: return "lambert_closed_form";
    case ThresholdMethod::monotone_root: return "monotone_root";
    case ThresholdMethod::grid_search: return "grid_search";
  }
  return "unknown";
}

ThresholdSolution optimal_threshold(const Eigen::Ref<const Eigen::VectorXd>& gammas, double alpha) {
  check_gammas(gammas);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("optimal_threshold: alpha must be >= 0");
  const double K = static_cast<double>(gammas.size());
  const double c_max = 20.0 * gammas.maxCoeff();
  auto objective = [&](double c) { return threshold_objective(c, gammas, alpha); };

  ThresholdSolution out{0.0, ThresholdMethod::grid_search, 0.0, c_max};
  if (alpha == 1.0) {
    const double a = K / gammas.cwiseInverse().sum();
    out.c_star = std::exp(lambert_w0(a)) - 1.0;
    out.method = ThresholdMethod::lambert_closed_form;
  } else if (alpha > 1.0) {
    const Eigen::ArrayXd inv = gammas.cwiseInverse().array();
    // Right-hand side with the exponents shifted by their maximum.
    auto rhs = [&](double c) {
      const Eigen::ArrayXd e = c * (alpha - 1.0) * inv;
      const Eigen::ArrayXd w = (e - e.maxCoeff()).exp();
      return w.sum() / (w * inv).sum();
    };
    auto residual = [&](double c) { return (1.0 + c) * std::log1p(c) - rhs(c); };
    Tolerance tol;
    tol.abs_tol = 1e-12;
    tol.max_iter = 500;
    out.c_star = solve_increasing_root(residual, 0.0, 0.0, c_max, tol);
    out.method = ThresholdMethod::monotone_root;
  } else {
    out.c_star = maximize_1d(objective, 0.0, c_max).argmax;
    out.method = ThresholdMethod::grid_search;
  }
  out.objective_value = objective(out.c_star);

  const double step = c_max / (kThresholdValidationPoints - 1);
  for (int i = 0; i < kThresholdValidationPoints; ++i) {
    const double c = i == kThresholdValidationPoints - 1 ? c_max : step * i;
    if (objective(c) > out.objective_value + 1e-6)
      throw SolverError("optimal_threshold: " + to_string(out.method) +
                        " result is beaten on the validation grid");
  }
  return out;
}

double threshold_rate_limit(double gamma_i, double c_star, double m) {
  if (!(gamma_i > 0.0)) throw DomainError("threshold_rate_limit: gamma must be > 0");
  if (!(c_star >= 0.0)) throw DomainError("threshold_rate_limit: c must be >= 0");
  return std::log1p(c_star) * std::exp(-c_star / gamma_i) / delivery_time_limit(m);
}

double deterministic_equivalent(double c, const Eigen::Ref<const Eigen::VectorXd>& gammas,
                                const Eigen::Ref<const Eigen::VectorXd>& weights) {
  check_gammas(gammas);
  if (weights.size() != gammas.size()) throw DomainError("deterministic_equivalent: size mismatch");
  if (!(weights.array() > 0.0).all()) throw DomainError("deterministic_equivalent: weights must be > 0");
  if (!(c >= 0.0)) throw DomainError("deterministic_equivalent: c must be >= 0");
  return std::log1p(c) * (weights.array() * (-c / gammas.array()).exp()).mean();
}

}  // namespace ccsched
