#pragma once

// Closed forms and the large-K threshold design.

#include <string>

#include <Eigen/Dense>

#include "ccsched/numerics.hpp"

namespace ccsched {

/// Long-run sum delivery rate of the baseline scheme for K users of equal
/// mean SNR gamma: (K / T(m,K)) e^{K/gamma} E1(K/gamma).
double baseline_rate_closed_form(int K, double gamma, double m);

/// Large-K limit of baseline_rate_closed_form: gamma m / (1 - m).
double baseline_rate_asymptote(double gamma, double m);

/// (1/K) sum_i g_alpha(log(1+c) e^{-c/gamma_i}), evaluated in log space so
/// that c = 0 and large c give the correct limits instead of NaN.
double threshold_objective(double c, const Eigen::Ref<const Eigen::VectorXd>& gammas, double alpha);

enum class ThresholdMethod { lambert_closed_form, monotone_root, grid_search };

std::string to_string(ThresholdMethod method);

struct ThresholdSolution {
  double c_star;
  ThresholdMethod method;
  double objective_value;
  double c_max;  // search cap, 20 * max gamma
};

inline constexpr int kThresholdValidationPoints = 2048;

/// Threshold c >= 0 maximizing threshold_objective.
///  alpha == 1: c = exp(W0(K / sum 1/gamma_i)) - 1.
///  alpha > 1:  root of (1+c) log(1+c) = sum e^{c(alpha-1)/gamma_i} / sum e^{c(alpha-1)/gamma_i}/gamma_i.
///  alpha < 1:  grid scan plus golden-section refinement on [0, c_max].
/// Every result is checked against a 2048-point grid; a violation throws
/// SolverError.
ThresholdSolution optimal_threshold(const Eigen::Ref<const Eigen::VectorXd>& gammas, double alpha);

/// Large-K per-user rate under the optimal threshold: log(1+c) e^{-c/gamma} / T(m, inf).
double threshold_rate_limit(double gamma_i, double c_star, double m);

/// Psi(c) = log(1+c) (1/K) sum_i w_i e^{-c/gamma_i}, the mean of the per-slot
/// threshold objective for caller-supplied user weights w_i.
double deterministic_equivalent(double c, const Eigen::Ref<const Eigen::VectorXd>& gammas,
                                const Eigen::Ref<const Eigen::VectorXd>& weights);

}  // namespace ccsched
