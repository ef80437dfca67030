#pragma once

// Degraded broadcast channel with one message per user subset: reduction of
// the subset weights to one weight per layer, weighted-sum-rate power
// allocation over superposition layers, and per-user rate accounting.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ccsched/model.hpp"

namespace ccsched::capacity {

/// Users ordered by decreasing gain. Equal gains keep their original order.
struct SortedChannel {
  std::vector<int> order;  // order[k] = original index of the k-th strongest user
  Eigen::VectorXd h_sorted;

  int size() const { return static_cast<int>(order.size()); }
};

SortedChannel sort_channel(const ChannelRealization& h);

/// theta_tilde[k] = max over subsets S with k in S, S within {0..k}, of
/// sum_{i in S} tau_i / T(m,|S|). argmax_subset[k] lists S in ascending
/// (sorted-position) order.
struct ReducedWeights {
  Eigen::VectorXd theta_tilde;
  std::vector<std::vector<int>> argmax_subset;

  int size() const { return static_cast<int>(theta_tilde.size()); }
};

/// `tau` is indexed by sorted position. Ties prefer the smaller subset, then
/// the lexicographically smallest one.
ReducedWeights reduce_weights(const Eigen::Ref<const Eigen::VectorXd>& tau, double m);

/// Layer powers beta_k (sorted positions) with sum <= 1.
struct PowerAllocation {
  Eigen::VectorXd beta;

  /// B_k = beta_0 + ... + beta_k.
  Eigen::VectorXd cumulative() const;
};

/// Maximizes sum_k theta_k log((1 + h_k B_k) / (1 + h_k B_{k-1})) over the
/// simplex. Each power level z in [0,1] is given to the layer with the
/// largest marginal theta_k h_k / (1 + h_k z); because weaker users decay
/// slower, the winning layer index only grows with z and the breakpoints are
/// pairwise crossings. Returns beta = 0 when every theta_k h_k is zero.
PowerAllocation allocate_power(const SortedChannel& sorted, const ReducedWeights& weights);

/// The objective maximized by allocate_power.
double weighted_sum_rate(const SortedChannel& sorted, const Eigen::Ref<const Eigen::VectorXd>& theta,
                         const PowerAllocation& alloc);

struct LayerRates {
  Eigen::VectorXd C;
};

LayerRates layer_rates(const SortedChannel& sorted, const PowerAllocation& alloc);

/// Layer k's rate goes to the multicast message of argmax_subset[k]; every
/// member gets C_k / T(m,|subset|). Result is indexed by original user.
Eigen::VectorXd per_user_rates(const LayerRates& rates, const ReducedWeights& weights, double m,
                               std::span<const int> order);

}  // namespace ccsched::capacity
