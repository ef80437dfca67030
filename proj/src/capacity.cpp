#include "ccsched/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccsched/errors.hpp"

namespace ccsched::capacity {

SortedChannel sort_channel(const ChannelRealization& h) {
  SortedChannel out;
  out.order.resize(static_cast<std::size_t>(h.size()));
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](int a, int b) { return h.h[a] > h.h[b]; });
  out.h_sorted.resize(h.size());
  for (int k = 0; k < h.size(); ++k) out.h_sorted[k] = h.h[out.order[k]];
  return out;
}

ReducedWeights reduce_weights(const Eigen::Ref<const Eigen::VectorXd>& tau, double m) {
  const int K = static_cast<int>(tau.size());
  if (K == 0) throw DomainError("reduce_weights: empty weight vector");
  std::vector<double> T(static_cast<std::size_t>(K) + 1);
  for (int s = 1; s <= K; ++s) T[s] = delivery_time(m, s);

  ReducedWeights out;
  out.theta_tilde.resize(K);
  out.argmax_subset.resize(K);
  // Earlier positions ranked by (tau desc, position asc).
  std::vector<int> ranked;
  ranked.reserve(K);
  for (int k = 0; k < K; ++k) {
    double prefix = tau[k];
    double best = prefix / T[1];
    int best_s = 1;
    for (int s = 2; s <= k + 1; ++s) {
      prefix += tau[ranked[s - 2]];
      const double value = prefix / T[s];
      if (value > best) {
        best = value;
        best_s = s;
      }
    }
    out.theta_tilde[k] = best;
    std::vector<int> subset(ranked.begin(), ranked.begin() + (best_s - 1));
    subset.push_back(k);
    std::sort(subset.begin(), subset.end());
    out.argmax_subset[k] = std::move(subset);

    const auto pos = std::find_if(ranked.begin(), ranked.end(), [&](int j) {
      return tau[j] < tau[k];
    });
    ranked.insert(pos, k);
  }
  return out;
}

Eigen::VectorXd PowerAllocation::cumulative() const {
  Eigen::VectorXd B(beta.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < beta.size(); ++k) B[k] = acc += beta[k];
  return B;
}

PowerAllocation allocate_power(const SortedChannel& sorted, const ReducedWeights& weights) {
  const int K = sorted.size();
  if (weights.size() != K) throw DomainError("allocate_power: size mismatch");
  const Eigen::VectorXd& h = sorted.h_sorted;
  const Eigen::VectorXd& theta = weights.theta_tilde;
  PowerAllocation alloc{Eigen::VectorXd::Zero(K)};

  int current = -1;
  double top = 0.0;
  for (int k = 0; k < K; ++k) {
    const double slope = theta[k] * h[k];
    if (slope > 0.0 && slope >= top) {
      top = slope;
      current = k;
    }
  }
  if (current < 0) return alloc;

  double z = 0.0;
  while (true) {
    double next_z = 1.0;
    int next = -1;
    const double ta = theta[current];
    const double ha = h[current];
    for (int b = current + 1; b < K; ++b) {
      const double tb = theta[b];
      const double hb = h[b];
      if (!(tb > ta) || !(hb > 0.0)) continue;
      double cross = (tb * hb - ta * ha) / (ha * hb * (ta - tb));
      if (hb >= ha) cross = z;  // equal gains: the heavier layer wins outright
      cross = std::max(cross, z);
      if (cross < next_z || (cross == next_z && next >= 0 && b > next)) {
        next_z = cross;
        next = b;
      }
    }
    alloc.beta[current] += next_z - z;
    if (next < 0 || next_z >= 1.0) break;
    z = next_z;
    current = next;
  }
  return alloc;
}

double weighted_sum_rate(const SortedChannel& sorted, const Eigen::Ref<const Eigen::VectorXd>& theta,
                         const PowerAllocation& alloc) {
  const LayerRates rates = layer_rates(sorted, alloc);
  return theta.dot(rates.C);
}

LayerRates layer_rates(const SortedChannel& sorted, const PowerAllocation& alloc) {
  const int K = sorted.size();
  if (alloc.beta.size() != K) throw DomainError("layer_rates: size mismatch");
  LayerRates out{Eigen::VectorXd::Zero(K)};
  double below = 0.0;
  for (int k = 0; k < K; ++k) {
    const double above = below + alloc.beta[k];
    if (alloc.beta[k] > 0.0) {
      const double hk = sorted.h_sorted[k];
      out.C[k] = std::log1p(hk * above) - std::log1p(hk * below);
    }
    below = above;
  }
  return out;
}

Eigen::VectorXd per_user_rates(const LayerRates& rates, const ReducedWeights& weights, double m,
                               std::span<const int> order) {
  const int K = weights.size();
  if (rates.C.size() != K || static_cast<int>(order.size()) != K)
    throw DomainError("per_user_rates: size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(K);
  for (int k = 0; k < K; ++k) {
    if (rates.C[k] == 0.0) continue;
    const auto& subset = weights.argmax_subset[k];
    const double share = rates.C[k] / delivery_time(m, static_cast<int>(subset.size()));
    for (int i : subset) out[order[i]] += share;
  }
  return out;
}

}  // namespace ccsched::capacity
