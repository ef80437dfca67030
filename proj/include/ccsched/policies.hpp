#pragma once

// Per-slot user selection (baseline, threshold, gradient selection with full
// CSIT, superposition) and the Monte Carlo drivers that iterate them.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccsched/model.hpp"

namespace ccsched {

struct SlotDecision {
  std::vector<int> selected_group;  // ascending, zero based
  Eigen::VectorXd per_user_rate;
};

/// Running average of the instantaneous rates: u(t+1) = (t u(t) + r(t)) / (t+1).
struct RateLedger {
  Eigen::VectorXd u;
  std::int64_t t = 0;

  RateLedger(int K, double u0) : u(Eigen::VectorXd::Constant(K, u0)) {}
  void update(const Eigen::Ref<const Eigen::VectorXd>& rate) {
    const double td = static_cast<double>(t);
    u = (td * u + rate) / (td + 1.0);
    ++t;
  }
};

struct PolicyKind {
  enum class Tag { baseline, threshold, full_csit, superposition };
  Tag tag = Tag::baseline;
  double c = 0.0;  // threshold only

  static PolicyKind baseline() { return {Tag::baseline, 0.0}; }
  static PolicyKind threshold(double c);
  static PolicyKind full_csit() { return {Tag::full_csit, 0.0}; }
  static PolicyKind superposition() { return {Tag::superposition, 0.0}; }

  std::string name() const;
};

SlotDecision schedule_baseline(const ChannelRealization& h, const CacheParams& params);

/// Serves {i : h_i >= c}; an empty selection is an idle slot.
SlotDecision schedule_threshold(const ChannelRealization& h, double c, const CacheParams& params);

/// Argmax over groups J of log(1 + min_J h) / T(m,|J|) * sum_{i in J} u_i^-alpha.
/// For each candidate worst user k (in decreasing-gain order) and size s the
/// best group is k plus the s-1 heaviest users at least as strong as k, so the
/// search is O(K^2). Ties prefer the smaller group, then the earlier k.
SlotDecision schedule_full_csit(const ChannelRealization& h, const Eigen::Ref<const Eigen::VectorXd>& u,
                                double alpha, const CacheParams& params);

/// Weighted-sum-rate superposition over all 2^K - 1 multicast messages with
/// subset weights sum_{i in J} u_i^-alpha / T(m,|J|).
SlotDecision schedule_superposition(const ChannelRealization& h,
                                    const Eigen::Ref<const Eigen::VectorXd>& u, double alpha,
                                    const CacheParams& params);

/// Long-run per-user rates with batch-means error estimates.
struct RunStats {
  Eigen::VectorXd rate;
  Eigen::VectorXd rate_stderr;
  Eigen::MatrixXd batch_means;  // K x batches
  std::int64_t slots = 0;
};

struct UtilityEstimate {
  double value;
  double std_error;
};

/// Utility of `stats.rate` and its delta-method standard error computed from
/// the linearized utility of each batch mean.
UtilityEstimate estimate_utility(const RunStats& stats, double alpha);

struct GradientRun {
  RateLedger ledger;
  RunStats stats;
  std::vector<double> utility_trace;  // (1/K) sum g_alpha(u_i(t)), t = 1..slots
  std::vector<int> group_sizes;       // users served in each slot
};

inline constexpr double kDefaultInitialRate = 0.1;
inline constexpr int kBatches = 64;

/// Gradient scheduling: each slot the scheduler sees weights from the current
/// averages, with u0 counted as one prior observation
/// ((t u_i(t) + u0) / (t + 1)) so unserved users keep finite weights. The
/// ledger itself follows the exact averaging recursion.
GradientRun run_gradient(const PolicyKind& kind, std::int64_t slots, const ChannelStats& stats,
                         const CacheParams& params, double alpha, Rng& rng,
                         double u0 = kDefaultInitialRate);

/// Monte Carlo average of a fixed (baseline or threshold) policy. Slots are
/// split into kBatches chunks; chunk j draws from Rng(seed, stream * 2^32 + j)
/// so the result does not depend on `workers`.
RunStats run_fixed(const PolicyKind& kind, std::int64_t slots, const ChannelStats& stats,
                   const CacheParams& params, const Rng& rng, int workers = 1);

}  // namespace ccsched
