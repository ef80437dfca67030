#include "ccsched/policies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "ccsched/capacity.hpp"
#include "ccsched/errors.hpp"

namespace ccsched {

namespace {

SlotDecision group_decision(const ChannelRealization& h, std::vector<int> group,
                            const CacheParams& params) {
  SlotDecision out{std::move(group), Eigen::VectorXd::Zero(h.size())};
  if (out.selected_group.empty()) return out;
  const double rate = multicast_rate(h, out.selected_group) /
                      delivery_time(params.m, static_cast<int>(out.selected_group.size()));
  for (int i : out.selected_group) out.per_user_rate[i] = rate;
  return out;
}

void check_size(const ChannelRealization& h, const CacheParams& params) {
  if (h.size() != params.K) throw DomainError("scheduler: channel size differs from K");
}

Eigen::VectorXd user_weights(const Eigen::Ref<const Eigen::VectorXd>& u, double alpha) {
  if (alpha == 0.0) return Eigen::VectorXd::Ones(u.size());
  Eigen::VectorXd w(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) throw DomainError("scheduler: average rates must be > 0 when alpha > 0");
    w[i] = std::pow(u[i], -alpha);
  }
  return w;
}

// Batch accumulator shared by both drivers.
struct BatchAccumulator {
  Eigen::MatrixXd sums;
  std::vector<std::int64_t> counts;

  BatchAccumulator(int K, int batches) : sums(Eigen::MatrixXd::Zero(K, batches)), counts(batches, 0) {}

  RunStats finish() const {
    RunStats out;
    const int K = static_cast<int>(sums.rows());
    const int B = static_cast<int>(sums.cols());
    out.slots = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    out.batch_means.resize(K, B);
    Eigen::VectorXd total = Eigen::VectorXd::Zero(K);
    for (int b = 0; b < B; ++b) {
      total += sums.col(b);
      out.batch_means.col(b) = sums.col(b) / static_cast<double>(std::max<std::int64_t>(counts[b], 1));
    }
    out.rate = total / static_cast<double>(out.slots);
    out.rate_stderr = Eigen::VectorXd::Zero(K);
    if (B > 1) {
      for (int i = 0; i < K; ++i) {
        const double mean = out.batch_means.row(i).mean();
        const double ss = (out.batch_means.row(i).array() - mean).square().sum();
        out.rate_stderr[i] = std::sqrt(ss / (B - 1) / B);
      }
    }
    return out;
  }
};

int batch_count(std::int64_t slots) {
  return static_cast<int>(std::min<std::int64_t>(slots, kBatches));
}

std::int64_t batch_begin(std::int64_t slots, int batches, int b) {
  return slots * b / batches;
}

}  // namespace

PolicyKind PolicyKind::threshold(double c) {
  if (!(c >= 0.0)) throw DomainError("PolicyKind: threshold must be >= 0");
  return {Tag::threshold, c};
}

std::string PolicyKind::name() const {
  switch (tag) {
    case Tag::baseline: return "baseline";
    case Tag::threshold: return "threshold";
    case Tag::full_csit: return "full_csit";
    case Tag::superposition: return "superposition";
  }
  return "unknown";
}

SlotDecision schedule_baseline(const ChannelRealization& h, const CacheParams& params) {
  check_size(h, params);
  std::vector<int> all(static_cast<std::size_t>(params.K));
  std::iota(all.begin(), all.end(), 0);
  return group_decision(h, std::move(all), params);
}

SlotDecision schedule_threshold(const ChannelRealization& h, double c, const CacheParams& params) {
  check_size(h, params);
  if (!(c >= 0.0)) throw DomainError("schedule_threshold: c must be >= 0");
  std::vector<int> group;
  for (int i = 0; i < h.size(); ++i) {
    if (h.h[i] >= c) group.push_back(i);
  }
  return group_decision(h, std::move(group), params);
}

SlotDecision schedule_full_csit(const ChannelRealization& h, const Eigen::Ref<const Eigen::VectorXd>& u,
                                double alpha, const CacheParams& params) {
  check_size(h, params);
  if (u.size() != params.K) throw DomainError("schedule_full_csit: rate vector size differs from K");
  const int K = params.K;
  const Eigen::VectorXd w = user_weights(u, alpha);
  const capacity::SortedChannel sorted = capacity::sort_channel(h);

  std::vector<double> T(static_cast<std::size_t>(K) + 1);
  for (int s = 1; s <= K; ++s) T[s] = delivery_time(params.m, s);

  // Weights of the users stronger than position k, heaviest first.
  std::vector<double> heavier;
  heavier.reserve(K);
  double best = -1.0;
  int best_k = 0;
  int best_s = 1;
  for (int k = 0; k < K; ++k) {
    const int user = sorted.order[k];
    const double gain = std::log1p(sorted.h_sorted[k]);
    double weight = w[user];
    for (int s = 1; s <= k + 1; ++s) {
      if (s > 1) weight += heavier[s - 2];
      const double value = gain / T[s] * weight;
      if (value > best || (value == best && (s < best_s || (s == best_s && k < best_k)))) {
        best = value;
        best_k = k;
        best_s = s;
      }
    }
    heavier.insert(std::upper_bound(heavier.begin(), heavier.end(), w[user], std::greater<>()),
                   w[user]);
  }

  std::vector<int> stronger(sorted.order.begin(), sorted.order.begin() + best_k);
  std::stable_sort(stronger.begin(), stronger.end(), [&](int a, int b) { return w[a] > w[b]; });
  std::vector<int> group(stronger.begin(), stronger.begin() + (best_s - 1));
  group.push_back(sorted.order[best_k]);
  std::sort(group.begin(), group.end());
  return group_decision(h, std::move(group), params);
}

SlotDecision schedule_superposition(const ChannelRealization& h,
                                    const Eigen::Ref<const Eigen::VectorXd>& u, double alpha,
                                    const CacheParams& params) {
  check_size(h, params);
  if (u.size() != params.K) throw DomainError("schedule_superposition: rate vector size differs from K");
  const Eigen::VectorXd w = user_weights(u, alpha);
  const capacity::SortedChannel sorted = capacity::sort_channel(h);
  Eigen::VectorXd tau(params.K);
  for (int k = 0; k < params.K; ++k) tau[k] = w[sorted.order[k]];

  const capacity::ReducedWeights reduced = capacity::reduce_weights(tau, params.m);
  const capacity::PowerAllocation alloc = capacity::allocate_power(sorted, reduced);
  const capacity::LayerRates layers = capacity::layer_rates(sorted, alloc);

  SlotDecision out;
  out.per_user_rate = capacity::per_user_rates(layers, reduced, params.m, sorted.order);
  for (int k = 0; k < params.K; ++k) {
    if (layers.C[k] <= 0.0) continue;
    for (int i : reduced.argmax_subset[k]) out.selected_group.push_back(sorted.order[i]);
  }
  std::sort(out.selected_group.begin(), out.selected_group.end());
  out.selected_group.erase(std::unique(out.selected_group.begin(), out.selected_group.end()),
                           out.selected_group.end());
  return out;
}

UtilityEstimate estimate_utility(const RunStats& stats, double alpha) {
  UtilityEstimate out{utility_objective(stats.rate, alpha), 0.0};
  const int K = static_cast<int>(stats.rate.size());
  const int B = static_cast<int>(stats.batch_means.cols());
  if (B < 2) return out;
  Eigen::VectorXd slope(K);
  for (int i = 0; i < K; ++i) slope[i] = alpha_utility_slope(stats.rate[i], alpha);
  const Eigen::VectorXd linear = (stats.batch_means.transpose() * slope) / static_cast<double>(K);
  const double mean = linear.mean();
  const double ss = (linear.array() - mean).square().sum();
  out.std_error = std::sqrt(ss / (B - 1) / B);
  return out;
}

GradientRun run_gradient(const PolicyKind& kind, std::int64_t slots, const ChannelStats& stats,
                         const CacheParams& params, double alpha, Rng& rng, double u0) {
  if (kind.tag != PolicyKind::Tag::full_csit && kind.tag != PolicyKind::Tag::superposition)
    throw DomainError("run_gradient: policy must be full_csit or superposition");
  if (slots < 1) throw DomainError("run_gradient: slots must be >= 1");
  if (!(u0 > 0.0)) throw DomainError("run_gradient: u0 must be > 0");
  if (stats.size() != params.K) throw DomainError("run_gradient: gamma size differs from K");
  if (!(alpha >= 0.0)) throw DomainError("run_gradient: alpha must be >= 0");

  const int K = params.K;
  GradientRun run{RateLedger(K, u0), {}, {}, {}};
  run.utility_trace.reserve(static_cast<std::size_t>(slots));
  run.group_sizes.reserve(static_cast<std::size_t>(slots));
  const int B = batch_count(slots);
  BatchAccumulator batches(K, B);
  int batch = 0;
  std::int64_t batch_end = batch_begin(slots, B, 1);

  ChannelRealization h;
  Eigen::VectorXd seen(K);
  for (std::int64_t t = 0; t < slots; ++t) {
    sample_channels(stats, rng, h);
    const double td = static_cast<double>(t);
    seen = (td * run.ledger.u.array() + u0) / (td + 1.0);
    const SlotDecision d = kind.tag == PolicyKind::Tag::full_csit
                               ? schedule_full_csit(h, seen, alpha, params)
                               : schedule_superposition(h, seen, alpha, params);
    run.ledger.update(d.per_user_rate);
    run.group_sizes.push_back(static_cast<int>(d.selected_group.size()));

    double utility = 0.0;
    for (int i = 0; i < K; ++i) {
      const double ui = run.ledger.u[i];
      utility += (alpha >= 1.0 && !(ui > 0.0)) ? -std::numeric_limits<double>::infinity()
                                                : alpha_utility(ui, alpha);
    }
    run.utility_trace.push_back(utility / K);

    if (t >= batch_end) {
      ++batch;
      batch_end = batch_begin(slots, B, batch + 1);
    }
    batches.sums.col(batch) += d.per_user_rate;
    ++batches.counts[batch];
  }
  run.stats = batches.finish();
  return run;
}

RunStats run_fixed(const PolicyKind& kind, std::int64_t slots, const ChannelStats& stats,
                   const CacheParams& params, const Rng& rng, int workers) {
  if (kind.tag != PolicyKind::Tag::baseline && kind.tag != PolicyKind::Tag::threshold)
    throw DomainError("run_fixed: policy must be baseline or threshold");
  if (slots < 1) throw DomainError("run_fixed: slots must be >= 1");
  if (stats.size() != params.K) throw DomainError("run_fixed: gamma size differs from K");

  const int K = params.K;
  const int B = batch_count(slots);
  BatchAccumulator batches(K, B);
  auto run_batch = [&](int b) {
    Rng local(rng.seed(), (rng.stream_id() << 32) + static_cast<std::uint64_t>(b));
    ChannelRealization h;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(K);
    const std::int64_t begin = batch_begin(slots, B, b);
    const std::int64_t end = batch_begin(slots, B, b + 1);
    for (std::int64_t t = begin; t < end; ++t) {
      sample_channels(stats, local, h);
      const SlotDecision d = kind.tag == PolicyKind::Tag::baseline
                                 ? schedule_baseline(h, params)
                                 : schedule_threshold(h, kind.c, params);
      sum += d.per_user_rate;
    }
    batches.sums.col(b) = sum;
    batches.counts[b] = end - begin;
  };

  const int threads = std::clamp(workers, 1, B);
  if (threads == 1) {
    for (int b = 0; b < B; ++b) run_batch(b);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (int b = next++; b < B; b = next++) run_batch(b);
      });
    }
  }
  return batches.finish();
}

}  // namespace ccsched
