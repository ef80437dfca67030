#pragma once

// System-model quantities: delivery time of decentralized coded caching,
// alpha-fair utilities, fading statistics and multicast rate.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Dense>

#include "ccsched/errors.hpp"

namespace ccsched {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Normalized cache size m = M/N and number of users K.
struct CacheParams {
  double m;
  int K;

  CacheParams(double m_, int K_) : m(m_), K(K_) {
    if (!(m > 0.0 && m < 1.0)) throw DomainError("CacheParams: m must lie in (0,1)");
    if (K < 1) throw DomainError("CacheParams: K must be >= 1");
  }
};

/// Mean SNR of each user (linear scale). h_k ~ Exp(mean gamma_k).
struct ChannelStats {
  Eigen::VectorXd gamma;

  explicit ChannelStats(Eigen::VectorXd g) : gamma(std::move(g)) {
    if (gamma.size() == 0) throw DomainError("ChannelStats: empty gamma");
    for (Eigen::Index i = 0; i < gamma.size(); ++i) {
      if (!(std::isfinite(gamma[i]) && gamma[i] > 0.0))
        throw DomainError("ChannelStats: gamma entries must be positive and finite");
    }
  }
  int size() const { return static_cast<int>(gamma.size()); }
};

/// Instantaneous SNRs of one slot.
struct ChannelRealization {
  Eigen::VectorXd h;
  int size() const { return static_cast<int>(h.size()); }
};

/// Reproducible uniform/exponential stream keyed by (seed, stream_id).
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_id);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Inverse-CDF exponential draw with the given mean.
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }
  std::uint64_t bits() { return engine_(); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

/// T(m,k) = (1-m) (1 - (1-m)^k) / m: normalized number of multicast bits that
/// satisfy k distinct demands under decentralized placement.
template <typename Scalar>
Scalar delivery_time(Scalar m, int k) {
  if (!(m > Scalar(0) && m < Scalar(1))) throw DomainError("delivery_time: m must lie in (0,1)");
  if (k < 1) throw DomainError("delivery_time: k must be >= 1");
  using std::pow;
  const Scalar q = Scalar(1) - m;
  return q * (Scalar(1) - pow(q, k)) / m;
}

/// T(m, infinity) = (1-m)/m.
template <typename Scalar>
Scalar delivery_time_limit(Scalar m) {
  if (!(m > Scalar(0) && m < Scalar(1)))
    throw DomainError("delivery_time_limit: m must lie in (0,1)");
  return (Scalar(1) - m) / m;
}

/// alpha-fair utility g_alpha(x).
template <typename Scalar>
Scalar alpha_utility(Scalar x, Scalar alpha) {
  if (!(alpha >= Scalar(0))) throw DomainError("alpha_utility: alpha must be >= 0");
  if (alpha == Scalar(1)) {
    if (!(x > Scalar(0))) throw DomainError("alpha_utility: x must be > 0 for alpha >= 1");
    using std::log;
    return log(x);
  }
  if (alpha > Scalar(1) && !(x > Scalar(0)))
    throw DomainError("alpha_utility: x must be > 0 for alpha >= 1");
  if (!(x >= Scalar(0))) throw DomainError("alpha_utility: x must be >= 0");
  using std::pow;
  return (pow(x, Scalar(1) - alpha) - Scalar(1)) / (Scalar(1) - alpha);
}

/// Derivative of g_alpha, i.e. x^(-alpha).
template <typename Scalar>
Scalar alpha_utility_slope(Scalar x, Scalar alpha) {
  using std::pow;
  return alpha == Scalar(0) ? Scalar(1) : pow(x, -alpha);
}

/// (1/K) sum_i g_alpha(rates_i).
template <typename Derived>
typename Derived::Scalar utility_objective(const Eigen::MatrixBase<Derived>& rates,
                                           typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  if (rates.size() == 0) throw DomainError("utility_objective: empty rate vector");
  Scalar sum = Scalar(0);
  for (Eigen::Index i = 0; i < rates.size(); ++i) sum += alpha_utility(rates(i), alpha);
  return sum / Scalar(rates.size());
}

/// One slot of independent exponential fading draws.
ChannelRealization sample_channels(const ChannelStats& stats, Rng& rng);
void sample_channels(const ChannelStats& stats, Rng& rng, ChannelRealization& out);

/// log(1 + min_{j in group} h_j), natural log. Indices are zero based.
double multicast_rate(const ChannelRealization& h, std::span<const int> group);

}  // namespace ccsched
