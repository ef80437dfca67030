#include "ccsched/model.hpp"

#include <algorithm>
#include <limits>

namespace ccsched {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(seeded_engine(seed, stream_id)) {}

ChannelRealization sample_channels(const ChannelStats& stats, Rng& rng) {
  ChannelRealization out;
  sample_channels(stats, rng, out);
  return out;
}

void sample_channels(const ChannelStats& stats, Rng& rng, ChannelRealization& out) {
  out.h.resize(stats.gamma.size());
  for (Eigen::Index i = 0; i < stats.gamma.size(); ++i) out.h[i] = rng.exponential(stats.gamma[i]);
}

double multicast_rate(const ChannelRealization& h, std::span<const int> group) {
  if (group.empty()) throw DomainError("multicast_rate: empty group");
  double worst = std::numeric_limits<double>::infinity();
  for (int j : group) {
    if (j < 0 || j >= h.size()) throw DomainError("multicast_rate: user index out of range");
    worst = std::min(worst, h.h[j]);
  }
  return std::log1p(worst);
}

}  // namespace ccsched
