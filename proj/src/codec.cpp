#include "ccsched/codec.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ccsched/errors.hpp"

namespace ccsched::codec {

namespace {

// Bit positions of one file grouped by holder set: positions sorted by
// (holders, position) so each subfile W_{i|J} is a contiguous range.
struct SubfileIndex {
  std::vector<UserSet> masks;
  std::vector<std::uint32_t> positions;

  explicit SubfileIndex(const std::vector<UserSet>& holders) {
    positions.resize(holders.size());
    std::iota(positions.begin(), positions.end(), 0u);
    std::stable_sort(positions.begin(), positions.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return holders[a] < holders[b]; });
    masks.resize(holders.size());
    for (std::size_t i = 0; i < positions.size(); ++i) masks[i] = holders[positions[i]];
  }

  std::span<const std::uint32_t> range(UserSet owners) const {
    const auto [lo, hi] = std::equal_range(masks.begin(), masks.end(), owners);
    return {positions.data() + (lo - masks.begin()), static_cast<std::size_t>(hi - lo)};
  }

  template <typename Visit>
  void for_each_subfile(Visit&& visit) const {
    std::size_t i = 0;
    while (i < masks.size()) {
      std::size_t j = i;
      while (j < masks.size() && masks[j] == masks[i]) ++j;
      visit(masks[i], std::span<const std::uint32_t>(positions.data() + i, j - i));
      i = j;
    }
  }
};

BitArray gather(const BitArray& source, std::span<const std::uint32_t> positions) {
  BitArray out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (source.test(positions[i])) out.set(i);
  }
  return out;
}

void xor_padded(BitArray& acc, BitArray operand) {
  if (acc.size() < operand.size()) acc.resize(operand.size());
  if (operand.size() < acc.size()) operand.resize(acc.size());
  acc ^= operand;
}

void check_demands(const CacheState& cache, std::span<const int> demands) {
  if (static_cast<int>(demands.size()) != cache.K)
    throw DomainError("codec: need exactly one demand per user");
  if (cache.N() < cache.K) throw DomainError("codec: requires N >= K");
  std::vector<int> sorted(demands.begin(), demands.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DomainError("codec: demands must be distinct");
  if (sorted.front() < 0 || sorted.back() >= cache.N())
    throw DomainError("codec: demand index out of range");
}

}  // namespace

Library Library::random(int N, std::size_t F, Rng& rng) {
  if (N < 1 || F < 1) throw DomainError("Library: N and F must be positive");
  Library lib;
  lib.F = F;
  lib.files.reserve(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    BitArray file(F);
    for (std::size_t b = 0; b < F; b += 64) {
      std::uint64_t word = rng.bits();
      for (std::size_t j = 0; j < 64 && b + j < F; ++j, word >>= 1) {
        if (word & 1u) file.set(b + j);
      }
    }
    lib.files.push_back(std::move(file));
  }
  return lib;
}

std::size_t CacheState::cached_bits(int user) const {
  std::size_t total = 0;
  for (int i = 0; i < N(); ++i) {
    for (UserSet mask : holders[i]) total += (mask >> user) & 1u;
  }
  return total;
}

std::size_t CacheState::subfile_size(int file, UserSet owners) const {
  return static_cast<std::size_t>(std::count(holders[file].begin(), holders[file].end(), owners));
}

std::size_t CodewordSet::length(UserSet subset) const {
  const auto it = codewords.find(subset);
  return it == codewords.end() ? 0 : it->second.size();
}

std::size_t CodewordSet::total_bits() const {
  std::size_t total = 0;
  for (const auto& [subset, bits] : codewords) total += bits.size();
  return total;
}

CacheState place(const Library& library, int K, double m, Rng& rng) {
  if (!(m > 0.0 && m < 1.0)) throw DomainError("place: m must lie in (0,1)");
  if (K < 1 || K > kMaxUsers) throw DomainError("place: K must lie in [1, 20]");
  CacheState cache;
  cache.K = K;
  cache.m = m;
  cache.F = library.F;
  const int N = library.N();
  cache.holders.assign(N, std::vector<UserSet>(library.F, 0));
  cache.stored.assign(K, std::vector<BitArray>(N, BitArray(library.F)));
  for (int i = 0; i < N; ++i) {
    for (std::size_t b = 0; b < library.F; ++b) {
      UserSet mask = 0;
      for (int k = 0; k < K; ++k) {
        if (rng.uniform() < m) mask |= UserSet{1} << k;
      }
      cache.holders[i][b] = mask;
      if (mask != 0 && library.files[i].test(b)) {
        for (int k = 0; k < K; ++k) {
          if ((mask >> k) & 1u) cache.stored[k][i].set(b);
        }
      }
    }
  }
  return cache;
}

CodewordSet deliver(const Library& library, const CacheState& cache, std::span<const int> demands) {
  check_demands(cache, demands);
  CodewordSet out;
  for (int k = 0; k < cache.K; ++k) {
    const UserSet self = UserSet{1} << k;
    const int file = demands[k];
    const SubfileIndex index(cache.holders[file]);
    index.for_each_subfile([&](UserSet owners, std::span<const std::uint32_t> positions) {
      if (owners & self) return;
      xor_padded(out.codewords[owners | self], gather(library.files[file], positions));
    });
  }
  return out;
}

BitArray decode(int user, const CacheState& cache, const CodewordSet& codewords,
                std::span<const int> demands) {
  check_demands(cache, demands);
  if (user < 0 || user >= cache.K) throw DomainError("decode: user index out of range");
  const UserSet self = UserSet{1} << user;
  const int wanted = demands[user];

  std::vector<SubfileIndex> indices;
  indices.reserve(cache.K);
  for (int j = 0; j < cache.K; ++j) indices.emplace_back(cache.holders[demands[j]]);

  BitArray file = cache.stored[user][wanted];
  indices[user].for_each_subfile([&](UserSet owners, std::span<const std::uint32_t> positions) {
    if (owners & self) return;
    const UserSet subset = owners | self;
    const auto it = codewords.codewords.find(subset);
    if (it == codewords.codewords.end() || it->second.size() < positions.size())
      throw DecodeError("decode: codeword for subset " + std::to_string(subset) + " too short");
    BitArray buffer = it->second;
    for (int j = 0; j < cache.K; ++j) {
      const UserSet other = UserSet{1} << j;
      if (j == user || !(subset & other)) continue;
      // User `user` belongs to subset \ {j}, so it holds this interference term.
      const auto interference = indices[j].range(subset & ~other);
      if (interference.size() > buffer.size())
        throw DecodeError("decode: interference longer than codeword");
      BitArray side = gather(cache.stored[user][demands[j]], interference);
      side.resize(buffer.size());
      buffer ^= side;
    }
    for (std::size_t b = positions.size(); b < buffer.size(); ++b) {
      if (buffer.test(b)) throw DecodeError("decode: residual interference in codeword padding");
    }
    for (std::size_t b = 0; b < positions.size(); ++b) file.set(positions[b], buffer.test(b));
  });
  return file;
}

double empirical_load(const CodewordSet& codewords, std::size_t F) {
  if (F == 0) throw DomainError("empirical_load: F must be positive");
  return static_cast<double>(codewords.total_bits()) / static_cast<double>(F);
}

}  // namespace ccsched::codec
