#pragma once

// Bit-level decentralized coded caching: random placement, XOR delivery over
// every user subset, and decoding from side information. Used as a witness
// of the delivery-time formula; the schedulers never instantiate it.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "ccsched/model.hpp"

namespace ccsched::codec {

using BitArray = boost::dynamic_bitset<std::uint64_t>;
/// Bit k set <=> user k belongs to the set.
using UserSet = std::uint32_t;

inline constexpr int kMaxUsers = 20;

struct Library {
  std::size_t F = 0;
  std::vector<BitArray> files;

  int N() const { return static_cast<int>(files.size()); }
  static Library random(int N, std::size_t F, Rng& rng);
};

struct CacheState {
  int K = 0;
  double m = 0.0;
  std::size_t F = 0;
  /// holders[i][b]: users that cached bit b of file i.
  std::vector<std::vector<UserSet>> holders;
  /// stored[k][i]: F bits, equal to file i where user k caches it, zero elsewhere.
  std::vector<std::vector<BitArray>> stored;

  int N() const { return static_cast<int>(holders.size()); }
  std::size_t cached_bits(int user) const;
  /// |W_{i|J}|: number of bits of file i cached exactly by the users in J.
  std::size_t subfile_size(int file, UserSet owners) const;
};

/// Codewords V_J keyed by J. Subsets with an empty codeword are not stored.
struct CodewordSet {
  std::map<UserSet, BitArray> codewords;

  std::size_t length(UserSet subset) const;
  std::size_t total_bits() const;
};

/// Each user caches each bit of each file independently with probability m.
CacheState place(const Library& library, int K, double m, Rng& rng);

/// V_J = XOR_{k in J} W_{d_k | J\{k}}, zero padded to the longest operand.
CodewordSet deliver(const Library& library, const CacheState& cache, std::span<const int> demands);

/// Reconstructs the file demanded by `user` from its cache and the codewords.
BitArray decode(int user, const CacheState& cache, const CodewordSet& codewords,
                std::span<const int> demands);

/// Sum of codeword lengths divided by the file size.
double empirical_load(const CodewordSet& codewords, std::size_t F);

}  // namespace ccsched::codec
