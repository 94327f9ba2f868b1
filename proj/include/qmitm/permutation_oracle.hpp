#pragma once

// Ideal block cipher model: a public family of N random permutations of [M],
// accessed through a query-counting oracle.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace qmitm {

using Key = std::uint32_t;
using Block = std::uint32_t;

// Explicit forward+inverse tables cap the block space; see generate_family.
inline constexpr std::uint64_t kMaxBlockSpace = std::uint64_t{1} << 22;
inline constexpr std::uint64_t kMaxTableEntries = std::uint64_t{1} << 26;

enum class Direction : int { Forward = 1, Inverse = -1 };

struct Query {
  Block point = 0;
  Key key = 0;
  Direction direction = Direction::Forward;

  friend bool operator==(const Query&, const Query&) = default;
};

class PermutationFamily {
 public:
  // Takes ownership of `forward` (n_keys rows of block_space entries) and
  // builds the inverse tables. Throws ParameterError unless every row is a
  // bijection of [block_space].
  PermutationFamily(std::uint32_t n_keys, std::uint32_t block_space, std::uint64_t seed,
                    std::vector<Block> forward);

  std::uint32_t n_keys() const noexcept { return n_keys_; }
  std::uint32_t block_space() const noexcept { return block_space_; }
  std::uint64_t seed() const noexcept { return seed_; }

  Block forward(Key k, Block x) const noexcept {
    return forward_[static_cast<std::size_t>(k) * block_space_ + x];
  }
  Block inverse(Key k, Block y) const noexcept {
    return inverse_[static_cast<std::size_t>(k) * block_space_ + y];
  }
  Block apply(Key k, Block x, Direction d) const noexcept {
    return d == Direction::Forward ? forward(k, x) : inverse(k, x);
  }

  std::span<const Block> forward_row(Key k) const noexcept {
    return {forward_.data() + static_cast<std::size_t>(k) * block_space_, block_space_};
  }
  std::span<const Block> inverse_row(Key k) const noexcept {
    return {inverse_.data() + static_cast<std::size_t>(k) * block_space_, block_space_};
  }
  std::span<const Block> forward_tables() const noexcept { return forward_; }

  friend bool operator==(const PermutationFamily& a, const PermutationFamily& b) {
    return a.n_keys_ == b.n_keys_ && a.block_space_ == b.block_space_ && a.forward_ == b.forward_;
  }

 private:
  std::uint32_t n_keys_;
  std::uint32_t block_space_;
  std::uint64_t seed_;
  std::vector<Block> forward_;
  std::vector<Block> inverse_;
};

using FamilyPtr = std::shared_ptr<const PermutationFamily>;

struct PlainCipherPair {
  Block plaintext = 0;
  Block ciphertext = 0;

  friend bool operator==(const PlainCipherPair&, const PlainCipherPair&) = default;
};

// Planted keys plus plaintext/ciphertext pairs over a shared family.
class Instance {
 public:
  Instance(FamilyPtr family, std::uint32_t depth, std::vector<Key> keys,
           std::vector<PlainCipherPair> pairs);

  const PermutationFamily& family() const noexcept { return *family_; }
  const FamilyPtr& family_ptr() const noexcept { return family_; }
  std::uint32_t depth() const noexcept { return depth_; }
  std::uint32_t n_keys() const noexcept { return family_->n_keys(); }
  std::uint32_t block_space() const noexcept { return family_->block_space(); }
  const std::vector<Key>& planted_keys() const noexcept { return keys_; }
  const std::vector<PlainCipherPair>& pairs() const noexcept { return pairs_; }

  // Chains forward permutations in key order. Unmetered: for checking only.
  Block encrypt(std::span<const Key> keys, Block x) const;
  bool consistent(std::span<const Key> keys) const;

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.depth_ == b.depth_ && a.keys_ == b.keys_ && a.pairs_ == b.pairs_ &&
           *a.family_ == *b.family_;
  }

 private:
  FamilyPtr family_;
  std::uint32_t depth_;
  std::vector<Key> keys_;
  std::vector<PlainCipherPair> pairs_;
};

// Resource counters for one attack run. time_units charges one unit per
// oracle query and per index insertion or probe; memory counts stored entries.
class QueryLedger {
 public:
  void record_query(Direction d) noexcept {
    (d == Direction::Forward ? forward_ : inverse_) += 1;
    time_ += 1;
  }
  void record_insert(std::uint64_t entries = 1) noexcept {
    time_ += entries;
    memory_ += entries;
    if (memory_ > peak_memory_) peak_memory_ = memory_;
  }
  // Reserves storage (registers, caches) without charging time.
  void hold(std::uint64_t entries) noexcept {
    memory_ += entries;
    if (memory_ > peak_memory_) peak_memory_ = memory_;
  }
  void record_probe(std::uint64_t probes = 1) noexcept { time_ += probes; }
  void release(std::uint64_t entries) noexcept { memory_ -= entries < memory_ ? entries : memory_; }

  std::uint64_t forward_queries() const noexcept { return forward_; }
  std::uint64_t inverse_queries() const noexcept { return inverse_; }
  std::uint64_t total_queries() const noexcept { return forward_ + inverse_; }
  std::uint64_t time_units() const noexcept { return time_; }
  std::uint64_t peak_memory_units() const noexcept { return peak_memory_; }
  std::uint64_t live_memory_units() const noexcept { return memory_; }

 private:
  std::uint64_t forward_ = 0;
  std::uint64_t inverse_ = 0;
  std::uint64_t time_ = 0;
  std::uint64_t memory_ = 0;
  std::uint64_t peak_memory_ = 0;
};

// Each key's permutation is an unbiased Fisher-Yates shuffle driven by a
// stream derived from (seed, key), so the result is a pure function of
// (seed, n_keys, block_space) regardless of thread count.
PermutationFamily generate_family(std::uint64_t seed, std::uint32_t n_keys, std::uint32_t block_space);

Instance plant_instance(FamilyPtr family, std::uint32_t depth, std::vector<Key> keys,
                        const std::vector<Block>& plaintexts);

// The only metered access path. Throws ParameterError on out-of-range input.
Block query(const Instance& instance, const Query& q, QueryLedger& ledger);

inline Block query_forward(const Instance& instance, Key k, Block x, QueryLedger& ledger) {
  return query(instance, Query{x, k, Direction::Forward}, ledger);
}
inline Block query_inverse(const Instance& instance, Key k, Block y, QueryLedger& ledger) {
  return query(instance, Query{y, k, Direction::Inverse}, ledger);
}

// F_k -> sigma o F_k o sigma^-1, pairs -> (sigma(P), sigma(C)).
Instance conjugate_instance(const Instance& instance, std::span<const Block> sigma);

// F_k -> sigma_k o F_k with independent uniform sigma_k; ciphertexts are
// recomputed so the planted keys remain a solution.
Instance randomize_instance(const Instance& instance, std::uint64_t seed);

// Random planted keys and distinct random plaintexts from one seed.
Instance random_instance(FamilyPtr family, std::uint32_t depth, std::uint32_t n_pairs,
                         std::uint64_t seed);

bool is_bijection(std::span<const Block> values);

}  // namespace qmitm
