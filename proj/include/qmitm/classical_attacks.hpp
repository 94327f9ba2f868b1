#pragma once

// Reference classical key-recovery attacks on 2- and 4-fold iterated ideal
// ciphers. Every oracle access goes through query(), so the returned ledger is
// an exact account of the attack's queries, index traffic and storage.

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "qmitm/permutation_oracle.hpp"

namespace qmitm {

struct AttackResult {
  std::vector<Key> keys;
  QueryLedger ledger;
  bool verified = false;
  // Key tuples examined (exhaustive) or index collisions checked (MITM family).
  std::uint64_t candidates = 0;
};

using KeyPair = std::pair<Key, Key>;

// Value -> key multimap over [M] with O(1) insert and probe. Storage for the
// bucket heads is allocated once and reused across clear() calls.
class CollisionIndex {
 public:
  explicit CollisionIndex(std::uint32_t block_space);

  void insert(Block value, std::uint32_t payload);
  template <typename F>
  void for_each_match(Block value, F&& f) const {
    for (std::int64_t e = head_[value]; e >= 0; e = next_[e]) f(payload_[e]);
  }
  std::size_t size() const noexcept { return payload_.size(); }
  void clear();

 private:
  std::vector<std::int64_t> head_;
  std::vector<std::int64_t> next_;
  std::vector<std::uint32_t> payload_;
  std::vector<Block> touched_;
};

// Enumerates all N^depth tuples (no early exit), returning the first one
// consistent with every pair. Intermediate values of P_1 are cached per level.
AttackResult exhaustive_search(const Instance& instance);

// Tabulate F_k(P_1), probe F_k'^-1(C_1), verify collisions on the other pairs.
AttackResult mitm_2(const Instance& instance);

// mitm_2 over composite keys (k1,k2) and (k3,k4).
AttackResult mitm_4(const Instance& instance);

enum class Half { Lower, Upper };

// Lower: all (ka,kb) with F_kb(F_ka(P_1)) = x. Upper: all (ka,kb) with
// F_kb(F_ka(x)) = C_1. Each returned pair is charged as one stored entry; the
// caller releases them.
std::vector<KeyPair> middle_check(const Instance& instance, Block x, Half half, QueryLedger& ledger);
std::vector<KeyPair> middle_check(const Instance& instance, Block x, Half half);

// Guess the middle value of P_1, solve both halves by MITM, join on the middle
// value of P_2 and check the remaining pairs. O(MN) time, O(N) memory.
AttackResult dissect_4(const Instance& instance);

// Dispatch by CLI name: exhaustive | mitm2 | mitm4 | dissect4.
AttackResult run_attack(std::string_view algorithm, const Instance& instance);

}  // namespace qmitm
