#include "qmitm/classical_attacks.hpp"

#include <functional>
#include <string>

#include "qmitm/errors.hpp"

namespace qmitm {

CollisionIndex::CollisionIndex(std::uint32_t block_space) : head_(block_space, -1) {}

void CollisionIndex::insert(Block value, std::uint32_t payload) {
  if (head_[value] < 0) touched_.push_back(value);
  next_.push_back(head_[value]);
  head_[value] = static_cast<std::int64_t>(payload_.size());
  payload_.push_back(payload);
}

void CollisionIndex::clear() {
  for (Block v : touched_) head_[v] = -1;
  touched_.clear();
  next_.clear();
  payload_.clear();
}

namespace {

void require_depth(const Instance& instance, std::uint32_t depth, const char* name) {
  if (instance.depth() != depth)
    throw ParameterError(std::string(name) + " needs a depth-" + std::to_string(depth) + " instance");
}

// Chains the candidate through pairs [first, end) with metered queries.
bool verify_pairs(const Instance& instance, std::span<const Key> keys, std::size_t first, QueryLedger& ledger) {
  const auto& pairs = instance.pairs();
  for (std::size_t i = first; i < pairs.size(); ++i) {
    Block x = pairs[i].plaintext;
    for (Key k : keys) x = query_forward(instance, k, x, ledger);
    if (x != pairs[i].ciphertext) return false;
  }
  return true;
}

AttackResult finish(const Instance& instance, std::vector<std::vector<Key>> survivors, QueryLedger ledger,
                    std::uint64_t candidates, const char* name) {
  if (survivors.empty())
    throw AttackFailure(AttackFailureKind::NoKeyFound, std::string(name) + ": no key tuple is consistent");
  if (survivors.size() > 1)
    throw AttackFailure(AttackFailureKind::AmbiguousKey,
                        std::string(name) + ": " + std::to_string(survivors.size()) +
                            " key tuples survive all pairs; supply more pairs");
  AttackResult result;
  result.keys = std::move(survivors.front());
  result.verified = instance.consistent(result.keys);
  result.ledger = ledger;
  result.candidates = candidates;
  return result;
}

std::vector<KeyPair> middle_check_with(const Instance& instance, Block x, Half half, QueryLedger& ledger,
                                       CollisionIndex& index) {
  const std::uint32_t n = instance.n_keys();
  const Block source = half == Half::Lower ? instance.pairs().front().plaintext : x;
  const Block target = half == Half::Lower ? x : instance.pairs().front().ciphertext;
  index.clear();
  for (Key ka = 0; ka < n; ++ka) {
    index.insert(query_forward(instance, ka, source, ledger), ka);
    ledger.record_insert();
  }
  std::vector<KeyPair> found;
  for (Key kb = 0; kb < n; ++kb) {
    const Block back = query_inverse(instance, kb, target, ledger);
    ledger.record_probe();
    index.for_each_match(back, [&](std::uint32_t ka) {
      found.emplace_back(ka, kb);
      ledger.record_insert();
    });
  }
  ledger.release(n);
  index.clear();
  return found;
}

}  // namespace

AttackResult exhaustive_search(const Instance& instance) {
  const std::uint32_t depth = instance.depth();
  if (depth != 2 && depth != 4) throw ParameterError("exhaustive_search needs depth 2 or 4");
  const std::uint32_t n = instance.n_keys();
  const auto& first = instance.pairs().front();

  QueryLedger ledger;
  ledger.hold(depth - 1);  // intermediate values of P_1, one register per level
  std::vector<Key> tuple(depth);
  std::vector<Block> mid(depth + 1);
  mid[0] = first.plaintext;
  std::vector<Key> winner;
  std::uint64_t survivors = 0;
  std::uint64_t candidates = 0;

  std::function<void(std::uint32_t)> level = [&](std::uint32_t l) {
    for (Key k = 0; k < n; ++k) {
      tuple[l] = k;
      mid[l + 1] = query_forward(instance, k, mid[l], ledger);
      if (l + 1 < depth) {
        level(l + 1);
        continue;
      }
      ++candidates;
      if (mid[depth] == first.ciphertext && verify_pairs(instance, tuple, 1, ledger)) {
        if (survivors++ == 0) winner = tuple;
      }
    }
  };
  level(0);
  ledger.release(depth - 1);

  if (winner.empty())
    throw AttackFailure(AttackFailureKind::NoKeyFound, "exhaustive: no key tuple is consistent");
  AttackResult result;
  result.keys = std::move(winner);
  result.verified = instance.consistent(result.keys);
  result.ledger = ledger;
  result.candidates = candidates;
  return result;
}

AttackResult mitm_2(const Instance& instance) {
  require_depth(instance, 2, "mitm_2");
  const std::uint32_t n = instance.n_keys();
  const auto& first = instance.pairs().front();
  QueryLedger ledger;
  CollisionIndex index(instance.block_space());

  for (Key k = 0; k < n; ++k) {
    index.insert(query_forward(instance, k, first.plaintext, ledger), k);
    ledger.record_insert();
  }
  std::vector<std::vector<Key>> survivors;
  std::uint64_t candidates = 0;
  for (Key k2 = 0; k2 < n; ++k2) {
    const Block back = query_inverse(instance, k2, first.ciphertext, ledger);
    ledger.record_probe();
    index.for_each_match(back, [&](std::uint32_t k1) {
      ++candidates;
      const Key keys[] = {k1, k2};
      if (verify_pairs(instance, keys, 1, ledger)) survivors.push_back({k1, k2});
    });
  }
  ledger.release(n);
  return finish(instance, std::move(survivors), ledger, candidates, "mitm_2");
}

AttackResult mitm_4(const Instance& instance) {
  require_depth(instance, 4, "mitm_4");
  const std::uint64_t n = instance.n_keys();
  if (n * n > (std::uint64_t{1} << 28)) throw InfeasibleSize("mitm_4 table of N^2 entries exceeds 2^28");
  const auto& first = instance.pairs().front();
  QueryLedger ledger;
  CollisionIndex index(instance.block_space());

  std::vector<Block> cache(n);
  for (Key a = 0; a < n; ++a) {
    cache[a] = query_forward(instance, a, first.plaintext, ledger);
    ledger.record_insert();
  }
  for (Key a = 0; a < n; ++a) {
    for (Key b = 0; b < n; ++b) {
      index.insert(query_forward(instance, b, cache[a], ledger), static_cast<std::uint32_t>(a * n + b));
      ledger.record_insert();
    }
  }
  ledger.release(n);

  for (Key d = 0; d < n; ++d) {
    cache[d] = query_inverse(instance, d, first.ciphertext, ledger);
    ledger.record_insert();
  }
  std::vector<std::vector<Key>> survivors;
  std::uint64_t candidates = 0;
  for (Key c = 0; c < n; ++c) {
    for (Key d = 0; d < n; ++d) {
      const Block back = query_inverse(instance, c, cache[d], ledger);
      ledger.record_probe();
      index.for_each_match(back, [&](std::uint32_t ab) {
        ++candidates;
        const Key keys[] = {static_cast<Key>(ab / n), static_cast<Key>(ab % n), c, d};
        if (verify_pairs(instance, keys, 1, ledger)) survivors.emplace_back(std::begin(keys), std::end(keys));
      });
    }
  }
  ledger.release(n + n * n);
  return finish(instance, std::move(survivors), ledger, candidates, "mitm_4");
}

std::vector<KeyPair> middle_check(const Instance& instance, Block x, Half half, QueryLedger& ledger) {
  require_depth(instance, 4, "middle_check");
  if (x >= instance.block_space()) throw ParameterError("middle value outside [M]");
  CollisionIndex index(instance.block_space());
  return middle_check_with(instance, x, half, ledger, index);
}

std::vector<KeyPair> middle_check(const Instance& instance, Block x, Half half) {
  QueryLedger scratch;
  return middle_check(instance, x, half, scratch);
}

AttackResult dissect_4(const Instance& instance) {
  require_depth(instance, 4, "dissect_4");
  if (instance.pairs().size() < 2) throw ParameterError("dissect_4 needs at least 2 pairs");
  const std::uint32_t m = instance.block_space();
  const auto& second = instance.pairs()[1];
  QueryLedger ledger;
  CollisionIndex scratch(m);
  CollisionIndex by_second_middle(m);
  std::vector<std::vector<Key>> survivors;
  std::uint64_t candidates = 0;

  for (Block x = 0; x < m; ++x) {
    const auto lower = middle_check_with(instance, x, Half::Lower, ledger, scratch);
    by_second_middle.clear();
    for (std::uint32_t i = 0; i < lower.size(); ++i) {
      const auto [k1, k2] = lower[i];
      const Block mid = query_forward(instance, k2, query_forward(instance, k1, second.plaintext, ledger), ledger);
      by_second_middle.insert(mid, i);
      ledger.record_insert();
    }
    ledger.release(lower.size());  // the index entries now carry these pairs

    const auto upper = middle_check_with(instance, x, Half::Upper, ledger, scratch);
    for (const auto& [k3, k4] : upper) {
      const Block mid = query_inverse(instance, k3, query_inverse(instance, k4, second.ciphertext, ledger), ledger);
      ledger.record_probe();
      by_second_middle.for_each_match(mid, [&](std::uint32_t i) {
        ++candidates;
        const Key keys[] = {lower[i].first, lower[i].second, k3, k4};
        if (verify_pairs(instance, keys, 2, ledger)) survivors.emplace_back(std::begin(keys), std::end(keys));
      });
    }
    ledger.release(upper.size() + lower.size());
  }
  return finish(instance, std::move(survivors), ledger, candidates, "dissect_4");
}

AttackResult run_attack(std::string_view algorithm, const Instance& instance) {
  if (algorithm == "exhaustive") return exhaustive_search(instance);
  if (algorithm == "mitm2") return mitm_2(instance);
  if (algorithm == "mitm4") return mitm_4(instance);
  if (algorithm == "dissect4") return dissect_4(instance);
  throw ParameterError("unknown attack '" + std::string(algorithm) + "'");
}

}  // namespace qmitm
