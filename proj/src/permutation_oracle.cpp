#include "qmitm/permutation_oracle.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>

#include "qmitm/errors.hpp"
#include "qmitm/kernels.hpp"
#include "qmitm/rng.hpp"

namespace qmitm {

namespace {

void check_dimensions(std::uint64_t n_keys, std::uint64_t block_space) {
  if (n_keys < 1) throw ParameterError("n_keys must be >= 1");
  if (block_space < 2) throw ParameterError("block_space must be >= 2");
  if (block_space > kMaxBlockSpace)
    throw InfeasibleSize("block_space " + std::to_string(block_space) + " exceeds 2^22");
  if (n_keys * block_space > kMaxTableEntries)
    throw InfeasibleSize("N*M = " + std::to_string(n_keys * block_space) + " table entries exceeds 2^26");
}

}  // namespace

bool is_bijection(std::span<const Block> values) {
  std::vector<bool> seen(values.size(), false);
  for (Block v : values) {
    if (v >= values.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

PermutationFamily::PermutationFamily(std::uint32_t n_keys, std::uint32_t block_space, std::uint64_t seed,
                                     std::vector<Block> forward)
    : n_keys_(n_keys), block_space_(block_space), seed_(seed), forward_(std::move(forward)) {
  check_dimensions(n_keys, block_space);
  if (forward_.size() != static_cast<std::size_t>(n_keys) * block_space)
    throw ParameterError("forward table size does not match N*M");
  inverse_.resize(forward_.size());
  for (Key k = 0; k < n_keys; ++k) {
    const auto row = forward_row(k);
    if (!is_bijection(row)) throw ParameterError("row " + std::to_string(k) + " is not a bijection");
    Block* inv = inverse_.data() + static_cast<std::size_t>(k) * block_space;
    for (Block x = 0; x < block_space; ++x) inv[row[x]] = x;
  }
}

PermutationFamily generate_family(std::uint64_t seed, std::uint32_t n_keys, std::uint32_t block_space) {
  check_dimensions(n_keys, block_space);
  const std::size_t total = static_cast<std::size_t>(n_keys) * block_space;
  std::vector<Block> forward(total);
  std::vector<Block> inverse(total);
  kernels::parallel::fill_permutation_tables(seed, n_keys, block_space, forward, inverse);
  return PermutationFamily(n_keys, block_space, seed, std::move(forward));
}

Instance::Instance(FamilyPtr family, std::uint32_t depth, std::vector<Key> keys,
                   std::vector<PlainCipherPair> pairs)
    : family_(std::move(family)), depth_(depth), keys_(std::move(keys)), pairs_(std::move(pairs)) {
  if (!family_) throw ParameterError("instance needs a family");
  if (depth_ != 2 && depth_ != 4) throw ParameterError("depth must be 2 or 4");
  if (keys_.size() != depth_)
    throw ParameterError("expected " + std::to_string(depth_) + " keys, got " + std::to_string(keys_.size()));
  for (Key k : keys_)
    if (k >= family_->n_keys()) throw ParameterError("planted key out of range");
  if (pairs_.empty()) throw ParameterError("instance needs at least one pair");
  std::unordered_set<Block> seen;
  for (const auto& p : pairs_) {
    if (p.plaintext >= block_space() || p.ciphertext >= block_space())
      throw ParameterError("pair outside [M]");
    if (!seen.insert(p.plaintext).second) throw ParameterError("duplicate plaintext");
  }
  if (!consistent(keys_)) throw ParameterError("planted keys do not map plaintexts to ciphertexts");
}

Block Instance::encrypt(std::span<const Key> keys, Block x) const {
  for (Key k : keys) x = family_->forward(k, x);
  return x;
}

bool Instance::consistent(std::span<const Key> keys) const {
  return std::all_of(pairs_.begin(), pairs_.end(),
                     [&](const PlainCipherPair& p) { return encrypt(keys, p.plaintext) == p.ciphertext; });
}

Instance plant_instance(FamilyPtr family, std::uint32_t depth, std::vector<Key> keys,
                        const std::vector<Block>& plaintexts) {
  if (!family) throw ParameterError("instance needs a family");
  if (depth != 2 && depth != 4) throw ParameterError("depth must be 2 or 4");
  if (keys.size() != depth) throw ParameterError("key tuple length must equal depth");
  if (plaintexts.empty()) throw ParameterError("need at least one plaintext");
  if (depth == 4 && plaintexts.size() < 2) throw ParameterError("depth 4 needs at least 2 plaintexts");
  for (Key k : keys)
    if (k >= family->n_keys()) throw ParameterError("key out of range");
  std::vector<PlainCipherPair> pairs;
  pairs.reserve(plaintexts.size());
  for (Block p : plaintexts) {
    if (p >= family->block_space()) throw ParameterError("plaintext outside [M]");
    Block c = p;
    for (Key k : keys) c = family->forward(k, c);
    pairs.push_back({p, c});
  }
  return Instance(std::move(family), depth, std::move(keys), std::move(pairs));
}

Block query(const Instance& instance, const Query& q, QueryLedger& ledger) {
  if (q.key >= instance.n_keys()) throw ParameterError("query key out of range");
  if (q.point >= instance.block_space()) throw ParameterError("query point out of range");
  if (q.direction != Direction::Forward && q.direction != Direction::Inverse)
    throw ParameterError("query direction must be +1 or -1");
  ledger.record_query(q.direction);
  return instance.family().apply(q.key, q.point, q.direction);
}

Instance conjugate_instance(const Instance& instance, std::span<const Block> sigma) {
  const auto& fam = instance.family();
  const std::uint32_t m = fam.block_space();
  if (sigma.size() != m || !is_bijection(sigma)) throw ParameterError("sigma is not a bijection of [M]");
  std::vector<Block> forward(static_cast<std::size_t>(fam.n_keys()) * m);
  for (Key k = 0; k < fam.n_keys(); ++k) {
    Block* row = forward.data() + static_cast<std::size_t>(k) * m;
    // (sigma F sigma^-1)(sigma(x)) = sigma(F(x))
    for (Block x = 0; x < m; ++x) row[sigma[x]] = sigma[fam.forward(k, x)];
  }
  auto family = std::make_shared<const PermutationFamily>(fam.n_keys(), m, fam.seed(), std::move(forward));
  std::vector<PlainCipherPair> pairs;
  for (const auto& p : instance.pairs()) pairs.push_back({sigma[p.plaintext], sigma[p.ciphertext]});
  return Instance(std::move(family), instance.depth(), instance.planted_keys(), std::move(pairs));
}

Instance randomize_instance(const Instance& instance, std::uint64_t seed) {
  const auto& fam = instance.family();
  const std::uint32_t m = fam.block_space();
  std::vector<Block> forward(static_cast<std::size_t>(fam.n_keys()) * m);
  std::vector<Block> sigma(m);
  for (Key k = 0; k < fam.n_keys(); ++k) {
    std::iota(sigma.begin(), sigma.end(), Block{0});
    Rng rng(derive_seed(seed, k));
    shuffle(std::span<Block>(sigma), rng);
    Block* row = forward.data() + static_cast<std::size_t>(k) * m;
    for (Block x = 0; x < m; ++x) row[x] = sigma[fam.forward(k, x)];
  }
  auto family = std::make_shared<const PermutationFamily>(fam.n_keys(), m, fam.seed(), std::move(forward));
  std::vector<Block> plaintexts;
  for (const auto& p : instance.pairs()) plaintexts.push_back(p.plaintext);
  return plant_instance(std::move(family), instance.depth(), instance.planted_keys(), plaintexts);
}

Instance random_instance(FamilyPtr family, std::uint32_t depth, std::uint32_t n_pairs, std::uint64_t seed) {
  if (!family) throw ParameterError("instance needs a family");
  if (n_pairs < 1 || n_pairs > family->block_space())
    throw ParameterError("pair count must lie in [1, M]");
  Rng rng(seed);
  std::vector<Key> keys(depth);
  for (auto& k : keys) k = static_cast<Key>(rng.below(family->n_keys()));
  std::vector<Block> plaintexts;
  std::unordered_set<Block> used;
  while (plaintexts.size() < n_pairs) {
    const auto p = static_cast<Block>(rng.below(family->block_space()));
    if (used.insert(p).second) plaintexts.push_back(p);
  }
  return plant_instance(std::move(family), depth, std::move(keys), plaintexts);
}

}  // namespace qmitm
