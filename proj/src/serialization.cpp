#include "qmitm/serialization.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "qmitm/errors.hpp"

namespace qmitm {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    if (pos_ + 4 > bytes_.size()) throw ParameterError("truncated instance file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  void expect_magic() {
    const std::size_t len = std::strlen(kInstanceMagic);
    if (bytes_.size() < len || std::memcmp(bytes_.data(), kInstanceMagic, len) != 0)
      throw ParameterError("bad magic: not a QMITM1 instance");
    pos_ = len;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::vector<std::uint8_t> serialize_instance(const Instance& instance) {
  const auto& fam = instance.family();
  std::vector<std::uint8_t> out(kInstanceMagic, kInstanceMagic + std::strlen(kInstanceMagic));
  out.reserve(out.size() + 4 * (5 + instance.depth() + 2 * instance.pairs().size() +
                                fam.forward_tables().size()));
  put_u32(out, fam.n_keys());
  put_u32(out, fam.block_space());
  put_u32(out, instance.depth());
  for (Key k : instance.planted_keys()) put_u32(out, k);
  put_u32(out, static_cast<std::uint32_t>(instance.pairs().size()));
  for (const auto& p : instance.pairs()) {
    put_u32(out, p.plaintext);
    put_u32(out, p.ciphertext);
  }
  for (Block v : fam.forward_tables()) put_u32(out, v);
  return out;
}

Instance deserialize_instance(std::span<const std::uint8_t> bytes, std::uint64_t seed) {
  Reader r(bytes);
  r.expect_magic();
  const std::uint32_t n = r.u32();
  const std::uint32_t m = r.u32();
  const std::uint32_t depth = r.u32();
  if (depth != 2 && depth != 4) throw ParameterError("bad depth in instance file");
  std::vector<Key> keys(depth);
  for (auto& k : keys) k = r.u32();
  const std::uint32_t n_pairs = r.u32();
  if (n_pairs > m) throw ParameterError("bad pair count in instance file");
  std::vector<PlainCipherPair> pairs(n_pairs);
  for (auto& p : pairs) {
    p.plaintext = r.u32();
    p.ciphertext = r.u32();
  }
  if (static_cast<std::uint64_t>(n) * m > kMaxTableEntries) throw InfeasibleSize("table too large");
  std::vector<Block> forward(static_cast<std::size_t>(n) * m);
  for (auto& v : forward) v = r.u32();
  if (!r.done()) throw ParameterError("trailing bytes in instance file");
  auto family = std::make_shared<const PermutationFamily>(n, m, seed, std::move(forward));
  return Instance(std::move(family), depth, std::move(keys), std::move(pairs));
}

std::vector<std::uint8_t> serialize_family(const PermutationFamily& family) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + 4 * family.forward_tables().size());
  put_u32(out, family.n_keys());
  put_u32(out, family.block_space());
  for (Block v : family.forward_tables()) put_u32(out, v);
  return out;
}

nlohmann::json instance_descriptor(const Instance& instance, const std::string& binary_name) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : instance.pairs()) pairs.push_back({p.plaintext, p.ciphertext});
  return {{"format", kInstanceMagic},
          {"schema_version", kDescriptorSchemaVersion},
          {"seed", instance.family().seed()},
          {"n_keys", instance.n_keys()},
          {"block_space", instance.block_space()},
          {"depth", instance.depth()},
          {"planted_keys", instance.planted_keys()},
          {"pairs", pairs},
          {"tables", binary_name}};
}

std::pair<std::filesystem::path, std::filesystem::path> write_instance_files(
    const Instance& instance, const std::filesystem::path& prefix) {
  std::filesystem::path bin = prefix;
  bin += ".bin";
  std::filesystem::path json = prefix;
  json += ".json";
  const auto bytes = serialize_instance(instance);
  {
    std::ofstream out(bin, std::ios::binary);
    if (!out) throw ParameterError("cannot write " + bin.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  std::ofstream out(json);
  if (!out) throw ParameterError("cannot write " + json.string());
  out << instance_descriptor(instance, bin.filename().string()).dump(2) << '\n';
  return {bin, json};
}

Instance read_instance_file(const std::filesystem::path& path) {
  if (path.extension() != ".json") return deserialize_instance(read_bytes(path));
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path.string());
  nlohmann::json desc;
  try {
    desc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(std::string("bad descriptor: ") + e.what());
  }
  if (desc.value("format", "") != kInstanceMagic) throw ParameterError("descriptor format is not QMITM1");
  const auto bin = path.parent_path() / desc.at("tables").get<std::string>();
  Instance inst = deserialize_instance(read_bytes(bin), desc.value("seed", std::uint64_t{0}));
  if (inst.n_keys() != desc.at("n_keys").get<std::uint32_t>() ||
      inst.block_space() != desc.at("block_space").get<std::uint32_t>() ||
      inst.planted_keys() != desc.at("planted_keys").get<std::vector<Key>>())
    throw ParameterError("descriptor does not match " + bin.string());
  return inst;
}

}  // namespace qmitm
