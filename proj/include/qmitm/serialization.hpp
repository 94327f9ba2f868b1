#pragma once

// Flat binary layout (all words little-endian u32):
//   "QMITM1" | N | M | depth | keys[depth] | n_pairs | (P, C)[n_pairs] | forward[N*M]
// The JSON descriptor beside it carries the seed and a copy of the metadata.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmitm/permutation_oracle.hpp"

namespace qmitm {

inline constexpr char kInstanceMagic[] = "QMITM1";
inline constexpr int kDescriptorSchemaVersion = 1;

std::vector<std::uint8_t> serialize_instance(const Instance& instance);
Instance deserialize_instance(std::span<const std::uint8_t> bytes, std::uint64_t seed = 0);

// N | M | forward[N*M]
std::vector<std::uint8_t> serialize_family(const PermutationFamily& family);

nlohmann::json instance_descriptor(const Instance& instance, const std::string& binary_name);

// Writes <prefix>.bin and <prefix>.json; returns the two paths.
std::pair<std::filesystem::path, std::filesystem::path> write_instance_files(
    const Instance& instance, const std::filesystem::path& prefix);

// Accepts either the .json descriptor or the .bin file.
Instance read_instance_file(const std::filesystem::path& path);

}  // namespace qmitm
