#pragma once

// Scaling sweeps over the classical attacks and the quantum cost models,
// log-log exponent fits, and the CSV / text / SVG reports built from them.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qmitm {

inline constexpr int kConfigSchemaVersion = 1;

// How the block space follows the key space in a sweep.
enum class BlockRule { Equal, Square, Cube };

const char* to_string(BlockRule rule);
BlockRule parse_block_rule(const std::string& text);  // "N" | "N^2" | "N^3"
std::uint64_t block_space_for(BlockRule rule, std::uint64_t n_keys);

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 1;
  std::string algorithm = "mitm2";
  std::vector<std::uint64_t> sizes;
  BlockRule block_rule = BlockRule::Equal;
  std::uint32_t trials = 3;
  std::uint32_t pairs = 0;  // 0: pick enough pairs for a unique key tuple
  std::string csv_path;
  std::string svg_path;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Throws ParameterError on an unknown algorithm, empty or non-increasing
// sizes, or zero trials.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

bool is_classical_algorithm(const std::string& name);
bool is_cost_model(const std::string& name);

// Pairs used when the config leaves it at 0: enough that a wrong key tuple
// survives with probability about 1/N.
std::uint32_t default_pair_count(std::uint32_t depth, std::uint64_t n_keys, std::uint64_t block_space);

struct ScalingPoint {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint32_t trials = 0;
  // Medians over trials.
  double time_units = 0.0;
  double queries = 0.0;
  double peak_memory = 0.0;

  friend bool operator==(const ScalingPoint&, const ScalingPoint&) = default;
};

struct PowerFit {
  double exponent = 0.0;
  double log_intercept = 0.0;
  double r_squared = 0.0;

  friend bool operator==(const PowerFit&, const PowerFit&) = default;
};

// Least squares on (ln x, ln y). Needs two distinct positive x values.
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingSeries {
  std::string algorithm;
  std::vector<ScalingPoint> points;
  PowerFit time_fit;
  PowerFit query_fit;
  PowerFit memory_fit;

  double fitted_exponent() const noexcept { return time_fit.exponent; }
  double r_squared() const noexcept { return time_fit.r_squared; }
  friend bool operator==(const ScalingSeries&, const ScalingSeries&) = default;
};

// Fits all three metrics from the points (memory skipped when it is zero).
void refit(ScalingSeries& series);

ScalingSeries run_scaling(const ExperimentConfig& config);

// CSV with '#' comment lines carrying the config and the fits.
std::string scaling_csv(const ScalingSeries& series, const ExperimentConfig& config);
ScalingSeries parse_scaling_csv(const std::string& text);
std::string scaling_table(const ScalingSeries& series);
std::string scaling_svg(const ScalingSeries& series);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qmitm
