#include "qmitm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <sstream>

#include <omp.h>

#include "qmitm/classical_attacks.hpp"
#include "qmitm/errors.hpp"
#include "qmitm/kernels.hpp"
#include "qmitm/permutation_oracle.hpp"
#include "qmitm/quantum_cost_model.hpp"
#include "qmitm/rng.hpp"

namespace qmitm {

namespace {

constexpr std::uint64_t kSweepMemoryBudget = std::uint64_t{2} << 30;
constexpr int kMaxAmbiguousRetries = 8;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::uint32_t attack_depth(const std::string& algorithm) {
  return algorithm == "mitm4" || algorithm == "dissect4" ? 4 : 2;
}

struct TrialCost {
  double time = 0.0;
  double queries = 0.0;
  double memory = 0.0;
};

TrialCost run_trial(const std::string& algorithm, std::uint32_t n, std::uint32_t m, std::uint32_t pairs,
                    std::uint64_t cell_seed) {
  const auto family = std::make_shared<const PermutationFamily>(generate_family(cell_seed, n, m));
  const std::uint32_t depth = attack_depth(algorithm);
  for (int attempt = 0; attempt < kMaxAmbiguousRetries; ++attempt) {
    const Instance inst = random_instance(family, depth, pairs, derive_seed(cell_seed, attempt + 1));
    try {
      const AttackResult r = run_attack(algorithm, inst);
      return {static_cast<double>(r.ledger.time_units()), static_cast<double>(r.ledger.total_queries()),
              static_cast<double>(r.ledger.peak_memory_units())};
    } catch (const AttackFailure& f) {
      if (f.kind() != AttackFailureKind::AmbiguousKey) throw;
    }
  }
  throw AttackFailure(AttackFailureKind::AmbiguousKey,
                      algorithm + ": every resampled instance had several consistent key tuples");
}

int sweep_threads(const std::string& algorithm, std::uint64_t n, std::uint64_t m) {
  std::uint64_t bytes = n * m * 2 * sizeof(Block) + m * sizeof(std::int64_t);
  if (algorithm == "mitm4") bytes += n * n * (2 * sizeof(std::int64_t) + sizeof(std::uint32_t));
  const auto fit = static_cast<int>(std::max<std::uint64_t>(1, kSweepMemoryBudget / std::max<std::uint64_t>(bytes, 1)));
  const int limit = kernels::thread_limit();
  return std::min(fit, limit > 0 ? limit : omp_get_max_threads());
}

ScalingPoint measure_classical(const ExperimentConfig& config, std::uint64_t n) {
  const std::uint64_t m = block_space_for(config.block_rule, n);
  if (n > 0xffffffffu || m > 0xffffffffu) throw InfeasibleSize("sweep size overflows 32-bit blocks");
  const std::uint32_t depth = attack_depth(config.algorithm);
  const std::uint32_t pairs = config.pairs ? config.pairs : default_pair_count(depth, n, m);

  std::vector<TrialCost> cost(config.trials);
  std::vector<std::exception_ptr> errors(config.trials);
  const auto trials = static_cast<std::int64_t>(config.trials);
#pragma omp parallel for schedule(dynamic) num_threads(sweep_threads(config.algorithm, n, m))
  for (std::int64_t t = 0; t < trials; ++t) {
    try {
      cost[t] = run_trial(config.algorithm, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(m), pairs,
                          derive_seed(derive_seed(config.seed, n), static_cast<std::uint64_t>(t)));
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> time, queries, memory;
  for (const auto& c : cost) {
    time.push_back(c.time);
    queries.push_back(c.queries);
    memory.push_back(c.memory);
  }
  return {n, m, config.trials, median(time), median(queries), median(memory)};
}

ScalingPoint evaluate_model(const ExperimentConfig& config, std::uint64_t n) {
  const std::uint64_t m = block_space_for(config.block_rule, n);
  CostEstimate c;
  if (config.algorithm == "ke2_cost") {
    c = ke2_quantum_cost(n);
  } else {
    const Rational a = config.block_rule == BlockRule::Equal ? 1 : config.block_rule == BlockRule::Square ? 2 : 3;
    c = ke4_quantum_cost(n, m, a);
  }
  return {n, m, 1, c.time_units, c.queries, c.memory_units};
}

std::vector<std::string> split_once(const std::string& line, char sep) {
  const auto pos = line.find(sep);
  if (pos == std::string::npos) return {line};
  return {line.substr(0, pos), line.substr(pos + 1)};
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParameterError("trailing characters in number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParameterError("malformed number '" + s + "'");
  }
}

std::uint64_t parse_count(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw ParameterError("trailing characters in count '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParameterError("malformed count '" + s + "'");
  }
}

}  // namespace

const char* to_string(BlockRule rule) {
  switch (rule) {
    case BlockRule::Equal: return "N";
    case BlockRule::Square: return "N^2";
    case BlockRule::Cube: return "N^3";
  }
  return "?";
}

BlockRule parse_block_rule(const std::string& text) {
  if (text == "N") return BlockRule::Equal;
  if (text == "N^2") return BlockRule::Square;
  if (text == "N^3") return BlockRule::Cube;
  throw ParameterError("unknown block-space rule '" + text + "' (expected N, N^2 or N^3)");
}

std::uint64_t block_space_for(BlockRule rule, std::uint64_t n_keys) {
  switch (rule) {
    case BlockRule::Equal: return n_keys;
    case BlockRule::Square: return n_keys * n_keys;
    case BlockRule::Cube: return n_keys * n_keys * n_keys;
  }
  throw ParameterError("unknown block-space rule");
}

bool is_classical_algorithm(const std::string& name) {
  return name == "exhaustive" || name == "mitm2" || name == "mitm4" || name == "dissect4";
}

bool is_cost_model(const std::string& name) { return name == "ke2_cost" || name == "ke4_cost"; }

void validate(const ExperimentConfig& config) {
  if (config.schema_version != kConfigSchemaVersion)
    throw ParameterError("unsupported config schema_version " + std::to_string(config.schema_version));
  if (!is_classical_algorithm(config.algorithm) && !is_cost_model(config.algorithm))
    throw ParameterError("unknown algorithm '" + config.algorithm + "'");
  if (config.sizes.empty()) throw ParameterError("size grid is empty");
  for (std::size_t i = 0; i < config.sizes.size(); ++i) {
    if (config.sizes[i] < 2) throw ParameterError("sizes must be at least 2");
    if (i > 0 && config.sizes[i] <= config.sizes[i - 1]) throw ParameterError("sizes must be strictly increasing");
  }
  if (config.trials < 1) throw ParameterError("trials must be at least 1");
}

nlohmann::json to_json(const ExperimentConfig& config) {
  return {{"schema_version", config.schema_version},
          {"seed", config.seed},
          {"algorithm", config.algorithm},
          {"sizes", config.sizes},
          {"m_rule", to_string(config.block_rule)},
          {"trials", config.trials},
          {"pairs", config.pairs},
          {"outputs", {{"csv", config.csv_path}, {"svg", config.svg_path}}}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig c;
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != kConfigSchemaVersion)
      throw ParameterError("unsupported config schema_version " + std::to_string(c.schema_version));
    c.seed = j.value("seed", c.seed);
    c.algorithm = j.value("algorithm", c.algorithm);
    c.sizes = j.at("sizes").get<std::vector<std::uint64_t>>();
    c.block_rule = parse_block_rule(j.value("m_rule", std::string("N")));
    c.trials = j.value("trials", c.trials);
    c.pairs = j.value("pairs", c.pairs);
    if (j.contains("outputs")) {
      c.csv_path = j["outputs"].value("csv", std::string());
      c.svg_path = j["outputs"].value("svg", std::string());
    }
    validate(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("bad experiment config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config " + path.string());
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

std::uint32_t default_pair_count(std::uint32_t depth, std::uint64_t n_keys, std::uint64_t block_space) {
  const double p = std::ceil((depth + 1.0) * std::log(static_cast<double>(n_keys)) /
                             std::log(static_cast<double>(block_space)));
  const auto pairs = static_cast<std::uint64_t>(p) + 1;
  return static_cast<std::uint32_t>(std::clamp<std::uint64_t>(pairs, depth == 4 ? 2 : 1, block_space));
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("power-law fit needs at least two points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParameterError("power-law fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw ParameterError("power-law fit needs two distinct sizes");
  PowerFit f;
  f.exponent = sxy / sxx;
  f.log_intercept = my - f.exponent * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (f.log_intercept + f.exponent * lx[i]);
    ss_res += r * r;
  }
  f.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return f;
}

void refit(ScalingSeries& series) {
  std::vector<double> n, time, queries, memory;
  for (const auto& p : series.points) {
    n.push_back(static_cast<double>(p.n));
    time.push_back(p.time_units);
    queries.push_back(p.queries);
    memory.push_back(p.peak_memory);
  }
  series.time_fit = fit_power_law(n, time);
  series.query_fit = fit_power_law(n, queries);
  const bool has_memory = std::all_of(memory.begin(), memory.end(), [](double v) { return v > 0.0; });
  series.memory_fit = has_memory ? fit_power_law(n, memory) : PowerFit{};
}

ScalingSeries run_scaling(const ExperimentConfig& config) {
  validate(config);
  if (config.sizes.size() < 2) throw ParameterError("a scaling sweep needs at least two sizes");
  ScalingSeries s;
  s.algorithm = config.algorithm;
  for (std::uint64_t n : config.sizes)
    s.points.push_back(is_cost_model(config.algorithm) ? evaluate_model(config, n) : measure_classical(config, n));
  refit(s);
  return s;
}

std::string scaling_csv(const ScalingSeries& series, const ExperimentConfig& config) {
  std::ostringstream out;
  out << "# qmitm scaling\n";
  out << "# algorithm," << series.algorithm << '\n';
  out << "# config," << to_json(config).dump() << '\n';
  const std::pair<const char*, const PowerFit*> fits[] = {
      {"time", &series.time_fit}, {"queries", &series.query_fit}, {"memory", &series.memory_fit}};
  for (const auto& [name, f] : fits)
    out << "# fit," << name << ',' << fmt_double(f->exponent) << ',' << fmt_double(f->log_intercept) << ','
        << fmt_double(f->r_squared) << '\n';
  out << "n,m,trials,time_units,queries,peak_memory\n";
  for (const auto& p : series.points)
    out << p.n << ',' << p.m << ',' << p.trials << ',' << fmt_double(p.time_units) << ','
        << fmt_double(p.queries) << ',' << fmt_double(p.peak_memory) << '\n';
  return out.str();
}

ScalingSeries parse_scaling_csv(const std::string& text) {
  ScalingSeries s;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto kv = split_once(line.substr(2), ',');
      if (kv.size() < 2) continue;
      if (kv[0] == "algorithm") {
        s.algorithm = kv[1];
      } else if (kv[0] == "fit") {
        const auto f = split(kv[1], ',');
        if (f.size() != 4) throw ParameterError("malformed fit line: " + line);
        const PowerFit fit{parse_double(f[1]), parse_double(f[2]), parse_double(f[3])};
        if (f[0] == "time") s.time_fit = fit;
        else if (f[0] == "queries") s.query_fit = fit;
        else if (f[0] == "memory") s.memory_fit = fit;
        else throw ParameterError("unknown fit metric '" + f[0] + "'");
      }
      continue;
    }
    if (!header) {
      if (line != "n,m,trials,time_units,queries,peak_memory") throw ParameterError("unexpected CSV header: " + line);
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 6) throw ParameterError("malformed CSV row: " + line);
    s.points.push_back({parse_count(f[0]), parse_count(f[1]), static_cast<std::uint32_t>(parse_count(f[2])),
                        parse_double(f[3]), parse_double(f[4]), parse_double(f[5])});
  }
  if (!header) throw ParameterError("CSV has no header row");
  return s;
}

std::string scaling_table(const ScalingSeries& series) {
  std::ostringstream out;
  char row[160];
  out << series.algorithm << '\n';
  std::snprintf(row, sizeof row, "%10s %12s %7s %16s %16s %14s\n", "N", "M", "trials", "time_units", "queries",
                "peak_memory");
  out << row;
  for (const auto& p : series.points) {
    std::snprintf(row, sizeof row, "%10llu %12llu %7u %16.6g %16.6g %14.6g\n", static_cast<unsigned long long>(p.n),
                  static_cast<unsigned long long>(p.m), p.trials, p.time_units, p.queries, p.peak_memory);
    out << row;
  }
  const std::pair<const char*, const PowerFit*> fits[] = {
      {"time", &series.time_fit}, {"queries", &series.query_fit}, {"memory", &series.memory_fit}};
  for (const auto& [name, f] : fits) {
    std::snprintf(row, sizeof row, "%-8s exponent %.4f  r^2 %.6f\n", name, f->exponent, f->r_squared);
    out << row;
  }
  return out.str();
}

std::string scaling_svg(const ScalingSeries& series) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  if (series.points.empty()) throw ParameterError("nothing to plot");
  struct Metric {
    const char* name;
    const char* colour;
    double ScalingPoint::*field;
    const PowerFit* fit;
  };
  const Metric metrics[] = {{"time", "#1f77b4", &ScalingPoint::time_units, &series.time_fit},
                            {"queries", "#2ca02c", &ScalingPoint::queries, &series.query_fit},
                            {"memory", "#d62728", &ScalingPoint::peak_memory, &series.memory_fit}};

  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& p : series.points) {
    x0 = std::min(x0, std::log10(static_cast<double>(p.n)));
    x1 = std::max(x1, std::log10(static_cast<double>(p.n)));
    for (const auto& m : metrics) {
      if (p.*m.field <= 0) continue;
      y0 = std::min(y0, std::log10(p.*m.field));
      y1 = std::max(y1, std::log10(p.*m.field));
    }
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  y0 = std::floor(y0);
  y1 = std::ceil(y1);
  auto px = [&](double lx) { return L + (lx - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream out;
  out.precision(6);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
      << W << ' ' << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << L << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" << series.algorithm
      << ": cost against N (log-log)</text>\n";
  out << "<g stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n";
  out << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (const auto& p : series.points) {
    const double x = px(std::log10(static_cast<double>(p.n)));
    out << "<line x1=\"" << x << "\" y1=\"" << H - B << "\" x2=\"" << x << "\" y2=\"" << H - B + 5
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << p.n << "</text>\n";
  }
  for (double e = y0; e <= y1 + 1e-9; e += 1) {
    const double y = py(e);
    out << "<line x1=\"" << L - 5 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << L - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << static_cast<int>(e)
        << "</text>\n";
  }
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">N</text>\n";
  out << "</g>\n";

  double legend_y = T + 10;
  for (const auto& m : metrics) {
    bool any = false;
    for (const auto& p : series.points) {
      if (p.*m.field <= 0) continue;
      any = true;
      out << "<circle cx=\"" << px(std::log10(static_cast<double>(p.n))) << "\" cy=\"" << py(std::log10(p.*m.field))
          << "\" r=\"3.5\" fill=\"" << m.colour << "\"/>\n";
    }
    if (!any) continue;
    // ln y = a + e ln x  <=>  log10 y = a / ln 10 + e log10 x
    const double a10 = m.fit->log_intercept / std::log(10.0);
    out << "<line x1=\"" << px(x0) << "\" y1=\"" << py(a10 + m.fit->exponent * x0) << "\" x2=\"" << px(x1)
        << "\" y2=\"" << py(a10 + m.fit->exponent * x1) << "\" stroke=\"" << m.colour
        << "\" stroke-dasharray=\"4 3\"/>\n";
    char label[64];
    std::snprintf(label, sizeof label, "%s ~ N^%.3f", m.name, m.fit->exponent);
    out << "<text x=\"" << W - R + 10 << "\" y=\"" << legend_y << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
        << m.colour << "\">" << label << "</text>\n";
    legend_y += 16;
  }
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path.string());
  out << text;
  if (!out) throw ParameterError("write failed for " + path.string());
}

}  // namespace qmitm
