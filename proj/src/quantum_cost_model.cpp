#include "qmitm/quantum_cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "qmitm/errors.hpp"

namespace qmitm {

namespace {

// Smallest r with r^3 >= n^2, i.e. ceil(n^{2/3}) without rounding error.
std::uint64_t ceil_two_thirds_power(std::uint64_t n) {
  using u128 = unsigned __int128;
  const u128 target = static_cast<u128>(n) * n;
  auto r = static_cast<std::uint64_t>(std::ceil(std::cbrt(static_cast<long double>(n) * n)));
  while (r > 0 && static_cast<u128>(r - 1) * (r - 1) * (r - 1) >= target) --r;
  while (static_cast<u128>(r) * r * r < target) ++r;
  return r;
}

ExponentPair ke2_exponents() { return {Rational(2, 3), Rational(2, 3)}; }

ExponentPair ke4_exponents(Rational block_exponent) {
  // sqrt(M) outer Grover-style walk steps around a KE2 check.
  return {block_exponent / 2 + ke2_exponents().time, ke2_exponents().space};
}

ExponentPair grover_key_search_exponents(std::int64_t depth) { return {Rational(depth, 2), Rational(0)}; }

}  // namespace

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

CostEstimate grover_cost(double space_size, double marked) {
  if (marked <= 0) throw InfeasibleSearch("grover_cost: no marked element");
  if (space_size < 1 || marked > space_size) throw ParameterError("grover_cost needs 1 <= marked <= space_size");
  const double q = std::ceil(std::numbers::pi / 4.0 * std::sqrt(space_size / marked));
  CostEstimate c;
  c.queries = std::max(q, 1.0);
  c.time_units = c.queries;
  c.memory_units = 1.0;
  return c;
}

CostEstimate mnrs_cost(const WalkSpec& spec) {
  if (!(spec.marked_fraction > 0.0 && spec.marked_fraction <= 1.0))
    throw ParameterError("walk marked fraction must lie in (0, 1]");
  if (!(spec.spectral_gap > 0.0 && spec.spectral_gap <= 1.0))
    throw ParameterError("walk spectral gap must lie in (0, 1]");
  if (spec.setup < 0 || spec.update < 0 || spec.checking < 0 || spec.memory < 0)
    throw ParameterError("walk costs must be non-negative");
  CostEstimate c;
  c.queries = spec.setup + (spec.update / std::sqrt(spec.spectral_gap) + spec.checking) /
                               std::sqrt(spec.marked_fraction);
  c.time_units = c.queries;
  c.memory_units = spec.memory;
  return c;
}

WalkSpec claw_walk_params(std::uint64_t n_keys, std::uint64_t subset_size) {
  const auto n = static_cast<double>(n_keys);
  const auto r = static_cast<double>(subset_size);
  if (subset_size < 2 || subset_size >= n_keys)
    throw ParameterError("claw walk needs 2 <= r < N");
  WalkSpec w;
  w.setup = r;
  w.update = 2.0;
  w.checking = 0.0;
  w.marked_fraction = r * (r - 1.0) / (n * (n - 1.0));
  // 1 - lambda_1 of J(N,r); exceeds 1 only on near-complete tiny graphs.
  w.spectral_gap = std::min(1.0, n / (r * (n - r)));
  w.memory = r;
  return w;
}

CostEstimate ke2_quantum_cost(std::uint64_t n_keys) {
  if (n_keys < 2) throw ParameterError("ke2_quantum_cost needs N >= 2");
  const std::uint64_t r = ceil_two_thirds_power(n_keys);
  WalkSpec w;
  if (r >= n_keys) {
    // Too small for a walk: the setup already loads every key.
    const auto n = static_cast<double>(n_keys);
    w = WalkSpec{n, 2.0, 0.0, 1.0, 1.0, n};
  } else {
    w = claw_walk_params(n_keys, r);
  }
  CostEstimate c = mnrs_cost(w);
  c.exponents = ke2_exponents();
  return c;
}

CostEstimate ke4_quantum_cost(std::uint64_t n_keys, std::uint64_t block_space, Rational block_exponent) {
  if (n_keys < 2) throw ParameterError("ke4_quantum_cost needs N >= 2");
  if (block_space < 3) throw ParameterError("ke4_quantum_cost needs M >= 3 (K_2 has no spectral gap)");
  const CostEstimate half = ke2_quantum_cost(n_keys);
  const auto m = static_cast<double>(block_space);
  WalkSpec w;
  w.setup = 1.0;
  w.update = 1.0;
  w.checking = 2.0 * half.time_units;  // f_X and g_X
  w.marked_fraction = 1.0 / m;
  w.spectral_gap = 1.0 - 1.0 / (m - 1.0);
  w.memory = half.memory_units;
  CostEstimate c = mnrs_cost(w);
  c.exponents = ke4_exponents(block_exponent);
  return c;
}

Rational gain(Rational classical_exp, Rational quantum_exp) {
  if (quantum_exp <= 0) throw ParameterError("gain needs a positive quantum exponent");
  return classical_exp / quantum_exp;
}

ExponentPair classical_exponents(Attack attack) {
  switch (attack) {
    case Attack::Exhaustive2: return {2, 0};
    case Attack::Mitm2:
    case Attack::AmplitudeAmplification2: return {1, 1};
    case Attack::Exhaustive4: return {4, 0};
    case Attack::Mitm4: return {2, 2};
    case Attack::Dissection4: return {2, 1};
  }
  throw ParameterError("unknown attack");
}

ExponentPair quantum_exponents(Attack attack) {
  switch (attack) {
    case Attack::Exhaustive2: return grover_key_search_exponents(2);
    case Attack::Mitm2: return *ke2_quantum_cost(1024).exponents;
    // Only the gains of this variant are known; exponents reverse-derived from them.
    case Attack::AmplitudeAmplification2: return {Rational(3, 4), Rational(1, 2)};
    case Attack::Exhaustive4: return grover_key_search_exponents(4);
    case Attack::Mitm4: {
      // KE2 over composite keys: N' = N^2.
      const auto e = *ke2_quantum_cost(1024).exponents;
      return {e.time * 2, e.space * 2};
    }
    case Attack::Dissection4: return *ke4_quantum_cost(1024, 1024).exponents;
  }
  throw ParameterError("unknown attack");
}

std::vector<GainRow> gain_table(int depth) {
  std::vector<std::pair<const char*, Attack>> attacks;
  if (depth == 2) {
    attacks = {{"Exhaustive search", Attack::Exhaustive2},
               {"MITM", Attack::Mitm2},
               {"Amplitude amplification", Attack::AmplitudeAmplification2}};
  } else if (depth == 4) {
    attacks = {{"Exhaustive search", Attack::Exhaustive4},
               {"MITM", Attack::Mitm4},
               {"Dissection", Attack::Dissection4}};
  } else {
    throw ParameterError("gain_table depth must be 2 or 4");
  }
  std::vector<GainRow> rows;
  for (const auto& [name, attack] : attacks) {
    GainRow row{name, classical_exponents(attack), quantum_exponents(attack), 0, 0};
    row.time_gain = gain(row.classical.time, row.quantum.time);
    row.time_space_gain = gain(row.classical.time_space(), row.quantum.time_space());
    rows.push_back(row);
  }
  return rows;
}

std::string gain_table_csv(const std::vector<GainRow>& rows) {
  std::ostringstream out;
  out << "attack,classical_time_exp,quantum_time_exp,time_gain,classical_ts_exp,quantum_ts_exp,ts_gain\n";
  for (const auto& r : rows) {
    out << r.attack << ',' << to_string(r.classical.time) << ',' << to_string(r.quantum.time) << ','
        << to_string(r.time_gain) << ',' << to_string(r.classical.time_space()) << ','
        << to_string(r.quantum.time_space()) << ',' << to_string(r.time_space_gain) << '\n';
  }
  return out.str();
}

std::string gain_table_text(const std::vector<GainRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(25) << "attack" << std::setw(8) << "time"
      << "time-space\n";
  for (const auto& r : rows)
    out << std::setw(25) << r.attack << std::setw(8) << to_string(r.time_gain) << to_string(r.time_space_gain)
        << '\n';
  return out.str();
}

}  // namespace qmitm
