#pragma once

// Closed-form resource accounting for the quantum attacks, and the gain
// arithmetic comparing each classical attack with its quantization.
//
// Exponents are exact rationals relative to N (key-space size); evaluated
// costs are doubles that keep Grover's pi/4 and the MNRS order constants
// explicit. Fitting and gains use only the exponents.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace qmitm {

using Rational = boost::rational<std::int64_t>;

std::string to_string(const Rational& r);

struct ExponentPair {
  Rational time{0};
  Rational space{0};

  Rational time_space() const { return time + space; }
  friend bool operator==(const ExponentPair&, const ExponentPair&) = default;
};

struct CostEstimate {
  double queries = 0.0;
  double time_units = 0.0;
  double memory_units = 0.0;
  std::optional<ExponentPair> exponents;
};

// The MNRS tuple. `memory` is the peak memory of the walk's data structure,
// supplied alongside the costs.
struct WalkSpec {
  double setup = 0.0;
  double update = 0.0;
  double checking = 0.0;
  double marked_fraction = 1.0;
  double spectral_gap = 1.0;
  double memory = 1.0;
};

// queries = ceil((pi/4) sqrt(space_size / marked)).
CostEstimate grover_cost(double space_size, double marked);

// S + (1/sqrt(eps)) ((1/sqrt(delta)) U + C).
CostEstimate mnrs_cost(const WalkSpec& spec);

// Johnson-graph walk J(N, r) for collision finding: S = r, U = 2, C = 0,
// eps = r(r-1)/(N(N-1)), delta = N/(r(N-r)) capped at 1, memory = r.
WalkSpec claw_walk_params(std::uint64_t n_keys, std::uint64_t subset_size);

// Claw-finding walk with r = ceil(N^{2/3}); exponents (2/3, 2/3).
CostEstimate ke2_quantum_cost(std::uint64_t n_keys);

// Search over the middle value on the complete graph K_M with a pair of KE2
// walks as the checking procedure. `block_exponent` declares the regime
// M = Theta(N^a) used to report exponents; the default a = 1 is M ~ N.
CostEstimate ke4_quantum_cost(std::uint64_t n_keys, std::uint64_t block_space, Rational block_exponent = 1);

// log C / log Q expressed through exponents: classical / quantum.
Rational gain(Rational classical_exp, Rational quantum_exp);

enum class Attack { Exhaustive2, Mitm2, AmplitudeAmplification2, Exhaustive4, Mitm4, Dissection4 };

ExponentPair classical_exponents(Attack attack);
ExponentPair quantum_exponents(Attack attack);

struct GainRow {
  std::string attack;
  ExponentPair classical;
  ExponentPair quantum;
  Rational time_gain;
  Rational time_space_gain;
};

std::vector<GainRow> gain_table(int depth);

std::string gain_table_csv(const std::vector<GainRow>& rows);
std::string gain_table_text(const std::vector<GainRow>& rows);

}  // namespace qmitm
