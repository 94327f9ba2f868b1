// qmitm: command-line driver for the attack laboratory.
//
// Exit codes: 0 ok, 2 bad arguments, 3 infeasible size, 4 attack failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qmitm/adversary_bound.hpp"
#include "qmitm/classical_attacks.hpp"
#include "qmitm/errors.hpp"
#include "qmitm/experiment.hpp"
#include "qmitm/permutation_oracle.hpp"
#include "qmitm/quantum_cost_model.hpp"
#include "qmitm/quantum_simulator.hpp"
#include "qmitm/rng.hpp"
#include "qmitm/serialization.hpp"

using namespace qmitm;
using nlohmann::json;

namespace {

// --out takes a path or a bare format name; "-" is stdout.
struct Sink {
  std::string format;
  std::string path = "-";
};

Sink resolve_sink(const std::string& out, const std::string& fallback, const std::vector<std::string>& formats) {
  for (const auto& f : formats)
    if (out == f) return {f, "-"};
  if (out.empty() || out == "-") return {fallback, "-"};
  const std::string ext = std::filesystem::path(out).extension().string();
  for (const auto& f : formats)
    if (ext == "." + f) return {f, out};
  if (ext == ".txt") return {"table", out};
  return {fallback, out};
}

Sink pick_sink(const std::string& out, const std::string& format, const std::string& fallback,
               const std::vector<std::string>& formats) {
  Sink s = resolve_sink(out, fallback, formats);
  if (!format.empty()) {
    if (std::find(formats.begin(), formats.end(), format) == formats.end())
      throw ParameterError("unsupported format '" + format + "'");
    s.format = format;
  }
  return s;
}

void emit(const Sink& sink, const std::string& text) {
  if (sink.path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(sink.path, text);
  }
}

std::string fixed(double v, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json exponents_json(const CostEstimate& c) {
  if (!c.exponents) return nullptr;
  return {{"time", to_string(c.exponents->time)},
          {"space", to_string(c.exponents->space)},
          {"time_space", to_string(c.exponents->time_space())}};
}

struct Options {
  std::uint64_t seed = 1;
  std::string out = "-";

  // gen / attack
  std::uint32_t n = 16;
  std::uint32_t m = 0;
  std::uint32_t depth = 2;
  std::uint32_t pairs = 2;
  std::string algo = "mitm2";
  std::string instance;

  // cost / grover / walk
  std::string model = "ke2";
  std::uint64_t marked = 1;
  std::uint64_t k = 1;
  std::uint32_t r = 2;
  std::uint64_t steps = 0;
  std::uint32_t i = 0;
  std::uint32_t j = 1;

  // gains
  int gain_depth = 2;
  std::string format;

  // adv
  std::uint32_t adv_n = 2;
  std::uint32_t adv_m = 3;
  std::uint32_t p = 0;
  std::uint32_t c = 0;
  bool injective = false;
  bool allow_direct = false;
  std::string problem = "or2";
  std::uint64_t optimize = 0;

  // scaling
  std::string config;
  std::vector<std::uint64_t> sizes;
  std::string m_rule = "N";
  std::uint32_t trials = 3;
  std::uint32_t sweep_pairs = 0;
  std::string svg;
};

int cmd_gen(const Options& o) {
  if (o.out.empty() || o.out == "-") throw ParameterError("gen needs --out <prefix>");
  const std::uint32_t m = o.m ? o.m : o.n;
  auto family = std::make_shared<const PermutationFamily>(generate_family(o.seed, o.n, m));
  const Instance inst = random_instance(family, o.depth, o.pairs, derive_seed(o.seed, 0x9e));
  const auto [bin, desc] = write_instance_files(inst, o.out);
  std::cout << desc.string() << '\n';
  return 0;
}

int cmd_attack(const Options& o) {
  if (o.instance.empty()) throw ParameterError("attack needs --instance <file>");
  const Instance inst = read_instance_file(o.instance);
  const AttackResult r = run_attack(o.algo, inst);
  const json j = {{"algorithm", o.algo},
                  {"keys", r.keys},
                  {"verified", r.verified},
                  {"forward_queries", r.ledger.forward_queries()},
                  {"inverse_queries", r.ledger.inverse_queries()},
                  {"time_units", r.ledger.time_units()},
                  {"peak_memory_units", r.ledger.peak_memory_units()},
                  {"candidates", r.candidates}};
  emit(resolve_sink(o.out, "json", {"json"}), j.dump(2) + "\n");
  return 0;
}

int cmd_cost(const Options& o) {
  CostEstimate c;
  json j = {{"model", o.model}, {"n", o.n}};
  if (o.model == "grover") {
    c = grover_cost(static_cast<double>(o.n), static_cast<double>(o.marked));
    j["marked"] = o.marked;
  } else if (o.model == "ke2") {
    c = ke2_quantum_cost(o.n);
  } else if (o.model == "ke4") {
    const std::uint32_t m = o.m ? o.m : o.n;
    c = ke4_quantum_cost(o.n, m);
    j["m"] = m;
  } else {
    throw ParameterError("unknown cost model '" + o.model + "' (grover|ke2|ke4)");
  }
  j["queries"] = c.queries;
  j["time_units"] = c.time_units;
  j["memory_units"] = c.memory_units;
  j["exponents"] = exponents_json(c);
  emit(resolve_sink(o.out, "json", {"json"}), j.dump(2) + "\n");
  return 0;
}

int cmd_gains(const Options& o) {
  const auto rows = gain_table(o.gain_depth);
  const Sink sink = pick_sink(o.out, o.format, "table", {"table", "csv"});
  emit(sink, sink.format == "csv" ? gain_table_csv(rows) : gain_table_text(rows));
  return 0;
}

int cmd_grover(const Options& o) {
  if (o.marked > o.m) throw ParameterError("--marked exceeds --m");
  std::vector<std::uint64_t> marked(o.marked);
  std::iota(marked.begin(), marked.end(), 0);
  const SimulationReport rep = grover_simulate(o.m, marked, o.k);
  const double closed = grover_success_probability(o.m, o.marked, o.k);
  const Sink sink = resolve_sink(o.out, "json", {"json", "csv"});
  if (sink.format == "csv") {
    std::ostringstream s;
    s << "iteration,marked_mass\n";
    for (std::size_t t = 0; t < rep.marked_mass_trace.size(); ++t) s << t << ',' << fixed(rep.marked_mass_trace[t], 12) << '\n';
    emit(sink, s.str());
  } else {
    const json j = {{"m", o.m},
                    {"marked", o.marked},
                    {"iterations", o.k},
                    {"marked_probability", rep.marked_probability},
                    {"closed_form", closed},
                    {"abs_difference", std::abs(rep.marked_probability - closed)},
                    {"max_norm_drift", rep.max_norm_drift}};
    emit(sink, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_walk(const Options& o) {
  const WalkOperator op = build_johnson_walk(o.n, o.r, {o.i, o.j});
  const std::uint64_t steps = o.steps ? o.steps : walk_step_budget(o.n, o.r);
  const SimulationReport rep = szegedy_walk_simulate(op, steps);
  const Sink sink = resolve_sink(o.out, "csv", {"csv", "json"});
  if (sink.format == "csv") {
    std::ostringstream s;
    s << "step,marked_mass\n";
    for (std::size_t t = 0; t < rep.marked_mass_trace.size(); ++t) s << t << ',' << fixed(rep.marked_mass_trace[t], 12) << '\n';
    emit(sink, s.str());
  } else {
    const WalkSpec w = claw_walk_params(o.n, o.r);
    const json j = {{"n", o.n},
                    {"r", o.r},
                    {"steps", steps},
                    {"dimension", op.dimension()},
                    {"marked_vertices", op.marked_vertex_count()},
                    {"stationary_marked_mass", rep.stationary_marked_mass},
                    {"peak_marked_mass", rep.peak_marked_mass},
                    {"peak_step", rep.peak_step},
                    {"final_marked_mass", rep.marked_probability},
                    {"spectral_gap", spectral_gap(johnson_transition_matrix(op.graph()))},
                    {"model_gap", w.spectral_gap},
                    {"max_norm_drift", rep.max_norm_drift},
                    {"orthogonality_defect", op.orthogonality_defect()}};
    emit(sink, j.dump(2) + "\n");
  }
  return 0;
}

std::string pass_fail(bool ok) { return ok ? "pass" : "FAIL"; }

int cmd_adv_verify(const Options& o) {
  const PromiseOptions promise{!o.allow_direct, o.injective};
  const auto cf = enumerate_inputs(Problem::ClawFinding, o.adv_n, o.adv_m, o.p, o.c, promise);
  const auto ke2 = enumerate_inputs(Problem::KeyExtraction2, o.adv_n, o.adv_m, o.p, o.c, promise);
  const AdversaryMatrix g_cf = uniform_adversary(cf);
  const AdversaryMatrix g_ke2 = lift_cf_to_ke2(g_cf, cf, ke2);
  const FiberReport fibers = fiber_sizes(cf, ke2);
  const FiberReport raw_fibers = unrestricted_fiber_sizes(o.adv_n, o.adv_m, o.p, o.c);
  const TensorCheck tensor = check_tensor_structure(g_cf, cf, g_ke2, ke2);
  bool masked_ok = true;
  for (std::uint32_t k = 0; k < o.adv_n; ++k)
    for (const InputQuery q : {InputQuery{o.p, k, 1}, InputQuery{o.c, k, -1}})
      masked_ok = masked_ok && check_tensor_structure(g_cf, cf, g_ke2, ke2, q).pass;
  const QueryReductionReport red = verify_query_reduction(g_ke2, ke2);

  std::ostringstream s;
  auto hist = [](const FiberReport& f) {
    std::string h;
    for (const auto& [size, count] : f.histogram) h += std::to_string(size) + ":" + std::to_string(count) + " ";
    return h.empty() ? std::string("(none)") : h.substr(0, h.size() - 1);
  };
  s << "N=" << o.adv_n << " M=" << o.adv_m << " P=" << o.p << " C=" << o.c << " promise: unique solution"
    << (promise.exclude_direct_keys ? ", no direct key" : "") << (promise.require_injective ? ", injective" : "") << '\n';
  s << "KE2 inputs: raw " << ke2.counts.raw << ", yes " << ke2.counts.yes << ", no " << ke2.counts.no
    << ", excluded " << ke2.counts.excluded_multiple << " multiple / " << ke2.counts.excluded_direct << " direct / "
    << ke2.counts.excluded_noninjective << " non-injective\n";
  s << "CF inputs: raw " << cf.counts.raw << ", kept " << cf.size() << " (yes " << cf.counts.yes << ", no "
    << cf.counts.no << "), reached by projection " << fibers.reached << '\n';
  if (ke2.counts.yes == 0 || ke2.counts.no == 0)
    s << "degenerate promise set: one output class is empty, every check below is vacuous\n";
  s << "fibre sizes (promise): " << hist(fibers) << '\n';
  s << "fibre sizes (unrestricted): " << hist(raw_fibers) << '\n';
  s << "D = " << (fibers.constant_size ? std::to_string(*fibers.constant_size) : std::string("not constant")) << '\n';
  s << "||Gamma_CF|| = " << fixed(tensor.norm_cf) << '\n';
  s << "||Gamma_KE2|| = " << fixed(tensor.norm_ke2) << '\n';
  s << "D*||Gamma_CF|| = " << fixed(static_cast<double>(tensor.fiber_size) * tensor.norm_cf) << '\n';
  s << "tensor check: " << pass_fail(tensor.pass) << " (max |diff| " << tensor.max_abs_difference << ")\n";
  s << "masked tensor check over I: " << pass_fail(masked_ok) << '\n';
  s << "max_q ||Gamma o Delta_q|| = " << fixed(red.max_all) << ", max over I before conjugation = "
    << fixed(red.max_in_query_set) << '\n';
  for (const auto& chk : red.checks) {
    s << "  maximiser (x=" << chk.original.x << ", k=" << chk.original.key << ", b=" << chk.original.direction
      << ") -> (x=" << chk.target.x << ", k=" << chk.target.key << ", b=" << chk.target.direction
      << "): conjugated norm " << fixed(chk.conjugated_norm) << ", max over I " << fixed(chk.max_in_query_set)
      << ", block-constant " << (chk.block_constant ? "yes" : "no") << " (group " << chk.group_size
      << "), literal (P,C) grouping " << (chk.literal_grouping_block_constant ? "yes" : "no") << '\n';
  }
  s << "query reduction: " << pass_fail(red.pass) << '\n';
  emit(resolve_sink(o.out, "table", {"table"}), s.str());
  return 0;
}

int cmd_adv_value(const Options& o) {
  InputEnumeration e;
  if (o.problem == "or2") {
    e = or2_inputs();
  } else if (o.problem == "cf" || o.problem == "ke2") {
    const PromiseOptions promise{!o.allow_direct, o.injective};
    e = enumerate_inputs(o.problem == "cf" ? Problem::ClawFinding : Problem::KeyExtraction2, o.adv_n, o.adv_m, o.p, o.c,
                         promise);
  } else {
    throw ParameterError("unknown problem '" + o.problem + "' (or2|cf|ke2)");
  }
  const AdversaryMatrix uniform = uniform_adversary(e);
  json j = {{"problem", o.problem}, {"inputs", e.size()}, {"queries", e.query_count()}};
  j["uniform_value"] = adv_value(uniform, e);
  if (o.optimize > 0) {
    const AdversaryMatrix best = optimize_adversary(e, o.optimize, o.seed);
    j["optimized_value"] = adv_value(best, e);
    j["iterations"] = o.optimize;
    j["seed"] = o.seed;
  }
  emit(resolve_sink(o.out, "json", {"json"}), j.dump(2) + "\n");
  return 0;
}

int cmd_scaling(const Options& o, bool seed_given) {
  ExperimentConfig cfg;
  if (!o.config.empty()) {
    cfg = load_config(o.config);
    if (seed_given) cfg.seed = o.seed;
  } else {
    cfg.seed = o.seed;
    cfg.algorithm = o.algo;
    cfg.sizes = o.sizes;
    cfg.block_rule = parse_block_rule(o.m_rule);
    cfg.trials = o.trials;
    cfg.pairs = o.sweep_pairs;
  }
  if (!o.svg.empty()) cfg.svg_path = o.svg;
  validate(cfg);

  const ScalingSeries series = run_scaling(cfg);
  const std::string dest = o.out != "-" ? o.out : (cfg.csv_path.empty() ? "-" : cfg.csv_path);
  const Sink sink = pick_sink(dest, o.format, "csv", {"csv", "table"});
  if (sink.format == "csv" && sink.path != "-") cfg.csv_path = sink.path;
  emit(sink, sink.format == "table" ? scaling_table(series) : scaling_csv(series, cfg));
  if (!cfg.svg_path.empty()) write_text_file(cfg.svg_path, scaling_svg(series));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generic attacks on 2- and 4-fold iterated ideal ciphers: classical runs, quantum cost models, "
               "simulations and adversary-matrix checks."};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* cmd, const char* out_help) {
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out, out_help);
  };

  auto* gen = app.add_subcommand("gen", "generate a planted instance (.bin + .json)");
  common(gen, "output path prefix");
  gen->add_option("--n", o.n, "number of keys N")->check(CLI::PositiveNumber);
  gen->add_option("--m", o.m, "block space M (default N)");
  gen->add_option("--depth", o.depth, "2 or 4");
  gen->add_option("--pairs", o.pairs, "plaintext/ciphertext pairs");

  auto* attack = app.add_subcommand("attack", "run a classical attack on an instance file");
  common(attack, "JSON result path (default stdout)");
  attack->add_option("--algo", o.algo, "exhaustive | mitm2 | mitm4 | dissect4")->required();
  attack->add_option("--instance", o.instance, "instance .json or .bin")->required();

  auto* cost = app.add_subcommand("cost", "evaluate a quantum cost model");
  common(cost, "JSON result path (default stdout)");
  cost->add_option("--model", o.model, "grover | ke2 | ke4");
  cost->add_option("--n", o.n, "key space N (search-space size for grover)");
  cost->add_option("--m", o.m, "block space M (ke4; default N)");
  cost->add_option("--marked", o.marked, "marked elements (grover)");

  auto* gains = app.add_subcommand("gains", "print the classical-vs-quantum gain table");
  common(gains, "output path or format (table | csv)");
  gains->add_option("--depth", o.gain_depth, "2 or 4");
  gains->add_option("--format", o.format, "table | csv");

  auto* grover = app.add_subcommand("grover", "statevector Grover search");
  common(grover, "output path or format (json | csv)");
  grover->add_option("--m", o.m, "search-space size")->required();
  grover->add_option("--marked", o.marked, "number of marked elements (0..t-1)");
  grover->add_option("--k", o.k, "Grover iterations");

  auto* walk = app.add_subcommand("walk", "Szegedy walk on J(N, r) with a planted collision");
  common(walk, "output path or format (csv | json)");
  walk->add_option("--n", o.n, "N")->required();
  walk->add_option("--r", o.r, "subset size r")->required();
  walk->add_option("--steps", o.steps, "walk steps (default ceil(3/sqrt(delta eps)))");
  walk->add_option("--i", o.i, "first colliding key");
  walk->add_option("--j", o.j, "second colliding key");

  auto* adv = app.add_subcommand("adv", "adversary-matrix computations");
  adv->require_subcommand(1);
  auto* verify = adv->add_subcommand("verify", "check the CF -> KE2 lift on an exhaustive enumeration");
  common(verify, "report path (default stdout)");
  auto* value = adv->add_subcommand("value", "adversary value of the uniform (and optionally optimized) matrix");
  common(value, "JSON result path (default stdout)");
  for (auto* cmd : {verify, value}) {
    cmd->add_option("--n", o.adv_n, "N");
    cmd->add_option("--m", o.adv_m, "M");
    cmd->add_option("--p", o.p, "plaintext P");
    cmd->add_option("--c", o.c, "ciphertext C");
    cmd->add_flag("--injective", o.injective, "restrict G_1, G_2 to one-to-one functions");
    cmd->add_flag("--allow-direct-keys", o.allow_direct, "keep inputs where one key maps P to C");
  }
  value->add_option("--problem", o.problem, "or2 | cf | ke2");
  value->add_option("--optimize", o.optimize, "coordinate-ascent iterations");

  auto* scaling = app.add_subcommand("scaling", "scaling sweep with a log-log exponent fit");
  common(scaling, "CSV path (default stdout)");
  scaling->add_option("--config", o.config, "JSON experiment config");
  scaling->add_option("--algo", o.algo, "exhaustive | mitm2 | mitm4 | dissect4 | ke2_cost | ke4_cost");
  scaling->add_option("--sizes", o.sizes, "key-space sizes, strictly increasing")->delimiter(',');
  scaling->add_option("--m-rule", o.m_rule, "N | N^2 | N^3");
  scaling->add_option("--trials", o.trials, "trials per size (median)");
  scaling->add_option("--pairs", o.sweep_pairs, "pairs per instance (0: automatic)");
  scaling->add_option("--svg", o.svg, "log-log plot path");
  scaling->add_option("--format", o.format, "csv | table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(o);
    if (attack->parsed()) return cmd_attack(o);
    if (cost->parsed()) return cmd_cost(o);
    if (gains->parsed()) return cmd_gains(o);
    if (grover->parsed()) return cmd_grover(o);
    if (walk->parsed()) return cmd_walk(o);
    if (verify->parsed()) return cmd_adv_verify(o);
    if (value->parsed()) return cmd_adv_value(o);
    if (scaling->parsed()) return cmd_scaling(o, scaling->get_option("--seed")->count() > 0);
  } catch (const ParameterError& e) {
    std::cerr << "qmitm: error: " << e.what() << '\n';
    return 2;
  } catch (const UndefinedValue& e) {
    std::cerr << "qmitm: error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleSize& e) {
    std::cerr << "qmitm: infeasible: " << e.what() << '\n';
    return 3;
  } catch (const AttackFailure& e) {
    std::cerr << "qmitm: attack failed: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "qmitm: error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
