#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "qmitm/errors.hpp"
#include "qmitm/experiment.hpp"

using namespace qmitm;

TEST_CASE("power-law fit") {
  std::vector<double> x, y;
  for (double n = 64; n <= 4096; n *= 2) {
    x.push_back(n);
    y.push_back(3.0 * std::pow(n, 2.0 / 3.0));
  }
  const auto f = fit_power_law(x, y);
  CHECK(std::abs(f.exponent - 2.0 / 3.0) < 1e-6);
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::exp(f.log_intercept) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK_THROWS_AS(fit_power_law({1.0}, {1.0}), ParameterError);
  CHECK_THROWS_AS(fit_power_law({2.0, 2.0}, {1.0, 3.0}), ParameterError);
  CHECK_THROWS_AS(fit_power_law({2.0, 4.0}, {0.0, 3.0}), ParameterError);
}

TEST_CASE("block rules and pair counts") {
  CHECK(parse_block_rule("N") == BlockRule::Equal);
  CHECK(parse_block_rule("N^2") == BlockRule::Square);
  CHECK(block_space_for(BlockRule::Cube, 8) == 512);
  CHECK_THROWS_AS(parse_block_rule("2N"), ParameterError);
  CHECK(default_pair_count(2, 4096, 4096) == 4);
  CHECK(default_pair_count(4, 4096, 4096) == 6);
  CHECK(default_pair_count(4, 2, 2) == 2);
  CHECK(default_pair_count(2, 8, 512) >= 1);
}

TEST_CASE("config JSON") {
  ExperimentConfig c;
  c.seed = 9;
  c.algorithm = "dissect4";
  c.sizes = {8, 16, 32};
  c.block_rule = BlockRule::Square;
  c.trials = 2;
  c.pairs = 5;
  c.csv_path = "a.csv";
  c.svg_path = "a.svg";
  CHECK(config_from_json(to_json(c)) == c);

  auto bad = c;
  bad.sizes = {16, 8};
  CHECK_THROWS_AS(validate(bad), ParameterError);
  bad = c;
  bad.algorithm = "shor";
  CHECK_THROWS_AS(validate(bad), ParameterError);
  bad = c;
  bad.trials = 0;
  CHECK_THROWS_AS(validate(bad), ParameterError);
  auto j = to_json(c);
  j["schema_version"] = 99;
  CHECK_THROWS_AS(config_from_json(j), ParameterError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ParameterError);
  CHECK(is_classical_algorithm("mitm2"));
  CHECK(is_cost_model("ke4_cost"));
}

TEST_CASE("small mitm2 sweep is deterministic and near-linear") {
  ExperimentConfig c;
  c.seed = 3;
  c.algorithm = "mitm2";
  c.sizes = {64, 128, 256, 512};
  c.trials = 3;
  const auto a = run_scaling(c);
  CHECK(a == run_scaling(c));
  REQUIRE(a.points.size() == 4);
  CHECK(std::abs(a.fitted_exponent() - 1.0) < 0.1);
  CHECK(std::abs(a.memory_fit.exponent - 1.0) < 0.05);
  for (const auto& p : a.points) CHECK(p.peak_memory == p.n);
  c.sizes = {64};
  CHECK_THROWS_AS(run_scaling(c), ParameterError);
}

TEST_CASE("cost-model sweeps report their exponents") {
  ExperimentConfig c;
  c.algorithm = "ke2_cost";
  c.sizes = {1 << 8, 1 << 12, 1 << 16};
  CHECK(std::abs(run_scaling(c).fitted_exponent() - 2.0 / 3.0) < 0.05);
}

TEST_CASE("CSV and SVG reports") {
  ExperimentConfig c;
  c.algorithm = "mitm2";
  c.sizes = {32, 64, 128};
  c.trials = 1;
  const auto s = run_scaling(c);
  const auto csv = scaling_csv(s, c);
  const auto back = parse_scaling_csv(csv);
  CHECK(back == s);
  CHECK_THROWS_AS(parse_scaling_csv("garbage\n"), ParameterError);
  CHECK(scaling_table(s).find("exponent") != std::string::npos);

  std::istringstream svg(scaling_svg(s));
  boost::property_tree::ptree tree;
  CHECK_NOTHROW(boost::property_tree::read_xml(svg, tree));
  CHECK(tree.count("svg") == 1);

  const auto path = std::filesystem::temp_directory_path() / "qmitm_experiment_test.csv";
  write_text_file(path, csv);
  CHECK(std::filesystem::file_size(path) == csv.size());
}
