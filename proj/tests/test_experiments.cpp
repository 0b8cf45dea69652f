#include <sstream>

#include <gtest/gtest.h>

#include "rigid/experiments.hpp"

using namespace rigid;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig cfg_for(const std::string& cmd) {
  ExperimentConfig c;
  c.command = cmd;
  fill_defaults(c);
  return c;
}

}  // namespace

TEST(Laminate, RowsAndBounds) {
  ExperimentConfig c = cfg_for("laminate");
  c.samples = 100000;
  const auto rows = parse_csv(run_laminate(c));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0][0], "n_osc");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double n = std::stod(rows[r][0]);
    EXPECT_LE(std::stod(rows[r][1]), 1.0 / n);
    EXPECT_EQ(std::stod(rows[r][5]), 0.0);
  }
}

TEST(Laminate, EmptyListIsConfigError) {
  ExperimentConfig c;
  c.command = "laminate";
  EXPECT_THROW(run_laminate(c), ParseError);
}

TEST(Laminate, SameSeedSameBytes) {
  ExperimentConfig c = cfg_for("laminate");
  c.samples = 20000;
  c.seed = 42;
  EXPECT_EQ(run_laminate(c), run_laminate(c));
  ExperimentConfig d = c;
  d.seed = 43;
  EXPECT_NE(run_laminate(c), run_laminate(d));
}

TEST(Rigidity, ColumnsDecreaseAndInteriorVanishes) {
  const auto rows = parse_csv(run_rigidity(cfg_for("rigidity")));
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t r = 2; r < rows.size(); ++r) {
    EXPECT_LT(std::stod(rows[r][1]), std::stod(rows[r - 1][1]));
    EXPECT_LT(std::stod(rows[r][3]), std::stod(rows[r - 1][3]));
  }
  for (std::size_t r = 1; r < rows.size(); ++r) EXPECT_LE(std::abs(std::stod(rows[r][2])), 1e-10);

  ExperimentConfig one = cfg_for("rigidity");
  one.n_osc = {8};
  EXPECT_EQ(parse_csv(run_rigidity(one)).size(), 2u);
}

TEST(Moments, QuadraticLevels) {
  ExperimentConfig c = cfg_for("moments");
  c.levels = {0.0, 0.25, 1.0, 4.0};
  c.measures = 400;
  const auto j = moments_json(c);
  ASSERT_EQ(j["results"].size(), 4u);
  EXPECT_TRUE(j["results"][0].contains("note"));
  for (std::size_t k = 1; k < 4; ++k) {
    EXPECT_EQ(j["results"][k]["admissible_t"], nlohmann::json::parse("[0.0, 1.0]"));
    EXPECT_GT(j["results"][k]["discriminant"].get<double>(), 0.0);
  }
  EXPECT_EQ(j["random_measures"]["violations"].get<int>(), 0);
  EXPECT_GT(j["random_measures"]["polyconvex"].get<int>(), 0);
}

TEST(Moments, NegativeLevelHasNoRoots) {
  ExperimentConfig c = cfg_for("moments");
  c.levels = {-1.0};
  c.measures = 0;
  const auto j = moments_json(c);
  EXPECT_EQ(j["results"][0]["error"], "no fiber roots");
  EXPECT_TRUE(j["results"][0]["roots"].empty());
}

TEST(Recover, AffineRowsAreExact) {
  ExperimentConfig c = cfg_for("recover");
  c.map = "affine";
  c.grids = {32, 64};
  const auto rows = parse_csv(run_recover(c));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"grid_n", "strong_l2", "weak_max", "beta_dev", "order_estimate"}));
  for (std::size_t r = 1; r < 3; ++r) EXPECT_LE(std::stod(rows[r][3]), 1e-8);
}

TEST(Recover, SignChangeIsNumericalFailure) {
  ExperimentConfig c = cfg_for("recover");
  c.map = "signchange";
  c.grids = {33};
  EXPECT_THROW(run_recover(c), Error);
}

TEST(Stationarity, NonconstDetStaysAwayFromZero) {
  ExperimentConfig c = cfg_for("stationarity");
  c.grids = {32, 64};
  const auto rows = parse_csv(run_stationarity(c));
  for (std::size_t r = 1; r < rows.size(); ++r) EXPECT_GE(std::stod(rows[r][1]), 0.01);
}

TEST(HpCheck, QuarticPureFailsAtZero) {
  ExperimentConfig c = cfg_for("hpcheck");
  c.integrand = "quartic-pure";
  const auto j = hpcheck_json(c);
  EXPECT_FALSE(j["pass"].get<bool>());
  EXPECT_EQ(j["witnesses"][0]["t"].get<double>(), 0.0);
  c.integrand = "cosh";
  EXPECT_TRUE(hpcheck_json(c)["pass"].get<bool>());
}

TEST(Config, ParsesWithLineDiagnostics) {
  const ConfigMap kv = parse_config_text("# comment\nseed = 7\n\nnosc = 5, 10\n  integrand=cosh  # trailing\n");
  EXPECT_EQ(kv.at("seed").value, "7");
  EXPECT_EQ(kv.at("seed").line, 2);
  EXPECT_EQ(kv.at("integrand").value, "cosh");

  ExperimentConfig c;
  apply_config(c, kv, {"integrand"});
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.n_osc, (std::vector<int>{5, 10}));
  EXPECT_EQ(c.integrand, "quad");  // flag wins

  try {
    parse_config_text("seed = 1\nnonsense\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(std::string(e.what()), "line 2: expected key = value");
  }
  try {
    apply_config(c, parse_config_text("\n\nseed = abc\n"), {});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(std::string(e.what()), "line 3: field 'seed': cannot parse 'abc'");
  }
  EXPECT_THROW(apply_config(c, parse_config_text("colour = red\n"), {}), ParseError);
  EXPECT_THROW(parse_config_text("a = 1\na = 2\n"), ParseError);
}

TEST(Dispatch, UnknownCommand) {
  ExperimentConfig c;
  c.command = "nope";
  EXPECT_THROW(run_experiment(c), ParseError);
}
