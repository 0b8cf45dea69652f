// rigidlab: batch experiments on laminates, minor moments and grid probes
// of curl(beta Du) = 0. Exit codes: 0 success, 1 config error, 2 numerical
// failure.
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rigid/experiments.hpp"

namespace {

struct Flags {
  std::string integrand, out, map, config;
  std::vector<int> nosc, grid;
  std::vector<double> levels;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::size_t samples = 0, measures = 0;
  int sweep = 0, hp_samples = 0;
  double lo = 0.0, hi = 0.0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rigid::ParseError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigidlab: experiments for stationary points of det-convex integrands"};
  app.require_subcommand(1);

  Flags f;
  struct Bound {
    CLI::App* sub;
    std::vector<std::pair<std::string, CLI::Option*>> opts;
  };
  std::vector<Bound> subs;
  const char* names[][2] = {{"laminate", "sup deviation, phase fractions and det error of oscillating laminates"},
                            {"rigidity", "L1 determinant error and fiber residual of the lifted laminate"},
                            {"moments", "two-atom moment search and random polyconvex measures"},
                            {"recover", "least-squares beta recovery on a test map"},
                            {"stationarity", "inner-variation probe h(det Du) on a test map"},
                            {"hpcheck", "sampling check of the integrand hypotheses"}};
  for (const auto& nm : names) {
    CLI::App* s = app.add_subcommand(nm[0], nm[1]);
    Bound b{s, {}};
    auto keep = [&](const char* key, CLI::Option* o) { b.opts.emplace_back(key, o); };
    keep("integrand", s->add_option("--integrand", f.integrand, "quad, cosh, quartic or quartic-pure"));
    keep("seed", s->add_option("--seed", f.seed, "seed for all sampling"));
    keep("out", s->add_option("--out", f.out, "output file (default stdout)"));
    keep("grid", s->add_option("--grid", f.grid, "grid sizes")->delimiter(','));
    keep("nosc", s->add_option("--nosc", f.nosc, "oscillation counts")->delimiter(','));
    keep("tol", s->add_option("--tol", f.tol, "tolerance override"));
    keep("levels", s->add_option("--levels", f.levels, "h levels")->delimiter(','));
    keep("map", s->add_option("--map", f.map, "affine, shear, nonconst-det, signchange or a field file"));
    keep("samples", s->add_option("--samples", f.samples, "Monte-Carlo points"));
    keep("sweep", s->add_option("--sweep", f.sweep, "weight grid for the two-atom search"));
    keep("measures", s->add_option("--measures", f.measures, "random measures"));
    keep("lo", s->add_option("--lo", f.lo, "interval start"));
    keep("hi", s->add_option("--hi", f.hi, "interval end"));
    keep("hp-samples", s->add_option("--hp-samples", f.hp_samples, "sample count"));
    s->add_option("--config", f.config, "key = value file; flags win");
    subs.push_back(std::move(b));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  rigid::ExperimentConfig cfg;
  try {
    std::vector<std::string> given;
    for (const Bound& b : subs) {
      if (!b.sub->parsed()) continue;
      cfg.command = b.sub->get_name();
      for (const auto& [key, opt] : b.opts)
        if (opt->count() > 0) given.push_back(key);
    }
    auto has = [&](const char* k) { return std::find(given.begin(), given.end(), k) != given.end(); };
    if (has("integrand")) cfg.integrand = f.integrand;
    if (has("seed")) cfg.seed = f.seed;
    if (has("out")) cfg.out = f.out;
    if (has("grid")) cfg.grids = f.grid;
    if (has("nosc")) cfg.n_osc = f.nosc;
    if (has("tol")) cfg.tol = f.tol;
    if (has("levels")) cfg.levels = f.levels;
    if (has("map")) cfg.map = f.map;
    if (has("samples")) cfg.samples = f.samples;
    if (has("sweep")) cfg.sweep = f.sweep;
    if (has("measures")) cfg.measures = f.measures;
    if (has("lo")) cfg.lo = f.lo;
    if (has("hi")) cfg.hi = f.hi;
    if (has("hp-samples")) cfg.hp_samples = f.hp_samples;
    if (!f.config.empty()) {
      try {
        rigid::apply_config(cfg, rigid::parse_config_text(read_file(f.config)), given);
      } catch (const rigid::ParseError& e) {
        throw rigid::ParseError(f.config + ": " + e.what());
      }
    }
    rigid::fill_defaults(cfg);

    const std::string text = rigid::run_experiment(cfg);
    if (cfg.out.empty()) {
      std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
      std::ofstream o(cfg.out, std::ios::binary);
      if (!o) throw rigid::ParseError("cannot write '" + cfg.out + "'");
      o << text;
    }
  } catch (const rigid::ParseError& e) {
    std::cerr << "rigidlab: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "rigidlab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "rigidlab: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
