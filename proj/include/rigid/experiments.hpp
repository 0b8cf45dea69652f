/// @file experiments.hpp
/// @brief Batch experiments behind the rigidlab tool. Each run_* takes an
/// ExperimentConfig and returns the full CSV or JSON text; identical
/// configs give identical bytes.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigid/error.hpp"
#include "rigid/field_io.hpp"
#include "rigid/integrand.hpp"
#include "rigid/laminate.hpp"
#include "rigid/maps.hpp"
#include "rigid/pde.hpp"
#include "rigid/young.hpp"

namespace rigid {

struct ExperimentConfig {
  std::string command;
  std::string integrand = "quad";
  std::vector<int> n_osc;
  std::vector<int> grids;
  std::vector<double> levels;
  std::uint64_t seed = 1;
  std::string out;                ///< empty: stdout
  std::optional<double> tol;      ///< overrides the per-command tolerance
  std::string map;                ///< built-in name or field file path
  std::size_t samples = 1000000;  ///< Monte-Carlo points (laminate)
  int sweep = 1000;               ///< weight grid (moments)
  std::size_t measures = 10000;   ///< random measures (moments)
  double lo = -4.0, hi = 4.0;     ///< interval (hpcheck)
  int hp_samples = 801;
};

namespace detail {

inline std::string num(double x) {
  if (std::isnan(x)) return "nan";
  return fmt17(x);
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      if (!first) text_ += ',';
      text_ += c;
      first = false;
    }
    text_ += '\n';
  }
  template <class... Ts>
  void row(const Ts&... vs) {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += cell(vs), first = false), ...);
    text_ += '\n';
  }
  const std::string& str() const { return text_; }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  std::string text_;
};

inline void require_nonempty(bool ok, const char* what) {
  if (!ok) throw ParseError(std::string("empty ") + what + " list");
}

/// floor(log10 x) clamped to [lo, hi]; non-positive x maps to lo.
inline int decade(double x, int lo, int hi) {
  if (!(x > 0.0)) return lo;
  return std::clamp(static_cast<int>(std::floor(std::log10(x))), lo, hi);
}

}  // namespace detail

/// int |det Du - 1| over the annulus r0 <= |x| <= r1, split at the phase
/// radius so the collar gets its own angular resolution.
inline double laminate_l1_det_error(const LaminateMap& lam, double r0, double r1) {
  auto f = [&](const Vec2& x) { return std::abs(det(lam.gradient(x)) - 1.0); };
  const double rp = lam.phase_radius();
  double total = 0.0;
  if (r0 < rp) total += annulus_integral(f, r0, std::min(r1, rp), 64, 1024);
  if (r1 > rp) total += annulus_integral(f, std::max(r0, rp), r1, 64, 64 * lam.n_osc() + 1024);
  return total;
}

/// One row per n_osc: Monte-Carlo sup |u - Cx|, phase area fractions, the
/// largest |det Du - 1| seen on the phase region, and the L1 determinant
/// error over the disc (carried by the collar).
inline std::string run_laminate(const ExperimentConfig& cfg) {
  detail::require_nonempty(!cfg.n_osc.empty(), "n_osc");
  const LaminatePair pair = default_pair();
  std::mt19937_64 rng(cfg.seed);
  detail::Csv csv{"n_osc", "sup_deviation", "frac_A", "frac_B", "frac_other", "phase_det_error", "l1_det_error"};
  for (int n : cfg.n_osc) {
    const LaminateMap lam = build_laminate(pair, n);
    const LaminateSampleStats s = monte_carlo_stats(lam, cfg.samples, rng);
    csv.row(n, s.sup_deviation, s.frac_A, s.frac_B, s.frac_other, s.max_phase_det_error,
            laminate_l1_det_error(lam, 0.0, 1.0));
  }
  return csv.str();
}

/// Mean over the disc of the fiber residual of the lifted laminate, whose
/// gradient is (Du; g'(1) Du; h(1) J).
inline double lifted_mean_fiber_residual(const ConvexIntegrand& gi, const LaminateMap& lam) {
  const double g1 = gi.g1(1.0), h1 = h_eval(gi, 1.0);
  auto f = [&](const Vec2& x) {
    const Mat2 du = lam.gradient(x);
    return fiber_residual(gi, Stacked62{du, g1 * du, h1 * rotation_j()}).total;
  };
  const double rp = lam.phase_radius();
  const double collar = annulus_integral(f, rp, 1.0, 64, 64 * lam.n_osc() + 1024);
  return collar / std::numbers::pi;  // zero on the phase region
}

inline std::string run_rigidity(const ExperimentConfig& cfg) {
  detail::require_nonempty(!cfg.n_osc.empty(), "n_osc");
  const ConvexIntegrand gi = integrands::by_label(cfg.integrand);
  const LaminatePair pair = default_pair();
  detail::Csv csv{"n_osc", "l1_det_error", "interior_det_error", "mean_fiber_residual"};
  for (int n : cfg.n_osc) {
    const LaminateMap lam = build_laminate(pair, n);
    csv.row(n, laminate_l1_det_error(lam, 0.0, 1.0), laminate_l1_det_error(lam, 0.0, 0.5),
            lifted_mean_fiber_residual(gi, lam));
  }
  return csv.str();
}

inline nlohmann::ordered_json moments_json(const ExperimentConfig& cfg) {
  detail::require_nonempty(!cfg.levels.empty(), "levels");
  const ConvexIntegrand gi = integrands::by_label(cfg.integrand);
  const double tol = cfg.tol.value_or(1e-9);
  std::mt19937_64 rng(cfg.seed);

  nlohmann::ordered_json out;
  out["integrand"] = gi.label();
  out["grid"] = cfg.sweep;
  out["results"] = nlohmann::ordered_json::array();
  for (double level : cfg.levels) {
    nlohmann::ordered_json r;
    r["level"] = level;
    if (level == 0.0) {
      r["roots"] = {0.0};
      r["note"] = "single root t = 0; search skipped";
      out["results"].push_back(r);
      continue;
    }
    if (level < 0.0) {
      r["roots"] = nlohmann::ordered_json::array();
      r["error"] = "no fiber roots";
      out["results"].push_back(r);
      continue;
    }
    const TwoAtomResult res = two_atom_search(gi, level, cfg.sweep);
    const TwoAtomResult pert =
        two_atom_search(gi, level, cfg.sweep, perturbed_representatives(res.e1, res.e2, rng));
    r["e1"] = res.e1;
    r["e2"] = res.e2;
    r["discriminant"] = res.discriminant;
    r["admissible_t"] = res.admissible_t;
    r["admissible_t_perturbed"] = pert.admissible_t;

    // decades 1e-16 .. 1e2 of the polyconvexity gap along the sweep
    std::vector<int> hist(19, 0);
    const Stacked62 A1 = lift(gi, Mat2::diag({res.e1, 1.0})).value;
    const Stacked62 A2 = lift(gi, Mat2::diag({res.e2, 1.0})).value;
    for (int k = 1; k < cfg.sweep; ++k) {
      const double t = static_cast<double>(k) / cfg.sweep;
      const double gap = polyconvexity_gap(AtomicMeasure({A1, A2}, {t, 1.0 - t})).max_gap;
      ++hist[static_cast<std::size_t>(detail::decade(gap, -16, 2) + 16)];
    }
    r["max_gap_histogram"] = hist;
    out["results"].push_back(r);
  }

  std::size_t polyconvex = 0, single = 0, failures = 0;
  const MeasureKind kinds[] = {MeasureKind::single, MeasureKind::rank_one_chain, MeasureKind::mixed_det,
                               MeasureKind::random};
  for (std::size_t k = 0; k < cfg.measures; ++k) {
    const AtomicMeasure mu = random_lifted_measure(gi, kinds[k % 4], rng);
    const FiberSupport fs = fiber_support_check(gi, mu, tol);
    if (fs.polyconvex) ++polyconvex;
    if (fs.single_fiber) ++single;
    if (fs.violation) ++failures;
  }
  out["random_measures"] = {{"count", cfg.measures},
                            {"tol", tol},
                            {"polyconvex", polyconvex},
                            {"single_fiber", single},
                            {"violations", failures}};
  return out;
}

inline std::string run_moments(const ExperimentConfig& cfg) { return moments_json(cfg).dump(2) + "\n"; }

/// Resolves --map: a built-in name sampled on [-1, 1]^2 at each grid size,
/// or a single field file.
inline std::vector<VecField> resolve_map_inputs(const std::string& name, const std::vector<int>& grids) {
  std::vector<VecField> out;
  if (maps::is_builtin(name)) {
    detail::require_nonempty(!grids.empty(), "grid");
    const TestMap m = maps::by_name(name);
    for (int n : grids) out.push_back(sample_map(m, GridSpec::square(n)));
  } else {
    out.push_back(load_field<Vec2>(name));
  }
  return out;
}

inline std::string run_recover(const ExperimentConfig& cfg) {
  const auto inputs = resolve_map_inputs(cfg.map.empty() ? "shear" : cfg.map, cfg.grids);
  detail::Csv csv{"grid_n", "strong_l2", "weak_max", "beta_dev", "order_estimate"};
  double prev_dev = 0.0, prev_h = 0.0;
  for (const VecField& u : inputs) {
    const BetaRecovery rec = beta_recover(u);
    const MatField du = gradient_field(u);
    MatField bdu = du;
    for (std::size_t k = 0; k < bdu.values.size(); ++k) bdu.values[k] = rec.beta.values[k] * du.values[k];
    const CurlResidual cr = weak_curl_residual(bdu);
    const double dev = beta_deviation(rec.beta);
    const double order = prev_h > 0.0 && prev_dev > 0.0 && dev > 0.0
                             ? std::log(prev_dev / dev) / std::log(prev_h / u.grid.h)
                             : std::nan("");
    csv.row(u.grid.nx, cr.l2, cr.weak_max, dev, order);
    prev_dev = dev;
    prev_h = u.grid.h;
  }
  return csv.str();
}

inline std::string run_stationarity(const ExperimentConfig& cfg) {
  const ConvexIntegrand gi = integrands::by_label(cfg.integrand);
  const auto inputs = resolve_map_inputs(cfg.map.empty() ? "nonconst-det" : cfg.map, cfg.grids);
  detail::Csv csv{"grid_n", "grad_norm", "h_mean", "root_lo", "root_hi", "det_min", "det_max"};
  for (const VecField& u : inputs) {
    const Stationarity st = stationarity_check(gi, u);
    const auto [dlo, dhi] = det_range(gradient_field(u));
    const double lo = st.fiber.roots.empty() ? std::nan("") : st.fiber.roots.front();
    const double hi = st.fiber.roots.empty() ? std::nan("") : st.fiber.roots.back();
    csv.row(u.grid.nx, st.grad_norm, st.fiber.level, lo, hi, dlo, dhi);
  }
  return csv.str();
}

inline nlohmann::ordered_json hpcheck_json(const ExperimentConfig& cfg) {
  const ConvexIntegrand gi = integrands::by_label(cfg.integrand);
  const HpReport rep = hp_check(gi, cfg.lo, cfg.hi, cfg.hp_samples);
  nlohmann::ordered_json out;
  out["integrand"] = gi.label();
  out["interval"] = {cfg.lo, cfg.hi};
  out["samples"] = cfg.hp_samples;
  out["pass"] = rep.pass;
  out["witnesses"] = nlohmann::ordered_json::array();
  for (const HpWitness& w : rep.witnesses) out["witnesses"].push_back({{"t", w.t}, {"reason", w.reason}});
  return out;
}

inline std::string run_hpcheck(const ExperimentConfig& cfg) { return hpcheck_json(cfg).dump(2) + "\n"; }

inline std::string run_experiment(const ExperimentConfig& cfg) {
  integrands::by_label(cfg.integrand);  // reject unknown labels for every command
  if (cfg.command == "laminate") return run_laminate(cfg);
  if (cfg.command == "rigidity") return run_rigidity(cfg);
  if (cfg.command == "moments") return run_moments(cfg);
  if (cfg.command == "recover") return run_recover(cfg);
  if (cfg.command == "stationarity") return run_stationarity(cfg);
  if (cfg.command == "hpcheck") return run_hpcheck(cfg);
  throw ParseError("unknown command '" + cfg.command + "'");
}

struct ConfigEntry {
  int line = 0;
  std::string value;
};
using ConfigMap = std::map<std::string, ConfigEntry>;

/// key = value lines; '#' starts a comment. Errors name the line and key.
inline ConfigMap parse_config_text(std::string_view text) {
  ConfigMap kv;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int ln = 1; std::getline(in, line); ++ln) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(ln) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(ln) + ": empty key");
    if (kv.count(key)) throw ParseError("line " + std::to_string(ln) + ": duplicate key '" + key + "'");
    kv[key] = {ln, value};
  }
  return kv;
}

namespace detail {

template <class T>
T parse_scalar(const std::string& key, const std::string& s) {
  std::istringstream in(s);
  T v{};
  in >> v;
  if (!in || !(in >> std::ws).eof()) throw ParseError("field '" + key + "': cannot parse '" + s + "'");
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& s) {
  std::vector<T> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(parse_scalar<T>(key, item));
  return out;
}

}  // namespace detail

/// Applies file values to cfg. Keys already set on the command line
/// (listed in `explicit_keys`) are left alone.
inline void apply_config(ExperimentConfig& cfg, const ConfigMap& kv, const std::vector<std::string>& explicit_keys) {
  auto skip = [&](const std::string& k) {
    return std::find(explicit_keys.begin(), explicit_keys.end(), k) != explicit_keys.end();
  };
  for (const auto& [k, entry] : kv) {
    if (skip(k)) continue;
    const std::string& v = entry.value;
    try {
    if (k == "integrand") cfg.integrand = v;
    else if (k == "nosc") cfg.n_osc = detail::parse_list<int>(k, v);
    else if (k == "grid") cfg.grids = detail::parse_list<int>(k, v);
    else if (k == "levels") cfg.levels = detail::parse_list<double>(k, v);
    else if (k == "seed") cfg.seed = detail::parse_scalar<std::uint64_t>(k, v);
    else if (k == "out") cfg.out = v;
    else if (k == "tol") cfg.tol = detail::parse_scalar<double>(k, v);
    else if (k == "map") cfg.map = v;
    else if (k == "samples") cfg.samples = detail::parse_scalar<std::size_t>(k, v);
    else if (k == "sweep") cfg.sweep = detail::parse_scalar<int>(k, v);
    else if (k == "measures") cfg.measures = detail::parse_scalar<std::size_t>(k, v);
    else if (k == "lo") cfg.lo = detail::parse_scalar<double>(k, v);
    else if (k == "hi") cfg.hi = detail::parse_scalar<double>(k, v);
    else if (k == "hp-samples") cfg.hp_samples = detail::parse_scalar<int>(k, v);
    else throw ParseError("unknown key '" + k + "'");
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(entry.line) + ": " + e.what());
    }
  }
}

/// Per-command defaults for lists left empty.
inline void fill_defaults(ExperimentConfig& cfg) {
  if (cfg.n_osc.empty()) {
    if (cfg.command == "laminate") cfg.n_osc = {5, 10, 20};
    if (cfg.command == "rigidity") cfg.n_osc = {5, 10, 20, 40};
  }
  if (cfg.levels.empty() && cfg.command == "moments") cfg.levels = {0.25, 1.0, 4.0};
  if (cfg.grids.empty() && (cfg.command == "recover" || cfg.command == "stationarity")) cfg.grids = {32, 64, 128};
}

}  // namespace rigid
