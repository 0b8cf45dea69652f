/// @file young.hpp
/// @brief Finitely supported probability measures on 6x2 matrices, their
/// minor moments, and the rigidity of measures that commute with all 2x2
/// minors when supported on the stationary inclusion set.
///
/// A measure mu is polyconvex when <mu, det_ij> = det_ij(<mu, id>) for all
/// 15 row pairs. For atoms on K_stat the 5-6 block is h(d) J, so polyconvexity
/// forces h(det) to be constant on the support; h takes every positive value
/// exactly twice (e1 < 0 < e2), and the moment relations of rows 1-4 then
/// rule out mixing the two roots. The result is that the top-block
/// determinant is constant on the support.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rigid/core_algebra.hpp"
#include "rigid/inclusion.hpp"
#include "rigid/integrand.hpp"

namespace rigid {

class AtomicMeasure {
 public:
  /// Weights must be >= 0 and sum to 1 within 1e-12; atoms must be pairwise
  /// distinct. Zero-weight atoms are kept.
  AtomicMeasure(std::vector<Stacked62> atoms, std::vector<double> weights)
      : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.empty() || atoms_.size() != weights_.size())
      throw std::invalid_argument("AtomicMeasure: need matching non-empty atoms and weights");
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("AtomicMeasure: negative weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("AtomicMeasure: weights must sum to 1");
    for (std::size_t k = 0; k < atoms_.size(); ++k)
      for (std::size_t l = k + 1; l < atoms_.size(); ++l)
        if (atoms_[k] == atoms_[l]) throw std::invalid_argument("AtomicMeasure: repeated atom");
  }

  static AtomicMeasure dirac(const Stacked62& a) { return AtomicMeasure({a}, {1.0}); }

  std::size_t size() const { return atoms_.size(); }
  const std::vector<Stacked62>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<Stacked62> atoms_;
  std::vector<double> weights_;
};

/// <mu, id>
inline Stacked62 barycenter(const AtomicMeasure& mu) {
  Stacked62 m{};
  for (std::size_t k = 0; k < mu.size(); ++k) m += mu.weights()[k] * mu.atoms()[k];
  return m;
}

/// <mu, det_ij>
inline double minor_moment(const AtomicMeasure& mu, const MinorIndex& idx) {
  double s = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) s += mu.weights()[k] * minor_det(mu.atoms()[k], idx);
  return s;
}

struct MomentReport {
  Stacked62 barycenter;
  std::array<double, 15> minor_gaps{};     ///< |<mu, det_ij> - det_ij(<mu, id>)|
  std::array<double, 15> pairwise_gaps{};  ///< |int int det_ij(Y1 - Y2) dmu dmu|
  double max_gap = 0.0;
};

/// Both gap families, indexed by MinorIndex::ordinal(). Since det_ij is a
/// quadratic form, pairwise_gaps = 2 * minor_gaps up to rounding.
inline MomentReport polyconvexity_gap(const AtomicMeasure& mu) {
  MomentReport r;
  r.barycenter = barycenter(mu);
  for (const MinorIndex& idx : MinorIndex::all()) {
    const std::size_t o = idx.ordinal();
    r.minor_gaps[o] = std::abs(minor_moment(mu, idx) - minor_det(r.barycenter, idx));
    double pair = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k)
      for (std::size_t l = 0; l < mu.size(); ++l)
        pair += mu.weights()[k] * mu.weights()[l] * minor_det(mu.atoms()[k] - mu.atoms()[l], idx);
    r.pairwise_gaps[o] = std::abs(pair);
    r.max_gap = std::max({r.max_gap, r.minor_gaps[o], r.pairwise_gaps[o]});
  }
  return r;
}

struct FiberSupport {
  bool on_set = false;        ///< every atom within tol of K_stat (fiber residual)
  bool polyconvex = false;    ///< max_gap <= tol
  bool single_fiber = false;  ///< on_set and all top determinants agree within tol
  std::optional<double> D;    ///< common determinant when single_fiber
  double max_gap = 0.0;
  /// on_set && polyconvex && !single_fiber: a counterexample to the
  /// rigidity statement. Never expected.
  bool violation = false;
};

inline FiberSupport fiber_support_check(const ConvexIntegrand& gi, const AtomicMeasure& mu, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("fiber_support_check: tol must be positive");
  FiberSupport out;
  out.on_set = std::all_of(mu.atoms().begin(), mu.atoms().end(),
                           [&](const Stacked62& a) { return fiber_residual(gi, a).total <= tol; });
  out.max_gap = polyconvexity_gap(mu).max_gap;
  out.polyconvex = out.max_gap <= tol;
  if (out.on_set) {
    double lo = det(mu.atoms().front().top), hi = lo, mean = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      const double d = det(mu.atoms()[k].top);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      mean += mu.weights()[k] * d;
    }
    out.single_fiber = hi - lo <= tol;
    if (out.single_fiber) out.D = mean;
  }
  out.violation = out.on_set && out.polyconvex && !out.single_fiber;
  return out;
}

/// Top-block representatives for the two determinant values of a two-atom
/// measure. Only rows 1-4 of the lifted atoms enter the relations tested by
/// two_atom_search.
struct Representatives {
  Mat2 X1;  ///< det X1 = e1
  Mat2 X2;  ///< det X2 = e2
};

/// X_k = diag(e_k, 1).
inline Representatives canonical_representatives(double e1, double e2) {
  return {Mat2::diag({e1, 1.0}), Mat2::diag({e2, 1.0})};
}

/// diag(e_k, 1) composed with independent random determinant-preserving
/// shears Id + s a (x) n (a . n = 0) on the right.
inline Representatives perturbed_representatives(double e1, double e2, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto shear = [&] {
    const double th = std::numbers::pi * unit(rng);
    const Vec2 n{std::cos(th), std::sin(th)};
    const Vec2 a{-n[1], n[0]};
    return Mat2::identity() + unit(rng) * outer(a, n);
  };
  const auto c = canonical_representatives(e1, e2);
  return {c.X1 * shear(), c.X2 * shear()};
}

struct TwoAtomCandidate {
  double t = 0.0;         ///< weight on the e1 atom
  double residual = 0.0;  ///< largest scaled violation among the relations
  bool admissible = false;
};

struct TwoAtomResult {
  double level = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double discriminant = 0.0;  ///< (g'(e1) - g'(e2))^2
  std::vector<double> admissible_t;
  std::vector<TwoAtomCandidate> sweep;
};

/// Sweeps the weight t in {0, 1/grid, ..., 1} of a measure
///   t delta_{lift(X1)} + (1 - t) delta_{lift(X2)},  det X1 = e1 < 0 < e2 = det X2,
/// with h(e1) = h(e2) = level, and keeps the t for which the moment system of
/// a polyconvex measure has a solution. With m = t e1 + s e2,
/// I = t g'(e1) e1 + s g'(e2) e2 and L = t g'(e1)^2 e1 + s g'(e2)^2 e2:
///   det_12(M) = m,  det_13(M) = det_24(M) = 0,
///   det_14(M) = I,  det_23(M) = -I,  det_34(M) = L,
///   lambda = I / m with L = lambda^2 m  (m = 0 is inconsistent since I > 0),
/// where M is the barycentre. Each relation is tested with relative
/// tolerance 1e-9.
inline TwoAtomResult two_atom_search(const ConvexIntegrand& gi, double level, int grid,
                                     const std::optional<Representatives>& reps = std::nullopt) {
  if (!(level > 0.0)) throw std::invalid_argument("two_atom_search: level must be positive");
  if (grid < 10) throw std::invalid_argument("two_atom_search: grid must be >= 10");
  const FiberRoots fr = h_inverse_fiber(gi, level, fiber_bracket(gi, level));
  if (fr.roots.size() != 2) throw Error("no fiber roots");

  TwoAtomResult out;
  out.level = level;
  out.e1 = fr.roots[0];
  out.e2 = fr.roots[1];
  const double gp1 = gi.g1(out.e1), gp2 = gi.g1(out.e2);
  out.discriminant = (gp1 - gp2) * (gp1 - gp2);

  const Representatives R = reps.value_or(canonical_representatives(out.e1, out.e2));
  const Stacked62 A1 = lift(gi, R.X1).value;
  const Stacked62 A2 = lift(gi, R.X2).value;

  constexpr double kTol = 1e-9;
  auto scaled = [](double lhs, double rhs) { return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}); };

  for (int k = 0; k <= grid; ++k) {
    const double t = static_cast<double>(k) / grid;
    const double s = 1.0 - t;
    std::vector<Stacked62> atoms;
    std::vector<double> w;
    if (t > 0.0) {
      atoms.push_back(A1);
      w.push_back(t);
    }
    if (s > 0.0) {
      atoms.push_back(A2);
      w.push_back(s);
    }
    const Stacked62 M = barycenter(AtomicMeasure(atoms, w));

    const double m = t * out.e1 + s * out.e2;
    const double I = t * gp1 * out.e1 + s * gp2 * out.e2;
    const double L = t * gp1 * gp1 * out.e1 + s * gp2 * gp2 * out.e2;
    auto D = [&](int i, int j) { return minor_det(M, MinorIndex(i, j)); };

    double res = std::max({scaled(D(1, 2), m), scaled(D(1, 3), 0.0), scaled(D(2, 4), 0.0), scaled(D(1, 4), I),
                           scaled(D(2, 3), -I), scaled(D(3, 4), L)});
    if (m == 0.0) {
      res = std::max(res, 1.0);
    } else {
      const double lam = I / m;
      res = std::max(res, scaled(L, lam * lam * m));
    }
    const bool ok = res <= kTol;
    out.sweep.push_back({t, res, ok});
    if (ok) out.admissible_t.push_back(t);
  }
  return out;
}

enum class MeasureKind { single, rank_one_chain, mixed_det, random };

/// Random measure with up to 4 atoms on K_stat.
///   single:         one atom.
///   rank_one_chain: lifts of X + s_k a (x) n with a . (cof_t(X) n) = 0, so
///                   all atoms share det X and differ by rank-one matrices;
///                   polyconvex by construction.
///   mixed_det:      two atoms lift(X), lift(X + s a (x) n) with generic a,
///                   hence different determinants.
///   random:         independent random sources.
/// Source entries are uniform in [-2, 2]; weights are normalized uniforms.
inline AtomicMeasure random_lifted_measure(const ConvexIntegrand& gi, MeasureKind kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ent(-2.0, 2.0), unit(0.05, 1.0);
  std::uniform_int_distribution<int> count(2, 4);
  auto mat = [&] { return Mat2{ent(rng), ent(rng), ent(rng), ent(rng)}; };
  auto weights = [&](std::size_t k) {
    std::vector<double> w(k);
    double sum = 0.0;
    for (double& v : w) sum += (v = unit(rng));
    for (double& v : w) v /= sum;
    // absorb rounding so the sum passes the 1e-12 check
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < k; ++i) rest -= w[i];
    w.back() = rest;
    return w;
  };
  auto lifted = [&](const std::vector<Mat2>& xs) {
    std::vector<Stacked62> atoms;
    for (const Mat2& x : xs) atoms.push_back(lift(gi, x).value);
    return AtomicMeasure(atoms, weights(atoms.size()));
  };

  const Mat2 X = mat();
  const double th = std::numbers::pi * ent(rng) / 2.0;
  const Vec2 n{std::cos(th), std::sin(th)};
  switch (kind) {
    case MeasureKind::single:
      return AtomicMeasure::dirac(lift(gi, X).value);
    case MeasureKind::rank_one_chain: {
      const Vec2 c = cof_t(X) * n;
      Vec2 a{-c[1], c[0]};
      if (norm(a) < 1e-8) a = {-n[1], n[0]};
      const int k = count(rng);
      std::vector<Mat2> xs{X};
      for (int i = 1; i < k; ++i) xs.push_back(X + (static_cast<double>(i) * (0.25 + unit(rng))) * outer(a, n));
      return lifted(xs);
    }
    case MeasureKind::mixed_det:
      return lifted({X, X + outer(Vec2{ent(rng), ent(rng)}, n)});
    case MeasureKind::random:
      break;
  }
  std::vector<Mat2> xs;
  for (int i = 0, k = count(rng); i < k; ++i) xs.push_back(mat());
  return lifted(xs);
}

}  // namespace rigid
