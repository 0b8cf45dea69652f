/// @file laminate.hpp
/// @brief Simple laminates between rank-one connected matrices of unit
/// determinant, cut off to the unit disc.
///
/// For a pair A, B with B - A = a (x) n and weight lambda, the map
///
///   u(x) = C x - a S(N x.n) / N * chi(|x|),   C = lambda A + (1 - lambda) B,
///
/// has Du in {A, B} wherever chi = 1. S is the 1-periodic continuous sawtooth
/// with slope (1 - lambda) on a lambda-fraction of each period (phase A) and
/// slope -lambda on the rest (phase B), shifted to zero mean so that
/// |S| <= lambda (1 - lambda) / 2. chi is the radial cutoff that equals 1 up
/// to radius 1 - 1/(4N) and falls linearly to 0 at radius 1. Inside that
/// collar Du is a Lipschitz interpolant and det Du is generally not 1.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include "rigid/core_algebra.hpp"
#include "rigid/error.hpp"
#include "rigid/grid.hpp"

namespace rigid {

struct LaminatePair {
  Mat2 A;
  Mat2 B;
  double lambda = 0.5;
  Vec2 a{0.0, 0.0};
  Vec2 n_dir{0.0, 1.0};  ///< unit; B - A = a (x) n_dir
  Mat2 C;                ///< lambda A + (1 - lambda) B
};

/// Validates det A = det B = 1 and rank(A - B) = 1.
/// Throws Error with "not rank-one connected", "determinants differ" or
/// "determinant not 1", checked in that order.
inline LaminatePair check_pair(const Mat2& A, const Mat2& B, double lambda = 0.5) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("check_pair: lambda must lie in (0, 1)");
  const RankGap gap = rank_one_gap(A, B);
  if (gap.rank != 1) throw Error("not rank-one connected");
  const double dA = det(A), dB = det(B);
  if (std::abs(dA - dB) > 1e-12) throw Error("determinants differ");
  if (std::abs(dA - 1.0) > 1e-12) throw Error("determinant not 1");
  LaminatePair p;
  p.A = A;
  p.B = B;
  p.lambda = lambda;
  p.a = gap.factors->a;
  p.n_dir = gap.factors->n;
  p.C = lambda * A + (1.0 - lambda) * B;
  return p;
}

/// The default pair Id / [[1, 1], [0, 1]] with lambda = 1/2.
inline LaminatePair default_pair() { return check_pair(Mat2::identity(), Mat2{1.0, 1.0, 0.0, 1.0}, 0.5); }

enum class Phase { A, B, Collar, Outside };

class LaminateMap {
 public:
  LaminateMap(const LaminatePair& pair, int n_osc) : pair_(pair), n_(n_osc), collar_(0.25 / n_osc) {}

  const LaminatePair& pair() const { return pair_; }
  int n_osc() const { return n_; }
  double collar() const { return collar_; }
  double phase_radius() const { return 1.0 - collar_; }

  /// Fractional position within the current sawtooth period.
  double period_fraction(const Vec2& x) const {
    const double t = n_ * dot(x, pair_.n_dir);
    return t - std::floor(t);
  }

  double saw(double frac) const {
    const double l = pair_.lambda;
    const double s = frac < l ? (1.0 - l) * frac : l * (1.0 - frac);
    return s - 0.5 * l * (1.0 - l);
  }
  double saw_slope(double frac) const { return frac < pair_.lambda ? 1.0 - pair_.lambda : -pair_.lambda; }

  double cutoff(double r) const { return std::clamp((1.0 - r) / collar_, 0.0, 1.0); }

  Phase phase(const Vec2& x) const {
    const double r = norm(x);
    if (r > 1.0) return Phase::Outside;
    if (r > phase_radius()) return Phase::Collar;
    return period_fraction(x) < pair_.lambda ? Phase::A : Phase::B;
  }

  Vec2 value(const Vec2& x) const {
    const double amp = saw(period_fraction(x)) / n_ * cutoff(norm(x));
    return pair_.C * x - amp * pair_.a;
  }

  /// Analytic gradient. Exactly A or B on the phase region, C outside the
  /// disc; on strip interfaces the phase to the right of the kink is used.
  Mat2 gradient(const Vec2& x) const {
    const double r = norm(x);
    if (r > 1.0) return pair_.C;
    const double frac = period_fraction(x);
    if (r <= phase_radius()) return frac < pair_.lambda ? pair_.A : pair_.B;
    const double chi = cutoff(r);
    const double dchi = -1.0 / collar_;
    const Vec2 v = (saw_slope(frac) * chi) * pair_.n_dir + (saw(frac) / n_ * dchi / r) * x;
    return pair_.C - outer(pair_.a, v);
  }

 private:
  LaminatePair pair_;
  int n_;
  double collar_;
};

/// Requires the shear condition a . n = 0 (within 1e-12).
inline LaminateMap build_laminate(const LaminatePair& pair, int n_osc) {
  if (n_osc < 1) throw std::invalid_argument("build_laminate: n_osc must be >= 1");
  if (std::abs(dot(pair.a, pair.n_dir)) > 1e-12) throw Error("pair not shear-type");
  return LaminateMap(pair, n_osc);
}

/// Du on the cell centres of a grid_n x grid_n partition of [-1, 1]^2,
/// masked to centres inside the unit disc. Cells lying inside the phase
/// region without a sawtooth kink get the analytic gradient (exactly A or B);
/// collar cells and interface cells get the cell-face difference quotient,
/// which mixes phases across a kink.
inline MatField sample_gradient(const LaminateMap& lam, int grid_n) {
  if (grid_n < 8) throw std::invalid_argument("sample_gradient: grid_n must be >= 8");
  const double hc = 2.0 / grid_n;
  GridSpec g{grid_n, grid_n, hc, {-1.0 + 0.5 * hc, -1.0 + 0.5 * hc}};
  MatField out(g);
  out.mask.assign(g.count(), 0);

  const Vec2 n = lam.pair().n_dir;
  const double half_extent = 0.5 * hc * (std::abs(n[0]) + std::abs(n[1]));
  const double lambda = lam.pair().lambda;
  auto has_kink = [&](const Vec2& x) {
    const double t = lam.n_osc() * dot(x, n);
    const double w = lam.n_osc() * half_extent;
    const double lo = t - w * (1.0 - 1e-9), hi = t + w * (1.0 - 1e-9);
    for (double k = std::floor(lo); k <= hi; k += 1.0)
      for (double q : {k, k + lambda})
        if (lo < q && q < hi) return true;
    return false;
  };

  for (int j = 0; j < grid_n; ++j)
    for (int i = 0; i < grid_n; ++i) {
      const Vec2 x = g.node(i, j);
      const double r = norm(x);
      if (r >= 1.0) continue;
      out.mask[g.index(i, j)] = 1;
      const bool interior = r + hc * std::numbers::sqrt2 / 2.0 <= lam.phase_radius();
      if (interior && !has_kink(x)) {
        out.at(i, j) = lam.gradient(x);
        continue;
      }
      const double e = 0.5 * hc;
      const Vec2 dx = (1.0 / hc) * (lam.value({x[0] + e, x[1]}) - lam.value({x[0] - e, x[1]}));
      const Vec2 dy = (1.0 / hc) * (lam.value({x[0], x[1] + e}) - lam.value({x[0], x[1] - e}));
      out.at(i, j) = Mat2{dx[0], dy[0], dx[1], dy[1]};
    }
  return out;
}

struct PhaseStats {
  double frac_A = 0.0;
  double frac_B = 0.0;
  double frac_other = 0.0;
};

/// Fractions of active nodes whose value lies within tol (Frobenius) of A,
/// of B, or of neither. A takes precedence if both match.
inline PhaseStats phase_statistics(const MatField& field, const Mat2& A, const Mat2& B, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("phase_statistics: tol must be positive");
  std::size_t na = 0, nb = 0, total = 0;
  for (int j = 0; j < field.grid.ny; ++j)
    for (int i = 0; i < field.grid.nx; ++i) {
      if (!field.active(i, j)) continue;
      ++total;
      const Mat2& m = field.at(i, j);
      if (frobenius(m - A) <= tol)
        ++na;
      else if (frobenius(m - B) <= tol)
        ++nb;
    }
  if (total == 0) throw Error("phase_statistics: empty field");
  PhaseStats s;
  s.frac_A = static_cast<double>(na) / total;
  s.frac_B = static_cast<double>(nb) / total;
  s.frac_other = static_cast<double>(total - na - nb) / total;
  return s;
}

/// Monte-Carlo statistics over points drawn uniformly in the unit disc.
struct LaminateSampleStats {
  std::size_t samples = 0;
  double sup_deviation = 0.0;     ///< max |u(x) - C x|
  double frac_A = 0.0;            ///< fraction with Du = A
  double frac_B = 0.0;            ///< fraction with Du = B
  double frac_other = 0.0;        ///< collar points
  double max_phase_det_error = 0.0;  ///< max |det Du - 1| over phase-region samples
};

inline LaminateSampleStats monte_carlo_stats(const LaminateMap& lam, std::size_t samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  LaminateSampleStats s;
  s.samples = samples;
  std::size_t na = 0, nb = 0;
  for (std::size_t k = 0; k < samples;) {
    const Vec2 x{unit(rng), unit(rng)};
    if (dot(x, x) >= 1.0) continue;
    ++k;
    s.sup_deviation = std::max(s.sup_deviation, norm(lam.value(x) - lam.pair().C * x));
    const Phase p = lam.phase(x);
    if (p == Phase::A || p == Phase::B) {
      (p == Phase::A ? na : nb) += 1;
      s.max_phase_det_error = std::max(s.max_phase_det_error, std::abs(det(lam.gradient(x)) - 1.0));
    }
  }
  s.frac_A = static_cast<double>(na) / samples;
  s.frac_B = static_cast<double>(nb) / samples;
  s.frac_other = 1.0 - s.frac_A - s.frac_B;
  return s;
}

/// Midpoint rule in polar coordinates over the annulus r0 <= |x| <= r1.
template <class F>
double annulus_integral(F&& f, double r0, double r1, int nr, int ntheta) {
  const double dr = (r1 - r0) / nr;
  const double dt = 2.0 * std::numbers::pi / ntheta;
  double sum = 0.0;
  for (int k = 0; k < nr; ++k) {
    const double r = r0 + (k + 0.5) * dr;
    double ring = 0.0;
    for (int m = 0; m < ntheta; ++m) {
      const double t = (m + 0.5) * dt;
      ring += f(Vec2{r * std::cos(t), r * std::sin(t)});
    }
    sum += ring * r;
  }
  return sum * dr * dt;
}

/// Midpoint rule on an n x n partition of [-1, 1]^2 restricted to centres
/// inside the unit disc.
template <class F>
double disc_integral(F&& f, int n) {
  const double hc = 2.0 / n;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double y = -1.0 + (j + 0.5) * hc;
    for (int i = 0; i < n; ++i) {
      const double x = -1.0 + (i + 0.5) * hc;
      if (x * x + y * y < 1.0) sum += f(Vec2{x, y});
    }
  }
  return sum * hc * hc;
}

/// Frobenius norm of the matrix integral of phi (Du - C) over the disc with
/// phi(x) = (1 - |x|^2)^2, evaluated as - int (u - C x) (x) grad phi (u is
/// Lipschitz and phi vanishes on the circle).
inline double weak_deviation(const LaminateMap& lam, int resolution = 1600) {
  const Mat2& C = lam.pair().C;
  std::array<double, 4> acc{};
  for (std::size_t c = 0; c < 4; ++c) {
    acc[c] = disc_integral(
        [&](const Vec2& x) {
          const Vec2 d = lam.value(x) - C * x;
          const double w = -4.0 * (1.0 - dot(x, x));  // grad phi = w x
          return -d[c / 2] * w * x[c % 2];
        },
        resolution);
  }
  return std::sqrt(acc[0] * acc[0] + acc[1] * acc[1] + acc[2] * acc[2] + acc[3] * acc[3]);
}

/// Upper bound K with weak_deviation <= K / n_osc: sup |u - C x| times
/// int |grad phi| = 16 pi / 15.
inline double weak_deviation_bound_constant(const LaminatePair& p) {
  return norm(p.a) * p.lambda * (1.0 - p.lambda) / 2.0 * 16.0 * std::numbers::pi / 15.0;
}

/// int over the disc of |Du - C| (Frobenius).
inline double strong_deviation(const LaminateMap& lam, int resolution = 1600) {
  return disc_integral([&](const Vec2& x) { return frobenius(lam.gradient(x) - lam.pair().C); }, resolution);
}

}  // namespace rigid
