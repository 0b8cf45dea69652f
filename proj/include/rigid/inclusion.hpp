/// @file inclusion.hpp
/// @brief Lifts of 2x2 matrices into the stationary inclusion set
///   K_stat = { (X; g'(det X) X; h(det X) J) }
/// and its 4x2 counterpart K = { (X; g'(det X) X) }, plus computable
/// membership surrogates.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <random>

#include "rigid/core_algebra.hpp"
#include "rigid/integrand.hpp"

namespace rigid {

struct LiftedMatrix {
  Stacked62 value;
  Mat2 source;
  double det_source = 0.0;
};

struct Stacked42 {
  Mat2 top;
  Mat2 mid;
};

/// (X; g'(det X) X; h(det X) J)
inline LiftedMatrix lift(const ConvexIntegrand& gi, const Mat2& X) {
  const double d = det(X);
  return {{X, gi.g1(d) * X, h_eval(gi, d) * rotation_j()}, X, d};
}

/// (X; g'(det X) X)
inline Stacked42 lift4(const ConvexIntegrand& gi, const Mat2& X) { return {X, gi.g1(det(X)) * X}; }

/// Block-wise distance from A to the point of K_stat lying over A.top.
/// Zero exactly on K_stat; it is an upper bound for, not equal to, the
/// Euclidean distance to K_stat.
struct FiberResidual {
  double r_mid = 0.0;
  double r_bot = 0.0;
  double total = 0.0;
};

inline FiberResidual fiber_residual(const ConvexIntegrand& gi, const Stacked62& A) {
  const double d = det(A.top);
  FiberResidual r;
  r.r_mid = frobenius(A.mid - gi.g1(d) * A.top);
  r.r_bot = frobenius(A.bot - h_eval(gi, d) * rotation_j());
  r.total = r.r_mid + r.r_bot;
  return r;
}

namespace detail {

/// Derivative-free coordinate search for min_X |A - lift(X)|_F.
/// Step starts at 0.5 and is halved 40 times once no coordinate move helps.
inline double coordinate_descent(const ConvexIntegrand& gi, const Stacked62& A, Mat2 X) {
  auto objective = [&](const Mat2& Y) { return frobenius(A - lift(gi, Y).value); };
  double best = objective(X);
  double step = 0.5;
  for (int shrink = 0; shrink <= 40; ++shrink, step *= 0.5) {
    for (int sweep = 0; sweep < 200; ++sweep) {
      bool improved = false;
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
          for (double dir : {1.0, -1.0}) {
            Mat2 Y = X;
            Y(i, j) += dir * step;
            const double v = objective(Y);
            if (v < best) {
              best = v;
              X = Y;
              improved = true;
            }
          }
      if (!improved) break;
    }
  }
  return best;
}

}  // namespace detail

/// Upper estimate of dist(A, K_stat): the best of `multistart` local
/// searches, the first started at A.top, the others at A.top plus a uniform
/// [-1, 1] perturbation per entry scaled by (1 + |A.top|). Perturbation k is
/// the k-th draw of one generator seeded with `seed`, so the estimate is
/// nonincreasing in `multistart`.
inline double distance_estimate(const ConvexIntegrand& gi, const Stacked62& A, int multistart,
                                std::uint64_t seed = 0) {
  if (multistart < 1) throw std::invalid_argument("distance_estimate: multistart must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double scale = 1.0 + frobenius(A.top);
  const double upper = frobenius(A - lift(gi, A.top).value);
  double best = std::min(upper, detail::coordinate_descent(gi, A, A.top));
  for (int k = 1; k < multistart; ++k) {
    Mat2 X = A.top;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) X(i, j) += scale * unit(rng);
    best = std::min(best, detail::coordinate_descent(gi, A, X));
  }
  return best;
}

}  // namespace rigid
