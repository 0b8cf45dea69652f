/// @file integrand.hpp
/// @brief Convex integrands g with g(0) = g'(0) = 0 and g'' > 0, the inner
/// variation density h(t) = g'(t) t - g(t), and inversion of h on each
/// half-line.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rigid/error.hpp"

namespace rigid {

using ScalarFn = std::function<double(double)>;

/// Immutable (g, g', g'') bundle. Construction shifts g by an affine function
/// so that g(0) = g'(0) = 0 holds by construction; this never changes g''.
class ConvexIntegrand {
 public:
  ConvexIntegrand(ScalarFn g, ScalarFn g1, ScalarFn g2, std::string label)
      : label_(std::move(label)), g2_(std::move(g2)) {
    const double g0 = g(0.0);
    const double d0 = g1(0.0);
    if (!std::isfinite(g0) || !std::isfinite(d0)) throw Error("integrand '" + label_ + "': non-finite at 0");
    if (g0 == 0.0 && d0 == 0.0) {
      g_ = std::move(g);
      g1_ = std::move(g1);
    } else {
      g_ = [g = std::move(g), g0, d0](double t) { return g(t) - g0 - d0 * t; };
      g1_ = [g1 = std::move(g1), d0](double t) { return g1(t) - d0; };
    }
  }

  double g(double t) const { return g_(t); }
  double g1(double t) const { return g1_(t); }
  double g2(double t) const { return g2_(t); }
  const std::string& label() const { return label_; }

 private:
  std::string label_;
  ScalarFn g_, g1_, g2_;
};

namespace integrands {

/// g(t) = t^2
inline ConvexIntegrand quad() {
  return {[](double t) { return t * t; }, [](double t) { return 2.0 * t; }, [](double) { return 2.0; },
          "quad"};
}

/// g(t) = cosh(t) - 1, evaluated as 2 sinh^2(t/2) to keep precision near 0.
inline ConvexIntegrand cosh() {
  return {[](double t) {
            const double s = std::sinh(0.5 * t);
            return 2.0 * s * s;
          },
          [](double t) { return std::sinh(t); }, [](double t) { return std::cosh(t); }, "cosh"};
}

/// g(t) = t^2 + t^4 / 12
inline ConvexIntegrand quartic() {
  return {[](double t) { return t * t + t * t * t * t / 12.0; },
          [](double t) { return 2.0 * t + t * t * t / 3.0; }, [](double t) { return 2.0 + t * t; }, "quartic"};
}

/// g(t) = t^4. Fails strict convexity at 0; kept for exercising hp_check.
inline ConvexIntegrand quartic_pure() {
  return {[](double t) { return t * t * t * t; }, [](double t) { return 4.0 * t * t * t; },
          [](double t) { return 12.0 * t * t; }, "quartic-pure"};
}

/// Lookup by label: "quad", "cosh", "quartic", "quartic-pure".
inline ConvexIntegrand by_label(const std::string& label) {
  if (label == "quad") return quad();
  if (label == "cosh") return cosh();
  if (label == "quartic") return quartic();
  if (label == "quartic-pure") return quartic_pure();
  throw ParseError("unknown integrand '" + label + "'");
}

inline std::vector<std::string> builtin_labels() { return {"quad", "cosh", "quartic"}; }

}  // namespace integrands

struct HpWitness {
  double t;
  std::string reason;
};

struct HpReport {
  bool pass = true;
  std::vector<HpWitness> witnesses;
};

/// Sampling check of the integrand hypotheses on [lo, hi].
///
/// The hypotheses hold on all of R but only finitely many points can be
/// inspected: `samples` equispaced points (plus t = 0 when it lies inside
/// the interval) are tested for g'' > 0, and every interior sample for
/// agreement of g', g'' with central differences of g, g' (step 1e-5,
/// tolerance 1e-5). Passing is evidence, not proof.
inline HpReport hp_check(const ConvexIntegrand& gi, double lo, double hi, int samples) {
  if (!(lo < hi) || samples < 3) throw std::invalid_argument("hp_check: need lo < hi and samples >= 3");
  constexpr double kNormTol = 1e-14;
  constexpr double kEps = 1e-5;
  constexpr double kFdTol = 1e-5;

  auto checked = [](double v, double t) {
    if (!std::isfinite(v)) throw Error("hp_check: non-finite evaluation at t = " + std::to_string(t));
    return v;
  };
  auto g = [&](double t) { return checked(gi.g(t), t); };
  auto g1 = [&](double t) { return checked(gi.g1(t), t); };
  auto g2 = [&](double t) { return checked(gi.g2(t), t); };

  HpReport rep;
  auto fail = [&](double t, std::string why) {
    rep.pass = false;
    rep.witnesses.push_back({t, std::move(why)});
  };

  if (std::abs(g(0.0)) > kNormTol) fail(0.0, "g(0) != 0");
  if (std::abs(g1(0.0)) > kNormTol) fail(0.0, "g'(0) != 0");

  std::vector<double> ts;
  ts.reserve(static_cast<std::size_t>(samples) + 1);
  for (int k = 0; k < samples; ++k) ts.push_back(lo + (hi - lo) * k / (samples - 1));
  if (lo < 0.0 && 0.0 < hi && std::find(ts.begin(), ts.end(), 0.0) == ts.end()) {
    ts.push_back(0.0);
    std::sort(ts.begin(), ts.end());
  }

  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    if (!(g2(t) > 0.0)) fail(t, "g'' <= 0");
    if (k == 0 || k + 1 == ts.size()) continue;
    const double fd1 = (g(t + kEps) - g(t - kEps)) / (2.0 * kEps);
    const double fd2 = (g1(t + kEps) - g1(t - kEps)) / (2.0 * kEps);
    if (std::abs(g1(t) - fd1) > kFdTol) fail(t, "g' inconsistent with g");
    if (std::abs(g2(t) - fd2) > kFdTol) fail(t, "g'' inconsistent with g'");
  }
  return rep;
}

/// h(t) = g'(t) t - g(t).
inline double h_eval(const ConvexIntegrand& gi, double t) { return gi.g1(t) * t - gi.g(t); }

struct FiberRoots {
  double level = 0.0;
  std::vector<double> roots;  ///< ascending
};

/// Solves h(t) = level on [-bracket, bracket].
///
/// h' = g'' t, so h decreases on t < 0 and increases on t > 0 with h(0) = 0;
/// each half-line holds at most one root and bisection finds it.
/// Roots are accurate to |h(r) - level| <= 1e-12 or to floating-point
/// resolution of t, whichever comes first; at most 200 halvings.
inline FiberRoots h_inverse_fiber(const ConvexIntegrand& gi, double level, double bracket) {
  if (!(bracket > 0.0)) throw std::invalid_argument("h_inverse_fiber: bracket must be positive");
  FiberRoots out;
  out.level = level;
  if (level < 0.0) return out;
  if (level == 0.0) {
    out.roots = {0.0};
    return out;
  }
  if (h_eval(gi, bracket) < level || h_eval(gi, -bracket) < level) throw Error("bracket too small");

  auto bisect = [&](double inside, double outside) {
    // h(inside) < level <= h(outside)
    double mid = 0.5 * (inside + outside);
    for (int it = 0; it < 200; ++it) {
      mid = 0.5 * (inside + outside);
      if (mid == inside || mid == outside) break;
      const double r = h_eval(gi, mid) - level;
      if (std::abs(r) <= 1e-12) break;
      (r < 0.0 ? inside : outside) = mid;
    }
    return mid;
  };
  out.roots = {bisect(0.0, -bracket), bisect(0.0, bracket)};
  return out;
}

/// Smallest bracket of the form 2^k * start (start > 0) containing both
/// roots of h(t) = level. Throws once the bracket exceeds 1e6.
inline double fiber_bracket(const ConvexIntegrand& gi, double level, double start = 1.0) {
  double b = std::max(start, 1e-3);
  while (h_eval(gi, b) < level || h_eval(gi, -b) < level) {
    b *= 2.0;
    if (b > 1e6) throw Error("no fiber roots: h never reaches level");
  }
  return b;
}

/// Uniform convexity constant on [-L, L]: the minimum of g'' over 20001
/// equispaced samples (t = 0 included). Throws std::logic_error if the bound
/// g'(t) t >= alpha t^2 fails at any sample.
inline double convexity_gap(const ConvexIntegrand& gi, double L) {
  if (!(L > 0.0)) throw std::invalid_argument("convexity_gap: L must be positive");
  constexpr int kHalf = 10000;
  double alpha = std::numeric_limits<double>::infinity();
  for (int k = -kHalf; k <= kHalf; ++k) alpha = std::min(alpha, gi.g2(L * k / kHalf));
  for (int k = -kHalf; k <= kHalf; ++k) {
    const double t = L * k / kHalf;
    const double lhs = gi.g1(t) * t;
    const double rhs = alpha * t * t;
    if (lhs < rhs - 1e-12 * std::max(1.0, std::abs(rhs)))
      throw std::logic_error("convexity_gap: g'(t) t >= alpha t^2 violated");
  }
  return alpha;
}

}  // namespace rigid
