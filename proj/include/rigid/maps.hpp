/// @file maps.hpp
/// @brief Built-in test maps R^2 -> R^2 with analytic gradients.
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rigid/core_algebra.hpp"
#include "rigid/error.hpp"
#include "rigid/grid.hpp"

namespace rigid {

struct TestMap {
  std::string name;
  std::function<Vec2(const Vec2&)> u;
  std::function<Mat2(const Vec2&)> du;
};

namespace maps {

inline TestMap affine(const Mat2& A) {
  return {"affine", [A](const Vec2& x) { return A * x; }, [A](const Vec2&) { return A; }};
}

/// Composition of two shears, (x1 + a sin(k x2), x2) followed by
/// (y1, y2 + b sin(k y1)); det Du = 1 everywhere.
inline TestMap shear(double a = 0.3, double b = 0.3, double k = 1.5) {
  auto first = [=](const Vec2& x) { return Vec2{x[0] + a * std::sin(k * x[1]), x[1]}; };
  return {"shear",
          [=](const Vec2& x) {
            const Vec2 y = first(x);
            return Vec2{y[0], y[1] + b * std::sin(k * y[0])};
          },
          [=](const Vec2& x) {
            const Vec2 y = first(x);
            const Mat2 D1{1.0, a * k * std::cos(k * x[1]), 0.0, 1.0};
            const Mat2 D2{1.0, 0.0, b * k * std::cos(k * y[0]), 1.0};
            return D2 * D1;
          }};
}

/// (x1, (1 + x1^2) x2); det Du = 1 + x1^2.
inline TestMap nonconst_det() {
  return {"nonconst-det", [](const Vec2& x) { return Vec2{x[0], (1.0 + x[0] * x[0]) * x[1]}; },
          [](const Vec2& x) { return Mat2{1.0, 0.0, 2.0 * x[0] * x[1], 1.0 + x[0] * x[0]}; }};
}

/// (x1, x1 x2); det Du = x1 changes sign across x1 = 0.
inline TestMap sign_change() {
  return {"signchange", [](const Vec2& x) { return Vec2{x[0], x[0] * x[1]}; },
          [](const Vec2& x) { return Mat2{1.0, 0.0, x[1], x[0]}; }};
}

/// "affine" (diag(2, 1/2)), "shear", "nonconst-det", "signchange".
inline TestMap by_name(const std::string& name) {
  if (name == "affine") return affine(Mat2{2.0, 0.0, 0.0, 0.5});
  if (name == "shear") return shear();
  if (name == "nonconst-det") return nonconst_det();
  if (name == "signchange") return sign_change();
  throw ParseError("unknown test map '" + name + "'");
}

inline bool is_builtin(const std::string& name) {
  return name == "affine" || name == "shear" || name == "nonconst-det" || name == "signchange";
}

}  // namespace maps

inline VecField sample_map(const TestMap& m, const GridSpec& g) { return sample<Vec2>(g, m.u); }
inline MatField sample_gradient_exact(const TestMap& m, const GridSpec& g) { return sample<Mat2>(g, m.du); }

}  // namespace rigid
