/// @file pde.hpp
/// @brief Grid probes of the constancy results for curl(beta Du) = 0:
/// discrete gradients, strong and weak curl residuals, least-squares
/// recovery of beta, the inner-variation (stationarity) check and tracing of
/// level curves.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "rigid/core_algebra.hpp"
#include "rigid/error.hpp"
#include "rigid/grid.hpp"
#include "rigid/integrand.hpp"
#include "rigid/lsq.hpp"

namespace rigid {

namespace detail {

/// d/dx and d/dy of a nodal quantity: centred in the interior, one-sided
/// second order at the boundary.
template <class T, class Get>
double diff_x(const GridField<T>& f, int i, int j, Get&& get) {
  const int n = f.grid.nx;
  const double h = f.grid.h;
  if (i == 0) return (-3.0 * get(f.at(0, j)) + 4.0 * get(f.at(1, j)) - get(f.at(2, j))) / (2.0 * h);
  if (i == n - 1) return (3.0 * get(f.at(n - 1, j)) - 4.0 * get(f.at(n - 2, j)) + get(f.at(n - 3, j))) / (2.0 * h);
  return (get(f.at(i + 1, j)) - get(f.at(i - 1, j))) / (2.0 * h);
}

template <class T, class Get>
double diff_y(const GridField<T>& f, int i, int j, Get&& get) {
  const int n = f.grid.ny;
  const double h = f.grid.h;
  if (j == 0) return (-3.0 * get(f.at(i, 0)) + 4.0 * get(f.at(i, 1)) - get(f.at(i, 2))) / (2.0 * h);
  if (j == n - 1) return (3.0 * get(f.at(i, n - 1)) - 4.0 * get(f.at(i, n - 2)) + get(f.at(i, n - 3))) / (2.0 * h);
  return (get(f.at(i, j + 1)) - get(f.at(i, j - 1))) / (2.0 * h);
}

}  // namespace detail

/// Du with rows grad u_1, grad u_2.
inline MatField gradient_field(const VecField& u) {
  u.grid.validate();
  MatField du(u.grid);
  du.mask = u.mask;
  auto c0 = [](const Vec2& v) { return v[0]; };
  auto c1 = [](const Vec2& v) { return v[1]; };
  for (int j = 0; j < u.grid.ny; ++j)
    for (int i = 0; i < u.grid.nx; ++i)
      du.at(i, j) = Mat2{detail::diff_x(u, i, j, c0), detail::diff_y(u, i, j, c0), detail::diff_x(u, i, j, c1),
                         detail::diff_y(u, i, j, c1)};
  return du;
}

/// Gradient of a scalar field, same stencils as gradient_field.
inline VecField scalar_gradient(const ScalarField& f) {
  f.grid.validate();
  VecField g(f.grid);
  g.mask = f.mask;
  auto id = [](double v) { return v; };
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) g.at(i, j) = {detail::diff_x(f, i, j, id), detail::diff_y(f, i, j, id)};
  return g;
}

/// Compactly supported test function prod_d (1 - ((x_d - c_d)/rho)^2)^4.
struct Bump {
  Vec2 center;
  double radius;

  static double profile(double s) { return std::abs(s) < 1.0 ? std::pow(1.0 - s * s, 4) : 0.0; }
  static double dprofile(double s) { return std::abs(s) < 1.0 ? -8.0 * s * std::pow(1.0 - s * s, 3) : 0.0; }

  double value(const Vec2& x) const {
    return profile((x[0] - center[0]) / radius) * profile((x[1] - center[1]) / radius);
  }
  Vec2 gradient(const Vec2& x) const {
    const double sx = (x[0] - center[0]) / radius, sy = (x[1] - center[1]) / radius;
    return {dprofile(sx) * profile(sy) / radius, profile(sx) * dprofile(sy) / radius};
  }
};

/// The 3 x 3 family: centres at 1/4, 1/2, 3/4 of each side, radius a quarter
/// of the shorter side.
inline std::vector<Bump> bump_family(const GridSpec& g) {
  std::vector<Bump> out;
  const double rho = 0.25 * std::min(g.width(), g.height());
  for (double fy : {0.25, 0.5, 0.75})
    for (double fx : {0.25, 0.5, 0.75})
      out.push_back({{g.origin[0] + fx * g.width(), g.origin[1] + fy * g.height()}, rho});
  return out;
}

struct WeakCurlEntry {
  int bump = 0;
  int row = 0;  ///< 0 or 1
  double value = 0.0;
};

struct CurlResidual {
  std::array<ScalarField, 2> strong;  ///< per row, zero on boundary and masked nodes
  std::vector<WeakCurlEntry> weak;
  double l2 = 0.0;        ///< sqrt(sum_rows sum_nodes r^2 h^2) over interior nodes
  double linf = 0.0;      ///< max |strong|
  double weak_max = 0.0;  ///< max |weak value|
};

/// Row-wise curl of a matrix field, d1 M_{i2} - d2 M_{i1}.
///
/// Strong residual: centred differences at interior nodes whose four
/// neighbours are active. Weak residual: node quadrature of
/// int (M_{i1} d2 phi - M_{i2} d1 phi) for each bump; bumps whose support
/// reaches an inactive node are skipped.
inline CurlResidual weak_curl_residual(const MatField& M) {
  const GridSpec& g = M.grid;
  g.validate();
  CurlResidual out;
  for (auto& s : out.strong) {
    s = ScalarField(g, 0.0);
    s.mask = M.mask;
  }
  double sum2 = 0.0;
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      if (!(M.active(i, j) && M.active(i + 1, j) && M.active(i - 1, j) && M.active(i, j + 1) && M.active(i, j - 1)))
        continue;
      for (std::size_t r = 0; r < 2; ++r) {
        const double v = (M.at(i + 1, j)(r, 1) - M.at(i - 1, j)(r, 1)) / (2.0 * g.h) -
                         (M.at(i, j + 1)(r, 0) - M.at(i, j - 1)(r, 0)) / (2.0 * g.h);
        out.strong[r].at(i, j) = v;
        sum2 += v * v;
        out.linf = std::max(out.linf, std::abs(v));
      }
    }
  out.l2 = std::sqrt(sum2) * g.h;

  const auto bumps = bump_family(g);
  for (std::size_t b = 0; b < bumps.size(); ++b) {
    std::array<double, 2> acc{0.0, 0.0};
    bool usable = true;
    for (int j = 0; j < g.ny && usable; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const Vec2 x = g.node(i, j);
        if (bumps[b].value(x) == 0.0) continue;
        if (!M.active(i, j)) {
          usable = false;
          break;
        }
        const Vec2 dphi = bumps[b].gradient(x);
        const Mat2& m = M.at(i, j);
        for (std::size_t r = 0; r < 2; ++r) acc[r] += m(r, 0) * dphi[1] - m(r, 1) * dphi[0];
      }
    if (!usable) continue;
    for (std::size_t r = 0; r < 2; ++r) {
      const double v = acc[r] * g.h * g.h;
      out.weak.push_back({static_cast<int>(b), static_cast<int>(r), v});
      out.weak_max = std::max(out.weak_max, std::abs(v));
    }
  }
  return out;
}

/// Curl residual of g'(det Du) Du with Du = gradient_field(u).
inline CurlResidual el_residual(const ConvexIntegrand& gi, const VecField& u) {
  const MatField du = gradient_field(u);
  return weak_curl_residual(map_field(du, [&](const Mat2& m) { return gi.g1(det(m)) * m; }));
}

enum class Normalization { mean_one, pin_node };

/// Connected regions where beta is flat relative to its 3x3 median.
struct FlatRegions {
  double threshold = 0.0;
  std::size_t components = 0;
  double largest_fraction = 0.0;  ///< largest component / node count
};

struct BetaRecovery {
  ScalarField beta;
  double residual_norm = 0.0;  ///< sqrt(sum r^2 h^2) over the cell equations
  std::size_t iterations = 0;
  FlatRegions flat;
};

namespace detail {

/// Cell equations d1(beta d2 u_r) - d2(beta d1 u_r) = 0 on each grid cell,
/// with products formed at the four corner nodes and cell-centred
/// differences. Rows are ordered (cell, r).
class CurlOperator {
 public:
  explicit CurlOperator(const MatField& du) : du_(du), g_(du.grid) {}

  std::size_t rows() const { return 2 * static_cast<std::size_t>(g_.nx - 1) * static_cast<std::size_t>(g_.ny - 1); }
  std::size_t cols() const { return g_.count(); }

  void apply(const std::vector<double>& beta, std::vector<double>& out) const {
    out.assign(rows(), 0.0);
    const double s = 1.0 / (2.0 * g_.h) * g_.h;  // rows carry the quadrature weight h
    std::size_t k = 0;
    for (int j = 0; j + 1 < g_.ny; ++j)
      for (int i = 0; i + 1 < g_.nx; ++i)
        for (std::size_t r = 0; r < 2; ++r) {
          auto P = [&](int a, int b, std::size_t c) { return beta[g_.index(a, b)] * du_.at(a, b)(r, c); };
          out[k++] = s * ((P(i + 1, j, 1) + P(i + 1, j + 1, 1) - P(i, j, 1) - P(i, j + 1, 1)) -
                          (P(i, j + 1, 0) + P(i + 1, j + 1, 0) - P(i, j, 0) - P(i + 1, j, 0)));
        }
  }

  void apply_t(const std::vector<double>& y, std::vector<double>& out) const {
    out.assign(cols(), 0.0);
    const double s = 1.0 / (2.0 * g_.h) * g_.h;
    std::size_t k = 0;
    for (int j = 0; j + 1 < g_.ny; ++j)
      for (int i = 0; i + 1 < g_.nx; ++i)
        for (std::size_t r = 0; r < 2; ++r) {
          const double v = s * y[k++];
          auto add = [&](int a, int b, std::size_t c, double sign) {
            out[g_.index(a, b)] += sign * v * du_.at(a, b)(r, c);
          };
          add(i + 1, j, 1, 1.0);
          add(i + 1, j + 1, 1, 1.0);
          add(i, j, 1, -1.0);
          add(i, j + 1, 1, -1.0);
          add(i, j + 1, 0, -1.0);
          add(i + 1, j + 1, 0, -1.0);
          add(i, j, 0, 1.0);
          add(i + 1, j, 0, 1.0);
        }
  }

 private:
  const MatField& du_;
  GridSpec g_;
};

inline FlatRegions flat_regions(const ScalarField& beta) {
  const GridSpec& g = beta.grid;
  FlatRegions out;
  out.threshold = 3.0 * g.h;
  std::vector<std::uint8_t> flat(g.count(), 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::vector<double> nb;
      for (int b = std::max(0, j - 1); b <= std::min(g.ny - 1, j + 1); ++b)
        for (int a = std::max(0, i - 1); a <= std::min(g.nx - 1, i + 1); ++a) nb.push_back(beta.at(a, b));
      std::nth_element(nb.begin(), nb.begin() + static_cast<std::ptrdiff_t>(nb.size() / 2), nb.end());
      flat[g.index(i, j)] = std::abs(beta.at(i, j) - nb[nb.size() / 2]) <= out.threshold ? 1 : 0;
    }
  std::vector<std::uint8_t> seen(g.count(), 0);
  std::size_t largest = 0;
  for (std::size_t start = 0; start < g.count(); ++start) {
    if (!flat[start] || seen[start]) continue;
    ++out.components;
    std::size_t size = 0;
    std::deque<std::size_t> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      ++size;
      const int i = static_cast<int>(p % static_cast<std::size_t>(g.nx));
      const int j = static_cast<int>(p / static_cast<std::size_t>(g.nx));
      const std::array<std::array<int, 2>, 4> nbrs{{{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}}};
      for (const auto& [a, b] : nbrs) {
        if (a < 0 || b < 0 || a >= g.nx || b >= g.ny) continue;
        const std::size_t q = g.index(a, b);
        if (flat[q] && !seen[q]) {
          seen[q] = 1;
          queue.push_back(q);
        }
      }
    }
    largest = std::max(largest, size);
  }
  out.largest_fraction = static_cast<double>(largest) / static_cast<double>(g.count());
  return out;
}

}  // namespace detail

/// Minimum and maximum of det Du over active nodes.
inline std::array<double, 2> det_range(const MatField& du) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int j = 0; j < du.grid.ny; ++j)
    for (int i = 0; i < du.grid.nx; ++i) {
      if (!du.active(i, j)) continue;
      const double d = det(du.at(i, j));
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  return {lo, hi};
}

/// Least-squares beta with curl(beta Du) = 0 on every grid cell.
///
/// Requires |det Du| >= 1e-6 at every node and no sign change of det Du
/// (either would let beta det Du touch zero). beta is written as 1 + T z,
/// with T removing the mean (mean_one) or zeroing the centre node
/// (pin_node), and z solves the reduced problem by CGLS to relative normal
/// residual 1e-10 within 10 * (node count) iterations.
inline BetaRecovery beta_recover(const VecField& u, Normalization norm = Normalization::mean_one) {
  const MatField du = gradient_field(u);
  const auto [dlo, dhi] = det_range(du);
  if (std::min(std::abs(dlo), std::abs(dhi)) < 1e-6 || (dlo < 0.0) != (dhi < 0.0))
    throw Error("degenerate determinant");

  const GridSpec& g = u.grid;
  const detail::CurlOperator A(du);
  const std::size_t n = A.cols();
  const std::size_t pin = g.index(g.nx / 2, g.ny / 2);

  auto project = [&](const std::vector<double>& z, std::vector<double>& out) {
    out = z;
    if (norm == Normalization::mean_one) {
      double mean = 0.0;
      for (double v : z) mean += v;
      mean /= static_cast<double>(n);
      for (double& v : out) v -= mean;
    } else {
      out[pin] = 0.0;
    }
  };

  std::vector<double> ones(n, 1.0), rhs;
  A.apply(ones, rhs);
  for (double& v : rhs) v = -v;

  std::vector<double> tmp;
  auto apply = [&](const std::vector<double>& z, std::vector<double>& y) {
    project(z, tmp);
    A.apply(tmp, y);
  };
  auto apply_t = [&](const std::vector<double>& y, std::vector<double>& z) {
    A.apply_t(y, tmp);
    project(tmp, z);
  };
  const CglsResult sol = cgls(apply, apply_t, rhs, n, 1e-10, 10 * n);
  if (!sol.converged) throw Error("solver stagnation");

  BetaRecovery out;
  out.beta = ScalarField(g, 0.0);
  std::vector<double> tz;
  project(sol.x, tz);
  for (std::size_t k = 0; k < n; ++k) out.beta.values[k] = 1.0 + tz[k];
  out.residual_norm = sol.residual;
  out.iterations = sol.iterations;
  out.flat = detail::flat_regions(out.beta);
  return out;
}

/// max |beta - mean beta| / |mean beta|.
inline double beta_deviation(const ScalarField& beta) {
  double mean = 0.0;
  for (double v : beta.values) mean += v;
  mean /= static_cast<double>(beta.values.size());
  double dev = 0.0;
  for (double v : beta.values) dev = std::max(dev, std::abs(v - mean));
  return dev / std::abs(mean);
}

/// Residual norm of the cell equations for a given beta.
inline double beta_residual(const VecField& u, const ScalarField& beta) {
  const MatField du = gradient_field(u);
  std::vector<double> r;
  detail::CurlOperator(du).apply(beta.values, r);
  return std::sqrt(detail::dot(r, r));
}

struct Stationarity {
  ScalarField h_field;  ///< h(det Du)
  double grad_norm = 0.0;  ///< discrete L2 norm of grad h_field
  FiberRoots fiber;        ///< roots of h(t) = mean of h_field
};

/// Inner-variation probe: a stationary map has h(det Du) constant, so
/// det Du can only take the (at most two) values in `fiber`.
inline Stationarity stationarity_check(const ConvexIntegrand& gi, const VecField& u) {
  const MatField du = gradient_field(u);
  Stationarity out;
  out.h_field = map_field(du, [&](const Mat2& m) { return h_eval(gi, det(m)); });
  const VecField gh = scalar_gradient(out.h_field);
  double sum = 0.0, mean = 0.0, dmax = 0.0;
  std::size_t count = 0;
  for (int j = 0; j < u.grid.ny; ++j)
    for (int i = 0; i < u.grid.nx; ++i) {
      if (!du.active(i, j)) continue;
      sum += dot(gh.at(i, j), gh.at(i, j));
      mean += out.h_field.at(i, j);
      dmax = std::max(dmax, std::abs(det(du.at(i, j))));
      ++count;
    }
  out.grad_norm = std::sqrt(sum) * u.grid.h;
  mean /= static_cast<double>(count);
  out.fiber = h_inverse_fiber(gi, mean, fiber_bracket(gi, mean, dmax + 1.0));
  return out;
}

struct LevelCurve {
  std::vector<Vec2> polyline;
  std::vector<double> det_samples;
  double det_spread = 0.0;
};

namespace detail {

struct Bilinear {
  const GridSpec& g;

  /// Cell index and local coordinates; throws Error("left domain").
  std::array<double, 4> locate(const Vec2& x, int& i, int& j) const {
    const double fx = (x[0] - g.origin[0]) / g.h, fy = (x[1] - g.origin[1]) / g.h;
    if (!(fx >= 0.0 && fy >= 0.0 && fx <= g.nx - 1 && fy <= g.ny - 1)) throw Error("left domain");
    i = std::min(static_cast<int>(fx), g.nx - 2);
    j = std::min(static_cast<int>(fy), g.ny - 2);
    const double s = fx - i, t = fy - j;
    return {(1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t};
  }

  template <class T>
  T operator()(const GridField<T>& f, const Vec2& x) const {
    int i = 0, j = 0;
    const auto w = locate(x, i, j);
    return w[0] * f.at(i, j) + w[1] * f.at(i + 1, j) + w[2] * f.at(i, j + 1) + w[3] * f.at(i + 1, j + 1);
  }
};

inline double interp(const Bilinear& b, const ScalarField& f, const Vec2& x) {
  int i = 0, j = 0;
  const auto w = b.locate(x, i, j);
  return w[0] * f.at(i, j) + w[1] * f.at(i + 1, j) + w[2] * f.at(i, j + 1) + w[3] * f.at(i + 1, j + 1);
}

}  // namespace detail

/// Follows {u_c = level} from `seed` with unit speed along J grad u_c
/// (explicit midpoint rule, step h), projecting back to the level set with
/// one Newton correction per step. u and Du are interpolated bilinearly.
/// Records det Du at every polyline vertex.
inline LevelCurve trace_level_curve(const VecField& u, int component, double level, const Vec2& seed, int steps) {
  if (component != 1 && component != 2) throw std::invalid_argument("trace_level_curve: component must be 1 or 2");
  if (steps < 1) throw std::invalid_argument("trace_level_curve: steps must be >= 1");
  const std::size_t c = static_cast<std::size_t>(component - 1);
  const GridSpec& g = u.grid;
  const MatField du = gradient_field(u);
  const ScalarField uc = map_field(u, [&](const Vec2& v) { return v[c]; });
  const detail::Bilinear bil{g};
  const Mat2 J = rotation_j();

  auto grad = [&](const Vec2& x) {
    const Mat2 m = bil(du, x);
    return Vec2{m(c, 0), m(c, 1)};
  };
  auto direction = [&](const Vec2& x) {
    const Vec2 gr = grad(x);
    const double n = norm(gr);
    if (n < 1e-12) throw Error("degenerate gradient on curve");
    return (1.0 / n) * (J * gr);
  };

  if (std::abs(detail::interp(bil, uc, seed) - level) > g.h)
    throw std::invalid_argument("trace_level_curve: seed is not on the level set");
  if (norm(grad(seed)) < 1e-12) throw Error("degenerate gradient on curve");

  LevelCurve out;
  Vec2 x = seed;
  auto record = [&](const Vec2& p) {
    out.polyline.push_back(p);
    out.det_samples.push_back(det(bil(du, p)));
  };
  record(x);
  for (int k = 0; k < steps; ++k) {
    const Vec2 mid = x + (0.5 * g.h) * direction(x);
    x = x + g.h * direction(mid);
    const Vec2 gr = grad(x);
    const double gg = dot(gr, gr);
    if (gg < 1e-24) throw Error("degenerate gradient on curve");
    x = x - ((detail::interp(bil, uc, x) - level) / gg) * gr;
    record(x);
  }
  const auto [lo, hi] = std::minmax_element(out.det_samples.begin(), out.det_samples.end());
  out.det_spread = *hi - *lo;
  return out;
}

}  // namespace rigid
