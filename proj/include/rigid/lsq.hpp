/// @file lsq.hpp
/// @brief Matrix-free conjugate gradients on the normal equations (CGLS).
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace rigid {

struct CglsResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  bool converged = false;
  double normal_residual = 0.0;  ///< |B^T (b - B x)| relative to |B^T b|
  double residual = 0.0;         ///< |b - B x|
};

namespace detail {
inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}
}  // namespace detail

/// Minimizes |b - B x| from x = 0. `apply(x, y)` sets y = B x (y sized to
/// rows), `apply_t(y, x)` sets x = B^T y (x sized to cols). Stops when
/// |B^T r| <= tol |B^T b| or after max_iter iterations.
template <class Apply, class ApplyT>
CglsResult cgls(Apply&& apply, ApplyT&& apply_t, const std::vector<double>& b, std::size_t cols, double tol,
                std::size_t max_iter) {
  CglsResult out;
  out.x.assign(cols, 0.0);
  std::vector<double> r = b;
  std::vector<double> s(cols), p(cols), q(b.size());
  apply_t(r, s);
  const double s0 = std::sqrt(detail::dot(s, s));
  double gamma = s0 * s0;
  out.residual = std::sqrt(detail::dot(r, r));
  if (s0 == 0.0) {
    out.converged = true;
    return out;
  }
  p = s;
  while (out.iterations < max_iter) {
    apply(p, q);
    const double qq = detail::dot(q, q);
    if (qq == 0.0) break;
    const double alpha = gamma / qq;
    for (std::size_t k = 0; k < cols; ++k) out.x[k] += alpha * p[k];
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= alpha * q[k];
    apply_t(r, s);
    const double gnew = detail::dot(s, s);
    ++out.iterations;
    out.normal_residual = std::sqrt(gnew) / s0;
    if (out.normal_residual <= tol) {
      out.converged = true;
      break;
    }
    const double beta = gnew / gamma;
    gamma = gnew;
    for (std::size_t k = 0; k < cols; ++k) p[k] = s[k] + beta * p[k];
  }
  out.residual = std::sqrt(detail::dot(r, r));
  return out;
}

}  // namespace rigid
