/// @file core_algebra.hpp
/// @brief Small dense matrices (n <= 4), cofactors, 6x2 stacks and their
/// 2x2 minors, and the rank-one test used by the laminate construction.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "rigid/error.hpp"

namespace rigid {

using Vec2 = std::array<double, 2>;

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

/// Dense N x N real matrix, row-major. N is restricted to 2..4.
template <std::size_t N>
class Mat {
  static_assert(N >= 2 && N <= 4, "Mat supports 2x2 through 4x4");

 public:
  static constexpr std::size_t size = N;

  constexpr Mat() : a_{} {}

  /// Row-major entries; throws std::invalid_argument on wrong count or
  /// non-finite values.
  Mat(std::initializer_list<double> entries) : a_{} {
    if (entries.size() != N * N) throw std::invalid_argument("Mat: wrong number of entries");
    std::size_t k = 0;
    for (double v : entries) {
      if (!std::isfinite(v)) throw std::invalid_argument("Mat: non-finite entry");
      a_[k++] = v;
    }
  }

  static Mat identity() {
    Mat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static Mat diag(const std::array<double, N>& d) {
    Mat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * N + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * N + j]; }

  const std::array<double, N * N>& data() const { return a_; }

  bool is_finite() const {
    return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
  }

  Mat transpose() const {
    Mat t;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Mat& operator+=(const Mat& o) {
    for (std::size_t k = 0; k < N * N; ++k) a_[k] += o.a_[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    for (std::size_t k = 0; k < N * N; ++k) a_[k] -= o.a_[k];
    return *this;
  }
  Mat& operator*=(double s) {
    for (auto& v : a_) v *= s;
    return *this;
  }

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator-(Mat a) { return a *= -1.0; }
  friend Mat operator*(double s, Mat a) { return a *= s; }
  friend Mat operator*(Mat a, double s) { return a *= s; }

  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat c;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k)
        for (std::size_t j = 0; j < N; ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
  }

  friend bool operator==(const Mat& a, const Mat& b) { return a.a_ == b.a_; }

  friend std::ostream& operator<<(std::ostream& os, const Mat& m) {
    os << '[';
    for (std::size_t i = 0; i < N; ++i) {
      os << (i ? "; " : "");
      for (std::size_t j = 0; j < N; ++j) os << (j ? " " : "") << m(i, j);
    }
    return os << ']';
  }

 private:
  std::array<double, N * N> a_;
};

using Mat2 = Mat<2>;

inline Vec2 operator*(const Mat2& m, const Vec2& x) {
  return {m(0, 0) * x[0] + m(0, 1) * x[1], m(1, 0) * x[0] + m(1, 1) * x[1]};
}

/// Frobenius norm.
template <std::size_t N>
double frobenius(const Mat<N>& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

/// Outer product a (x) n, i.e. the matrix a n^T.
inline Mat2 outer(const Vec2& a, const Vec2& n) {
  return Mat2{a[0] * n[0], a[0] * n[1], a[1] * n[0], a[1] * n[1]};
}

/// Rotation by +90 degrees; satisfies cof_t(X) J = J X for every 2x2 X.
inline Mat2 rotation_j() { return Mat2{0.0, -1.0, 1.0, 0.0}; }

namespace detail {

template <std::size_t N>
Mat<N - 1> drop(const Mat<N>& m, std::size_t row, std::size_t col) {
  Mat<N - 1> s;
  for (std::size_t i = 0, si = 0; i < N; ++i) {
    if (i == row) continue;
    for (std::size_t j = 0, sj = 0; j < N; ++j) {
      if (j == col) continue;
      s(si, sj++) = m(i, j);
    }
    ++si;
  }
  return s;
}

}  // namespace detail

/// Determinant by cofactor expansion along the first row.
template <std::size_t N>
double det(const Mat<N>& m) {
  if constexpr (N == 2) {
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  } else {
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      s += sign * m(0, j) * det(detail::drop(m, 0, j));
    }
    return s;
  }
}

/// Transposed cofactor: entry (i,j) is (-1)^{i+j} times the minor obtained by
/// deleting row i and column j. Its transpose is the adjugate, so
/// m * cof_t(m)^T = det(m) Id.
template <std::size_t N>
Mat<N> cof_t(const Mat<N>& m) {
  Mat<N> c;
  if constexpr (N == 2) {
    c(0, 0) = m(1, 1);
    c(0, 1) = -m(1, 0);
    c(1, 0) = -m(0, 1);
    c(1, 1) = m(0, 0);
  } else {
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        c(i, j) = sign * det(detail::drop(m, i, j));
      }
  }
  return c;
}

/// The adjugate, i.e. cof(m) with m cof(m) = cof(m) m = det(m) Id.
template <std::size_t N>
Mat<N> adjugate(const Mat<N>& m) {
  return cof_t(m).transpose();
}

/// A 6x2 matrix stored as three stacked 2x2 blocks (rows 1-2, 3-4, 5-6).
struct Stacked62 {
  Mat2 top;
  Mat2 mid;
  Mat2 bot;

  /// Row r (1-based, 1..6).
  Vec2 row(int r) const {
    if (r < 1 || r > 6) throw std::out_of_range("Stacked62::row");
    const Mat2& b = r <= 2 ? top : (r <= 4 ? mid : bot);
    const std::size_t i = static_cast<std::size_t>((r - 1) % 2);
    return {b(i, 0), b(i, 1)};
  }

  std::array<double, 12> flat() const {
    std::array<double, 12> f{};
    for (int r = 1; r <= 6; ++r) {
      const Vec2 v = row(r);
      f[2 * (r - 1)] = v[0];
      f[2 * (r - 1) + 1] = v[1];
    }
    return f;
  }

  static Stacked62 from_flat(const std::array<double, 12>& f) {
    auto block = [&](std::size_t o) { return Mat2{f[o], f[o + 1], f[o + 2], f[o + 3]}; };
    return {block(0), block(4), block(8)};
  }

  Stacked62& operator+=(const Stacked62& o) {
    top += o.top;
    mid += o.mid;
    bot += o.bot;
    return *this;
  }
  Stacked62& operator*=(double s) {
    top *= s;
    mid *= s;
    bot *= s;
    return *this;
  }
  friend Stacked62 operator+(Stacked62 a, const Stacked62& b) { return a += b; }
  friend Stacked62 operator-(const Stacked62& a, const Stacked62& b) {
    return {a.top - b.top, a.mid - b.mid, a.bot - b.bot};
  }
  friend Stacked62 operator*(double s, Stacked62 a) { return a *= s; }
  friend bool operator==(const Stacked62& a, const Stacked62& b) {
    return a.top == b.top && a.mid == b.mid && a.bot == b.bot;
  }
};

inline double frobenius(const Stacked62& a) {
  const double t = frobenius(a.top), m = frobenius(a.mid), b = frobenius(a.bot);
  return std::sqrt(t * t + m * m + b * b);
}

/// Ordered row pair (i, j), 1 <= i < j <= 6.
class MinorIndex {
 public:
  MinorIndex(int i, int j) : i_(i), j_(j) {
    if (!(1 <= i && i < j && j <= 6)) throw std::invalid_argument("MinorIndex: need 1 <= i < j <= 6");
  }
  int i() const { return i_; }
  int j() const { return j_; }

  /// Position in the lexicographic list of all 15 pairs.
  std::size_t ordinal() const {
    std::size_t k = 0;
    for (int a = 1; a < i_; ++a) k += static_cast<std::size_t>(6 - a);
    return k + static_cast<std::size_t>(j_ - i_ - 1);
  }

  static std::array<MinorIndex, 15> all() {
    return {MinorIndex{1, 2}, MinorIndex{1, 3}, MinorIndex{1, 4}, MinorIndex{1, 5}, MinorIndex{1, 6},
            MinorIndex{2, 3}, MinorIndex{2, 4}, MinorIndex{2, 5}, MinorIndex{2, 6}, MinorIndex{3, 4},
            MinorIndex{3, 5}, MinorIndex{3, 6}, MinorIndex{4, 5}, MinorIndex{4, 6}, MinorIndex{5, 6}};
  }

  friend bool operator==(const MinorIndex& a, const MinorIndex& b) { return a.i_ == b.i_ && a.j_ == b.j_; }

 private:
  int i_;
  int j_;
};

/// Determinant of the 2x2 matrix made of rows r and s (in that order).
inline double row_det(const Vec2& r, const Vec2& s) { return r[0] * s[1] - r[1] * s[0]; }

/// Determinant of the 2x2 submatrix of rows idx.i() and idx.j().
inline double minor_det(const Stacked62& a, const MinorIndex& idx) {
  return row_det(a.row(idx.i()), a.row(idx.j()));
}

struct RankOneFactors {
  Vec2 a;
  Vec2 n;  ///< unit vector; its largest-magnitude component is positive
};

struct RankGap {
  int rank = 0;
  std::optional<RankOneFactors> factors;  ///< set iff rank == 1; B - A = a (x) n
};

/// Singular values of a 2x2 matrix, descending.
inline std::array<double, 2> singular_values(const Mat2& m) {
  const double f2 = m(0, 0) * m(0, 0) + m(0, 1) * m(0, 1) + m(1, 0) * m(1, 0) + m(1, 1) * m(1, 1);
  const double d = std::abs(det(m));
  const double disc = std::sqrt(std::max(0.0, f2 * f2 - 4.0 * d * d));
  const double s1 = std::sqrt(0.5 * (f2 + disc));
  // s1 * s2 = |det| avoids cancellation in the small singular value.
  const double s2 = s1 > 0.0 ? d / s1 : 0.0;
  return {s1, s2};
}

/// Rank of A - B with a scale-aware threshold. A singular value counts as
/// nonzero when it is >= 1e-9 * (largest singular value + 1). In the rank-one
/// case B - A is factored as a (x) n with |n| = 1.
inline RankGap rank_one_gap(const Mat2& A, const Mat2& B) {
  const Mat2 diff = B - A;
  const auto sv = singular_values(diff);
  const double thresh = 1e-9 * (sv[0] + 1.0);
  RankGap out;
  out.rank = (sv[0] >= thresh ? 1 : 0) + (sv[1] >= thresh ? 1 : 0);
  if (out.rank != 1) return out;

  const Vec2 r0{diff(0, 0), diff(0, 1)};
  const Vec2 r1{diff(1, 0), diff(1, 1)};
  Vec2 n = norm(r0) >= norm(r1) ? r0 : r1;
  n = (1.0 / norm(n)) * n;
  if ((std::abs(n[0]) >= std::abs(n[1]) ? n[0] : n[1]) < 0.0) n = -1.0 * n;
  out.factors = RankOneFactors{diff * n, n};
  return out;
}

}  // namespace rigid
