/// @file field_io.hpp
/// @brief Text format for grid fields.
///
///   gridfield2 nx ny h ox oy k
///   <nx*ny lines of k space-separated floats, row-major, y outer>
///
/// k is 1 for scalars, 2 for maps into R^2, 4 for 2x2 matrices (row-major).
/// Floats are written with 17 significant digits so a write/read cycle is
/// lossless.
#pragma once

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "rigid/error.hpp"
#include "rigid/grid.hpp"

namespace rigid {

namespace detail {

template <class T>
struct FieldTraits;

template <>
struct FieldTraits<double> {
  static constexpr int k = 1;
  static void put(double& v, int, double x) { v = x; }
  static double get(const double& v, int) { return v; }
};

template <>
struct FieldTraits<Vec2> {
  static constexpr int k = 2;
  static void put(Vec2& v, int c, double x) { v[static_cast<std::size_t>(c)] = x; }
  static double get(const Vec2& v, int c) { return v[static_cast<std::size_t>(c)]; }
};

template <>
struct FieldTraits<Mat2> {
  static constexpr int k = 4;
  static void put(Mat2& v, int c, double x) { v(static_cast<std::size_t>(c / 2), static_cast<std::size_t>(c % 2)) = x; }
  static double get(const Mat2& v, int c) { return v(static_cast<std::size_t>(c / 2), static_cast<std::size_t>(c % 2)); }
};

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Whitespace tokenizer that remembers byte offsets for diagnostics.
class Tokens {
 public:
  explicit Tokens(std::string_view text) : s_(text) {}

  std::size_t offset() const { return pos_; }

  bool next(std::string_view& tok, std::size_t& at, bool stop_at_newline = false) {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      if (stop_at_newline && s_[pos_] == '\n') return false;
      ++pos_;
    }
    if (pos_ >= s_.size()) return false;
    at = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    tok = s_.substr(at, pos_ - at);
    return true;
  }

  /// Skips spaces/tabs and one newline; false if something else follows.
  bool end_of_line() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
    if (pos_ >= s_.size()) return true;
    if (s_[pos_] == '\n') {
      ++pos_;
      return true;
    }
    return false;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

[[noreturn]] inline void fail_at(std::size_t at, const std::string& what) {
  throw ParseError("byte " + std::to_string(at) + ": " + what);
}

inline double parse_double(std::string_view tok, std::size_t at) {
  const std::string t(tok);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
    fail_at(at, "expected finite float, got '" + t + "'");
  return v;
}

inline long parse_int(std::string_view tok, std::size_t at) {
  const std::string t(tok);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno == ERANGE) fail_at(at, "expected integer, got '" + t + "'");
  return v;
}

}  // namespace detail

template <class T>
std::string write_field(const GridField<T>& f) {
  using Tr = detail::FieldTraits<T>;
  std::string out = "gridfield2 " + std::to_string(f.grid.nx) + ' ' + std::to_string(f.grid.ny) + ' ' +
                    detail::fmt17(f.grid.h) + ' ' + detail::fmt17(f.grid.origin[0]) + ' ' +
                    detail::fmt17(f.grid.origin[1]) + ' ' + std::to_string(Tr::k) + '\n';
  for (const T& v : f.values) {
    for (int c = 0; c < Tr::k; ++c) {
      if (c) out += ' ';
      out += detail::fmt17(Tr::get(v, c));
    }
    out += '\n';
  }
  return out;
}

/// Parses the text format; errors carry the byte offset of the offending
/// token.
template <class T>
GridField<T> read_field(std::string_view text) {
  using Tr = detail::FieldTraits<T>;
  detail::Tokens tk(text);
  std::string_view tok;
  std::size_t at = 0;

  if (!tk.next(tok, at) || tok != "gridfield2") detail::fail_at(at, "missing 'gridfield2' header");
  // reads the next header token and parses it; `at` is left at its offset
  auto header = [&](const char* name, auto parse) {
    if (!tk.next(tok, at, true)) detail::fail_at(tk.offset(), std::string("header: missing ") + name);
    return parse(tok, at);
  };
  GridSpec g;
  g.nx = static_cast<int>(header("nx", detail::parse_int));
  g.ny = static_cast<int>(header("ny", detail::parse_int));
  g.h = header("h", detail::parse_double);
  g.origin[0] = header("ox", detail::parse_double);
  g.origin[1] = header("oy", detail::parse_double);
  const long k = header("k", detail::parse_int);
  const std::size_t k_at = at;
  if (!tk.end_of_line()) detail::fail_at(tk.offset(), "header: trailing tokens");
  if (k != Tr::k)
    detail::fail_at(k_at, "header: expected k = " + std::to_string(Tr::k) + ", got " + std::to_string(k));
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    detail::fail_at(0, std::string("header: ") + e.what());
  }

  GridField<T> f(g);
  for (std::size_t n = 0; n < g.count(); ++n) {
    for (int c = 0; c < Tr::k; ++c) {
      if (!tk.next(tok, at, true))
        detail::fail_at(tk.offset(), "node " + std::to_string(n) + ": expected " + std::to_string(Tr::k) + " values");
      Tr::put(f.values[n], c, detail::parse_double(tok, at));
    }
    if (!tk.end_of_line()) detail::fail_at(tk.offset(), "node " + std::to_string(n) + ": too many values");
  }
  if (tk.next(tok, at)) detail::fail_at(at, "trailing data after " + std::to_string(g.count()) + " nodes");
  return f;
}

template <class T>
GridField<T> load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open field file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_field<T>(ss.str());
}

}  // namespace rigid
