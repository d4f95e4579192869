#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace spiral {

inline constexpr const char* kToolName = "spiralanchor";
inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383279;

using Complex = std::complex<double>;

// Thrown when an input description is malformed or violates an invariant.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an algorithm fails numerically (divergence, blow-up, no root).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// 2x2 real matrix, row-major: [[a, b], [c, d]].
struct Mat2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  Mat2() = default;
  Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 from_columns(const Vec2& c1, const Vec2& c2) {
    return {c1.x, c2.x, c1.y, c2.y};
  }

  Vec2 col(int j) const { return j == 0 ? Vec2{a, c} : Vec2{b, d}; }
  Vec2 row(int i) const { return i == 0 ? Vec2{a, b} : Vec2{c, d}; }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }

  Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 operator*(const Mat2& m) const {
    return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
  }
  Mat2 operator+(const Mat2& m) const { return {a + m.a, b + m.b, c + m.c, d + m.d}; }
  Mat2 operator-(const Mat2& m) const { return {a - m.a, b - m.b, c - m.c, d - m.d}; }
  Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

// Solves M u = r. Throws NumericalError if |det| <= tol * scale(M).
inline Vec2 solve2(const Mat2& m, const Vec2& r, double tol = 1e-14) {
  const double det = m.det();
  const double scale = std::abs(m.a) + std::abs(m.b) + std::abs(m.c) + std::abs(m.d);
  if (std::abs(det) <= tol * std::max(1.0, scale * scale)) {
    throw NumericalError("solve2: singular 2x2 system");
  }
  return {(r.x * m.d - r.y * m.b) / det, (m.a * r.y - m.c * r.x) / det};
}

// Eigenvalues of a real 2x2 matrix (complex conjugate pair when disc < 0).
inline std::array<Complex, 2> eigenvalues2(const Mat2& m) {
  const double tr = m.trace();
  const double disc = tr * tr - 4.0 * m.det();
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    return {Complex{(tr + s) / 2.0, 0.0}, Complex{(tr - s) / 2.0, 0.0}};
  }
  const double s = std::sqrt(-disc);
  return {Complex{tr / 2.0, s / 2.0}, Complex{tr / 2.0, -s / 2.0}};
}

// Singular values (max, min) of a real 2x2 matrix.
inline std::array<double, 2> singular_values2(const Mat2& m) {
  const double g11 = m.a * m.a + m.c * m.c;
  const double g22 = m.b * m.b + m.d * m.d;
  const double g12 = m.a * m.b + m.c * m.d;
  const double mean = (g11 + g22) / 2.0;
  const double rad = std::sqrt(std::max(0.0, (g11 - g22) * (g11 - g22) / 4.0 + g12 * g12));
  const double smax = std::sqrt(std::max(0.0, mean + rad));
  const double smin = std::sqrt(std::max(0.0, mean - rad));
  return {smax, smin};
}

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  if (a > kPi) a -= kTwoPi;
  return a;
}

// Wraps an angle to [0, 2*pi).
inline double wrap_angle_2pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

}  // namespace spiral
