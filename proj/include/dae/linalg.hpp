// Small fixed-size vectors/matrices used throughout the analysis code.
// Everything here is 2x2 or 3x3, so direct formulas beat a general library.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <utility>

namespace dae {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline Vec2 normalized(Vec2 v) {
  const double n = norm(v);
  return n > 0.0 ? Vec2{v.x / n, v.y / n} : v;
}

struct Mat2 {
  // Row-major: [[a, b], [c, d]].
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  double disc() const { return trace() * trace() - 4.0 * det(); }
};

inline Vec2 operator*(const Mat2& m, Vec2 v) {
  return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
}

// Eigenvalues ordered by (real part, imag part); deterministic.
inline std::pair<std::complex<double>, std::complex<double>> eigenvalues(const Mat2& m) {
  const double tr = m.trace();
  const double disc = m.disc();
  std::complex<double> l1, l2;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    l1 = {0.5 * (tr - s), 0.0};
    l2 = {0.5 * (tr + s), 0.0};
  } else {
    const double s = std::sqrt(-disc);
    l1 = {0.5 * tr, -0.5 * s};
    l2 = {0.5 * tr, 0.5 * s};
  }
  return {l1, l2};
}

// Unit eigenvector for a real eigenvalue; picks the better-conditioned row.
inline Vec2 eigenvector(const Mat2& m, double lambda) {
  const Vec2 c1{m.b, lambda - m.a};
  const Vec2 c2{lambda - m.d, m.c};
  const Vec2 v = norm(c1) >= norm(c2) ? c1 : c2;
  const double n = norm(v);
  if (n == 0.0) return {1.0, 0.0};  // scalar matrix: any direction
  return {v.x / n, v.y / n};
}

// Solves m * x = r; returns false when the matrix is numerically singular.
inline bool solve(const Mat2& m, Vec2 r, Vec2& out) {
  const double det = m.det();
  const double scale = std::abs(m.a) + std::abs(m.b) + std::abs(m.c) + std::abs(m.d);
  if (std::abs(det) <= 1e-300 || std::abs(det) < 1e-16 * scale * scale) return false;
  out = {(r.x * m.d - r.y * m.b) / det, (m.a * r.y - m.c * r.x) / det};
  return true;
}

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline double norm(Vec3 v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

struct Mat3 {
  // Row-major.
  std::array<double, 9> m{};

  double& operator()(int r, int c) { return m[3 * r + c]; }
  double operator()(int r, int c) const { return m[3 * r + c]; }

  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }
};

inline bool solve(const Mat3& a, Vec3 r, Vec3& out) {
  // Gaussian elimination with partial pivoting on the 3x3 system.
  double aug[3][4] = {{a(0, 0), a(0, 1), a(0, 2), r.x},
                      {a(1, 0), a(1, 1), a(1, 2), r.y},
                      {a(2, 0), a(2, 1), a(2, 2), r.z}};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int row = col + 1; row < 3; ++row)
      if (std::abs(aug[row][col]) > std::abs(aug[piv][col])) piv = row;
    if (std::abs(aug[piv][col]) < 1e-300) return false;
    if (piv != col)
      for (int k = 0; k < 4; ++k) std::swap(aug[piv][k], aug[col][k]);
    for (int row = 0; row < 3; ++row) {
      if (row == col) continue;
      const double f = aug[row][col] / aug[col][col];
      for (int k = col; k < 4; ++k) aug[row][k] -= f * aug[col][k];
    }
  }
  out = {aug[0][3] / aug[0][0], aug[1][3] / aug[1][1], aug[2][3] / aug[2][2]};
  return std::isfinite(out.x) && std::isfinite(out.y) && std::isfinite(out.z);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double v, double slack = 0.0) const { return v >= lo - slack && v <= hi + slack; }
};

struct BBox {
  double x0 = -1.0, y0 = -1.0, x1 = 1.0, y1 = 1.0;

  bool contains(Vec2 p, double slack = 0.0) const {
    return p.x >= x0 - slack && p.x <= x1 + slack && p.y >= y0 - slack && p.y <= y1 + slack;
  }
  double diag() const { return std::hypot(x1 - x0, y1 - y0); }
  Vec2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
};

}  // namespace dae
