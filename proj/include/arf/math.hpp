#pragma once

#include <cmath>
#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>
#include <string>

namespace arf {

// Errors surfaced to the CLI: DataError -> exit 2, NumericError -> exit 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T>
constexpr T sqr(T v) {
  return v * v;
}

template <typename T>
constexpr T clamp01(T v) {
  return std::clamp(v, T(0), T(1));
}

// Cubic smoothstep on [0,1], clamped outside.
template <typename T>
inline T smoothstep01(T t) {
  t = clamp01(t);
  return t * t * (T(3) - T(2) * t);
}

template <typename T>
struct Vec3 {
  T x = 0, y = 0, z = 0;

  constexpr Vec3() = default;
  constexpr Vec3(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}
  constexpr explicit Vec3(T v) : x(v), y(v), z(v) {}

  T& operator[](int i) { return (&x)[i]; }
  const T& operator[](int i) const { return (&x)[i]; }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(T s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(T s) const { return {x / s, y / s, z / s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(const Vec3& o) const { return {x * o.x, y * o.y, z * o.z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(T s) { x *= s; y *= s; z *= s; return *this; }
  bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }

  T dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  T norm2() const { return dot(*this); }
  T norm() const { return std::sqrt(norm2()); }
  Vec3 normalized() const { return *this / norm(); }
  T max_coeff() const { return std::max({x, y, z}); }
  T min_coeff() const { return std::min({x, y, z}); }
  bool all_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

  template <typename U>
  Vec3<U> cast() const {
    return {static_cast<U>(x), static_cast<U>(y), static_cast<U>(z)};
  }
};

template <typename T>
inline Vec3<T> operator*(T s, const Vec3<T>& v) {
  return v * s;
}
template <typename T>
inline Vec3<T> cwise_min(const Vec3<T>& a, const Vec3<T>& b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
template <typename T>
inline Vec3<T> cwise_max(const Vec3<T>& a, const Vec3<T>& b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

using Vec3d = Vec3<double>;
using Vec3f = Vec3<float>;
using Vec3i = Vec3<int>;

// Row-major 3x3 matrix.
template <typename T>
struct Mat3 {
  std::array<T, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }

  T& operator()(int r, int c) { return m[r * 3 + c]; }
  const T& operator()(int r, int c) const { return m[r * 3 + c]; }

  Vec3<T> row(int r) const { return {m[r * 3], m[r * 3 + 1], m[r * 3 + 2]}; }
  Vec3<T> col(int c) const { return {m[c], m[3 + c], m[6 + c]}; }

  Vec3<T> operator*(const Vec3<T>& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        T s = 0;
        for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }
  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
    return r;
  }
  Mat3 operator*(T s) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] * s;
    return r;
  }
  Mat3 transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }
  T det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }
  Mat3 inverse() const {
    const T d = det();
    if (std::abs(d) < std::numeric_limits<T>::min() * 64) {
      throw NumericError("Mat3::inverse: singular matrix");
    }
    const T id = T(1) / d;
    Mat3 r;
    r.m[0] = (m[4] * m[8] - m[5] * m[7]) * id;
    r.m[1] = (m[2] * m[7] - m[1] * m[8]) * id;
    r.m[2] = (m[1] * m[5] - m[2] * m[4]) * id;
    r.m[3] = (m[5] * m[6] - m[3] * m[8]) * id;
    r.m[4] = (m[0] * m[8] - m[2] * m[6]) * id;
    r.m[5] = (m[2] * m[3] - m[0] * m[5]) * id;
    r.m[6] = (m[3] * m[7] - m[4] * m[6]) * id;
    r.m[7] = (m[1] * m[6] - m[0] * m[7]) * id;
    r.m[8] = (m[0] * m[4] - m[1] * m[3]) * id;
    return r;
  }

  // Max |R R^T - I| entry; 0 for an exact rotation.
  T orthogonality_error() const {
    const Mat3 g = (*this) * transposed();
    T e = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) e = std::max(e, std::abs(g(i, j) - (i == j ? T(1) : T(0))));
    return e;
  }

  static Mat3 axis_angle(const Vec3<T>& axis_unit, T angle) {
    const Vec3<T> a = axis_unit;
    const T c = std::cos(angle), s = std::sin(angle), t = T(1) - c;
    Mat3 r;
    r.m = {t * a.x * a.x + c,       t * a.x * a.y - s * a.z, t * a.x * a.z + s * a.y,
           t * a.x * a.y + s * a.z, t * a.y * a.y + c,       t * a.y * a.z - s * a.x,
           t * a.x * a.z - s * a.y, t * a.y * a.z + s * a.x, t * a.z * a.z + c};
    return r;
  }
  static Mat3 rot_x(T a) { return axis_angle({1, 0, 0}, a); }
  static Mat3 rot_y(T a) { return axis_angle({0, 1, 0}, a); }
  static Mat3 rot_z(T a) { return axis_angle({0, 0, 1}, a); }
};

using Mat3d = Mat3<double>;

// Rigid transform y = R x + t.
template <typename T>
struct Rigid {
  Mat3<T> rotation;
  Vec3<T> translation;

  static Rigid identity() { return {}; }
  static Rigid translate(const Vec3<T>& t) { return {Mat3<T>::identity(), t}; }

  Vec3<T> apply(const Vec3<T>& x) const { return rotation * x + translation; }
  Vec3<T> apply_vector(const Vec3<T>& v) const { return rotation * v; }

  Rigid inverse() const {
    const Mat3<T> rt = rotation.transposed();
    return {rt, -(rt * translation)};
  }
  // this after o: (this*o)(x) = this(o(x))
  Rigid operator*(const Rigid& o) const {
    return {rotation * o.rotation, rotation * o.translation + translation};
  }
  bool is_rotation(T tol = T(1e-6)) const {
    return rotation.orthogonality_error() <= tol && rotation.det() > 0 &&
           translation.all_finite();
  }
  // Rotation about a fixed pivot point.
  static Rigid about_point(const Vec3<T>& pivot, const Mat3<T>& r) {
    return {r, pivot - r * pivot};
  }
};

using Rigidd = Rigid<double>;

template <typename T>
struct Aabb {
  Vec3<T> lo{std::numeric_limits<T>::max(), std::numeric_limits<T>::max(),
             std::numeric_limits<T>::max()};
  Vec3<T> hi{std::numeric_limits<T>::lowest(), std::numeric_limits<T>::lowest(),
             std::numeric_limits<T>::lowest()};

  bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
  Vec3<T> extent() const { return hi - lo; }
  Vec3<T> center() const { return (lo + hi) * T(0.5); }
  T diagonal() const { return extent().norm(); }
  bool contains(const Vec3<T>& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
  }
  void expand(const Vec3<T>& p) {
    lo = cwise_min(lo, p);
    hi = cwise_max(hi, p);
  }
  void pad(T m) {
    lo -= Vec3<T>(m);
    hi += Vec3<T>(m);
  }
  Aabb inflated_relative(T frac) const {
    Aabb b = *this;
    const Vec3<T> m = extent() * frac;
    b.lo -= m;
    b.hi += m;
    return b;
  }
  Vec3<T> clamp_inside(const Vec3<T>& p) const {
    return cwise_max(lo, cwise_min(hi, p));
  }
};

using Aabbd = Aabb<double>;

// Distance from point to segment [a,b].
template <typename T>
inline T point_segment_distance(const Vec3<T>& p, const Vec3<T>& a, const Vec3<T>& b) {
  const Vec3<T> ab = b - a;
  const T len2 = ab.norm2();
  if (len2 <= std::numeric_limits<T>::min()) return (p - a).norm();
  const T t = std::clamp((p - a).dot(ab) / len2, T(0), T(1));
  return (p - (a + ab * t)).norm();
}

// Numerically stable softplus / logistic and their derivatives.
template <typename T>
inline T softplus(T z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}
template <typename T>
inline T logistic(T z) {
  return z >= 0 ? T(1) / (T(1) + std::exp(-z)) : std::exp(z) / (T(1) + std::exp(z));
}
// d softplus / dz
template <typename T>
inline T softplus_grad(T z) {
  return logistic(z);
}

}  // namespace arf
