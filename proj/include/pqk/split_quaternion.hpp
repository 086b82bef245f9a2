#pragma once

#include <cmath>
#include <ostream>

namespace pqk {

/**
 * Split quaternion a + b*I + c*J + d*K over the reals:
 *
 *   -I^2 = J^2 = K^2 = 1,   I*J = -J*I = K.
 *
 * The derived table is JK = -I, KJ = I, KI = J, IK = -J. The split norm
 * N(q) = q * conj(q) = a^2 + b^2 - c^2 - d^2 is multiplicative but indefinite,
 * so non-zero elements can fail to be invertible.
 */
template <typename T>
struct SplitQuat {
  T a{}, b{}, c{}, d{};

  SplitQuat() = default;
  SplitQuat(T a_, T b_, T c_, T d_) : a(a_), b(b_), c(c_), d(d_) {}

  static SplitQuat one() { return {T(1), T(0), T(0), T(0)}; }
  static SplitQuat ui() { return {T(0), T(1), T(0), T(0)}; }
  static SplitQuat uj() { return {T(0), T(0), T(1), T(0)}; }
  static SplitQuat uk() { return {T(0), T(0), T(0), T(1)}; }

  SplitQuat operator+(const SplitQuat& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  SplitQuat operator-(const SplitQuat& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  SplitQuat operator-() const { return {-a, -b, -c, -d}; }
  SplitQuat operator*(T s) const { return {a * s, b * s, c * s, d * s}; }

  SplitQuat operator*(const SplitQuat& o) const {
    return {a * o.a - b * o.b + c * o.c + d * o.d,
            a * o.b + b * o.a - c * o.d + d * o.c,
            a * o.c + c * o.a + d * o.b - b * o.d,
            a * o.d + d * o.a + b * o.c - c * o.b};
  }

  SplitQuat conj() const { return {a, -b, -c, -d}; }

  T re() const { return a; }

  // Split norm a^2 + b^2 - c^2 - d^2 (indefinite).
  T norm() const { return a * a + b * b - c * c - d * d; }

  bool operator==(const SplitQuat& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
};

using SplitQuaternion = SplitQuat<double>;

template <typename T>
SplitQuat<T> operator*(T s, const SplitQuat<T>& q) {
  return q * s;
}

template <typename T>
std::ostream& operator<<(std::ostream& os, const SplitQuat<T>& q) {
  return os << "(" << q.a << " + " << q.b << "I + " << q.c << "J + " << q.d << "K)";
}

}  // namespace pqk
