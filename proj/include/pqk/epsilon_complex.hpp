#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace pqk {

/**
 * Number of the form re + e*im where e^2 = eps with eps in {-1, +1}:
 * ordinary complex numbers for eps = -1, para-complex (split-complex) numbers
 * for eps = +1. The tag travels with the value; mixing tags is a logic error
 * and throws.
 */
struct EpsilonComplex {
  double re = 0.0;
  double im = 0.0;
  int eps = -1;

  EpsilonComplex() = default;
  EpsilonComplex(double re_, double im_, int eps_) : re(re_), im(im_), eps(eps_) {
    if (eps != -1 && eps != 1) throw std::invalid_argument("EpsilonComplex: eps must be -1 or +1");
  }

  static EpsilonComplex unit(int eps) { return {0.0, 1.0, eps}; }

  EpsilonComplex conj() const { return {re, -im, eps}; }

  // Modulus re^2 - eps * im^2; indefinite in the para-complex case.
  double square_norm() const { return re * re - eps * static_cast<double>(im * im); }
};

inline void require_same_eps(const EpsilonComplex& x, const EpsilonComplex& y) {
  if (x.eps != y.eps)
    throw std::invalid_argument("EpsilonComplex: mixed eps operands (" +
                                std::to_string(x.eps) + " vs " + std::to_string(y.eps) + ")");
}

inline EpsilonComplex operator+(const EpsilonComplex& x, const EpsilonComplex& y) {
  require_same_eps(x, y);
  return {x.re + y.re, x.im + y.im, x.eps};
}

inline EpsilonComplex operator-(const EpsilonComplex& x, const EpsilonComplex& y) {
  require_same_eps(x, y);
  return {x.re - y.re, x.im - y.im, x.eps};
}

inline EpsilonComplex operator*(const EpsilonComplex& x, const EpsilonComplex& y) {
  require_same_eps(x, y);
  return {x.re * y.re + x.eps * x.im * y.im, x.re * y.im + x.im * y.re, x.eps};
}

inline EpsilonComplex operator*(double s, const EpsilonComplex& x) {
  return {s * x.re, s * x.im, x.eps};
}

inline std::ostream& operator<<(std::ostream& os, const EpsilonComplex& z) {
  return os << "(" << z.re << " + " << z.im << "e; e^2=" << z.eps << ")";
}

}  // namespace pqk
