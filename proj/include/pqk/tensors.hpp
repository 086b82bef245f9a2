#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

namespace pqk {

/** Dense rank-3 array. Everything here is desk scale (dim <= 16), so flat
 *  storage with explicit indexing beats anything fancier. */
template <typename Scalar>
class Tensor3 {
 public:
  Tensor3() : d0_(0), d1_(0), d2_(0) {}
  Tensor3(int d0, int d1, int d2)
      : d0_(d0), d1_(d1), d2_(d2), v_(static_cast<size_t>(d0) * d1 * d2, Scalar(0)) {}

  Scalar& operator()(int i, int j, int k) { return v_[idx(i, j, k)]; }
  const Scalar& operator()(int i, int j, int k) const { return v_[idx(i, j, k)]; }

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }

  void setZero() { std::fill(v_.begin(), v_.end(), Scalar(0)); }

  double max_abs() const {
    double m = 0.0;
    for (const Scalar& x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  Tensor3 operator+(const Tensor3& o) const {
    Tensor3 r = *this;
    for (size_t i = 0; i < v_.size(); ++i) r.v_[i] += o.v_[i];
    return r;
  }
  Tensor3 operator-(const Tensor3& o) const {
    Tensor3 r = *this;
    for (size_t i = 0; i < v_.size(); ++i) r.v_[i] -= o.v_[i];
    return r;
  }
  Tensor3 operator*(Scalar s) const {
    Tensor3 r = *this;
    for (Scalar& x : r.v_) x *= s;
    return r;
  }

  const std::vector<Scalar>& data() const { return v_; }
  std::vector<Scalar>& data() { return v_; }

 private:
  size_t idx(int i, int j, int k) const {
    assert(i >= 0 && i < d0_ && j >= 0 && j < d1_ && k >= 0 && k < d2_);
    return (static_cast<size_t>(i) * d1_ + j) * d2_ + k;
  }
  int d0_, d1_, d2_;
  std::vector<Scalar> v_;
};

/** Dense rank-4 array, same storage idea as Tensor3. */
template <typename Scalar>
class Tensor4 {
 public:
  Tensor4() : d_{0, 0, 0, 0} {}
  Tensor4(int d0, int d1, int d2, int d3)
      : d_{d0, d1, d2, d3},
        v_(static_cast<size_t>(d0) * d1 * d2 * d3, Scalar(0)) {}

  Scalar& operator()(int i, int j, int k, int l) { return v_[idx(i, j, k, l)]; }
  const Scalar& operator()(int i, int j, int k, int l) const { return v_[idx(i, j, k, l)]; }

  int dim(int a) const { return d_[a]; }

  void setZero() { std::fill(v_.begin(), v_.end(), Scalar(0)); }

  double max_abs() const {
    double m = 0.0;
    for (const Scalar& x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (const Scalar& x : v_) s += std::norm(std::complex<double>(x));
    return std::sqrt(s);
  }

  Tensor4 operator-(const Tensor4& o) const {
    Tensor4 r = *this;
    for (size_t i = 0; i < v_.size(); ++i) r.v_[i] -= o.v_[i];
    return r;
  }
  Tensor4 operator+(const Tensor4& o) const {
    Tensor4 r = *this;
    for (size_t i = 0; i < v_.size(); ++i) r.v_[i] += o.v_[i];
    return r;
  }
  Tensor4 operator*(Scalar s) const {
    Tensor4 r = *this;
    for (Scalar& x : r.v_) x *= s;
    return r;
  }

  const std::vector<Scalar>& data() const { return v_; }
  std::vector<Scalar>& data() { return v_; }

 private:
  size_t idx(int i, int j, int k, int l) const {
    assert(i >= 0 && i < d_[0] && j >= 0 && j < d_[1]);
    assert(k >= 0 && k < d_[2] && l >= 0 && l < d_[3]);
    return ((static_cast<size_t>(i) * d_[1] + j) * static_cast<size_t>(d_[2]) + k) *
               static_cast<size_t>(d_[3]) +
           l;
  }
  int d_[4];
  std::vector<Scalar> v_;
};

/** Arbitrary-rank dense tensor used by the generic covariant derivative. */
struct DynTensor {
  std::vector<int> dims;
  std::vector<double> v;

  DynTensor() = default;
  explicit DynTensor(std::vector<int> d) : dims(std::move(d)) {
    size_t n = 1;
    for (int x : dims) n *= static_cast<size_t>(x);
    v.assign(n, 0.0);
  }

  size_t flat(const std::vector<int>& idx) const {
    size_t f = 0;
    for (size_t a = 0; a < dims.size(); ++a) f = f * dims[a] + idx[a];
    return f;
  }
  double& at(const std::vector<int>& idx) { return v[flat(idx)]; }
  double at(const std::vector<int>& idx) const { return v[flat(idx)]; }

  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
};

template <typename Scalar>
double total_symmetry_residual(const Tensor3<Scalar>& t) {
  double m = 0.0;
  const int d = t.dim0();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        m = std::max(m, std::abs(t(i, j, k) - t(j, i, k)));
        m = std::max(m, std::abs(t(i, j, k) - t(i, k, j)));
      }
  return m;
}

}  // namespace pqk
