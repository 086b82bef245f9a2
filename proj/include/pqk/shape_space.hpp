#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "pqk/common.hpp"
#include "pqk/tensors.hpp"

namespace pqk {

/**
 * Cubic shape tensors on an epsilon-complex vector space (V, g, J):
 * fully lowered forms L(a,b,c) = g(C_{e_a} e_b, e_c) subject to
 *   (1) symmetry in the first two slots,
 *   (2) symmetry in the last two slots (so L is totally symmetric),
 *   (3) anticommutation of every C_X with J.
 * Pure-type cubic parts, their hyperbolic/circular rescaling law, and the
 * vanishing of all mixed-type cubes live here as checkable operations.
 */

inline int shape_space_expected_dim(int half_dim) {
  return half_dim * (half_dim + 1) * (half_dim + 2) / 3;
}

inline int flat_index(int d, int a, int b, int c) { return (a * d + b) * d + c; }

/** Basis of the constraint null space, one totally-lowered Tensor3 per column. */
inline std::vector<Tensor3<double>> shape_space_basis(const Eigen::MatrixXd& jmat,
                                                      double tol = kRankTol) {
  const int d = static_cast<int>(jmat.rows());
  const int n3 = d * d * d;
  Eigen::MatrixXd constraints = Eigen::MatrixXd::Zero(3 * n3, n3);
  int row = 0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        constraints(row, flat_index(d, a, b, c)) += 1.0;
        constraints(row, flat_index(d, b, a, c)) -= 1.0;
        ++row;
        constraints(row, flat_index(d, a, b, c)) += 1.0;
        constraints(row, flat_index(d, a, c, b)) -= 1.0;
        ++row;
        // g({C_a, J} e_b, e_c) = sum_e J(e,b) L(a,e,c) - J(e,c) L(a,b,e)
        // (the second term picks up a sign because J pairs skewly)
        for (int e = 0; e < d; ++e) {
          constraints(row, flat_index(d, a, e, c)) += jmat(e, b);
          constraints(row, flat_index(d, a, b, e)) -= jmat(e, c);
        }
        ++row;
      }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double scale = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, scale)) ++rank;

  std::vector<Tensor3<double>> basis;
  for (int k = rank; k < n3; ++k) {
    Tensor3<double> t(d, d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) t(a, b, c) = svd.matrixV()(flat_index(d, a, b, c), k);
    basis.push_back(std::move(t));
  }
  return basis;
}

inline Tensor3<double> random_shape_tensor(const std::vector<Tensor3<double>>& basis, Rng& rng) {
  if (basis.empty()) throw std::invalid_argument("random_shape_tensor: empty basis");
  const int d = basis[0].dim0();
  Tensor3<double> out(d, d, d);
  out.setZero();
  for (const auto& b : basis) {
    double c = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) out(i, j, k) += c * b(i, j, k);
  }
  return out;
}

/** Operator C_X for X given in components; raises the last slot with g. */
inline Eigen::MatrixXd shape_operator_matrix(const Tensor3<double>& low, const Eigen::MatrixXd& g,
                                             const Eigen::VectorXd& x) {
  const int d = low.dim0();
  Eigen::MatrixXd lowered = Eigen::MatrixXd::Zero(d, d);  // (b,c) -> g(C_X e_b, e_c)
  for (int a = 0; a < d; ++a) {
    if (x(a) == 0.0) continue;
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) lowered(b, c) += x(a) * low(a, b, c);
  }
  return g.ldlt().solve(lowered.transpose());  // (C_X)^c_b = g^{ce} lowered(b,e)
}

/** Max violation of the defining constraints of the shape space. */
inline double shape_constraints_residual(const Tensor3<double>& low, const Eigen::MatrixXd& jmat) {
  const int d = low.dim0();
  double r = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        r = std::max(r, std::abs(low(a, b, c) - low(b, a, c)));
        r = std::max(r, std::abs(low(a, b, c) - low(a, c, b)));
        double anti = 0.0;
        for (int e = 0; e < d; ++e) anti += jmat(e, b) * low(a, e, c) - jmat(e, c) * low(a, b, e);
        r = std::max(r, std::abs(anti));
      }
  return r;
}

/** Rescales the tensor along the circular (eps=-1) or hyperbolic (eps=+1)
 *  family: cos/cosh(theta) * C + sin/sinh(theta) * (J ∘ C). */
inline Tensor3<double> rotate_shape_tensor(const Tensor3<double>& low, const Eigen::MatrixXd& jmat,
                                           double theta, int eps_case) {
  const int d = low.dim0();
  const double c0 = eps_case == -1 ? std::cos(theta) : std::cosh(theta);
  const double c1 = eps_case == -1 ? std::sin(theta) : std::sinh(theta);
  Tensor3<double> out(d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        double jc = 0.0;  // g(J C_a e_b, e_c) = -L(a, b, J e_c)
        for (int e = 0; e < d; ++e) jc -= jmat(e, c) * low(a, b, e);
        out(a, b, c) = c0 * low(a, b, c) + c1 * jc;
      }
  return out;
}

template <typename Scalar>
Tensor3<Scalar> project_cubic(const Tensor3<double>& low,
                              const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& p1,
                              const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& p2,
                              const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& p3) {
  const int d = low.dim0();
  Tensor3<Scalar> out(d, d, d);
  out.setZero();
  // contract one slot at a time to stay O(d^4)
  Tensor3<Scalar> t1(d, d, d), t2(d, d, d);
  t1.setZero();
  t2.setZero();
  for (int a = 0; a < d; ++a)
    for (int e = 0; e < d; ++e) {
      if (p1(e, a) == Scalar(0)) continue;
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) t1(a, b, c) += p1(e, a) * Scalar(low(e, b, c));
    }
  for (int b = 0; b < d; ++b)
    for (int e = 0; e < d; ++e) {
      if (p2(e, b) == Scalar(0)) continue;
      for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) t2(a, b, c) += p2(e, b) * t1(a, e, c);
    }
  for (int c = 0; c < d; ++c)
    for (int e = 0; e < d; ++e) {
      if (p3(e, c) == Scalar(0)) continue;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) out(a, b, c) += p3(e, c) * t2(a, b, e);
    }
  return out;
}

struct CubicDecomposition {
  // eps = -1: pure part q with C = 2 Re(q); stored as q_re, q_im on real args.
  // eps = +1: q_re = plus-cube, q_im = minus-cube, C = q_re + q_im.
  Tensor3<double> q_re;
  Tensor3<double> q_im;
  double mixed_residual = 0.0;
  double reconstruction_residual = 0.0;
};

/** Splits a shape tensor into its pure cubic parts and reports how large the
 *  mixed-type cubes are (zero for genuine shape tensors). */
inline CubicDecomposition decompose_cubic(const Tensor3<double>& low, const Eigen::MatrixXd& jmat,
                                          int eps_case) {
  const int d = low.dim0();
  CubicDecomposition out;
  out.q_re = Tensor3<double>(d, d, d);
  out.q_im = Tensor3<double>(d, d, d);

  if (eps_case == -1) {
    using C = std::complex<double>;
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd jc = jmat.cast<C>();
    Eigen::MatrixXcd p = 0.5 * (id - C(0, 1) * jc);   // (1,0) projector
    Eigen::MatrixXcd pb = 0.5 * (id + C(0, 1) * jc);  // (0,1) projector
    auto q = project_cubic<C>(low, p, p, p);
    double mixed = 0.0, recon = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) {
          out.q_re(a, b, c) = q(a, b, c).real();
          out.q_im(a, b, c) = q(a, b, c).imag();
          recon = std::max(recon,
                           std::abs(low(a, b, c) - 2.0 * q(a, b, c).real()));
        }
    const Eigen::MatrixXcd* pr[2] = {&p, &pb};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          if (i == j && j == k) continue;
          auto m = project_cubic<C>(low, *pr[i], *pr[j], *pr[k]);
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
              for (int c = 0; c < d; ++c) mixed = std::max(mixed, std::abs(m(a, b, c)));
        }
    out.mixed_residual = mixed;
    out.reconstruction_residual = recon;
  } else {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd pp = 0.5 * (id + jmat);
    Eigen::MatrixXd pm = 0.5 * (id - jmat);
    auto qp = project_cubic<double>(low, pp, pp, pp);
    auto qm = project_cubic<double>(low, pm, pm, pm);
    double mixed = 0.0, recon = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) {
          out.q_re(a, b, c) = qp(a, b, c);
          out.q_im(a, b, c) = qm(a, b, c);
          recon = std::max(recon, std::abs(low(a, b, c) - qp(a, b, c) - qm(a, b, c)));
        }
    // mixed cubes probed explicitly: anything with both projector types
    const Eigen::MatrixXd* pr[2] = {&pp, &pm};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          if (i == j && j == k) continue;
          auto m = project_cubic<double>(low, *pr[i], *pr[j], *pr[k]);
          mixed = std::max(mixed, m.max_abs());
        }
    out.mixed_residual = mixed;
    out.reconstruction_residual = recon;
  }
  return out;
}

/** Predicted pure-part scalings under rotate_shape_tensor: the complex cube
 *  picks up exp(-i theta), the plus/minus cubes pick up exp(∓theta). */
inline double cubic_rotation_law_residual(const Tensor3<double>& low, const Eigen::MatrixXd& jmat,
                                          double theta, int eps_case) {
  auto rotated = rotate_shape_tensor(low, jmat, theta, eps_case);
  auto before = decompose_cubic(low, jmat, eps_case);
  auto after = decompose_cubic(rotated, jmat, eps_case);
  const int d = low.dim0();
  double r = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        if (eps_case == -1) {
          std::complex<double> q0(before.q_re(a, b, c), before.q_im(a, b, c));
          std::complex<double> q1(after.q_re(a, b, c), after.q_im(a, b, c));
          std::complex<double> want = std::exp(std::complex<double>(0, -theta)) * q0;
          r = std::max(r, std::abs(q1 - want));
        } else {
          r = std::max(r, std::abs(after.q_re(a, b, c) - std::exp(-theta) * before.q_re(a, b, c)));
          r = std::max(r, std::abs(after.q_im(a, b, c) - std::exp(theta) * before.q_im(a, b, c)));
        }
      }
  return r;
}

}  // namespace pqk
