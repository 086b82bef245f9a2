#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>

#include "pqk/common.hpp"
#include "pqk/split_quaternion.hpp"

namespace pqk {

/** Flat pseudo-Euclidean space: dimension plus a constant metric matrix. */
struct PseudoEuclideanSpace {
  Eigen::MatrixXd g;

  int dim() const { return static_cast<int>(g.rows()); }
  std::array<int, 3> metric_signature(double tol = kRankTol) const { return signature(g, tol); }
};

/**
 * Adapted basis (J1, J2, J3) of the structure bundle at a point:
 * J_a^2 = eps_a * Id, pairwise anticommuting, J1 J2 = J3, all skew-symmetric
 * for the ambient metric. eps is (-1,1,1) in the complex case and (1,1,-1) in
 * the para-complex case; eps[0] is the structure tag of J1.
 */
struct AdaptedBasis {
  std::array<Eigen::MatrixXd, 3> j;
  std::array<int, 3> eps;

  const Eigen::MatrixXd& j1() const { return j[0]; }
  const Eigen::MatrixXd& j2() const { return j[1]; }
  const Eigen::MatrixXd& j3() const { return j[2]; }
  int dim() const { return static_cast<int>(j[0].rows()); }
  int eps_case() const { return eps[0] == -1 ? -1 : +1; }
};

inline std::array<int, 3> eps_triple(int eps_case) {
  if (eps_case == -1) return {-1, 1, 1};
  if (eps_case == +1) return {1, 1, -1};
  throw std::invalid_argument("eps_case must be -1 or +1");
}

/** Matrix of q -> q * u on one split-quaternion slot, coordinates (a,b,c,d). */
inline Eigen::Matrix4d right_multiplication(const SplitQuaternion& u) {
  Eigen::Matrix4d m;
  const SplitQuaternion basis[4] = {SplitQuaternion::one(), SplitQuaternion::ui(),
                                    SplitQuaternion::uj(), SplitQuaternion::uk()};
  for (int col = 0; col < 4; ++col) {
    SplitQuaternion p = basis[col] * u;
    m(0, col) = p.a;
    m(1, col) = p.b;
    m(2, col) = p.c;
    m(3, col) = p.d;
  }
  return m;
}

inline Eigen::MatrixXd blockwise(const Eigen::Matrix4d& m, int n) {
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  for (int s = 0; s < n; ++s) big.block<4, 4>(4 * s, 4 * s) = m;
  return big;
}

/**
 * Standard flat model on n split-quaternion slots. The metric is the real
 * part of conj(p) * q per slot, i.e. diag(+1,+1,-1,-1) blocks; the adapted
 * basis acts by right multiplication with unit split quaternions:
 *   eps = -1: (J1,J2,J3) = (R_I, R_J, -R_K),
 *   eps = +1: (J1,J2,J3) = (R_J, R_K,  R_I).
 * Right multiplications are skew for this metric, which fixes the signs.
 */
inline std::pair<PseudoEuclideanSpace, AdaptedBasis> make_standard_basis(int n, int eps_case) {
  if (n < 1) throw std::invalid_argument("make_standard_basis: n must be >= 1");
  auto eps = eps_triple(eps_case);

  Eigen::Vector4d slot_diag(1.0, 1.0, -1.0, -1.0);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  for (int s = 0; s < n; ++s) g.block<4, 4>(4 * s, 4 * s) = slot_diag.asDiagonal();

  AdaptedBasis b;
  b.eps = eps;
  if (eps_case == -1) {
    b.j[0] = blockwise(right_multiplication(SplitQuaternion::ui()), n);
    b.j[1] = blockwise(right_multiplication(SplitQuaternion::uj()), n);
    b.j[2] = blockwise(-right_multiplication(SplitQuaternion::uk()), n);
  } else {
    b.j[0] = blockwise(right_multiplication(SplitQuaternion::uj()), n);
    b.j[1] = blockwise(right_multiplication(SplitQuaternion::uk()), n);
    b.j[2] = blockwise(right_multiplication(SplitQuaternion::ui()), n);
  }
  return {PseudoEuclideanSpace{g}, b};
}

/** Max violation of the adapted-basis relations against the given metric. */
inline double adapted_basis_residual(const AdaptedBasis& b, const Eigen::MatrixXd& g) {
  const int d = b.dim();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  double r = 0.0;
  for (int a = 0; a < 3; ++a) {
    r = std::max(r, (b.j[a] * b.j[a] - b.eps[a] * id).cwiseAbs().maxCoeff());
    r = std::max(r, (g * b.j[a] + b.j[a].transpose() * g).cwiseAbs().maxCoeff());
    for (int c = a + 1; c < 3; ++c)
      r = std::max(r, (b.j[a] * b.j[c] + b.j[c] * b.j[a]).cwiseAbs().maxCoeff());
  }
  // J_a J_b = eps3 * eps_c * J_c over cyclic (a,b,c).
  const int cyc[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (const auto& p : cyc) {
    Eigen::MatrixXd want = static_cast<double>(b.eps[2] * b.eps[p[2]]) * b.j[p[2]];
    r = std::max(r, (b.j[p[0]] * b.j[p[1]] - want).cwiseAbs().maxCoeff());
  }
  return r;
}

/** Rotation matrix acting on adapted bases: circular for eps = -1, hyperbolic
 *  for eps = +1. Columns give the new basis in terms of the old one. */
inline Eigen::Matrix3d basis_rotation_matrix(int eps_case, double theta) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  if (eps_case == -1) {
    m(1, 1) = std::cos(theta);
    m(1, 2) = -std::sin(theta);
    m(2, 1) = std::sin(theta);
    m(2, 2) = std::cos(theta);
  } else {
    m(1, 1) = std::cosh(theta);
    m(1, 2) = std::sinh(theta);
    m(2, 1) = std::sinh(theta);
    m(2, 2) = std::cosh(theta);
  }
  return m;
}

/** New adapted basis J'_a = sum_b B(b,a) J_b; fixes J1 and rotates (J2,J3). */
inline AdaptedBasis rotate_basis(const AdaptedBasis& b, double theta) {
  Eigen::Matrix3d m = basis_rotation_matrix(b.eps_case(), theta);
  AdaptedBasis out;
  out.eps = b.eps;
  for (int a = 0; a < 3; ++a) {
    out.j[a] = m(0, a) * b.j[0] + m(1, a) * b.j[1] + m(2, a) * b.j[2];
  }
  return out;
}

/** Structure-bundle element a*J1 + b*J2 + c*J3 as a matrix. */
inline Eigen::MatrixXd q_element(const AdaptedBasis& b, const Eigen::Vector3d& coeff) {
  return coeff[0] * b.j[0] + coeff[1] * b.j[1] + coeff[2] * b.j[2];
}

/**
 * Invariant norm on the structure bundle: for L = a*J1 + b*J2 + c*J3,
 * L^2 = -q_norm * Id. Works out to a^2-b^2-c^2 (eps=-1) and -a^2-b^2+c^2
 * (eps=+1); preserved by rotate_basis.
 */
inline double q_norm(const Eigen::Vector3d& coeff, const std::array<int, 3>& eps) {
  return -(eps[0] * coeff[0] * coeff[0] + eps[1] * coeff[1] * coeff[1] +
           eps[2] * coeff[2] * coeff[2]);
}

}  // namespace pqk
