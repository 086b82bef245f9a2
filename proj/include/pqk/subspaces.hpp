#pragma once

#include <Eigen/Dense>

#include <utility>

#include "pqk/adapted_basis.hpp"
#include "pqk/common.hpp"

namespace pqk {

/** Euclidean-orthonormal basis of the column span, rank decided by tol. */
inline Eigen::MatrixXd euclidean_span_basis(const Eigen::MatrixXd& m, double tol = kRankTol) {
  if (m.cols() == 0) return Eigen::MatrixXd(m.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double scale = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, scale)) ++rank;
  return svd.matrixU().leftCols(rank);
}

/** Basis of the kernel of m (right null space). */
inline Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& m, double tol = kRankTol) {
  if (m.cols() == 0) return Eigen::MatrixXd(0, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double scale = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, scale)) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

/** Orthonormal basis of span(a) ∩ span(b). */
inline Eigen::MatrixXd intersect_spans(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                       double tol = kRankTol) {
  if (a.cols() == 0 || b.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::MatrixXd stacked(a.rows(), a.cols() + b.cols());
  stacked << a, -b;
  Eigen::MatrixXd ker = nullspace_basis(stacked, tol);
  if (ker.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::MatrixXd inside = a * ker.topRows(a.cols());
  return euclidean_span_basis(inside, tol);
}

/** Largest-|entry| distance from span(w) containment: ||(Id - P_w) m||_max. */
inline double containment_residual(const Eigen::MatrixXd& w, const Eigen::MatrixXd& m,
                                   double tol = kRankTol) {
  Eigen::MatrixXd bw = euclidean_span_basis(w, tol);
  Eigen::MatrixXd rem = m - bw * (bw.transpose() * m);
  return rem.size() ? rem.cwiseAbs().maxCoeff() : 0.0;
}

struct PseudoOrthonormalFrame {
  Eigen::MatrixXd basis;  // columns e_k with g(e_j, e_k) = signs[k] * delta_jk
  Eigen::VectorXi signs;
};

/**
 * Pseudo-orthonormal frame of span(w) for the (indefinite) metric g, built
 * from the eigendecomposition of the restricted Gram matrix. Throws
 * DegenerateMetricError with a null witness vector when the restriction of g
 * to span(w) is singular at tolerance tol.
 */
inline PseudoOrthonormalFrame pseudo_orthonormalize(const Eigen::MatrixXd& w,
                                                    const Eigen::MatrixXd& g,
                                                    double tol = kRankTol) {
  Eigen::MatrixXd b = euclidean_span_basis(w, tol);
  const int k = static_cast<int>(b.cols());
  PseudoOrthonormalFrame out;
  out.basis = Eigen::MatrixXd(w.rows(), k);
  out.signs = Eigen::VectorXi(k);
  if (k == 0) return out;

  Eigen::MatrixXd gram = b.transpose() * g * b;
  gram = 0.5 * (gram + gram.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const Eigen::VectorXd& lam = es.eigenvalues();
  double scale = lam.cwiseAbs().maxCoeff();
  for (int i = 0; i < k; ++i) {
    if (std::abs(lam(i)) <= tol * std::max(1.0, scale)) {
      Eigen::VectorXd witness = b * es.eigenvectors().col(i);
      throw DegenerateMetricError(
          "metric restricted to subspace is degenerate (|eigenvalue| = " +
              std::to_string(std::abs(lam(i))) + ")",
          witness);
    }
    out.basis.col(i) = b * es.eigenvectors().col(i) / std::sqrt(std::abs(lam(i)));
    out.signs(i) = lam(i) > 0 ? 1 : -1;
  }
  return out;
}

/**
 * Fixed-order Gram-Schmidt against g, no pivoting, so the result depends
 * smoothly on the input columns away from null pivots. Used for frame fields
 * that feed finite differences; pivoting would introduce kinks.
 */
inline PseudoOrthonormalFrame gram_schmidt_fixed_order(const Eigen::MatrixXd& w,
                                                       const Eigen::MatrixXd& g,
                                                       double tol = kRankTol) {
  const int k = static_cast<int>(w.cols());
  PseudoOrthonormalFrame out;
  out.basis = Eigen::MatrixXd(w.rows(), k);
  out.signs = Eigen::VectorXi(k);
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v = w.col(i);
    for (int j = 0; j < i; ++j) {
      double c = static_cast<double>(out.signs(j)) * (out.basis.col(j).transpose() * g * v)(0);
      v -= c * out.basis.col(j);
    }
    double nn = (v.transpose() * g * v)(0);
    if (std::abs(nn) <= tol * std::max(1.0, v.squaredNorm()))
      throw DegenerateMetricError("null pivot in fixed-order Gram-Schmidt at column " +
                                      std::to_string(i),
                                  v);
    out.basis.col(i) = v / std::sqrt(std::abs(nn));
    out.signs(i) = nn > 0 ? 1 : -1;
  }
  return out;
}

struct InvariantSplit {
  Eigen::MatrixXd t_bar;         // basis of W ∩ J2 W (maximal Q-invariant part)
  Eigen::MatrixXd d_part;        // g-orthogonal complement of t_bar inside W
  double j1_invariance_residual = 0.0;
  std::array<double, 3> t_bar_invariance = {0.0, 0.0, 0.0};
  double d_j1_invariance_residual = 0.0;
};

/**
 * Splits a J1-invariant subspace W as (W ∩ J2 W) ⊕ complement. The first
 * factor is invariant under all three structures when W is J1-invariant; the
 * complement is taken g-orthogonal, which keeps it J1-invariant. Throws when
 * g restricted to W ∩ J2 W degenerates, since the complement is then not a
 * complement at all.
 */
inline InvariantSplit invariant_subspace(const Eigen::MatrixXd& w, const AdaptedBasis& b,
                                         const Eigen::MatrixXd& g, double tol = kRankTol) {
  InvariantSplit out;
  Eigen::MatrixXd bw = euclidean_span_basis(w, tol);
  out.j1_invariance_residual = containment_residual(bw, b.j1() * bw, tol);

  out.t_bar = intersect_spans(bw, b.j2() * bw, tol);
  for (int a = 0; a < 3; ++a)
    out.t_bar_invariance[a] = containment_residual(out.t_bar, b.j[a] * out.t_bar, tol);

  if (out.t_bar.cols() == 0) {
    out.d_part = bw;
  } else {
    pseudo_orthonormalize(out.t_bar, g, tol);  // degeneracy gate
    Eigen::MatrixXd constraints = out.t_bar.transpose() * g * bw;  // rows: t_bar, cols: W coords
    Eigen::MatrixXd ker = nullspace_basis(constraints, tol);
    out.d_part = bw * ker;
  }
  out.d_j1_invariance_residual = containment_residual(out.d_part, b.j1() * out.d_part, tol);
  return out;
}

}  // namespace pqk
