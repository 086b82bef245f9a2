#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pqk/chart.hpp"
#include "pqk/common.hpp"
#include "pqk/curvature.hpp"
#include "pqk/model_spaces.hpp"
#include "pqk/shape_space.hpp"
#include "pqk/subspaces.hpp"
#include "pqk/tensors.hpp"

namespace pqk {

/** Chart on the immersion's domain carrying the induced metric. */
inline Chart induced_chart(const Immersion& imm) {
  Chart chart;
  chart.dim = imm.domain_dim;
  chart.eps = imm.ambient.eps;
  chart.fd_step = imm.ambient.fd_step;
  Immersion copy = imm;
  chart.metric = [copy](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
    Eigen::MatrixXd d = immersion_differential(copy, u);
    return d.transpose() * copy.ambient.metric(copy.map(u)) * d;
  };
  return chart;
}

/** Induced structure operator on domain coordinates at u. */
inline Eigen::MatrixXd induced_structure(const Immersion& imm, const Eigen::VectorXd& u) {
  Eigen::MatrixXd d = immersion_differential(imm, u);
  Eigen::VectorXd x = imm.map(u);
  Eigen::MatrixXd g = imm.ambient.metric(x);
  Eigen::MatrixXd gind = d.transpose() * g * d;
  return gind.ldlt().solve(d.transpose() * g * imm.ambient.structure[0](x) * d);
}

/** Restricted Kähler 2-form on domain coordinates at u. */
inline Eigen::MatrixXd induced_kahler_form(const Immersion& imm, const Eigen::VectorXd& u) {
  Eigen::MatrixXd d = immersion_differential(imm, u);
  Eigen::VectorXd x = imm.map(u);
  Eigen::MatrixXd g = imm.ambient.metric(x);
  return d.transpose() * imm.ambient.structure[0](x).transpose() * g * d;
}

/** Restricted connection forms, omega(alpha, domain direction). */
inline Eigen::MatrixXd restricted_connection_forms(const Immersion& imm,
                                                   const Eigen::VectorXd& u) {
  Eigen::MatrixXd d = immersion_differential(imm, u);
  ConnectionForms cf = connection_one_forms(imm.ambient, imm.map(u));
  return cf.omega * d;
}

/** Ambient curvature: exact nu*R0 when the chart has been validated as a
 *  space form (declared_nu set), finite differences otherwise. */
inline CurvatureTensor ambient_curvature(const Chart& chart, const Eigen::VectorXd& x) {
  if (!std::isnan(chart.declared_nu)) {
    PseudoEuclideanSpace space{chart.metric(x)};
    return model_space_curvature(space, chart.basis_at(x), chart.declared_nu);
  }
  return curvature_fd(chart, x);
}

struct PointDataOptions {
  double complex_tol = 1e-6;  // gate for forcing the normal frame to J2(TM)
  double frame_tol = kRankTol;
};

/** Everything first- and second-order at one domain point. */
struct SubmanifoldPointData {
  Eigen::VectorXd u, x;
  Eigen::MatrixXd d;       // differential, ambient_dim x domain_dim
  Eigen::MatrixXd g_amb, g_ind, ginv_ind;
  std::array<Eigen::MatrixXd, 3> j_amb;
  Eigen::MatrixXd jdom;    // induced structure on domain coordinates
  Eigen::MatrixXd fdom;    // restricted Kähler form
  Eigen::MatrixXd ptan;    // ambient projector onto the tangent space
  Eigen::MatrixXd tangent_frame;
  Eigen::VectorXi tangent_signs;
  Eigen::MatrixXd normal_frame;
  Eigen::VectorXi normal_signs;
  bool maximal_totally_complex = false;
  std::vector<Eigen::VectorXd> h;  // h(a,b), row-major in (a,b)
  double h_norm = 0.0;
  Tensor3<double> c_low;           // <J2 h(a,b), tangent_c>, zero-sized if n/a
  Eigen::MatrixXd omega_t;         // 3 x domain_dim
  Eigen::VectorXd psi;
  double hermitian_residual = 0.0;
  double totally_complex_residual = 0.0;
  double pq_residual = 0.0;
  double kahler_k2_residual = 0.0;
  bool degenerate_stratum = false;

  int m() const { return static_cast<int>(d.cols()); }
  const Eigen::VectorXd& h_at(int a, int b) const { return h[a * m() + b]; }
};

inline SubmanifoldPointData point_data(const Immersion& imm, const Eigen::VectorXd& u,
                                       PointDataOptions opt = {}) {
  SubmanifoldPointData pd;
  const int m = imm.domain_dim;
  const int dim = imm.ambient.dim;
  pd.u = u;
  pd.x = imm.map(u);
  pd.d = immersion_differential(imm, u);
  pd.g_amb = imm.ambient.metric(pd.x);
  for (int a = 0; a < 3; ++a) pd.j_amb[a] = imm.ambient.structure[a](pd.x);
  pd.g_ind = pd.d.transpose() * pd.g_amb * pd.d;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pd.g_ind);
  double gscale = es.eigenvalues().cwiseAbs().maxCoeff();
  int arg = 0;
  if (es.eigenvalues().cwiseAbs().minCoeff(&arg) <= opt.frame_tol * std::max(1.0, gscale))
    throw DegenerateMetricError("induced metric degenerate at sampled point",
                                pd.d * es.eigenvectors().col(arg));

  pd.ginv_ind = pd.g_ind.inverse();
  pd.ptan = pd.d * pd.ginv_ind * pd.d.transpose() * pd.g_amb;
  pd.jdom = pd.ginv_ind * (pd.d.transpose() * pd.g_amb * pd.j_amb[0] * pd.d);
  pd.fdom = pd.d.transpose() * pd.j_amb[0].transpose() * pd.g_amb * pd.d;

  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
  pd.hermitian_residual = ((id - pd.ptan) * pd.j_amb[0] * pd.d).cwiseAbs().maxCoeff();
  pd.totally_complex_residual =
      (pd.d.transpose() * pd.g_amb * (pd.j_amb[1] * pd.d)).cwiseAbs().maxCoeff();
  pd.pq_residual = 0.0;
  for (int a = 0; a < 3; ++a)
    pd.pq_residual = std::max(
        pd.pq_residual, ((id - pd.ptan) * pd.j_amb[a] * pd.d).cwiseAbs().maxCoeff());

  PseudoOrthonormalFrame tf = pseudo_orthonormalize(pd.d, pd.g_amb, opt.frame_tol);
  pd.tangent_frame = tf.basis;
  pd.tangent_signs = tf.signs;

  pd.maximal_totally_complex =
      pd.totally_complex_residual <= opt.complex_tol && 2 * m == dim;
  if (pd.maximal_totally_complex) {
    pd.normal_frame = pd.j_amb[1] * pd.tangent_frame;
    pd.normal_signs = -pd.tangent_signs;
  } else if (dim > m) {
    Eigen::MatrixXd span = nullspace_basis(pd.d.transpose() * pd.g_amb, opt.frame_tol);
    PseudoOrthonormalFrame nf = pseudo_orthonormalize(span, pd.g_amb, opt.frame_tol);
    pd.normal_frame = nf.basis;
    pd.normal_signs = nf.signs;
  }

  // Second fundamental form: normal projection of coordinate second
  // derivatives plus the ambient Christoffel correction.
  Tensor3<double> gamma_amb = christoffel(imm.ambient, pd.x);
  const double h2 = std::sqrt(imm.ambient.fd_step);
  Eigen::VectorXd steps2(m);
  for (int a = 0; a < m; ++a) steps2(a) = h2 * std::max(1.0, std::abs(u(a)));
  pd.h.assign(static_cast<size_t>(m) * m, Eigen::VectorXd::Zero(dim));
  Eigen::MatrixXd pnor = id - pd.ptan;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b <= a; ++b) {
      Eigen::VectorXd dd(dim);
      if (a == b) {
        Eigen::VectorXd up = u, um = u;
        up(a) += steps2(a);
        um(a) -= steps2(a);
        dd = (imm.map(up) - 2.0 * pd.x + imm.map(um)) / (steps2(a) * steps2(a));
      } else {
        Eigen::VectorXd upp = u, upm = u, ump = u, umm = u;
        upp(a) += steps2(a); upp(b) += steps2(b);
        upm(a) += steps2(a); upm(b) -= steps2(b);
        ump(a) -= steps2(a); ump(b) += steps2(b);
        umm(a) -= steps2(a); umm(b) -= steps2(b);
        dd = (imm.map(upp) - imm.map(upm) - imm.map(ump) + imm.map(umm)) /
             (4.0 * steps2(a) * steps2(b));
      }
      Eigen::VectorXd corr(dim);
      for (int c = 0; c < dim; ++c) {
        double s = 0.0;
        for (int p = 0; p < dim; ++p)
          for (int q = 0; q < dim; ++q) s += gamma_amb(c, p, q) * pd.d(p, a) * pd.d(q, b);
        corr(c) = s;
      }
      Eigen::VectorXd hv = pnor * (dd + corr);
      pd.h[a * m + b] = hv;
      pd.h[b * m + a] = hv;
      pd.h_norm = std::max(pd.h_norm, hv.cwiseAbs().maxCoeff());
    }

  if (pd.maximal_totally_complex) {
    pd.c_low = Tensor3<double>(m, m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        Eigen::VectorXd low = pd.d.transpose() * pd.g_amb * (pd.j_amb[1] * pd.h_at(a, b));
        for (int c = 0; c < m; ++c) pd.c_low(a, b, c) = low(c);
      }
  }

  pd.omega_t = restricted_connection_forms(imm, u);
  pd.kahler_k2_residual =
      std::max(pd.omega_t.row(1).cwiseAbs().maxCoeff(), pd.omega_t.row(2).cwiseAbs().maxCoeff());
  pd.psi = Eigen::VectorXd(m);
  for (int a = 0; a < m; ++a) {
    double v = -pd.omega_t(1, a);
    for (int b = 0; b < m; ++b) v += pd.jdom(b, a) * pd.omega_t(2, b);
    pd.psi(a) = v;
  }

  AdaptedBasis basis = imm.ambient.basis_at(pd.x);
  try {
    invariant_subspace(pd.d, basis, pd.g_amb, opt.frame_tol);
  } catch (const DegenerateMetricError&) {
    pd.degenerate_stratum = true;
  }
  return pd;
}

/** Raised shape operator of the a-th coordinate direction, C_{e_a}. */
inline Eigen::MatrixXd shape_operator(const SubmanifoldPointData& pd, int a) {
  const int m = pd.m();
  Eigen::MatrixXd low(m, m);
  for (int b = 0; b < m; ++b)
    for (int c = 0; c < m; ++c) low(b, c) = pd.c_low(a, b, c);
  return pd.ginv_ind * low.transpose();
}

// ---------------------------------------------------------------------------
// classification

struct ClassificationVerdict {
  double hermitian = 0.0;
  double kahler_k1 = 0.0;  // parallel Kähler form
  double kahler_k2 = 0.0;  // restricted omega_2, omega_3
  double totally_complex = 0.0;
  double para_quaternionic = 0.0;
  double totally_geodesic = 0.0;
  double almost_kahler_df = 0.0;
  double nijenhuis = 0.0;
  double psi = 0.0;
  double nu_hat = 0.0;
  bool degenerate_stratum = false;
  bool exclusivity_violation = false;
  int points = 0;
};

/** Coordinate Nijenhuis tensor of the induced structure field at u. */
inline Tensor3<double> nijenhuis_tensor(const Immersion& imm, const Eigen::VectorXd& u) {
  const int m = imm.domain_dim;
  Eigen::VectorXd h = fd_steps(u, imm.ambient.fd_step);
  Eigen::MatrixXd j = induced_structure(imm, u);
  std::vector<Eigen::MatrixXd> dj(m);
  for (int a = 0; a < m; ++a) {
    Eigen::VectorXd up = u, um = u;
    up(a) += h(a);
    um(a) -= h(a);
    dj[a] = (induced_structure(imm, up) - induced_structure(imm, um)) / (2.0 * h(a));
  }
  Tensor3<double> n(m, m, m);  // n(c,a,b) = N^c(e_a, e_b)
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        double v = 0.0;
        for (int e = 0; e < m; ++e)
          v += j(e, a) * dj[e](c, b) - j(e, b) * dj[e](c, a) + j(c, e) * dj[b](e, a) -
               j(c, e) * dj[a](e, b);
        n(c, a, b) = v;
      }
  return n;
}

/** Residual of the reconstruction of N from psi:
 *    N(X,Y) = -J2 { psi(X) Y + eps psi(JX) JY - psi(Y) X - eps psi(JY) JX }. */
inline double nijenhuis_reconstruction_residual(const Immersion& imm,
                                                const SubmanifoldPointData& pd,
                                                const Tensor3<double>& n) {
  const int m = pd.m();
  const int eps = imm.ambient.eps[0];
  Eigen::VectorXd psij(m);  // psi(J e_a)
  for (int a = 0; a < m; ++a) {
    double v = 0.0;
    for (int b = 0; b < m; ++b) v += pd.jdom(b, a) * pd.psi(b);
    psij(a) = v;
  }
  double worst = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Eigen::VectorXd n_direct = Eigen::VectorXd::Zero(imm.ambient.dim);
      for (int c = 0; c < m; ++c) n_direct += n(c, a, b) * pd.d.col(c);
      Eigen::VectorXd ta = pd.d.col(a), tb = pd.d.col(b);
      Eigen::VectorXd ja = pd.d * pd.jdom.col(a), jb = pd.d * pd.jdom.col(b);
      Eigen::VectorXd inner =
          pd.psi(a) * tb + eps * psij(a) * jb - pd.psi(b) * ta - eps * psij(b) * ja;
      Eigen::VectorXd n_from_psi = -pd.j_amb[1] * inner;
      worst = std::max(worst, (n_direct - n_from_psi).cwiseAbs().maxCoeff());
    }
  return worst;
}

inline ClassificationVerdict classify(const Immersion& imm,
                                      const std::vector<Eigen::VectorXd>& points,
                                      double exclusivity_tol = 1e-4) {
  if (points.empty()) throw ScenarioError("classification requires at least one point");
  ClassificationVerdict cv;
  cv.points = static_cast<int>(points.size());
  Chart dom = induced_chart(imm);
  Immersion copy = imm;
  auto f_field = [&copy](const Eigen::VectorXd& v) { return induced_kahler_form(copy, v); };
  auto f_dyn = [&f_field](const Eigen::VectorXd& v) {
    Eigen::MatrixXd f = f_field(v);
    DynTensor t(std::vector<int>{static_cast<int>(f.rows()), static_cast<int>(f.cols())});
    for (int a = 0; a < f.rows(); ++a)
      for (int b = 0; b < f.cols(); ++b) t.at({a, b}) = f(a, b);
    return t;
  };

  for (const auto& u : points) {
    SubmanifoldPointData pd = point_data(imm, u);
    cv.hermitian = std::max(cv.hermitian, pd.hermitian_residual);
    cv.kahler_k2 = std::max(cv.kahler_k2, pd.kahler_k2_residual);
    cv.totally_complex = std::max(cv.totally_complex, pd.totally_complex_residual);
    cv.para_quaternionic = std::max(cv.para_quaternionic, pd.pq_residual);
    cv.totally_geodesic = std::max(cv.totally_geodesic, pd.h_norm);
    cv.psi = std::max(cv.psi, pd.psi.cwiseAbs().maxCoeff());
    cv.degenerate_stratum = cv.degenerate_stratum || pd.degenerate_stratum;

    DynTensor nf = covariant_derivative(dom, f_dyn, u, {false, false});
    cv.kahler_k1 = std::max(cv.kahler_k1, nf.max_abs());
    cv.almost_kahler_df = std::max(
        cv.almost_kahler_df, exterior_derivative_2form(f_field, u, dom.fd_step).max_abs());
    cv.nijenhuis = std::max(cv.nijenhuis, nijenhuis_tensor(imm, u).max_abs());
  }

  cv.nu_hat = std::isnan(imm.ambient.declared_nu) ? nu_estimate(imm.ambient, points.front())
                                                  : imm.ambient.declared_nu;
  bool kahler_pass = cv.kahler_k2 <= exclusivity_tol && cv.hermitian <= exclusivity_tol;
  bool pq_pass = cv.para_quaternionic <= exclusivity_tol;
  if (std::abs(cv.nu_hat) > 1e-6 && kahler_pass && pq_pass) cv.exclusivity_violation = true;
  return cv;
}

// ---------------------------------------------------------------------------
// pointwise identity suites

/** h(X, JY) = h(JX, Y) = J1 h(X,Y), and h(JX, JY) = eps h(X,Y). */
struct FundamentalIdentityResiduals {
  double swap = 0.0;       // h(X,JY) - h(JX,Y)
  double j_factor = 0.0;   // h(X,JY) - J1 h(X,Y)
  double double_j = 0.0;   // h(JX,JY) - eps h(X,Y)
  double max() const { return std::max({swap, j_factor, double_j}); }
};

inline FundamentalIdentityResiduals fundamental_identity_residuals(
    const Immersion& imm, const SubmanifoldPointData& pd) {
  const int m = pd.m();
  const int eps = imm.ambient.eps[0];
  FundamentalIdentityResiduals out;
  auto h_contract = [&](int slot_fixed, const Eigen::VectorXd& jcol, bool fixed_first) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(imm.ambient.dim);
    for (int e = 0; e < m; ++e)
      acc += jcol(e) * (fixed_first ? pd.h_at(slot_fixed, e) : pd.h_at(e, slot_fixed));
    return acc;
  };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Eigen::VectorXd h_x_jy = h_contract(a, pd.jdom.col(b), true);
      Eigen::VectorXd h_jx_y = h_contract(b, pd.jdom.col(a), false);
      Eigen::VectorXd j_h = pd.j_amb[0] * pd.h_at(a, b);
      out.swap = std::max(out.swap, (h_x_jy - h_jx_y).cwiseAbs().maxCoeff());
      out.j_factor = std::max(out.j_factor, (h_x_jy - j_h).cwiseAbs().maxCoeff());
      Eigen::VectorXd h_jx_jy = Eigen::VectorXd::Zero(imm.ambient.dim);
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
          h_jx_jy += pd.jdom(p, a) * pd.jdom(q, b) * pd.h_at(p, q);
      out.double_j =
          std::max(out.double_j, (h_jx_jy - eps * pd.h_at(a, b)).cwiseAbs().maxCoeff());
    }
  return out;
}

/** Weingarten operators via finite differences of smoothly extended normal
 *  fields; the extension pins the center values and evolves them by
 *  projection + fixed-order orthonormalization. */
struct WeingartenData {
  std::vector<Eigen::MatrixXd> a_ops;  // per normal frame vector, domain coords
  double symmetry = 0.0;               // g(A X, Y) symmetric
  double duality = 0.0;                // <A^xi X, Y> = <h(X,Y), xi>
  double c_duality = 0.0;              // C_X = -A^{J2 X} (maximal case only)
  double j_anticommute = 0.0;          // A J + J A
  double minimality = 0.0;             // tr_g A
};

inline WeingartenData weingarten_data(const Immersion& imm, const SubmanifoldPointData& pd) {
  const int m = pd.m();
  const int dim = imm.ambient.dim;
  const int k = static_cast<int>(pd.normal_frame.cols());
  Eigen::VectorXd h = fd_steps(pd.u, imm.ambient.fd_step);
  Tensor3<double> gamma_amb = christoffel(imm.ambient, pd.x);

  // normal frame field: project the center frame onto the normal space at u
  // and re-orthonormalize in fixed order (identity at the center point).
  Eigen::MatrixXd center = pd.normal_frame;
  Immersion copy = imm;
  auto frame_at = [&copy, center](const Eigen::VectorXd& v) -> Eigen::MatrixXd {
    Eigen::MatrixXd d = immersion_differential(copy, v);
    Eigen::VectorXd y = copy.map(v);
    Eigen::MatrixXd g = copy.ambient.metric(y);
    Eigen::MatrixXd gind = d.transpose() * g * d;
    Eigen::MatrixXd proj = center - d * gind.ldlt().solve(d.transpose() * (g * center));
    return gram_schmidt_fixed_order(proj, g).basis;
  };

  WeingartenData out;
  out.a_ops.assign(k, Eigen::MatrixXd::Zero(m, m));
  std::vector<Eigen::VectorXd> nabla_xi(static_cast<size_t>(k) * m);
  for (int a = 0; a < m; ++a) {
    Eigen::VectorXd up = pd.u, um = pd.u;
    up(a) += h(a);
    um(a) -= h(a);
    Eigen::MatrixXd fp = frame_at(up), fm = frame_at(um);
    for (int j = 0; j < k; ++j) {
      Eigen::VectorXd dxi = (fp.col(j) - fm.col(j)) / (2.0 * h(a));
      Eigen::VectorXd corr(dim);
      for (int c = 0; c < dim; ++c) {
        double s = 0.0;
        for (int p = 0; p < dim; ++p)
          for (int q = 0; q < dim; ++q)
            s += gamma_amb(c, p, q) * pd.d(p, a) * center(q, j);
        corr(c) = s;
      }
      nabla_xi[j * m + a] = dxi + corr;
    }
  }
  for (int j = 0; j < k; ++j) {
    Eigen::MatrixXd aj(m, m);
    for (int a = 0; a < m; ++a)
      aj.col(a) = -pd.ginv_ind * (pd.d.transpose() * (pd.g_amb * nabla_xi[j * m + a]));
    out.a_ops[j] = aj;

    Eigen::MatrixXd low = pd.g_ind * aj;  // <A^xi e_a, e_b>
    out.symmetry = std::max(out.symmetry, (low - low.transpose()).cwiseAbs().maxCoeff());
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        double paired = (pd.normal_frame.col(j).transpose() * pd.g_amb * pd.h_at(a, b))(0);
        out.duality = std::max(out.duality, std::abs(low(b, a) - paired));
      }
    out.j_anticommute = std::max(
        out.j_anticommute, (aj * pd.jdom + pd.jdom * aj).cwiseAbs().maxCoeff());
    out.minimality = std::max(out.minimality, std::abs(aj.trace()));
  }

  if (pd.maximal_totally_complex) {
    for (int a = 0; a < m; ++a) {
      // expand J2 D_a in the normal frame, then combine the A-operators
      Eigen::VectorXd j2x = pd.j_amb[1] * pd.d.col(a);
      Eigen::MatrixXd a_j2x = Eigen::MatrixXd::Zero(m, m);
      for (int j = 0; j < k; ++j) {
        double coef = pd.normal_signs(j) *
                      (pd.normal_frame.col(j).transpose() * pd.g_amb * j2x)(0);
        a_j2x += coef * out.a_ops[j];
      }
      Eigen::MatrixXd c_a = shape_operator(pd, a);
      out.c_duality = std::max(out.c_duality, (c_a + a_j2x).cwiseAbs().maxCoeff());
    }
  }
  return out;
}

/** Shape tensor algebra at a maximal totally epsilon-complex point. */
struct ShapeTensorChecks {
  double constraint = 0.0;       // S^(1) membership (symmetries + {C,J} = 0)
  double total_symmetry = 0.0;   // gC totally symmetric
  double total_symmetry_j = 0.0; // gC∘J totally symmetric
  double trace = 0.0;            // tr C = 0
  double minimality = 0.0;       // tr_g h = 0
  bool applicable = false;
};

inline ShapeTensorChecks shape_tensor_checks(const Immersion& imm,
                                             const SubmanifoldPointData& pd) {
  ShapeTensorChecks out;
  if (!pd.maximal_totally_complex) return out;
  out.applicable = true;
  const int m = pd.m();
  out.constraint = shape_constraints_residual(pd.c_low, pd.jdom);
  out.total_symmetry = total_symmetry_residual(pd.c_low);

  Tensor3<double> cj(m, m, m);  // (gC∘J)(a,b,c) = <C_a e_b, J e_c>
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        double v = 0.0;
        for (int e = 0; e < m; ++e) v += pd.c_low(a, b, e) * pd.jdom(e, c);
        cj(a, b, c) = v;
      }
  out.total_symmetry_j = total_symmetry_residual(cj);

  Eigen::VectorXd trace_c = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd trace_h = Eigen::VectorXd::Zero(imm.ambient.dim);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      for (int c = 0; c < m; ++c) trace_c(c) += pd.ginv_ind(a, b) * pd.c_low(a, b, c);
      trace_h += pd.ginv_ind(a, b) * pd.h_at(a, b);
    }
  out.trace = trace_c.cwiseAbs().maxCoeff();
  out.minimality = trace_h.cwiseAbs().maxCoeff();
  return out;
}

// ---------------------------------------------------------------------------
// curvature suites

/** Lowered tangential block of an ambient curvature tensor. */
inline Tensor4<double> tt_block(const CurvatureTensor& r, const SubmanifoldPointData& pd) {
  const int m = pd.m();
  Tensor4<double> tt(m, m, m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Eigen::MatrixXd op = r.op(pd.d.col(a), pd.d.col(b));
      Eigen::MatrixXd low = pd.d.transpose() * pd.g_amb * op * pd.d;  // (e,c)
      for (int c = 0; c < m; ++c)
        for (int e = 0; e < m; ++e) tt(a, b, c, e) = low(e, c);
    }
  return tt;
}

/** The shape-tensor field u -> lowered C, for covariant differentiation. */
inline DynTensorField c_low_field(const Immersion& imm) {
  Immersion copy = imm;
  return [copy](const Eigen::VectorXd& v) {
    SubmanifoldPointData pd = point_data(copy, v);
    if (!pd.maximal_totally_complex)
      throw ScenarioError("shape-tensor field requested off the totally complex stratum");
    const int m = pd.m();
    DynTensor t(std::vector<int>{m, m, m});
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) t.at({a, b, c}) = pd.c_low(a, b, c);
    return t;
  };
}

/** Gauss / Ricci / Codazzi residuals (tangential, normal, mixed blocks of
 *  the ambient curvature against intrinsic data). */
struct GcrResiduals {
  double gauss = 0.0;
  double ricci_eq = 0.0;
  double codazzi = 0.0;
  double normal_link = 0.0;
  double parallelism = 0.0;  // ||(nabla_X C)_Y + eps w(X) J C_Y||
  bool applicable = false;
};

inline GcrResiduals gcr_residuals(const Immersion& imm, const Eigen::VectorXd& u) {
  SubmanifoldPointData pd = point_data(imm, u);
  GcrResiduals out;
  if (!pd.maximal_totally_complex) return out;
  out.applicable = true;
  const int m = pd.m();
  const int eps = imm.ambient.eps[0];

  Chart dom = induced_chart(imm);
  CurvatureTensor r_amb = ambient_curvature(imm.ambient, pd.x);
  CurvatureTensor r_ind = curvature_fd(dom, u);
  Tensor4<double> tt = tt_block(r_amb, pd);
  Tensor4<double> cc = cc_bracket(pd.c_low, pd.g_ind);

  // nabla C and the parallelism form P_{XY} = (nabla_X C)_Y + eps w(X) J C_Y
  DynTensor nc = covariant_derivative(dom, c_low_field(imm), u, {false, false, false});
  std::vector<Eigen::MatrixXd> jc_low(m);  // <J C_b e_c, e_e> as (e? c) matrices
  for (int b = 0; b < m; ++b) {
    Eigen::MatrixXd cb = shape_operator(pd, b);
    jc_low[b] = pd.g_ind * (pd.jdom * cb);  // (e,c) = <J C_b e_c, e_e>
  }
  auto p_low = [&](int a, int b, int c, int e) {
    return nc.at({a, b, c, e}) + eps * pd.omega_t(0, a) * jc_low[b](e, c);
  };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int e = 0; e < m; ++e)
          out.parallelism = std::max(out.parallelism, std::abs(p_low(a, b, c, e)));

  // dw of the restricted first connection form
  Immersion copy = imm;
  auto omega1_field = [&copy](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return restricted_connection_forms(copy, v).row(0).transpose();
  };
  Eigen::MatrixXd dw = exterior_derivative_1form(omega1_field, u, dom.fd_step);

  Eigen::MatrixXd gj = pd.g_ind * pd.jdom;  // <J e_c, e_e> at (e,c)
  Eigen::MatrixXd perp =
      Eigen::MatrixXd::Identity(imm.ambient.dim, imm.ambient.dim) - pd.ptan;
  double nu = std::isnan(imm.ambient.declared_nu) ? reduced_scalar_curvature(r_amb)
                                                  : imm.ambient.declared_nu;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Eigen::MatrixXd op = r_amb.op(pd.d.col(a), pd.d.col(b));
      // J2 (R(X,Y) J2 Z)^perp and J2 (R(X,Y) Z)^perp, lowered on tangents
      Eigen::MatrixXd t2 =
          pd.d.transpose() * pd.g_amb * (pd.j_amb[1] * (perp * (op * (pd.j_amb[1] * pd.d))));
      Eigen::MatrixXd t3 = pd.d.transpose() * pd.g_amb * (pd.j_amb[1] * (perp * (op * pd.d)));
      for (int c = 0; c < m; ++c)
        for (int e = 0; e < m; ++e) {
          double gauss = tt(a, b, c, e) - (r_ind.low(a, b, c, e) + cc(a, b, c, e));
          out.gauss = std::max(out.gauss, std::abs(gauss));

          double rn = r_ind.low(a, b, c, e) - eps * dw(a, b) * gj(e, c) + cc(a, b, c, e);
          out.ricci_eq = std::max(out.ricci_eq, std::abs(t2(e, c) - rn));

          double cod = t3(e, c) - (p_low(a, b, c, e) - p_low(b, a, c, e));
          out.codazzi = std::max(out.codazzi, std::abs(cod));

          // J2 R^perp_perp J2 = R^TT - eps nu F(X,Y) J, conjugated form
          double normal_link = t2(e, c) - (tt(a, b, c, e) - eps * nu * pd.fdom(a, b) * gj(e, c));
          out.normal_link = std::max(out.normal_link, std::abs(normal_link));
        }
    }
  return out;
}

/** Intrinsic Ricci identities. */
struct RicciChecks {
  double gauss_traced = 0.0;   // Ric_M = Ric(R^TT) + sum mu_i <C_i ., C_i .>
  double space_form = 0.0;     // Ric_M = (nu/2)(n+1) g + tr C_X C_Y
  double h_pairing = 0.0;      // tr C_X C_Y = -sum mu_i <h(E_i,X), h(E_i,Y)>
  bool applicable = false;
};

inline RicciChecks ricci_checks(const Immersion& imm, const Eigen::VectorXd& u) {
  SubmanifoldPointData pd = point_data(imm, u);
  RicciChecks out;
  if (!pd.maximal_totally_complex) return out;
  out.applicable = true;
  const int m = pd.m();
  const int half = m / 2;

  Chart dom = induced_chart(imm);
  CurvatureTensor r_ind = curvature_fd(dom, u);
  Eigen::MatrixXd ric_m = r_ind.ricci();

  CurvatureTensor r_amb = ambient_curvature(imm.ambient, pd.x);
  CurvatureTensor r_tt{tt_block(r_amb, pd), pd.g_ind};
  Eigen::MatrixXd ric_tt = r_tt.ricci();

  // pseudo-orthonormal tangent frame in domain coordinates
  PseudoOrthonormalFrame frame =
      pseudo_orthonormalize(Eigen::MatrixXd::Identity(m, m), pd.g_ind);
  std::vector<Eigen::MatrixXd> c_ops(m);
  for (int a = 0; a < m; ++a) c_ops[a] = shape_operator(pd, a);
  auto c_of = [&](const Eigen::VectorXd& vec) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a) acc += vec(a) * c_ops[a];
    return acc;
  };

  Eigen::MatrixXd cc_term = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    Eigen::MatrixXd ci = c_of(frame.basis.col(i));
    cc_term += frame.signs(i) * (ci.transpose() * pd.g_ind * ci);
  }
  out.gauss_traced = (ric_m - (ric_tt + cc_term)).cwiseAbs().maxCoeff();

  double nu = std::isnan(imm.ambient.declared_nu) ? reduced_scalar_curvature(r_amb)
                                                  : imm.ambient.declared_nu;
  Eigen::MatrixXd tr_cc(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) tr_cc(a, b) = (c_ops[a] * c_ops[b]).trace();
  Eigen::MatrixXd rhs = 0.5 * nu * (half + 1.0) * pd.g_ind + tr_cc;
  out.space_form = (ric_m - rhs).cwiseAbs().maxCoeff();

  // tr C_X C_Y against the ambient pairing of h-values
  Eigen::MatrixXd hh = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) {
        Eigen::VectorXd hia = Eigen::VectorXd::Zero(imm.ambient.dim);
        Eigen::VectorXd hib = Eigen::VectorXd::Zero(imm.ambient.dim);
        for (int e = 0; e < m; ++e) {
          hia += frame.basis(e, i) * pd.h_at(e, a);
          hib += frame.basis(e, i) * pd.h_at(e, b);
        }
        s -= frame.signs(i) * (hia.transpose() * pd.g_amb * hib)(0);
      }
      hh(a, b) = s;
    }
  out.h_pairing = (tr_cc - hh).cwiseAbs().maxCoeff();
  return out;
}

/** dw = nu F on the submanifold (first connection form, restricted). */
struct DomegaCheck {
  double residual = 0.0;
  double nu_used = 0.0;
};

inline DomegaCheck domega_check(const Immersion& imm, const Eigen::VectorXd& u) {
  SubmanifoldPointData pd = point_data(imm, u);
  Chart dom = induced_chart(imm);
  Immersion copy = imm;
  auto omega1_field = [&copy](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return restricted_connection_forms(copy, v).row(0).transpose();
  };
  Eigen::MatrixXd dw = exterior_derivative_1form(omega1_field, u, dom.fd_step);
  DomegaCheck out;
  out.nu_used = std::isnan(imm.ambient.declared_nu)
                    ? nu_estimate(imm.ambient, pd.x)
                    : imm.ambient.declared_nu;
  out.residual = (dw - out.nu_used * pd.fdom).cwiseAbs().maxCoeff();
  return out;
}

/** 2-form ∧ 1-form with the determinant convention. */
inline Tensor3<double> wedge_21(const Eigen::MatrixXd& f, const Eigen::VectorXd& w) {
  const int m = static_cast<int>(w.size());
  Tensor3<double> out(m, m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        out(a, b, c) = f(a, b) * w(c) + f(b, c) * w(a) + f(c, a) * w(b);
  return out;
}

/** Wedge identity of the almost-Kähler mechanism. Reports the restricted
 *  three-form F2^T ∧ w3^T - eps F3^T ∧ w2^T together with the FD exterior
 *  derivative of the restricted Kähler form; the two must vanish together. */
struct WedgeIdentityReport {
  double wedge_residual = 0.0;   // closedness criterion, eps_1 weighting
  double df_norm = 0.0;
  double df_link = 0.0;          // dF + F2∧w3 - eps3 F3∧w2 (structure-eq link)
};

inline WedgeIdentityReport wedge_identity_report(const Immersion& imm,
                                                 const Eigen::VectorXd& u) {
  SubmanifoldPointData pd = point_data(imm, u);
  const int eps = imm.ambient.eps[0];
  const int eps3 = imm.ambient.eps[2];
  Eigen::MatrixXd f2 = pd.d.transpose() * pd.j_amb[1].transpose() * pd.g_amb * pd.d;
  Eigen::MatrixXd f3 = pd.d.transpose() * pd.j_amb[2].transpose() * pd.g_amb * pd.d;
  Tensor3<double> w23 = wedge_21(f2, pd.omega_t.row(2).transpose());
  Tensor3<double> w32 = wedge_21(f3, pd.omega_t.row(1).transpose());

  WedgeIdentityReport out;
  out.wedge_residual = (w23 - w32 * static_cast<double>(eps)).max_abs();

  Immersion copy = imm;
  auto f_field = [&copy](const Eigen::VectorXd& v) { return induced_kahler_form(copy, v); };
  Tensor3<double> df = exterior_derivative_2form(f_field, u, imm.ambient.fd_step);
  out.df_norm = df.max_abs();
  out.df_link = (df + w23 - w32 * static_cast<double>(eps3)).max_abs();
  return out;
}

// ---------------------------------------------------------------------------
// cubic forms

struct CubicReport {
  CubicDecomposition decomposition;
  double parallelism = 0.0;        // P_{XY} residual, from gcr_residuals
  double line_parallel = 0.0;      // twisted-parallelism law for the cubic parts
  bool line_parallel_applicable = false;
  bool applicable = false;
};

/** Field of cubic components: q_re stacked over q_im as a rank-4 DynTensor
 *  with a leading 2-slot (kept covariant-inert by differentiating both parts
 *  as plain rank-3 tensors). */
inline CubicReport cubic_report(const Immersion& imm, const Eigen::VectorXd& u,
                                double parallel_gate = 1e-3) {
  SubmanifoldPointData pd = point_data(imm, u);
  CubicReport out;
  if (!pd.maximal_totally_complex) return out;
  out.applicable = true;
  const int eps = imm.ambient.eps[0];
  out.decomposition = decompose_cubic(pd.c_low, pd.jdom, eps);

  GcrResiduals gcr = gcr_residuals(imm, u);
  out.parallelism = gcr.parallelism;
  if (out.parallelism > parallel_gate) return out;

  out.line_parallel_applicable = true;
  Chart dom = induced_chart(imm);
  const int m = pd.m();
  Immersion copy = imm;
  auto part_field = [&copy, eps](bool re_part) {
    return [&copy, eps, re_part](const Eigen::VectorXd& v) {
      SubmanifoldPointData q = point_data(copy, v);
      CubicDecomposition dec = decompose_cubic(q.c_low, q.jdom, eps);
      const Tensor3<double>& part = re_part ? dec.q_re : dec.q_im;
      const int mm = q.m();
      DynTensor t(std::vector<int>{mm, mm, mm});
      for (int a = 0; a < mm; ++a)
        for (int b = 0; b < mm; ++b)
          for (int c = 0; c < mm; ++c) t.at({a, b, c}) = part(a, b, c);
      return t;
    };
  };
  DynTensor dre = covariant_derivative(dom, part_field(true), u, {false, false, false});
  DynTensor dim_ = covariant_derivative(dom, part_field(false), u, {false, false, false});
  CubicDecomposition dec = out.decomposition;

  double worst = 0.0;
  for (int a = 0; a < m; ++a) {
    double w = pd.omega_t(0, a);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int l = 0; l < m; ++l) {
          double want_re, want_im;
          if (eps == -1) {
            // nabla_X q = -i w(X) q  with q = q_re + i q_im
            want_re = w * dec.q_im(i, j, l);
            want_im = -w * dec.q_re(i, j, l);
          } else {
            // nabla_X q+ = w(X) q+, nabla_X q- = -w(X) q-
            want_re = w * dec.q_re(i, j, l);
            want_im = -w * dec.q_im(i, j, l);
          }
          worst = std::max(worst, std::abs(dre.at({a, i, j, l}) - want_re));
          worst = std::max(worst, std::abs(dim_.at({a, i, j, l}) - want_im));
        }
  }
  out.line_parallel = worst;
  return out;
}

/** Local-symmetry indicator: covariant derivative of [C,C] (space-form
 *  reduction of the symmetry criterion). */
inline double cc_parallelism_residual(const Immersion& imm, const Eigen::VectorXd& u) {
  Chart dom = induced_chart(imm);
  Immersion copy = imm;
  DynTensorField field = [&copy](const Eigen::VectorXd& v) {
    SubmanifoldPointData pd = point_data(copy, v);
    Tensor4<double> cc = cc_bracket(pd.c_low, pd.g_ind);
    const int m = pd.m();
    DynTensor t(std::vector<int>{m, m, m, m});
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int e = 0; e < m; ++e) t.at({a, b, c, e}) = cc(a, b, c, e);
    return t;
  };
  return covariant_derivative(dom, field, u, {false, false, false, false}).max_abs();
}

}  // namespace pqk
