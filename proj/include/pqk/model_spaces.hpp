#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "pqk/adapted_basis.hpp"
#include "pqk/chart.hpp"
#include "pqk/common.hpp"
#include "pqk/split_quaternion.hpp"

namespace pqk {

inline SplitQuaternion chart_slot(const Eigen::VectorXd& x, int i) {
  return SplitQuaternion{x(4 * i), x(4 * i + 1), x(4 * i + 2), x(4 * i + 3)};
}

inline SplitQuaternion coordinate_unit(int p) {
  switch (p) {
    case 0: return SplitQuaternion::one();
    case 1: return SplitQuaternion::ui();
    case 2: return SplitQuaternion::uj();
    default: return SplitQuaternion::uk();
  }
}

/** Flat model: constant metric and structures from the standard basis, nu = 0. */
inline Chart flat_space(int n, int eps_case) {
  auto [space, basis] = make_standard_basis(n, eps_case);
  Chart chart;
  chart.dim = 4 * n;
  chart.eps = basis.eps;
  chart.declared_nu = 0.0;
  Eigen::MatrixXd g = space.g;
  chart.metric = [g](const Eigen::VectorXd&) { return g; };
  for (int a = 0; a < 3; ++a) {
    Eigen::MatrixXd j = basis.j[a];
    chart.structure[a] = [j](const Eigen::VectorXd&) { return j; };
  }
  return chart;
}

/** Affine-chart metric of the projective model:
 *    g(X,Y) = scale * Re[ lam^{-1} <X,Y> - lam^{-2} <X,q><q,Y> ],
 *  lam(q) = 1 + sum_i N(q_i), with the split-quaternionic Hermitian product
 *  <p,q> = sum conj(p_i) q_i. scale = -1 gives the negative-nu companion. */
inline MetricField projective_metric(int n, double scale) {
  return [n, scale](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const int d = 4 * n;
    double lam = 1.0;
    for (int i = 0; i < n; ++i) lam += chart_slot(x, i).norm();
    if (std::abs(lam) < 0.05)
      throw ChartValidationError("chart singularity: lambda = " + std::to_string(lam) +
                                 " at the requested point");
    std::vector<SplitQuaternion> w(d);  // w_a = conj(u_a) * q_slot(a)
    for (int a = 0; a < d; ++a)
      w[a] = coordinate_unit(a % 4).conj() * chart_slot(x, a / 4);
    Eigen::MatrixXd g(d, d);
    const double eta[4] = {1.0, 1.0, -1.0, -1.0};
    for (int a = 0; a < d; ++a)
      for (int b = 0; b <= a; ++b) {
        double flat = (a / 4 == b / 4 && a % 4 == b % 4) ? eta[a % 4] : 0.0;
        double corr = (w[a] * w[b].conj()).re();
        double val = scale * (flat / lam - corr / (lam * lam));
        g(a, b) = val;
        g(b, a) = val;
      }
    return g;
  };
}

struct ProjectiveChartOptions {
  double scale = 1.0;
  double fd_step = kFdStep;
  int validation_points = 6;
  double validation_radius = 0.3;
  std::uint64_t validation_seed = 11;
  double validation_tol = 1e-3;
  bool validate = true;
};

/** Deterministic sample set in a coordinate ball. */
inline std::vector<Eigen::VectorXd> sample_points(int dim, int count, double radius,
                                                  std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(rng.ball(dim, radius));
  return out;
}

/**
 * Projective model in the affine chart around the base slot. The structure
 * triple is the constant right-multiplication family of the flat model —
 * skewness and the adapted-basis relations survive the conformal-type
 * correction, which the mandatory validation gate re-checks together with
 * R = nu_hat R0 and the Einstein property before the chart is released.
 */
inline Chart projective_chart(int n, int eps_case, ProjectiveChartOptions opt = {}) {
  auto [space, basis] = make_standard_basis(n, eps_case);
  Chart chart;
  chart.dim = 4 * n;
  chart.eps = basis.eps;
  chart.fd_step = opt.fd_step;
  chart.metric = projective_metric(n, opt.scale);
  for (int a = 0; a < 3; ++a) {
    Eigen::MatrixXd j = basis.j[a];
    chart.structure[a] = [j](const Eigen::VectorXd&) { return j; };
  }
  if (opt.validate) {
    std::vector<Eigen::VectorXd> pts =
        sample_points(chart.dim, opt.validation_points, opt.validation_radius,
                      opt.validation_seed);
    ChartValidation gate = validate_structured_chart(chart, pts, opt.validation_tol);
    chart.declared_nu = gate.nu_hat;
    chart.gate_model_deviation = gate.model_deviation;
    chart.gate_einstein_residual = gate.einstein_residual;
    chart.gate_basis_residual = gate.basis_residual;
  }
  return chart;
}

/** Immersed submanifold handle: a smooth map into a chart's coordinates. */
struct Immersion {
  int domain_dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> map;
  Chart ambient;
  std::string description;
};

/** FD Jacobian of the immersion map, columns = coordinate directions. */
inline Eigen::MatrixXd immersion_differential(const Immersion& imm, const Eigen::VectorXd& u) {
  Eigen::VectorXd h = fd_steps(u, imm.ambient.fd_step);
  Eigen::MatrixXd d(imm.ambient.dim, imm.domain_dim);
  for (int a = 0; a < imm.domain_dim; ++a) {
    Eigen::VectorXd up = u, um = u;
    up(a) += h(a);
    um(a) -= h(a);
    d.col(a) = (imm.map(up) - imm.map(um)) / (2.0 * h(a));
  }
  return d;
}

/** In-slot coordinate pattern of the epsilon-complex slice: the span of
 *  {1, I} (eps = -1) or {1, J} (eps = +1), and the coordinate pattern of its
 *  image under the first transversal structure. */
inline std::array<int, 2> slice_pattern(int eps_case) {
  return eps_case < 0 ? std::array<int, 2>{0, 1} : std::array<int, 2>{0, 2};
}

/** Slice of the first k slots with epsilon-complex entries, remaining slots
 *  zero; works in both the flat chart and the affine projective chart (the
 *  projectivized linear slice has the same affine image). */
inline Immersion embed_epsilon_complex_slice(const Chart& ambient, int k) {
  const int n = ambient.dim / 4;
  if (k < 1 || k > n) throw ScenarioError("slice slot count out of range");
  std::array<int, 2> pat = slice_pattern(ambient.eps[0] == -1 ? -1 : +1);
  Immersion imm;
  imm.domain_dim = 2 * k;
  imm.ambient = ambient;
  imm.description = "epsilon-complex slice, " + std::to_string(k) + " slots";
  int dim = ambient.dim;
  imm.map = [pat, k, dim](const Eigen::VectorXd& u) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < k; ++i) {
      x(4 * i + pat[0]) = u(2 * i);
      x(4 * i + pat[1]) = u(2 * i + 1);
    }
    return x;
  };
  return imm;
}

/** Full para-quaternionic slice of the first k slots. */
inline Immersion embed_pq_slice(const Chart& ambient, int k) {
  const int n = ambient.dim / 4;
  if (k < 1 || k > n) throw ScenarioError("slice slot count out of range");
  Immersion imm;
  imm.domain_dim = 4 * k;
  imm.ambient = ambient;
  imm.description = "para-quaternionic slice, " + std::to_string(k) + " slots";
  int dim = ambient.dim;
  imm.map = [k, dim](const Eigen::VectorXd& u) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    x.head(4 * k) = u;
    return x;
  };
  return imm;
}

/** Graph map over the epsilon-complex coordinates: real 2n-vector in, real
 *  2n-vector out, both read as n epsilon-complex numbers. */
using GraphMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

namespace detail {

inline Immersion make_graph_candidate(const Chart& ambient, const GraphMap& w,
                                      bool left_placement, bool conjugate_w) {
  const int n = ambient.dim / 4;
  const int eps_case = ambient.eps[0] == -1 ? -1 : +1;
  // slice unit e with e^2 = eps, transversal unit u with slice*u ⟂ slice
  SplitQuaternion e = eps_case < 0 ? SplitQuaternion::ui() : SplitQuaternion::uj();
  SplitQuaternion uq = eps_case < 0 ? SplitQuaternion::uj() : SplitQuaternion::ui();
  Immersion imm;
  imm.domain_dim = 2 * n;
  imm.ambient = ambient;
  imm.description = std::string("graph, ") + (left_placement ? "left" : "right") +
                    " placement, " + (conjugate_w ? "conjugated" : "plain");
  int dim = ambient.dim;
  imm.map = [n, dim, e, uq, w, left_placement, conjugate_w](const Eigen::VectorXd& u) {
    Eigen::VectorXd wv = w(u);
    Eigen::VectorXd x(dim);
    for (int i = 0; i < n; ++i) {
      SplitQuaternion z = SplitQuaternion::one() * u(2 * i) + e * u(2 * i + 1);
      double wim = conjugate_w ? -wv(2 * i + 1) : wv(2 * i + 1);
      SplitQuaternion wq = SplitQuaternion::one() * wv(2 * i) + e * wim;
      SplitQuaternion slot = z + (left_placement ? uq * wq : wq * uq);
      x(4 * i + 0) = slot.a;
      x(4 * i + 1) = slot.b;
      x(4 * i + 2) = slot.c;
      x(4 * i + 3) = slot.d;
    }
    return x;
  };
  return imm;
}

inline double hermitian_invariance_residual(const Immersion& imm, const Eigen::VectorXd& u) {
  Eigen::MatrixXd d = immersion_differential(imm, u);
  Eigen::VectorXd x = imm.map(u);
  Eigen::MatrixXd g = imm.ambient.metric(x);
  Eigen::MatrixXd j1 = imm.ambient.structure[0](x);
  Eigen::MatrixXd gi = (d.transpose() * g * d).inverse();
  Eigen::MatrixXd ptan = d * gi * d.transpose() * g;
  Eigen::MatrixXd rej = j1 * d - ptan * (j1 * d);
  return rej.cwiseAbs().maxCoeff();
}

}  // namespace detail

/**
 * Graph immersion slot_i = z_i + w_i(z) * u over the epsilon-complex slice.
 * The placement of the transversal unit and the conjugation of w are not
 * convention-free; all four candidates are built and the first whose tangent
 * spaces are invariant under the first structure at the probe points is
 * kept (the choice is recorded in the description). Non-affine w gives a
 * non-totally-geodesic submanifold.
 */
inline Immersion embed_graph(const Chart& ambient, const GraphMap& w,
                             double probe_tol = 1e-6) {
  const int n = ambient.dim / 4;
  std::vector<Eigen::VectorXd> probes = sample_points(2 * n, 3, 0.4, 23);
  const std::array<std::pair<bool, bool>, 4> candidates = {
      std::pair<bool, bool>{false, true}, {true, false}, {false, false}, {true, true}};
  std::string rejects;
  for (auto [left, conj] : candidates) {
    Immersion cand = detail::make_graph_candidate(ambient, w, left, conj);
    double worst = 0.0;
    for (const auto& u : probes)
      worst = std::max(worst, detail::hermitian_invariance_residual(cand, u));
    if (worst <= probe_tol) return cand;
    rejects += " [" + cand.description + ": " + std::to_string(worst) + "]";
  }
  throw ScenarioError("no graph placement convention yields structure-invariant tangents:" +
                      rejects);
}

/** Polynomial graph w_i(z) = z_i^2 in epsilon-complex arithmetic — the stock
 *  non-affine example. Gradient form (symmetric Jacobian), so the graph is
 *  totally epsilon-complex. */
inline GraphMap quadratic_graph_map(int n, int eps_case, double strength = 1.0) {
  return [n, eps_case, strength](const Eigen::VectorXd& u) {
    Eigen::VectorXd out(2 * n);
    for (int i = 0; i < n; ++i) {
      double re = u(2 * i), im = u(2 * i + 1);
      out(2 * i) = strength * (re * re + eps_case * im * im);
      out(2 * i + 1) = strength * (2.0 * re * im);
    }
    return out;
  };
}

/** Full-rank + induced-nondegeneracy audit for a sampled immersion. */
struct ImmersionAudit {
  double min_singular_value = 0.0;
  double min_metric_eigenvalue = 0.0;
};

inline ImmersionAudit validate_immersion(const Immersion& imm,
                                         const std::vector<Eigen::VectorXd>& points) {
  ImmersionAudit audit;
  audit.min_singular_value = std::numeric_limits<double>::infinity();
  audit.min_metric_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& u : points) {
    Eigen::MatrixXd d = immersion_differential(imm, u);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeThinV);
    audit.min_singular_value =
        std::min(audit.min_singular_value, svd.singularValues().minCoeff());
    Eigen::MatrixXd gind = d.transpose() * imm.ambient.metric(imm.map(u)) * d;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gind);
    audit.min_metric_eigenvalue =
        std::min(audit.min_metric_eigenvalue, es.eigenvalues().cwiseAbs().minCoeff());
    if (audit.min_singular_value < kRankTol) {
      Eigen::VectorXd witness = svd.matrixV().col(imm.domain_dim - 1);
      throw DegenerateMetricError("immersion differential loses rank", witness);
    }
    if (audit.min_metric_eigenvalue < kRankTol) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(gind);
      int arg = 0;
      es2.eigenvalues().cwiseAbs().minCoeff(&arg);
      throw DegenerateMetricError("induced metric degenerate at a sampled point",
                                  es2.eigenvectors().col(arg));
    }
  }
  return audit;
}

}  // namespace pqk
