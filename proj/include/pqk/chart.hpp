#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "pqk/adapted_basis.hpp"
#include "pqk/common.hpp"
#include "pqk/curvature.hpp"
#include "pqk/tensors.hpp"

namespace pqk {

using MetricField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
using OperatorField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/** Coordinate chart with a metric field and (optionally) a field of adapted
 *  structure triples. Everything downstream is built from central
 *  differences of these fields, so both must be smooth on the working ball. */
struct Chart {
  int dim = 0;
  MetricField metric;
  std::array<OperatorField, 3> structure{};  // empty for bare metric charts
  std::array<int, 3> eps = {-1, 1, 1};
  double declared_nu = std::numeric_limits<double>::quiet_NaN();
  double fd_step = kFdStep;
  // populated by curvature validation at construction, NaN for flat charts
  double gate_model_deviation = std::numeric_limits<double>::quiet_NaN();
  double gate_einstein_residual = std::numeric_limits<double>::quiet_NaN();
  double gate_basis_residual = std::numeric_limits<double>::quiet_NaN();

  bool has_structure() const { return static_cast<bool>(structure[0]); }

  AdaptedBasis basis_at(const Eigen::VectorXd& x) const {
    AdaptedBasis b;
    b.eps = eps;
    for (int a = 0; a < 3; ++a) b.j[a] = structure[a](x);
    return b;
  }
};

/** Per-coordinate steps h_i = h0 * max(1, |x_i|). */
inline Eigen::VectorXd fd_steps(const Eigen::VectorXd& x, double h0) {
  Eigen::VectorXd h(x.size());
  for (int i = 0; i < x.size(); ++i) h(i) = h0 * std::max(1.0, std::abs(x(i)));
  return h;
}

/** dg(c,a,b) = d/dx_c g_ab, central differences. */
inline Tensor3<double> metric_derivative(const Chart& chart, const Eigen::VectorXd& x) {
  const int d = chart.dim;
  Eigen::VectorXd h = fd_steps(x, chart.fd_step);
  Tensor3<double> dg(d, d, d);
  for (int c = 0; c < d; ++c) {
    Eigen::VectorXd xp = x, xm = x;
    xp(c) += h(c);
    xm(c) -= h(c);
    Eigen::MatrixXd diff = (chart.metric(xp) - chart.metric(xm)) / (2.0 * h(c));
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) dg(c, a, b) = diff(a, b);
  }
  return dg;
}

/** Christoffel symbols, gamma(c,a,b) = Gamma^c_ab. */
inline Tensor3<double> christoffel(const Chart& chart, const Eigen::VectorXd& x) {
  const int d = chart.dim;
  Tensor3<double> dg = metric_derivative(chart, x);
  Eigen::MatrixXd ginv = chart.metric(x).inverse();
  Tensor3<double> gamma(d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        double s = 0.0;
        for (int e = 0; e < d; ++e)
          s += ginv(c, e) * (dg(a, b, e) + dg(b, a, e) - dg(e, a, b));
        gamma(c, a, b) = 0.5 * s;
      }
  return gamma;
}

/** Christoffel symbols packed as matrices (Gamma_a)^c_b, one per direction. */
inline std::vector<Eigen::MatrixXd> christoffel_matrices(const Chart& chart,
                                                         const Eigen::VectorXd& x) {
  const int d = chart.dim;
  Tensor3<double> gamma = christoffel(chart, x);
  std::vector<Eigen::MatrixXd> out(d, Eigen::MatrixXd(d, d));
  for (int a = 0; a < d; ++a)
    for (int c = 0; c < d; ++c)
      for (int b = 0; b < d; ++b) out[a](c, b) = gamma(c, a, b);
  return out;
}

/** dgamma(e,c,a,b) = d/dx_e Gamma^c_ab, nested central differences. */
inline Tensor4<double> christoffel_derivative(const Chart& chart, const Eigen::VectorXd& x) {
  const int d = chart.dim;
  Eigen::VectorXd h = fd_steps(x, chart.fd_step);
  Tensor4<double> dgamma(d, d, d, d);
  for (int e = 0; e < d; ++e) {
    Eigen::VectorXd xp = x, xm = x;
    xp(e) += h(e);
    xm(e) -= h(e);
    Tensor3<double> gp = christoffel(chart, xp);
    Tensor3<double> gm = christoffel(chart, xm);
    for (int c = 0; c < d; ++c)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          dgamma(e, c, a, b) = (gp(c, a, b) - gm(c, a, b)) / (2.0 * h(e));
  }
  return dgamma;
}

/** Curvature of the chart metric from finite differences:
 *  R(e_a, e_b) e_c = (dGamma_a - dGamma_b + [Gamma_a, Gamma_b]) terms. */
inline CurvatureTensor curvature_fd(const Chart& chart, const Eigen::VectorXd& x) {
  const int d = chart.dim;
  Tensor3<double> gamma = christoffel(chart, x);
  Tensor4<double> dgamma = christoffel_derivative(chart, x);
  Eigen::MatrixXd g = chart.metric(x);

  CurvatureTensor r;
  r.g = g;
  r.low = Tensor4<double>(d, d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        Eigen::VectorXd up = Eigen::VectorXd::Zero(d);  // (R(e_a,e_b) e_c)^e
        for (int e = 0; e < d; ++e) {
          double v = dgamma(a, e, b, c) - dgamma(b, e, a, c);
          for (int f = 0; f < d; ++f)
            v += gamma(e, a, f) * gamma(f, b, c) - gamma(e, b, f) * gamma(f, a, c);
          up(e) = v;
        }
        Eigen::VectorXd lowvec = g * up;
        for (int e = 0; e < d; ++e) r.low(a, b, c, e) = lowvec(e);
      }
  return r;
}

namespace detail {

inline std::vector<Eigen::MatrixXd> covariant_structure_derivative_with(
    const std::vector<Eigen::MatrixXd>& gm, const Chart& chart, const Eigen::VectorXd& x,
    int alpha) {
  const int d = chart.dim;
  Eigen::VectorXd h = fd_steps(x, chart.fd_step);
  std::vector<Eigen::MatrixXd> out(d);
  for (int a = 0; a < d; ++a) {
    Eigen::VectorXd xp = x, xm = x;
    xp(a) += h(a);
    xm(a) -= h(a);
    Eigen::MatrixXd dj = (chart.structure[alpha](xp) - chart.structure[alpha](xm)) / (2.0 * h(a));
    Eigen::MatrixXd j = chart.structure[alpha](x);
    out[a] = dj + gm[a] * j - j * gm[a];
  }
  return out;
}

}  // namespace detail

/** Covariant derivative of a structure field: (nabla_a J)^c_b packed as one
 *  matrix per direction a. */
inline std::vector<Eigen::MatrixXd> covariant_structure_derivative(const Chart& chart,
                                                                   const Eigen::VectorXd& x,
                                                                   int alpha) {
  return detail::covariant_structure_derivative_with(christoffel_matrices(chart, x), chart, x,
                                                     alpha);
}

/** Connection 1-forms of the structure bundle, extracted from
 *    nabla J_a = -eps_b w_c ⊗ J_b + eps_c w_b ⊗ J_c  (cyclic a,b,c)
 * by trace pairing against the structures. Each form is recovered from two
 * of the three equations; `extraction_spread` is the disagreement between
 * the two sources and `reconstruction_residual` the defect of the display
 * above with the averaged forms. */
struct ConnectionForms {
  Eigen::MatrixXd omega;  // 3 x dim, omega(alpha, direction)
  double extraction_spread = 0.0;
  double reconstruction_residual = 0.0;
};

inline ConnectionForms connection_one_forms(const Chart& chart, const Eigen::VectorXd& x) {
  const int d = chart.dim;
  AdaptedBasis basis = chart.basis_at(x);
  const auto& eps = basis.eps;
  std::vector<Eigen::MatrixXd> gm = christoffel_matrices(chart, x);
  std::array<std::vector<Eigen::MatrixXd>, 3> nabla;
  for (int alpha = 0; alpha < 3; ++alpha)
    nabla[alpha] = detail::covariant_structure_derivative_with(gm, chart, x, alpha);

  ConnectionForms out;
  out.omega = Eigen::MatrixXd::Zero(3, d);
  Eigen::MatrixXd count = Eigen::MatrixXd::Zero(3, d);
  Eigen::MatrixXd first = Eigen::MatrixXd::Zero(3, d);

  const int cyc[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (const auto& p : cyc) {
    int alpha = p[0], beta = p[1], gamma = p[2];
    for (int a = 0; a < d; ++a) {
      // tr(M J_beta) = -w_gamma * eps_beta^2 * d, tr(M J_gamma) = w_beta * d
      double wg = -(nabla[alpha][a] * basis.j[beta]).trace() / d;
      double wb = (nabla[alpha][a] * basis.j[gamma]).trace() / d;
      for (auto [idx, val] : {std::pair<int, double>{gamma, wg}, {beta, wb}}) {
        if (count(idx, a) == 0.0) first(idx, a) = val;
        else out.extraction_spread = std::max(out.extraction_spread, std::abs(val - first(idx, a)));
        out.omega(idx, a) += val;
        count(idx, a) += 1.0;
      }
    }
  }
  out.omega = out.omega.cwiseQuotient(count);

  for (const auto& p : cyc) {
    int alpha = p[0], beta = p[1], gamma = p[2];
    for (int a = 0; a < d; ++a) {
      Eigen::MatrixXd want = -eps[beta] * out.omega(gamma, a) * basis.j[beta] +
                             eps[gamma] * out.omega(beta, a) * basis.j[gamma];
      out.reconstruction_residual = std::max(
          out.reconstruction_residual, (nabla[alpha][a] - want).cwiseAbs().maxCoeff());
    }
  }
  return out;
}

/** dw_alpha(a,b) for the three connection forms, nested central differences. */
inline std::array<Eigen::MatrixXd, 3> connection_form_differentials(const Chart& chart,
                                                                    const Eigen::VectorXd& x) {
  const int d = chart.dim;
  Eigen::VectorXd h = fd_steps(x, chart.fd_step);
  std::vector<Eigen::MatrixXd> omega_plus(d), omega_minus(d);
  for (int a = 0; a < d; ++a) {
    Eigen::VectorXd xp = x, xm = x;
    xp(a) += h(a);
    xm(a) -= h(a);
    omega_plus[a] = connection_one_forms(chart, xp).omega;
    omega_minus[a] = connection_one_forms(chart, xm).omega;
  }
  std::array<Eigen::MatrixXd, 3> dw;
  for (int alpha = 0; alpha < 3; ++alpha) {
    dw[alpha] = Eigen::MatrixXd::Zero(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double da = (omega_plus[a](alpha, b) - omega_minus[a](alpha, b)) / (2.0 * h(a));
        double db = (omega_plus[b](alpha, a) - omega_minus[b](alpha, a)) / (2.0 * h(b));
        dw[alpha](a, b) = da - db;
      }
  }
  return dw;
}

using DynTensorField = std::function<DynTensor(const Eigen::VectorXd&)>;

/** Covariant derivative of an arbitrary tensor field; slot 0 of the result is
 *  the derivative direction. `contravariant[k]` says whether slot k of the
 *  field takes a Gamma with plus (upper index) or minus (lower index). */
inline DynTensor covariant_derivative(const Chart& chart, const DynTensorField& field,
                                      const Eigen::VectorXd& x,
                                      const std::vector<bool>& contravariant) {
  const int d = chart.dim;
  Eigen::VectorXd h = fd_steps(x, chart.fd_step);
  DynTensor center = field(x);
  const int rank = static_cast<int>(center.dims.size());

  std::vector<int> out_dims;
  out_dims.push_back(d);
  for (int v : center.dims) out_dims.push_back(v);
  DynTensor out(out_dims);

  Tensor3<double> gamma = christoffel(chart, x);

  for (int a = 0; a < d; ++a) {
    Eigen::VectorXd xp = x, xm = x;
    xp(a) += h(a);
    xm(a) -= h(a);
    DynTensor tp = field(xp), tm = field(xm);

    std::vector<int> idx(rank, 0);
    size_t total = center.v.size();
    for (size_t flat = 0; flat < total; ++flat) {
      size_t rem = flat;
      for (int k = rank - 1; k >= 0; --k) {
        idx[k] = static_cast<int>(rem % center.dims[k]);
        rem /= center.dims[k];
      }
      double val = (tp.v[flat] - tm.v[flat]) / (2.0 * h(a));
      for (int k = 0; k < rank; ++k) {
        int orig = idx[k];
        for (int e = 0; e < d; ++e) {
          idx[k] = e;
          double t = center.at(idx);
          val += contravariant[k] ? gamma(orig, a, e) * t : -gamma(e, a, orig) * t;
        }
        idx[k] = orig;
      }
      std::vector<int> oidx;
      oidx.push_back(a);
      for (int v : idx) oidx.push_back(v);
      out.at(oidx) = val;
    }
  }
  return out;
}

/** d of a 2-form field: dF(a,b,c) = sum over cyclic permutations of
 *  coordinate derivatives. */
inline Tensor3<double> exterior_derivative_2form(
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& form, const Eigen::VectorXd& x,
    double h0) {
  const int d = static_cast<int>(x.size());
  Eigen::VectorXd h = fd_steps(x, h0);
  std::vector<Eigen::MatrixXd> df(d);
  for (int a = 0; a < d; ++a) {
    Eigen::VectorXd xp = x, xm = x;
    xp(a) += h(a);
    xm(a) -= h(a);
    df[a] = (form(xp) - form(xm)) / (2.0 * h(a));
  }
  Tensor3<double> out(d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) out(a, b, c) = df[a](b, c) + df[b](c, a) + df[c](a, b);
  return out;
}

/** d of a 1-form field: dw(a,b) = d_a w_b - d_b w_a. */
inline Eigen::MatrixXd exterior_derivative_1form(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& form, const Eigen::VectorXd& x,
    double h0) {
  const int d = static_cast<int>(x.size());
  Eigen::VectorXd h = fd_steps(x, h0);
  std::vector<Eigen::VectorXd> dw(d);
  for (int a = 0; a < d; ++a) {
    Eigen::VectorXd xp = x, xm = x;
    xp(a) += h(a);
    xm(a) -= h(a);
    dw[a] = (form(xp) - form(xm)) / (2.0 * h(a));
  }
  Eigen::MatrixXd out(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) out(a, b) = dw[a](b) - dw[b](a);
  return out;
}

/** nu re-estimated from finite-difference curvature; declared values are
 *  never trusted. */
inline double nu_estimate(const Chart& chart, const Eigen::VectorXd& x) {
  return reduced_scalar_curvature(curvature_fd(chart, x));
}

/** Residuals of the two structure equations of the bundle connection:
 *    curvature_eq:  eps3 (dw_a - eps_a w_b ∧ w_c) - nu F'_a = 0
 *    bianchi_eq:  nu [ dF'_a - eps_a (-F'_b ∧ w_c + w_b ∧ F'_c) ] = 0
 *  with F'_a = -eps_a J_a^T g and determinant-convention wedges. Pass nu if
 *  already known; otherwise it is re-estimated from FD curvature at x. */
struct StructureEquationResiduals {
  std::array<double, 3> curvature_eq{};
  std::array<double, 3> bianchi_eq{};
  double nu_used = 0.0;
  double curvature_eq_max() const { return std::max({curvature_eq[0], curvature_eq[1], curvature_eq[2]}); }
  double bianchi_eq_max() const { return std::max({bianchi_eq[0], bianchi_eq[1], bianchi_eq[2]}); }
};

inline StructureEquationResiduals structure_eq_residuals(
    const Chart& chart, const Eigen::VectorXd& x,
    double nu = std::numeric_limits<double>::quiet_NaN()) {
  const int d = chart.dim;
  AdaptedBasis basis = chart.basis_at(x);
  Eigen::MatrixXd g = chart.metric(x);
  ConnectionForms forms = connection_one_forms(chart, x);
  auto dw = connection_form_differentials(chart, x);

  StructureEquationResiduals out;
  out.nu_used = std::isnan(nu) ? nu_estimate(chart, x) : nu;

  auto fprime_field = [&chart](int alpha) {
    return [&chart, alpha](const Eigen::VectorXd& y) -> Eigen::MatrixXd {
      return -chart.eps[alpha] * chart.structure[alpha](y).transpose() * chart.metric(y);
    };
  };

  const int cyc[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (const auto& p : cyc) {
    int alpha = p[0], beta = p[1], gamma = p[2];
    Eigen::MatrixXd fpa = fprime_field(alpha)(x);
    Eigen::MatrixXd fpb = fprime_field(beta)(x);
    Eigen::MatrixXd fpc = fprime_field(gamma)(x);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double wedge = forms.omega(beta, a) * forms.omega(gamma, b) -
                       forms.omega(beta, b) * forms.omega(gamma, a);
        double lhs = basis.eps[2] * (dw[alpha](a, b) - basis.eps[alpha] * wedge);
        out.curvature_eq[alpha] = std::max(out.curvature_eq[alpha], std::abs(lhs - out.nu_used * fpa(a, b)));
      }

    Tensor3<double> dfp = exterior_derivative_2form(fprime_field(alpha), x, chart.fd_step);
    auto wedge21 = [&](const Eigen::MatrixXd& f, int form_idx, int a, int b, int c) {
      return f(a, b) * forms.omega(form_idx, c) + f(b, c) * forms.omega(form_idx, a) +
             f(c, a) * forms.omega(form_idx, b);
    };
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) {
          double rhs = -wedge21(fpb, gamma, a, b, c) + wedge21(fpc, beta, a, b, c);
          double val = out.nu_used * (dfp(a, b, c) - basis.eps[alpha] * rhs);
          out.bianchi_eq[alpha] = std::max(out.bianchi_eq[alpha], std::abs(val));
        }
  }
  return out;
}

/** Directional covariant derivative: slot-0 contraction of
 *  covariant_derivative against the components of X. */
inline DynTensor covariant_derivative_along(const Chart& chart, const DynTensorField& field,
                                            const Eigen::VectorXd& x, const Eigen::VectorXd& dir,
                                            const std::vector<bool>& contravariant) {
  DynTensor full = covariant_derivative(chart, field, x, contravariant);
  DynTensor out(std::vector<int>(full.dims.begin() + 1, full.dims.end()));
  size_t block = out.v.size();
  for (int a = 0; a < chart.dim; ++a)
    for (size_t i = 0; i < block; ++i) out.v[i] += dir(a) * full.v[a * block + i];
  return out;
}

struct ChartValidation {
  double nu_hat = 0.0;
  double model_deviation = 0.0;    // ||R - nu_hat R0|| / ||R||, worst point
  double einstein_residual = 0.0;  // ||Ric - nu_hat (n+2) g||, worst point
  double basis_residual = 0.0;     // adapted-basis relations, worst point
};

/**
 * Validation gate for structured charts: at each sample the finite-difference
 * curvature must match nu_hat * R0 with nu_hat re-estimated from the scalar
 * curvature, the metric must be Einstein accordingly, and the structure
 * triple must satisfy the adapted-basis relations. Throws
 * ChartValidationError on failure.
 */
inline ChartValidation validate_structured_chart(const Chart& chart,
                                                 const std::vector<Eigen::VectorXd>& points,
                                                 double tol = 1e-3) {
  if (!chart.has_structure())
    throw ChartValidationError("chart has no structure triple to validate");
  ChartValidation out;
  double nu_sum = 0.0;
  const int n = chart.dim / 4;
  for (const auto& x : points) {
    CurvatureTensor r = curvature_fd(chart, x);
    AdaptedBasis basis = chart.basis_at(x);
    PseudoEuclideanSpace space{r.g};
    double nu_hat = reduced_scalar_curvature(r);
    nu_sum += nu_hat;
    CurvatureTensor model = model_space_curvature(space, basis, nu_hat);
    double rel = (r.low - model.low).frobenius() / std::max(r.frobenius(), 1e-12);
    Eigen::MatrixXd einstein = r.ricci() - nu_hat * (n + 2.0) * r.g;
    double ein = einstein.cwiseAbs().maxCoeff() / std::max(1.0, std::abs(nu_hat) * (n + 2.0));
    out.model_deviation = std::max(out.model_deviation, rel);
    out.einstein_residual = std::max(out.einstein_residual, ein);
    out.basis_residual = std::max(out.basis_residual, adapted_basis_residual(basis, r.g));
  }
  out.nu_hat = nu_sum / static_cast<double>(points.size());
  if (out.model_deviation > tol)
    throw ChartValidationError("chart curvature deviates from the model space: " +
                               std::to_string(out.model_deviation));
  if (out.einstein_residual > tol)
    throw ChartValidationError("chart metric is not Einstein at the expected rate: " +
                               std::to_string(out.einstein_residual));
  if (out.basis_residual > 1e-8)
    throw ChartValidationError("structure triple violates adapted-basis relations: " +
                               std::to_string(out.basis_residual));
  return out;
}

}  // namespace pqk
