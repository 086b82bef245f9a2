#include <catch2/catch_amalgamated.hpp>

#include "pqk/chart.hpp"
#include "pqk/model_spaces.hpp"

using namespace pqk;

namespace {

// surface of curvature -1 in exponential coordinates
Chart hyperbolic_surface() {
  Chart chart;
  chart.dim = 2;
  chart.metric = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
    g(1, 1) = std::exp(2.0 * x(0));
    return g;
  };
  return chart;
}

DynTensorField metric_as_field(const Chart& chart) {
  int d = chart.dim;
  return [&chart, d](const Eigen::VectorXd& p) {
    DynTensor t;
    t.dims = {d, d};
    t.v.resize(static_cast<size_t>(d) * d);
    Eigen::MatrixXd g = chart.metric(p);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) t.v[static_cast<size_t>(a) * d + b] = g(a, b);
    return t;
  };
}

}  // namespace

TEST_CASE("flat chart has vanishing connection and curvature", "[chart_calculus]") {
  for (int eps_case : {-1, 1}) {
    Chart chart = flat_space(2, eps_case);
    Rng rng(3);
    for (int t = 0; t < 3; ++t) {
      Eigen::VectorXd x = rng.ball(8, 0.5);
      CHECK(christoffel(chart, x).max_abs() <= 1e-10);
      CHECK(curvature_fd(chart, x).low.max_abs() <= 1e-10);
      ConnectionForms cf = connection_one_forms(chart, x);
      CHECK(cf.omega.cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("christoffel symbols match a closed form", "[chart_calculus]") {
  Chart chart = hyperbolic_surface();
  Rng rng(5);
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd x = rng.ball(2, 0.8);
    Tensor3<double> gamma = christoffel(chart, x);
    double e2 = std::exp(2.0 * x(0));
    // nonzero symbols: G^1_{01} = G^1_{10} = 1, G^0_{11} = -e^{2 x0}
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          double expected = 0.0;
          if (c == 1 && a != b) expected = 1.0;
          if (c == 0 && a == 1 && b == 1) expected = -e2;
          CHECK(gamma(c, a, b) == Catch::Approx(expected).margin(1e-7));
        }
    // symmetry in the lower arguments
    CHECK(std::abs(gamma(0, 0, 1) - gamma(0, 1, 0)) <= 1e-12);

    CurvatureTensor r = curvature_fd(chart, x);
    // R(e0,e1)e1 paired with e0: sectional curvature -1 times |e1|^2
    CHECK(r.low(0, 1, 1, 0) == Catch::Approx(-e2).margin(1e-5 * e2));
    CHECK(std::abs(r.scalar_curvature() + 2.0) <= 1e-5);
  }
}

TEST_CASE("connection is invariant under constant rescaling", "[chart_calculus]") {
  Chart chart = hyperbolic_surface();
  Chart scaled = hyperbolic_surface();
  MetricField base = chart.metric;
  scaled.metric = [base](const Eigen::VectorXd& x) { return (2.0 * base(x)).eval(); };
  Rng rng(7);
  for (int t = 0; t < 3; ++t) {
    Eigen::VectorXd x = rng.ball(2, 0.8);
    CHECK((christoffel(chart, x) - christoffel(scaled, x)).max_abs() <= 1e-9);
  }
}

TEST_CASE("metric is parallel", "[chart_calculus]") {
  for (int eps_case : {-1, 1}) {
    Chart chart = projective_chart(1, eps_case);
    DynTensorField gf = metric_as_field(chart);
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXd x = rng.ball(4, 0.3);
      DynTensor dg = covariant_derivative(chart, gf, x, {false, false});
      CHECK(dg.max_abs() <= 1e-4);
    }
  }
}

TEST_CASE("covariant derivative satisfies the product rule", "[chart_calculus]") {
  Chart chart = hyperbolic_surface();
  auto vf = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd v(2);
    v << std::sin(x(1)), x(0) * x(0);
    return v;
  };
  auto wf = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd w(2);
    w << std::cos(x(0)), std::exp(x(1));
    return w;
  };
  DynTensorField vfield = [&](const Eigen::VectorXd& x) {
    DynTensor t;
    t.dims = {2};
    Eigen::VectorXd v = vf(x);
    t.v = {v(0), v(1)};
    return t;
  };
  DynTensorField wfield = [&](const Eigen::VectorXd& x) {
    DynTensor t;
    t.dims = {2};
    Eigen::VectorXd w = wf(x);
    t.v = {w(0), w(1)};
    return t;
  };
  DynTensorField prod = [&](const Eigen::VectorXd& x) {
    DynTensor t;
    t.dims = {2, 2};
    Eigen::VectorXd v = vf(x), w = wf(x);
    t.v.resize(4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) t.v[static_cast<size_t>(i) * 2 + j] = v(i) * w(j);
    return t;
  };

  Rng rng(13);
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd x = rng.ball(2, 0.7);
    DynTensor dv = covariant_derivative(chart, vfield, x, {true});
    DynTensor dw = covariant_derivative(chart, wfield, x, {true});
    DynTensor dp = covariant_derivative(chart, prod, x, {true, true});
    Eigen::VectorXd v = vf(x), w = wf(x);
    double worst = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double lhs = dp.at({a, i, j});
          double rhs = dv.at({a, i}) * w(j) + v(i) * dw.at({a, j});
          worst = std::max(worst, std::abs(lhs - rhs));
        }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("directional covariant derivative contracts the direction slot",
          "[chart_calculus]") {
  Chart chart = hyperbolic_surface();
  DynTensorField gf = metric_as_field(chart);
  Rng rng(17);
  Eigen::VectorXd x = rng.ball(2, 0.5);
  Eigen::VectorXd dir = rng.vector(2, -1.0, 1.0);
  DynTensor full = covariant_derivative(chart, gf, x, {false, false});
  DynTensor along = covariant_derivative_along(chart, gf, x, dir, {false, false});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double expected = dir(0) * full.at({0, a, b}) + dir(1) * full.at({1, a, b});
      CHECK(along.at({a, b}) == Catch::Approx(expected).margin(1e-12));
    }
}

TEST_CASE("exterior derivatives of explicit forms", "[chart_calculus]") {
  // 1-form w = x1 dx0 on R^2: dw = -dx0 ∧ dx1
  auto one_form = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd w(2);
    w << x(1), 0.0;
    return w;
  };
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd dw = exterior_derivative_1form(one_form, x0, 1e-4);
  CHECK(dw(0, 1) == Catch::Approx(-1.0).margin(1e-9));
  CHECK(dw(1, 0) == Catch::Approx(1.0).margin(1e-9));
  CHECK(std::abs(dw(0, 0)) <= 1e-12);

  // 2-form F = x2 dx0 ∧ dx1 on R^3: dF(0,1,2) = 1
  auto two_form = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(3, 3);
    f(0, 1) = x(2);
    f(1, 0) = -x(2);
    return f;
  };
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(3);
  Tensor3<double> df = exterior_derivative_2form(two_form, y0, 1e-4);
  CHECK(df(0, 1, 2) == Catch::Approx(1.0).margin(1e-9));
  CHECK(df(1, 0, 2) == Catch::Approx(-1.0).margin(1e-9));
  CHECK(std::abs(df(0, 0, 1)) <= 1e-12);
}

TEST_CASE("connection one-forms reconstruct the structure derivative", "[chart_calculus]") {
  for (int eps_case : {-1, 1}) {
    Chart chart = projective_chart(1, eps_case);
    Rng rng(19);
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd x = rng.ball(4, 0.3);
      ConnectionForms cf = connection_one_forms(chart, x);
      INFO("eps=" << eps_case);
      CHECK(cf.extraction_spread <= 1e-12);
      CHECK(cf.reconstruction_residual <= 1e-10);
      CHECK(cf.omega.cwiseAbs().maxCoeff() > 1e-3);  // genuinely non-flat bundle
    }
  }
}

TEST_CASE("structure equations hold on validated charts", "[chart_calculus]") {
  for (int eps_case : {-1, 1}) {
    Chart chart = projective_chart(1, eps_case);
    Rng rng(23);
    for (int t = 0; t < 3; ++t) {
      Eigen::VectorXd x = rng.ball(4, 0.3);
      StructureEquationResiduals se = structure_eq_residuals(chart, x);
      INFO("eps=" << eps_case);
      CHECK(se.curvature_eq_max() <= 1e-3);
      // the differentiated consequence may not degrade by more than 10x
      CHECK(se.bianchi_eq_max() <= 10.0 * se.curvature_eq_max() + 1e-12);
    }
  }
}

TEST_CASE("curvature symmetries on a validated chart", "[chart_calculus]") {
  Chart chart = projective_chart(1, -1);
  Rng rng(29);
  Eigen::VectorXd x = rng.ball(4, 0.3);
  CurvatureTensor r = curvature_fd(chart, x);
  CHECK(curvature_symmetry_residuals(r).max() <= 5e-4);
}

TEST_CASE("scalar curvature estimate matches the declared value", "[chart_calculus]") {
  Chart chart = projective_chart(1, -1);
  Rng rng(31);
  for (int t = 0; t < 3; ++t) {
    Eigen::VectorXd x = rng.ball(4, 0.3);
    CHECK(std::abs(nu_estimate(chart, x) - chart.declared_nu) <= 1e-6);
  }
}

TEST_CASE("chart validation rejects corrupted structures", "[chart_calculus]") {
  Chart chart = flat_space(1, -1);
  OperatorField j0 = chart.structure[0];
  chart.structure[0] = [j0](const Eigen::VectorXd& x) { return (0.9 * j0(x)).eval(); };
  std::vector<Eigen::VectorXd> pts = {Eigen::VectorXd::Zero(4)};
  CHECK_THROWS_AS(validate_structured_chart(chart, pts, 1e-3), ChartValidationError);
}

TEST_CASE("per-coordinate steps grow away from the unit box", "[chart_calculus]") {
  Eigen::VectorXd x(3);
  x << 0.2, -5.0, 1.0;
  Eigen::VectorXd h = fd_steps(x, 1e-4);
  CHECK(h(0) == Catch::Approx(1e-4));
  CHECK(h(1) == Catch::Approx(5e-4));
  CHECK(h(2) == Catch::Approx(1e-4));
}
