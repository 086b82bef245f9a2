#include <catch2/catch_amalgamated.hpp>

#include "pqk/adapted_basis.hpp"
#include "pqk/epsilon_complex.hpp"
#include "pqk/split_quaternion.hpp"

using namespace pqk;

namespace {

SplitQuaternion random_quat(Rng& rng) {
  return {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
          rng.uniform(-2.0, 2.0)};
}

double qdist(const SplitQuaternion& x, const SplitQuaternion& y) {
  return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c),
                   std::abs(x.d - y.d)});
}

}  // namespace

TEST_CASE("imaginary unit products", "[split_algebra]") {
  const auto one = SplitQuaternion::one();
  const auto i = SplitQuaternion::ui();
  const auto j = SplitQuaternion::uj();
  const auto k = SplitQuaternion::uk();

  CHECK(qdist(i * i, one * -1.0) == 0.0);
  CHECK(qdist(j * j, one) == 0.0);
  CHECK(qdist(k * k, one) == 0.0);
  CHECK(qdist(i * j, k) == 0.0);
  CHECK(qdist(j * i, k * -1.0) == 0.0);
  CHECK(qdist(j * k, i * -1.0) == 0.0);
  CHECK(qdist(k * j, i) == 0.0);
  CHECK(qdist(k * i, j) == 0.0);
  CHECK(qdist(i * k, j * -1.0) == 0.0);
}

TEST_CASE("norm form is multiplicative and conjugation reverses products", "[split_algebra]") {
  Rng rng(101);
  double worst_norm = 0.0, worst_conj = 0.0, worst_qq = 0.0;
  for (int t = 0; t < 10000; ++t) {
    SplitQuaternion p = random_quat(rng), q = random_quat(rng);
    worst_norm = std::max(worst_norm, std::abs((p * q).norm() - p.norm() * q.norm()));
    worst_conj = std::max(worst_conj, qdist((p * q).conj(), q.conj() * p.conj()));
    SplitQuaternion nq = q * q.conj();
    worst_qq = std::max(worst_qq,
                        qdist(nq, SplitQuaternion{q.norm(), 0.0, 0.0, 0.0}));
  }
  CHECK(worst_norm <= 1e-12);
  CHECK(worst_conj <= 1e-12);
  CHECK(worst_qq <= 1e-12);
}

TEST_CASE("null elements witness zero divisors", "[split_algebra]") {
  SplitQuaternion p{1.0, 0.0, 1.0, 0.0};   // 1 + j
  SplitQuaternion q{1.0, 0.0, -1.0, 0.0};  // 1 - j
  CHECK(p.norm() == 0.0);
  CHECK(qdist(p * q, SplitQuaternion{0, 0, 0, 0}) == 0.0);
}

TEST_CASE("real center and re()", "[split_algebra]") {
  Rng rng(11);
  SplitQuaternion q = random_quat(rng);
  SplitQuaternion c{3.5, 0.0, 0.0, 0.0};
  CHECK(qdist(c * q, q * c) == 0.0);
  CHECK(q.re() == q.a);
  CHECK((q + q.conj()).a == Catch::Approx(2.0 * q.re()));
}

TEST_CASE("twisted commutation over the elliptic subfield", "[split_algebra]") {
  // c in span{1, i}: the split units j, k conjugate it
  Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    SplitQuaternion c{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), 0.0, 0.0};
    const auto j = SplitQuaternion::uj();
    const auto k = SplitQuaternion::uk();
    CHECK(qdist(j * c, c.conj() * j) <= 1e-15);
    CHECK(qdist(k * c, c.conj() * k) <= 1e-15);
  }
}

TEST_CASE("twisted commutation over the hyperbolic subfield", "[split_algebra]") {
  // c in span{1, j}: the unit i conjugates it
  Rng rng(22);
  for (int t = 0; t < 200; ++t) {
    SplitQuaternion c{rng.uniform(-2.0, 2.0), 0.0, rng.uniform(-2.0, 2.0), 0.0};
    const auto i = SplitQuaternion::ui();
    const auto k = SplitQuaternion::uk();
    CHECK(qdist(i * c, c.conj() * i) <= 1e-15);
    // k also anti-commutes with j, so it conjugates this subfield too
    CHECK(qdist(k * c, c.conj() * k) <= 1e-15);
  }
}

TEST_CASE("epsilon-complex arithmetic matches its realization", "[split_algebra]") {
  Rng rng(31);
  for (int eps : {-1, 1}) {
    for (int t = 0; t < 500; ++t) {
      EpsilonComplex x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), eps};
      EpsilonComplex y{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), eps};
      EpsilonComplex prod = x * y;
      CHECK(prod.re == Catch::Approx(x.re * y.re + eps * x.im * y.im).margin(1e-14));
      CHECK(prod.im == Catch::Approx(x.re * y.im + x.im * y.re).margin(1e-14));
      EpsilonComplex sq = x.conj() * x;
      CHECK(sq.im == Catch::Approx(0.0).margin(1e-14));
      CHECK(sq.re == Catch::Approx(x.re * x.re - eps * x.im * x.im).margin(1e-14));
    }
  }
}

TEST_CASE("structure coefficient triple per case", "[split_algebra]") {
  auto en = eps_triple(-1);
  CHECK(en[0] == -1);
  CHECK(en[1] == 1);
  CHECK(en[2] == 1);
  auto ep = eps_triple(1);
  CHECK(ep[0] == 1);
  CHECK(ep[1] == 1);
  CHECK(ep[2] == -1);
  for (int c : {-1, 1}) {
    auto e = eps_triple(c);
    CHECK(e[1] == 1);
    CHECK(e[0] * e[2] == -1);
  }
}

TEST_CASE("quadratic form on structure coefficients", "[split_algebra]") {
  Rng rng(41);
  for (int eps_case : {-1, 1}) {
    auto eps = eps_triple(eps_case);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
      Eigen::Vector3d c(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                        rng.uniform(-2.0, 2.0));
      double expected =
          -(eps[0] * c(0) * c(0) + eps[1] * c(1) * c(1) + eps[2] * c(2) * c(2));
      worst = std::max(worst, std::abs(q_norm(c, eps) - expected));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("unit-coefficient elements square to the signed identity", "[split_algebra]") {
  Rng rng(51);
  for (int eps_case : {-1, 1}) {
    auto [space, basis] = make_standard_basis(1, eps_case);
    auto eps = eps_triple(eps_case);
    for (int t = 0; t < 50; ++t) {
      Eigen::Vector3d c(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                        rng.uniform(-1.0, 1.0));
      double n = q_norm(c, eps);
      Eigen::MatrixXd a = q_element(basis, c);
      // A^2 = -q_norm(c) Id for any adapted triple
      double r = (a * a + n * Eigen::MatrixXd::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff();
      CHECK(r <= 1e-12);
    }
  }
}
