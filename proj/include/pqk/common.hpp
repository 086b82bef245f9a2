#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pqk {

inline constexpr char kVersion[] = "0.1.0";

// Relative singular-value cutoff for every rank / degeneracy decision.
inline constexpr double kRankTol = 1e-8;

// Default step for first-order central differences; second derivatives of
// immersion maps use the square root of this (rounding noise on a second
// difference scales like eps/h^2, so the tighter step would drown the
// low-residual checks on polynomial maps).
inline constexpr double kFdStep = 1e-4;

inline constexpr double kAlgebraicTol = 1e-10;
inline constexpr double kFdTolFirstOrder = 1e-4;
inline constexpr double kFdTolSecondOrder = 1e-3;

/** Thrown when a span or restricted metric turns out degenerate; carries an
 *  isotropic witness vector so callers can report what collapsed. */
class DegenerateMetricError : public std::runtime_error {
 public:
  DegenerateMetricError(const std::string& what, Eigen::VectorXd witness)
      : std::runtime_error(what), witness_(std::move(witness)) {}
  const Eigen::VectorXd& witness() const { return witness_; }

 private:
  Eigen::VectorXd witness_;
};

/** Thrown when a chart fails its curvature-model validation gate. */
class ChartValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Thrown for malformed or inconsistent scenario input. */
class ScenarioError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Deterministic RNG: mt19937_64 with explicit bit mapping so the stream does
 *  not depend on library distribution internals. */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Eigen::VectorXd vector(int dim, double lo, double hi) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  // Point in the closed Euclidean ball of the given radius (cube sample,
  // rescaled when it lands outside; keeps the draw count per point fixed).
  Eigen::VectorXd ball(int dim, double radius) {
    Eigen::VectorXd v = vector(dim, -radius, radius);
    double r = v.norm();
    if (r > radius && r > 0.0) v *= 0.9 * radius / r;
    return v;
  }

 private:
  std::mt19937_64 eng_;
};

inline std::string format_vector(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << "]";
  return os.str();
}

// Signature of a symmetric bilinear form: (positive, negative, null) counts,
// with |eigenvalue| below tol * max|eigenvalue| treated as null.
inline std::array<int, 3> signature(const Eigen::MatrixXd& g, double tol = kRankTol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const Eigen::VectorXd& ev = es.eigenvalues();
  double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  int pos = 0, neg = 0, nul = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i]) < tol * scale)
      ++nul;
    else if (ev[i] > 0)
      ++pos;
    else
      ++neg;
  }
  return {pos, neg, nul};
}

}  // namespace pqk
