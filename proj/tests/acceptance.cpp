// Acceptance gate: one criterion per invocation, selected by argv[1] (1-10).
// Prints a single PASS/FAIL line; exit 0 iff the criterion holds.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pqk/pqk.hpp"

using namespace pqk;

namespace {

Eigen::MatrixXd standard_slice(int n, int eps_case) {
  auto pat = slice_pattern(eps_case);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    b(4 * i + pat[0], 2 * i) = 1.0;
    b(4 * i + pat[1], 2 * i + 1) = 1.0;
  }
  return b;
}

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void gate(const char* what, double value, double tol) {
    if (!(value <= tol)) {
      ok = false;
      detail << " [" << what << " = " << value << " > " << tol << "]";
    }
  }
  void require(const char* what, bool cond) {
    if (!cond) {
      ok = false;
      detail << " [" << what << "]";
    }
  }
  void note(const char* what, double value) { detail << " " << what << "=" << value; }
};

// 1. split-quaternion relations and q_norm, adapted-basis invariants
Outcome criterion_1() {
  Outcome out;
  Rng rng(101);
  double alg = 0.0;
  for (int t = 0; t < 10000; ++t) {
    SplitQuaternion p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                      rng.uniform(-1, 1)};
    SplitQuaternion q{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                      rng.uniform(-1, 1)};
    SplitQuaternion pq = p * q;
    alg = std::max(alg, std::abs(pq.norm() - p.norm() * q.norm()));
    SplitQuaternion anti = pq.conj() - q.conj() * p.conj();
    alg = std::max(alg, std::max({std::abs(anti.a), std::abs(anti.b), std::abs(anti.c),
                                  std::abs(anti.d)}));
    SplitQuaternion nq = q * q.conj();
    alg = std::max(alg, std::max({std::abs(nq.a - q.norm()), std::abs(nq.b),
                                  std::abs(nq.c), std::abs(nq.d)}));
  }
  out.gate("relations", alg, 1e-12);

  // unit table, exact
  const SplitQuaternion u1 = SplitQuaternion::one(), ui = SplitQuaternion::ui(),
                        uj = SplitQuaternion::uj(), uk = SplitQuaternion::uk();
  auto is = [](const SplitQuaternion& x, double a, double b, double c, double d) {
    return x.a == a && x.b == b && x.c == c && x.d == d;
  };
  out.require("unit table", is(ui * ui, -1, 0, 0, 0) && is(uj * uj, 1, 0, 0, 0) &&
                                is(uk * uk, 1, 0, 0, 0) && is(ui * uj, 0, 0, 0, 1) &&
                                is(uj * ui, 0, 0, 0, -1) && is(uj * uk, 0, -1, 0, 0) &&
                                is(uk * uj, 0, 1, 0, 0) && is(uk * ui, 0, 0, 1, 0) &&
                                is(ui * uk, 0, 0, -1, 0) && is(u1 * ui, 0, 1, 0, 0));

  double form = 0.0, inv = 0.0;
  for (int eps_case : {-1, 1}) {
    auto [space1, basis1] = make_standard_basis(1, eps_case);
    for (int t = 0; t < 5000; ++t) {
      Eigen::Vector3d c;
      c << rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1);
      Eigen::MatrixXd l = q_element(basis1, c);
      form = std::max(form, (l * l + q_norm(c, basis1.eps) *
                                         Eigen::MatrixXd::Identity(4, 4))
                                .cwiseAbs()
                                .maxCoeff());
    }
    for (int n : {1, 2}) {
      auto [space, basis] = make_standard_basis(n, eps_case);
      inv = std::max(inv, adapted_basis_residual(basis, space.g));
      for (double theta : {-0.9, -0.4, 0.3, 0.7, 1.1}) {
        AdaptedBasis rot = rotate_basis(basis, theta);
        inv = std::max(inv, adapted_basis_residual(rot, space.g));
      }
    }
  }
  out.gate("q_norm form", form, 1e-12);
  out.gate("basis invariants", inv, 1e-10);
  out.note("alg", alg);
  out.note("inv", inv);
  return out;
}

// 2. model curvature at nu = 1
Outcome criterion_2() {
  Outcome out;
  double sym = 0.0, comm = 0.0, einstein = 0.0, scal = 0.0;
  for (int n : {1, 2})
    for (int eps_case : {-1, 1}) {
      auto [space, basis] = make_standard_basis(n, eps_case);
      CurvatureTensor r = model_space_curvature(space, basis, 1.0);
      sym = std::max(sym, curvature_symmetry_residuals(r).max());
      comm = std::max(comm, structure_commutator_residual(r, basis, 1.0));
      einstein = std::max(
          einstein, (r.ricci() - (n + 2.0) * space.g).cwiseAbs().maxCoeff());
      scal = std::max(scal, std::abs(r.scalar_curvature() - 4.0 * n * (n + 2.0)));
    }
  out.gate("symmetries", sym, 1e-10);
  out.gate("commutator identity", comm, 1e-10);
  out.gate("einstein", einstein, 1e-10);
  out.gate("scalar", scal, 1e-10);

  // holomorphic-type value at a unit vector, complex case
  auto [space, basis] = make_standard_basis(1, -1);
  CurvatureTensor r = model_space_curvature(space, basis, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Unit(4, 0);
  Eigen::VectorXd jx = basis.j[0] * x;
  double hol = x.dot(space.g * (r.op(x, jx) * jx));
  out.gate("holomorphic value", std::abs(hol - 1.0), 1e-10);
  return out;
}

// 3. space-form block identities on the maximal slice
Outcome criterion_3() {
  Outcome out;
  const double nu = 1.3;
  Rng rng(303);
  double closed = 0.0, ric_res = 0.0, nlink = 0.0, bracket = 0.0;
  for (int n : {1, 2})
    for (int eps_case : {-1, 1}) {
      auto [space, basis] = make_standard_basis(n, eps_case);
      CurvatureTensor model = model_space_curvature(space, basis, nu);
      Eigen::MatrixXd b = standard_slice(n, eps_case);
      const int m = 2 * n;
      Eigen::MatrixXd gind = b.transpose() * space.g * b;
      Eigen::MatrixXd jind = gind.ldlt().solve(b.transpose() * space.g * basis.j[0] * b);

      Tensor4<double> tt(m, m, m, m);
      for (int a = 0; a < m; ++a)
        for (int bb = 0; bb < m; ++bb) {
          Eigen::MatrixXd op = model.op(b.col(a), b.col(bb));
          Eigen::MatrixXd low = b.transpose() * space.g * op * b;
          for (int c = 0; c < m; ++c)
            for (int e = 0; e < m; ++e) tt(a, bb, c, e) = low(e, c);
        }

      // closed form: the (-eps)-weighted epsilon-projective model
      CurvatureTensor proj = epsilon_projective_curvature(gind, jind, eps_case);
      closed = std::max(closed, (tt - proj.low * (-eps_case * nu)).max_abs());

      CurvatureTensor rtt{tt, gind};
      ric_res = std::max(
          ric_res, (rtt.ricci() - 0.5 * nu * (n + 1.0) * gind).cwiseAbs().maxCoeff());

      // normal-curvature link, conjugated by the transversal structure
      Eigen::MatrixXd gj = gind * jind;
      Eigen::MatrixXd perp = Eigen::MatrixXd::Identity(4 * n, 4 * n) -
                             b * gind.ldlt().solve(b.transpose() * space.g);
      for (int a = 0; a < m; ++a)
        for (int bb = 0; bb < m; ++bb) {
          Eigen::MatrixXd op = model.op(b.col(a), b.col(bb));
          Eigen::MatrixXd t2 = b.transpose() * space.g *
                               (basis.j[1] * (perp * (op * (basis.j[1] * b))));
          double f = (basis.j[0] * b.col(a)).transpose() * space.g * b.col(bb);
          for (int c = 0; c < m; ++c)
            for (int e = 0; e < m; ++e)
              nlink = std::max(nlink, std::abs(t2(e, c) - (tt(a, bb, c, e) -
                                                           eps_case * nu * f * gj(e, c))));
        }

      auto sbasis = shape_space_basis(jind);
      for (int t = 0; t < 25; ++t) {
        Tensor3<double> c = random_shape_tensor(sbasis, rng);
        bracket = std::max(
            bracket, shape_curvature_identity_residual(model, basis, nu, b, c));
      }
    }
  out.gate("projected closed form", closed, 1e-10);
  out.gate("tangential ricci", ric_res, 1e-10);
  out.gate("normal link", nlink, 1e-9);
  out.gate("bracket identity (100 C)", bracket, 1e-9);
  out.note("bracket", bracket);
  return out;
}

// 4. projective chart validation gate and structure equations
Outcome criterion_4() {
  Outcome out;
  double gate = 0.0, eq = 0.0;
  for (int n : {1, 2})
    for (int eps_case : {-1, 1}) {
      Chart chart = projective_chart(n, eps_case);  // validates at 6 points
      gate = std::max({gate, chart.gate_model_deviation, chart.gate_einstein_residual});
      for (const auto& x : sample_points(4 * n, 3, 0.3, 43)) {
        StructureEquationResiduals se = structure_eq_residuals(chart, x);
        eq = std::max({eq, se.curvature_eq_max(), se.bianchi_eq_max()});
      }
    }
  out.gate("validation gate", gate, 1e-3);
  out.gate("structure equations", eq, 1e-3);
  out.note("gate", gate);
  out.note("eq", eq);
  return out;
}

// 5. flat slices: verdicts and exclusivity
Outcome criterion_5() {
  Outcome out;
  double kahler = 0.0, pq = 0.0;
  bool exclusivity = false;
  for (int eps_case : {-1, 1}) {
    Chart amb = flat_space(2, eps_case);
    for (int k : {1, 2}) {
      Immersion imm = embed_epsilon_complex_slice(amb, k);
      ClassificationVerdict cv = classify(imm, sample_points(2 * k, 3, 0.25, 7));
      kahler = std::max({kahler, cv.hermitian, cv.kahler_k1, cv.kahler_k2,
                         cv.totally_complex, cv.totally_geodesic});
      exclusivity = exclusivity || cv.exclusivity_violation;
    }
    Immersion pqs = embed_pq_slice(amb, 1);
    ClassificationVerdict cv = classify(pqs, sample_points(4, 3, 0.25, 3));
    pq = std::max({pq, cv.para_quaternionic, cv.totally_geodesic});
    exclusivity = exclusivity || cv.exclusivity_violation;
  }
  out.gate("epsilon-Kähler slices", kahler, 1e-6);
  out.gate("pq slices", pq, 1e-6);
  out.require("no exclusivity violation", !exclusivity);
  return out;
}

// 6. projective slice: Kähler criteria, Ricci form, dw = nu F
Outcome criterion_6() {
  Outcome out;
  double k123 = 0.0, ric = 0.0, dom = 0.0;
  bool exclusivity = false;
  for (int eps_case : {-1, 1}) {
    Chart amb = projective_chart(2, eps_case);
    Immersion imm = embed_epsilon_complex_slice(amb, 2);
    std::vector<Eigen::VectorXd> pts = sample_points(4, 3, 0.25, 19);
    ClassificationVerdict cv = classify(imm, pts);
    k123 = std::max({k123, cv.kahler_k1, cv.kahler_k2, cv.almost_kahler_df});
    exclusivity = exclusivity || cv.exclusivity_violation;
    for (int i = 0; i < 2; ++i) {
      RicciChecks rc = ricci_checks(imm, pts[i]);
      if (rc.applicable) ric = std::max(ric, rc.space_form);
      dom = std::max(dom, domega_check(imm, pts[i]).residual);
    }
  }
  out.gate("k1/k2/k3", k123, 1e-3);
  out.gate("ricci identity", ric, 1e-3);
  out.gate("domega", dom, 1e-3);
  out.require("no exclusivity violation", !exclusivity);
  out.note("k123", k123);
  out.note("ric", ric);
  return out;
}

// 7. non-totally-geodesic flat graph family
Outcome criterion_7() {
  Outcome out;
  double h_min = 1e300, fund = 0.0, minim = 0.0, janti = 0.0, gauss = 0.0,
         traced = 0.0, ccp = 0.0;
  for (int eps_case : {-1, 1}) {
    Chart amb = flat_space(1, eps_case);
    Immersion imm = embed_graph(amb, quadratic_graph_map(1, eps_case, 0.8));
    for (const auto& u : sample_points(2, 3, 0.25, 13)) {
      SubmanifoldPointData pd = point_data(imm, u);
      h_min = std::min(h_min, pd.h_norm);
      fund = std::max(fund, fundamental_identity_residuals(imm, pd).max());
      WeingartenData wd = weingarten_data(imm, pd);
      minim = std::max(minim, wd.minimality);
      janti = std::max(janti, wd.j_anticommute);
      GcrResiduals gcr = gcr_residuals(imm, u);
      gauss = std::max(gauss, gcr.gauss);
      traced = std::max(traced, ricci_checks(imm, u).gauss_traced);
      ccp = std::max(ccp, cc_properties(pd.c_low, pd.g_ind, pd.jdom).max());
    }
  }
  out.require("||h|| > 0.1", h_min > 0.1);
  out.gate("fundamental identity", fund, 1e-5);
  out.gate("minimality", minim, 1e-5);
  out.gate("AJ + JA", janti, 1e-5);
  out.gate("gauss", gauss, 1e-3);
  out.gate("traced gauss", traced, 1e-3);
  out.gate("cc properties", ccp, 1e-9);
  out.note("h_min", h_min);
  return out;
}

// 8. cubic decomposition round-trip and rotation laws
Outcome criterion_8() {
  Outcome out;
  Rng rng(808);
  double round_trip = 0.0, law = 0.0;
  for (int n : {1, 2})
    for (int eps_case : {-1, 1}) {
      auto [space, basis] = make_standard_basis(n, eps_case);
      Eigen::MatrixXd b = standard_slice(n, eps_case);
      Eigen::MatrixXd gind = b.transpose() * space.g * b;
      Eigen::MatrixXd jind = gind.ldlt().solve(b.transpose() * space.g * basis.j[0] * b);
      auto sbasis = shape_space_basis(jind);
      for (int t = 0; t < 250; ++t) {
        Tensor3<double> c = random_shape_tensor(sbasis, rng);
        CubicDecomposition dec = decompose_cubic(c, jind, eps_case);
        round_trip = std::max({round_trip, dec.reconstruction_residual, dec.mixed_residual});
      }
      for (int t = 0; t < 5; ++t) {
        Tensor3<double> c = random_shape_tensor(sbasis, rng);
        for (double theta : {0.25, 0.6, 1.0})
          law = std::max(law, cubic_rotation_law_residual(c, jind, theta, eps_case));
      }
    }
  out.gate("round trip (1000 elements)", round_trip, 1e-10);
  out.gate("rotation law", law, 1e-10);
  out.note("rt", round_trip);
  out.note("law", law);
  return out;
}

// 9. Nijenhuis reconstruction and the psi = 0 verdict link
Outcome criterion_9() {
  Outcome out;
  double recon = 0.0, psi_on_hermitian = 0.0;
  auto visit = [&](const Immersion& imm, std::uint64_t seed) {
    for (const auto& u : sample_points(imm.domain_dim, 2, 0.25, seed)) {
      SubmanifoldPointData pd = point_data(imm, u);
      Tensor3<double> n = nijenhuis_tensor(imm, u);
      recon = std::max(recon, nijenhuis_reconstruction_residual(imm, pd, n));
      if (pd.hermitian_residual <= 1e-6 && n.max_abs() <= 1e-3)
        psi_on_hermitian = std::max(psi_on_hermitian, pd.psi.cwiseAbs().maxCoeff());
    }
  };
  for (int eps_case : {-1, 1}) {
    Chart flat2 = flat_space(2, eps_case);
    visit(embed_epsilon_complex_slice(flat2, 2), 7);
    Chart flat1 = flat_space(1, eps_case);
    visit(embed_graph(flat1, quadratic_graph_map(1, eps_case, 0.8)), 13);
  }
  Chart flat2 = flat_space(2, -1);
  visit(embed_pq_slice(flat2, 1), 3);
  Chart proj = projective_chart(2, -1);
  visit(embed_epsilon_complex_slice(proj, 2), 19);
  visit(embed_pq_slice(proj, 1), 29);
  out.gate("psi reconstruction", recon, 1e-3);
  out.gate("psi on hermitian verdicts", psi_on_hermitian, 1e-3);
  out.note("recon", recon);
  return out;
}

// 10. CLI determinism and corpus wall time
Outcome criterion_10() {
  Outcome out;
  namespace fs = std::filesystem;
  std::string dir = std::string(PQK_SOURCE_DIR) + "/scenarios";
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  out.require("corpus present", files.size() >= 10);

  auto t0 = std::chrono::steady_clock::now();
  for (const auto& path : files) {
    Scenario sc = load_scenario(path);
    Report a = run_scenario(sc);
    Report b = run_scenario(sc);
    a.doc.erase("timestamp");
    b.doc.erase("timestamp");
    if (a.doc.dump(2) != b.doc.dump(2)) {
      out.ok = false;
      out.detail << " [nondeterministic: " << fs::path(path).filename().string() << "]";
    }
    if (!a.pass || !b.pass) {
      out.ok = false;
      out.detail << " [failing scenario: " << fs::path(path).filename().string() << "]";
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require("wall time <= 60 s", secs <= 60.0);
  out.detail << " scenarios=" << files.size() << " secs=" << std::fixed
             << std::setprecision(2) << secs;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <criterion 1-10>\n";
    return 2;
  }
  const int crit = std::atoi(argv[1]);
  Outcome out;
  switch (crit) {
    case 1: out = criterion_1(); break;
    case 2: out = criterion_2(); break;
    case 3: out = criterion_3(); break;
    case 4: out = criterion_4(); break;
    case 5: out = criterion_5(); break;
    case 6: out = criterion_6(); break;
    case 7: out = criterion_7(); break;
    case 8: out = criterion_8(); break;
    case 9: out = criterion_9(); break;
    case 10: out = criterion_10(); break;
    default:
      std::cerr << "unknown criterion: " << argv[1] << "\n";
      return 2;
  }
  std::cout << (out.ok ? "PASS" : "FAIL") << " criterion " << crit << out.detail.str()
            << "\n";
  return out.ok ? 0 : 1;
}
