#pragma once

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pqk/common.hpp"
#include "pqk/model_spaces.hpp"
#include "pqk/submanifold.hpp"

namespace pqk {

using Json = nlohmann::ordered_json;

/** Declarative verification job. */
struct Scenario {
  std::string ambient_kind = "flat";  // flat | projective
  int n = 1;
  int eps = -1;
  double scale = 1.0;

  std::string immersion_kind = "slice";  // slice | pq_slice | graph
  int slots = 1;
  double strength = 1.0;

  int point_count = 5;
  std::uint64_t seed = 7;
  double radius = 0.25;
  std::vector<Eigen::VectorXd> explicit_points;

  double fd_step = kFdStep;
  std::vector<std::pair<std::string, double>> suites;  // name -> tolerance
};

inline Scenario parse_scenario(const Json& doc) {
  Scenario sc;
  try {
    const Json& amb = doc.at("ambient");
    sc.ambient_kind = amb.at("kind").get<std::string>();
    sc.n = amb.at("n").get<int>();
    sc.eps = amb.at("eps").get<int>();
    sc.scale = amb.value("scale", 1.0);

    const Json& imm = doc.at("immersion");
    sc.immersion_kind = imm.at("kind").get<std::string>();
    sc.slots = imm.value("slots", sc.n);
    sc.strength = imm.value("strength", 1.0);

    if (doc.contains("points")) {
      const Json& pts = doc.at("points");
      if (pts.contains("list")) {
        for (const auto& row : pts.at("list")) {
          Eigen::VectorXd v(row.size());
          for (size_t i = 0; i < row.size(); ++i) v(static_cast<int>(i)) = row[i].get<double>();
          sc.explicit_points.push_back(v);
        }
      } else {
        sc.point_count = pts.value("count", 5);
        sc.seed = pts.value("seed", std::uint64_t{7});
        sc.radius = pts.value("radius", 0.25);
      }
    }
    sc.fd_step = doc.value("fd_step", kFdStep);

    if (!doc.contains("suites") || !doc.at("suites").is_object() || doc.at("suites").empty())
      throw ScenarioError("scenario must request at least one suite");
    for (const auto& [name, tol] : doc.at("suites").items()) {
      double t = tol.get<double>();
      if (t <= 0.0) throw ScenarioError("tolerance for suite '" + name + "' must be positive");
      sc.suites.emplace_back(name, t);
    }
  } catch (const Json::exception& e) {
    throw ScenarioError(std::string("scenario field error: ") + e.what());
  }
  if (sc.ambient_kind != "flat" && sc.ambient_kind != "projective")
    throw ScenarioError("ambient.kind must be 'flat' or 'projective'");
  if (sc.eps != -1 && sc.eps != 1) throw ScenarioError("ambient.eps must be -1 or +1");
  if (sc.n < 1) throw ScenarioError("ambient.n must be at least 1");
  if (sc.immersion_kind != "slice" && sc.immersion_kind != "pq_slice" &&
      sc.immersion_kind != "graph")
    throw ScenarioError("immersion.kind must be 'slice', 'pq_slice' or 'graph'");
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what());
  }
  return parse_scenario(doc);
}

inline Immersion build_immersion(const Scenario& sc) {
  int eps_case = sc.eps;
  Chart ambient;
  if (sc.ambient_kind == "flat") {
    ambient = flat_space(sc.n, eps_case);
    ambient.fd_step = sc.fd_step;
  } else {
    ProjectiveChartOptions opt;
    opt.scale = sc.scale;
    opt.fd_step = sc.fd_step;
    ambient = projective_chart(sc.n, eps_case, opt);
  }
  if (sc.immersion_kind == "slice") return embed_epsilon_complex_slice(ambient, sc.slots);
  if (sc.immersion_kind == "pq_slice") return embed_pq_slice(ambient, sc.slots);
  if (sc.ambient_kind != "flat")
    throw ScenarioError("graph immersions require a flat ambient");
  return embed_graph(ambient, quadratic_graph_map(sc.n, eps_case, sc.strength));
}

inline std::vector<Eigen::VectorXd> scenario_points(const Scenario& sc, const Immersion& imm) {
  if (!sc.explicit_points.empty()) {
    for (const auto& p : sc.explicit_points)
      if (p.size() != imm.domain_dim)
        throw ScenarioError("explicit point dimension does not match the immersion domain");
    return sc.explicit_points;
  }
  return sample_points(imm.domain_dim, sc.point_count, sc.radius, sc.seed);
}

// ---------------------------------------------------------------------------
// suite registry

struct SuiteResult {
  double residual = 0.0;
  bool not_applicable = false;
  Json details = Json::object();
};

using SuiteRunner = std::function<SuiteResult(
    const Scenario&, const Immersion&, const std::vector<Eigen::VectorXd>&, double tol)>;

namespace suites {

inline SuiteResult run_classify(const Scenario& sc, const Immersion& imm,
                                const std::vector<Eigen::VectorXd>& pts, double tol) {
  ClassificationVerdict cv = classify(imm, pts, tol);
  SuiteResult out;
  out.details = Json{{"hermitian", cv.hermitian},
                     {"kahler_k1", cv.kahler_k1},
                     {"kahler_k2", cv.kahler_k2},
                     {"totally_complex", cv.totally_complex},
                     {"para_quaternionic", cv.para_quaternionic},
                     {"totally_geodesic", cv.totally_geodesic},
                     {"almost_kahler_df", cv.almost_kahler_df},
                     {"nijenhuis", cv.nijenhuis},
                     {"psi", cv.psi},
                     {"nu_hat", cv.nu_hat},
                     {"degenerate_stratum", cv.degenerate_stratum},
                     {"exclusivity_violation", cv.exclusivity_violation}};
  // expectation profile per immersion family: the residuals that must vanish
  std::vector<double> gated;
  if (sc.immersion_kind == "slice") {
    gated = {cv.hermitian, cv.kahler_k1,   cv.kahler_k2, cv.totally_complex,
             cv.psi,       cv.nijenhuis,   cv.almost_kahler_df, cv.totally_geodesic};
  } else if (sc.immersion_kind == "pq_slice") {
    gated = {cv.para_quaternionic, cv.hermitian, cv.totally_geodesic};
  } else {
    gated = {cv.hermitian, cv.kahler_k1, cv.kahler_k2, cv.totally_complex,
             cv.psi,       cv.nijenhuis, cv.almost_kahler_df};
  }
  for (double g : gated) out.residual = std::max(out.residual, g);
  if (cv.exclusivity_violation) out.residual = std::max(out.residual, 1.0);
  out.details["gated_residual"] = out.residual;
  return out;
}

inline SuiteResult run_fundamental_identity(const Scenario&, const Immersion& imm,
                                            const std::vector<Eigen::VectorXd>& pts, double) {
  SuiteResult out;
  Json per = Json::array();
  for (const auto& u : pts) {
    SubmanifoldPointData pd = point_data(imm, u);
    FundamentalIdentityResiduals r = fundamental_identity_residuals(imm, pd);
    per.push_back(Json{{"swap", r.swap}, {"j_factor", r.j_factor}, {"double_j", r.double_j}});
    out.residual = std::max(out.residual, r.max());
  }
  out.details["points"] = per;
  return out;
}

inline SuiteResult run_shape_tensor(const Scenario&, const Immersion& imm,
                                    const std::vector<Eigen::VectorXd>& pts, double) {
  SuiteResult out;
  Json per = Json::array();
  int applicable = 0;
  for (const auto& u : pts) {
    SubmanifoldPointData pd = point_data(imm, u);
    ShapeTensorChecks r = shape_tensor_checks(imm, pd);
    if (!r.applicable) {
      per.push_back(Json{{"applicable", false}});
      continue;
    }
    ++applicable;
    per.push_back(Json{{"constraint", r.constraint},
                       {"total_symmetry", r.total_symmetry},
                       {"total_symmetry_j", r.total_symmetry_j},
                       {"trace", r.trace},
                       {"minimality", r.minimality}});
    out.residual = std::max({out.residual, r.constraint, r.total_symmetry,
                             r.total_symmetry_j, r.trace, r.minimality});
  }
  out.not_applicable = applicable == 0;
  out.details["points"] = per;
  return out;
}

inline SuiteResult run_weingarten(const Scenario&, const Immersion& imm,
                                  const std::vector<Eigen::VectorXd>& pts, double) {
  SuiteResult out;
  Json per = Json::array();
  for (const auto& u : pts) {
    SubmanifoldPointData pd = point_data(imm, u);
    WeingartenData wd = weingarten_data(imm, pd);
    per.push_back(Json{{"symmetry", wd.symmetry},
                       {"duality", wd.duality},
                       {"c_duality", wd.c_duality},
                       {"j_anticommute", wd.j_anticommute},
                       {"minimality", wd.minimality}});
    out.residual = std::max({out.residual, wd.symmetry, wd.duality, wd.c_duality});
    if (pd.maximal_totally_complex)
      out.residual = std::max({out.residual, wd.j_anticommute, wd.minimality});
  }
  out.details["points"] = per;
  return out;
}

inline SuiteResult run_gcr(const Scenario&, const Immersion& imm,
                           const std::vector<Eigen::VectorXd>& pts, double) {
  SuiteResult out;
  Json per = Json::array();
  int applicable = 0;
  for (const auto& u : pts) {
    GcrResiduals r = gcr_residuals(imm, u);
    if (!r.applicable) {
      per.push_back(Json{{"applicable", false}});
      continue;
    }
    ++applicable;
    per.push_back(Json{{"gauss", r.gauss},
                       {"ricci_eq", r.ricci_eq},
                       {"codazzi", r.codazzi},
                       {"normal_link", r.normal_link},
                       {"parallelism", r.parallelism}});
    out.residual = std::max({out.residual, r.gauss, r.ricci_eq, r.codazzi, r.normal_link});
  }
  out.not_applicable = applicable == 0;
  out.details["points"] = per;
  return out;
}

inline SuiteResult run_ricci(const Scenario&, const Immersion& imm,
                             const std::vector<Eigen::VectorXd>& pts, double) {
  SuiteResult out;
  Json per = Json::array();
  int applicable = 0;
  for (const auto& u : pts) {
    RicciChecks r = ricci_checks(imm, u);
    if (!r.applicable) {
      per.push_back(Json{{"applicable", false}});
      continue;
    }
    ++applicable;
    per.push_back(Json{{"gauss_traced", r.gauss_traced},
                       {"space_form", r.space_form},
                       {"h_pairing", r.h_pairing}});
    out.residual = std::max({out.residual, r.gauss_traced, r.space_form, r.h_pairing});
  }
  out.not_applicable = applicable == 0;
  out.details["points"] = per;
  return out;
}

inline SuiteResult run_domega(const Scenario&, const Immersion& imm,
                              const std::vector<Eigen::VectorXd>& pts, double) {
  SuiteResult out;
  Json per = Json::array();
  for (const auto& u : pts) {
    DomegaCheck r = domega_check(imm, u);
    per.push_back(Json{{"residual", r.residual}, {"nu_used", r.nu_used}});
    out.residual = std::max(out.residual, r.residual);
  }
  out.details["points"] = per;
  return out;
}

inline SuiteResult run_nijenhuis(const Scenario&, const Immersion& imm,
                                 const std::vector<Eigen::VectorXd>& pts, double) {
  SuiteResult out;
  Json per = Json::array();
  for (const auto& u : pts) {
    SubmanifoldPointData pd = point_data(imm, u);
    Tensor3<double> n = nijenhuis_tensor(imm, u);
    double rec = nijenhuis_reconstruction_residual(imm, pd, n);
    per.push_back(Json{{"norm", n.max_abs()}, {"reconstruction", rec}});
    out.residual = std::max(out.residual, rec);
  }
  out.details["points"] = per;
  return out;
}

inline SuiteResult run_wedge_identity(const Scenario&, const Immersion& imm,
                                      const std::vector<Eigen::VectorXd>& pts, double tol) {
  SuiteResult out;
  Json per = Json::array();
  for (const auto& u : pts) {
    WedgeIdentityReport r = wedge_identity_report(imm, u);
    per.push_back(Json{{"wedge_residual", r.wedge_residual},
                       {"df_norm", r.df_norm},
                       {"df_link", r.df_link}});
    out.residual = std::max(out.residual, r.df_link);
    // closed fundamental form forces the wedge combination to vanish
    if (r.df_norm <= tol) out.residual = std::max(out.residual, r.wedge_residual);
  }
  out.details["points"] = per;
  return out;
}

inline SuiteResult run_cubic_forms(const Scenario&, const Immersion& imm,
                                   const std::vector<Eigen::VectorXd>& pts, double) {
  SuiteResult out;
  Json per = Json::array();
  int applicable = 0;
  for (const auto& u : pts) {
    CubicReport r = cubic_report(imm, u);
    if (!r.applicable) {
      per.push_back(Json{{"applicable", false}});
      continue;
    }
    ++applicable;
    Json row{{"mixed", r.decomposition.mixed_residual},
             {"reconstruction", r.decomposition.reconstruction_residual},
             {"parallelism", r.parallelism}};
    out.residual = std::max({out.residual, r.decomposition.mixed_residual,
                             r.decomposition.reconstruction_residual});
    if (r.line_parallel_applicable) {
      row["line_parallel"] = r.line_parallel;
      out.residual = std::max(out.residual, r.line_parallel);
    }
    per.push_back(row);
  }
  out.not_applicable = applicable == 0;
  out.details["points"] = per;
  return out;
}

}  // namespace suites

inline const std::vector<std::pair<std::string, SuiteRunner>>& suite_registry() {
  static const std::vector<std::pair<std::string, SuiteRunner>> reg = {
      {"classify", suites::run_classify},
      {"fundamental_identity", suites::run_fundamental_identity},
      {"shape_tensor", suites::run_shape_tensor},
      {"weingarten", suites::run_weingarten},
      {"gauss_codazzi_ricci", suites::run_gcr},
      {"ricci_identity", suites::run_ricci},
      {"domega", suites::run_domega},
      {"nijenhuis", suites::run_nijenhuis},
      {"wedge_identity", suites::run_wedge_identity},
      {"cubic_forms", suites::run_cubic_forms},
  };
  return reg;
}

inline const SuiteRunner& find_suite(const std::string& name) {
  for (const auto& [n, fn] : suite_registry())
    if (n == name) return fn;
  throw ScenarioError("unknown suite: " + name);
}

struct Report {
  Json doc;
  bool pass = false;
};

inline Json scenario_echo(const Scenario& sc) {
  Json pts;
  if (!sc.explicit_points.empty()) {
    Json list = Json::array();
    for (const auto& p : sc.explicit_points) {
      Json row = Json::array();
      for (int i = 0; i < p.size(); ++i) row.push_back(p(i));
      list.push_back(row);
    }
    pts = Json{{"list", list}};
  } else {
    pts = Json{{"count", sc.point_count}, {"seed", sc.seed}, {"radius", sc.radius}};
  }
  Json suites_echo = Json::object();
  for (const auto& [name, tol] : sc.suites) suites_echo[name] = tol;
  return Json{{"ambient",
               Json{{"kind", sc.ambient_kind}, {"n", sc.n}, {"eps", sc.eps},
                    {"scale", sc.scale}}},
              {"immersion",
               Json{{"kind", sc.immersion_kind}, {"slots", sc.slots},
                    {"strength", sc.strength}}},
              {"points", pts},
              {"fd_step", sc.fd_step},
              {"suites", suites_echo}};
}

/** Runs every requested suite in declared order. Exit-status semantics are
 *  layered on top by the CLI: pass means every aggregated residual is within
 *  its tolerance. */
inline Report run_scenario(const Scenario& sc, bool with_timestamp = true) {
  for (const auto& [name, tol] : sc.suites) find_suite(name);  // validate early

  Immersion imm = build_immersion(sc);
  std::vector<Eigen::VectorXd> pts = scenario_points(sc, imm);
  validate_immersion(imm, pts);

  Report rep;
  rep.doc = Json::object();
  rep.doc["version"] = kVersion;
  if (with_timestamp) {
    std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    rep.doc["timestamp"] = buf;
  }
  rep.doc["scenario"] = scenario_echo(sc);
  rep.doc["immersion_convention"] = imm.description;
  Json chart_info = Json::object();
  auto num_or_null = [](double v) { return std::isnan(v) ? Json(nullptr) : Json(v); };
  chart_info["declared_nu"] = num_or_null(imm.ambient.declared_nu);
  chart_info["gate_model_deviation"] = num_or_null(imm.ambient.gate_model_deviation);
  chart_info["gate_einstein_residual"] = num_or_null(imm.ambient.gate_einstein_residual);
  chart_info["gate_basis_residual"] = num_or_null(imm.ambient.gate_basis_residual);
  rep.doc["chart"] = chart_info;

  bool all_pass = true;
  Json suites_out = Json::array();
  for (const auto& [name, tol] : sc.suites) {
    SuiteResult res = find_suite(name)(sc, imm, pts, tol);
    bool pass = res.not_applicable || res.residual <= tol;
    all_pass = all_pass && pass;
    Json row{{"name", name},
             {"tolerance", tol},
             {"residual", res.residual},
             {"pass", pass}};
    if (res.not_applicable) row["not_applicable"] = true;
    row["details"] = res.details;
    suites_out.push_back(row);
  }
  rep.doc["suites"] = suites_out;
  rep.doc["pass"] = all_pass;
  rep.pass = all_pass;
  return rep;
}

inline void write_report(const Report& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot open report path for writing: " + path);
  out << rep.doc.dump(2) << "\n";
}

}  // namespace pqk
