#include "lightlike/driver.hpp"

#include <cmath>

#include "lightlike/classify.hpp"

namespace lightlike::driver {

namespace sm = lightlike::subm;
namespace cl = lightlike::classify;
namespace amb = lightlike::ambient;
using report::Json;

namespace {

Json check_json(const amb::CheckReport& rep) {
  Json out = Json::array();
  for (const auto& it : rep.items)
    out.push_back({{"name", it.name}, {"residual", it.residual}, {"pass", it.pass}});
  return out;
}

Json vec_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

// Everything computed at one sample point.
struct PointAnalysis {
  sm::FramePoint fp;
  sm::GaussWeingarten gw;
  cl::QgcrCertificate cert;
  cl::XiDecomposition xi;
  cl::AscreenReport ascreen;
  cl::CoscreenReport coscreen;
  cl::IrrotationalReport irrot;
  cl::MinimalReport minimal;
  cl::DistributionReport dD, dB;
  bool dists_run = false;
  double lemma_eta = 0.0;
  double metric_defect_agree = 0.0;  // |lhs - rhs| of the (nabla g) identity
  double metric_defect_lhs = 0.0;    // |lhs|: zero iff nabla is metric
  sm::RelationsReport relations;
};

PointAnalysis analyze_point(const sm::Immersion& imm, const amb::AmbientStructure& space,
                            const Eigen::VectorXd& w, const Tolerances& tol) {
  PointAnalysis a{sm::split_bundles(imm, space, w, tol), {}, {}, {}, {},
                  {}, {}, {}, {}, {}, false, 0, 0, 0, {}};
  a.gw = sm::gauss_weingarten(a.fp);
  a.cert = cl::classify_qgcr(a.fp, tol.classify);
  a.xi = cl::decompose_xi(a.fp);
  a.ascreen = cl::check_ascreen(a.fp, a.cert, a.xi, tol.classify);
  a.coscreen = cl::check_coscreen(a.fp, a.cert, a.xi, a.gw, tol.classify);
  a.irrot = cl::check_irrotational(a.gw, tol.classify);
  a.minimal = cl::check_minimal(a.fp, a.gw, tol.classify);
  if (a.cert.qgcr) {
    a.dD = cl::check_distribution(a.fp, a.gw, a.cert, cl::Dist::D, space.mu, tol.classify);
    a.dB = cl::check_distribution(a.fp, a.gw, a.cert, cl::Dist::Dbar, space.mu,
                                  tol.classify);
    a.dists_run = true;
  }
  a.lemma_eta = cl::lemma_eta_symmetry(a.fp, a.gw);
  a.relations = sm::shape_operator_relations_check(a.fp, a.gw);
  for (Eigen::Index A = 0; A < a.fp.mt; ++A)
    for (Eigen::Index B = 0; B < a.fp.mt; ++B)
      for (Eigen::Index C = 0; C < a.fp.mt; ++C) {
        auto md = sm::metric_connection_defect(a.fp, a.gw, A, B, C);
        a.metric_defect_agree = std::max(a.metric_defect_agree, std::abs(md.lhs - md.rhs));
        a.metric_defect_lhs = std::max(a.metric_defect_lhs, std::abs(md.lhs));
      }
  return a;
}

double hl_max(const sm::GaussWeingarten& gw) {
  double m = 0.0;
  for (const auto& h : gw.h_l) m = std::max(m, h.lpNorm<Eigen::Infinity>());
  return m;
}

// Expectation tolerances, pinned from the acceptance criteria.
double expr_tolerance(const std::string& key, double expected) {
  if (key == "hs_w") return 1e-8;
  return std::max(1e-10, 1e-9 * std::abs(expected));
}

double zero_tolerance(const std::string& key) {
  if (key == "lemma_eta_max") return 1e-7;
  return 1e-8;
}

}  // namespace

report::Report check_structure(const scenario::Scenario& sc, int samples, long seed) {
  amb::AmbientStructure space = scenario::build_ambient(sc);
  const int n = samples > 0 ? samples : 100;
  const unsigned sd = seed >= 0 ? unsigned(seed) : (sc.seed ? sc.seed : 7u);
  report::Report rep;
  rep.data["schema"] = "lightlike-report/1";
  rep.data["scenario"] = sc.name;
  auto adm = amb::check_structure(space, n, sd, sc.tol.structure);
  auto nms = amb::check_nearly_mu_sasakian(space, n, sd + 1, 100 * sc.tol.structure);
  auto ht = amb::check_h_tensor(space, n, sd + 2, 10 * sc.tol.structure);
  rep.data["ambient"] = {{"name", space.name},
                         {"dim", int(space.dim)},
                         {"mu", space.mu},
                         {"admission", check_json(adm)},
                         {"nearly_mu_sasakian", check_json(nms)},
                         {"h_tensor", check_json(ht)},
                         {"pass", adm.pass && nms.pass && ht.pass}};
  rep.exit_code = (adm.pass && nms.pass && ht.pass) ? exit_ok : exit_verdict_failure;
  rep.data["exit_code"] = rep.exit_code;
  return rep;
}

report::Report analyze(const scenario::Scenario& sc, const Options& opt) {
  Tolerances tol = sc.tol;
  if (opt.tol > 0) tol.classify = opt.tol;

  amb::AmbientStructure space = scenario::build_ambient(sc);

  report::Report rep;
  Json& d = rep.data;
  d["schema"] = "lightlike-report/1";
  d["scenario"] = sc.name;

  // Ambient admission gate.
  const unsigned sd = sc.seed ? sc.seed : 7u;
  auto adm = amb::check_structure(space, 20, sd, tol.structure);
  auto nms = amb::check_nearly_mu_sasakian(space, 15, sd + 1, 100 * tol.structure);
  auto ht = amb::check_h_tensor(space, 10, sd + 2, 10 * tol.structure);
  const bool ambient_ok = adm.pass && nms.pass && ht.pass;
  d["ambient"] = {{"name", space.name},
                  {"dim", int(space.dim)},
                  {"mu", space.mu},
                  {"admission", check_json(adm)},
                  {"nearly_mu_sasakian", check_json(nms)},
                  {"h_tensor", check_json(ht)},
                  {"pass", ambient_ok}};
  if (!sc.has_immersion) {
    rep.exit_code = ambient_ok ? exit_ok : exit_verdict_failure;
    d["exit_code"] = rep.exit_code;
    return rep;
  }

  sm::Immersion imm = scenario::build_immersion(sc, space);
  auto points = scenario::sample_points(sc, opt.samples, opt.seed);

  std::vector<PointAnalysis> pa;
  pa.reserve(points.size());
  for (const auto& w : points) pa.push_back(analyze_point(imm, space, w, tol));

  // The radical rank must be constant over the sampled points.
  for (const auto& a : pa)
    if (a.fp.r != pa.front().fp.r)
      throw RankError("radical rank is not constant across sample points (" +
                      std::to_string(pa.front().fp.r) + " vs " +
                      std::to_string(a.fp.r) + ")");

  // Per-point detail.
  Json jpoints = Json::array();
  for (const auto& a : pa) {
    Json jp;
    jp["params"] = vec_json(a.fp.w);
    jp["radical_rank"] = int(a.fp.r);
    jp["ortho_residual"] = a.fp.ortho_residual;
    jp["tangency_residual"] = a.fp.tangency_residual;
    jp["gw"] = {{"reconstruction", a.gw.recon_residual},
                {"tangency", a.gw.tangent_residual},
                {"h_symmetry", a.gw.h_sym_residual},
                {"shape_relations", a.relations.max()},
                {"metric_defect_agreement", a.metric_defect_agree},
                {"metric_defect", a.metric_defect_lhs}};
    jp["classify"] = {{"qgcr", a.cert.qgcr},
                      {"proper", a.cert.proper},
                      {"failure", a.cert.failure},
                      {"residual", a.cert.residual},
                      {"dim_phiL_phiD2", a.cert.dim_phiL_phiD2},
                      {"ascreen", a.ascreen.ascreen},
                      {"coscreen", a.coscreen.coscreen},
                      {"gcr_note", a.coscreen.gcr_note},
                      {"irrotational", a.irrot.irrotational},
                      {"minimal", a.minimal.minimal},
                      {"totally_geodesic", a.minimal.totally_geodesic},
                      {"trace_agree", a.minimal.trace_agree}};
    Json js = Json::array();
    for (const auto& s : a.ascreen.sigmas)
      js.push_back(
          {{"u", s.u}, {"value", s.sigma}, {"residual", s.residual},
           {"nonnull_product", s.nonnull_product}});
    jp["sigma"] = js;
    jp["xi"] = {{"a", vec_json(a.xi.a)},
                {"b", vec_json(a.xi.b)},
                {"c", vec_json(a.xi.c)},
                {"xi_s_norm", a.xi.xi_s_norm}};
    jp["trace_l"] = vec_json(a.minimal.trace_l);
    jp["trace_s"] = vec_json(a.minimal.trace_s);
    jp["trace_AW"] = vec_json(a.minimal.trace_AW);
    if (a.dists_run) {
      auto dist_json = [](const cl::DistributionReport& r) {
        return Json{{"integrable_direct", r.integrable_direct},
                    {"integrable_criterion", r.integrable_criterion},
                    {"agree", r.agree},
                    {"direct_residual", r.direct_residual},
                    {"criterion_residual", r.criterion_residual},
                    {"nearly_parallel", r.nearly_parallel},
                    {"nearly_auto_parallel", r.nearly_auto_parallel},
                    {"consequent_checked", r.consequent_checked},
                    {"consequent_np", r.consequent_np},
                    {"consequent_nap", r.consequent_nap}};
      };
      jp["distributions"] = {{"D", dist_json(a.dD)}, {"Dbar", dist_json(a.dB)}};
    }
    jp["lemma_eta"] = a.lemma_eta;
    jpoints.push_back(std::move(jp));
  }
  d["points"] = jpoints;
  d["points_analyzed"] = int(pa.size());
  d["radical_rank"] = int(pa.front().fp.r);
  d["sigma"] = jpoints.front()["sigma"];

  // Verdicts are conjunctions over the sampled points.
  auto all_of = [&](auto&& f) {
    for (const auto& a : pa)
      if (!f(a)) return false;
    return true;
  };
  const bool v_qgcr = all_of([](const PointAnalysis& a) { return a.cert.qgcr; });
  Json verdicts;
  verdicts["qgcr"] = v_qgcr;
  verdicts["proper"] = all_of([](const PointAnalysis& a) { return a.cert.proper; });
  verdicts["ascreen"] = all_of([](const PointAnalysis& a) { return a.ascreen.ascreen; });
  verdicts["coscreen"] =
      all_of([](const PointAnalysis& a) { return a.coscreen.coscreen; });
  verdicts["gcr_note"] =
      all_of([](const PointAnalysis& a) { return a.coscreen.gcr_note; });
  verdicts["irrotational"] =
      all_of([](const PointAnalysis& a) { return a.irrot.irrotational; });
  verdicts["minimal"] = all_of([](const PointAnalysis& a) { return a.minimal.minimal; });
  verdicts["totally_geodesic"] =
      all_of([](const PointAnalysis& a) { return a.minimal.totally_geodesic; });
  verdicts["metric_connection"] = all_of(
      [&](const PointAnalysis& a) { return a.metric_defect_lhs < tol.classify; });
  verdicts["trace_agree"] =
      all_of([](const PointAnalysis& a) { return a.minimal.trace_agree; });
  if (pa.front().dists_run) {
    verdicts["integrable_D"] =
        all_of([](const PointAnalysis& a) { return a.dD.integrable_direct; });
    verdicts["integrable_Dbar"] =
        all_of([](const PointAnalysis& a) { return a.dB.integrable_direct; });
    verdicts["integrability_agree"] =
        all_of([](const PointAnalysis& a) { return a.dD.agree && a.dB.agree; });
    verdicts["nearly_parallel_D"] =
        all_of([](const PointAnalysis& a) { return a.dD.nearly_parallel; });
    verdicts["nearly_auto_parallel_D"] =
        all_of([](const PointAnalysis& a) { return a.dD.nearly_auto_parallel; });
    verdicts["nearly_parallel_Dbar"] =
        all_of([](const PointAnalysis& a) { return a.dB.nearly_parallel; });
    verdicts["nearly_auto_parallel_Dbar"] =
        all_of([](const PointAnalysis& a) { return a.dB.nearly_auto_parallel; });
  }
  d["verdicts"] = verdicts;

  // Aggregate residuals.
  auto max_over = [&](auto&& f) {
    double m = 0.0;
    for (const auto& a : pa) m = std::max(m, f(a));
    return m;
  };
  Json residuals;
  residuals["frame_orthogonality"] =
      max_over([](const PointAnalysis& a) { return a.fp.ortho_residual; });
  residuals["tangency"] =
      max_over([](const PointAnalysis& a) { return a.fp.tangency_residual; });
  residuals["gw_reconstruction"] =
      max_over([](const PointAnalysis& a) { return a.gw.recon_residual; });
  residuals["h_symmetry"] =
      max_over([](const PointAnalysis& a) { return a.gw.h_sym_residual; });
  residuals["shape_relations"] =
      max_over([](const PointAnalysis& a) { return a.relations.max(); });
  residuals["metric_defect_agreement"] =
      max_over([](const PointAnalysis& a) { return a.metric_defect_agree; });
  residuals["metric_defect"] =
      max_over([](const PointAnalysis& a) { return a.metric_defect_lhs; });
  residuals["lemma_eta"] = max_over([](const PointAnalysis& a) { return a.lemma_eta; });
  residuals["hl_max"] = max_over([](const PointAnalysis& a) { return hl_max(a.gw); });
  residuals["qgcr"] = max_over([](const PointAnalysis& a) { return a.cert.residual; });
  d["residuals"] = residuals;

  // Expectation table.
  bool expect_ok = true;
  Json jexp = Json::array();
  for (const auto& e : sc.expects) {
    Json row;
    row["name"] = e.display;
    bool pass = true;
    switch (e.kind) {
      case scenario::Expectation::Kind::integer: {
        long got = 0;
        if (e.key == "rank") got = pa.front().fp.r;
        else got = pa.front().cert.dim_phiL_phiD2;
        if (e.key == "dim_phiL_phiD2")
          for (const auto& a : pa)
            if (a.cert.dim_phiL_phiD2 != int(got)) pass = false;
        row["expected"] = e.ivalue;
        row["computed"] = got;
        pass = pass && got == e.ivalue;
        break;
      }
      case scenario::Expectation::Kind::boolean: {
        if (!verdicts.contains(e.key))
          throw ScenarioError("expectation '" + e.key +
                              "' is unavailable (no QGCR certificate?)");
        const bool got = verdicts[e.key].get<bool>();
        row["expected"] = e.bvalue;
        row["computed"] = got;
        pass = got == e.bvalue;
        break;
      }
      case scenario::Expectation::Kind::indices: {
        std::vector<int> got;
        bool stable = true;
        for (std::size_t pi = 0; pi < pa.size(); ++pi) {
          const auto& c = pa[pi].cert;
          std::vector<int> here;
          if (e.key == "d1") here = c.d1_idx;
          else if (e.key == "d2") here = c.d2_idx;
          else if (e.key == "d0") here = c.d0_idx;
          else if (e.key == "l") here = c.l_idx;
          else here = c.s_idx;
          if (pi == 0) got = here;
          else if (here != got) stable = false;
        }
        row["expected"] = e.indices;
        row["computed"] = got;
        pass = stable && got == e.indices;
        break;
      }
      case scenario::Expectation::Kind::expr: {
        // Evaluated per point in the combined parameter/coordinate scope.
        std::vector<std::string> combined = sc.params;
        combined.insert(combined.end(), space.coords.begin(), space.coords.end());
        ScalarExpr ex = parse_scalar(e.expr, combined);
        double worst = 0.0, shown_expected = 0.0, shown_computed = 0.0;
        for (const auto& a : pa) {
          std::vector<double> env(a.fp.w.data(), a.fp.w.data() + a.fp.w.size());
          env.insert(env.end(), a.fp.x.data(), a.fp.x.data() + a.fp.x.size());
          const double expected = eval_value(ex, env);
          double got = 0.0;
          bool available = true;
          if (e.key == "sigma") {
            available = false;
            for (const auto& s : a.ascreen.sigmas)
              if (s.u == e.args.at(0)) { got = s.sigma; available = true; }
          } else if (e.key == "xi_a") {
            got = a.xi.a[e.args.at(0) - 1];
          } else if (e.key == "xi_b") {
            got = a.xi.b[e.args.at(0) - 1];
          } else if (e.key == "xi_c") {
            got = a.xi.c[e.args.at(0) - 1];
          } else if (e.key == "g_xi_xi") {
            got = a.fp.pair(a.fp.ctx.xi, a.fp.ctx.xi);
          } else if (e.key == "hs_w") {
            const Eigen::Index aa = e.args.at(0) - 1, bb = e.args.at(1) - 1,
                               al = e.args.at(2) - 1;
            got = a.gw.h_s[std::size_t(al)](a.fp.r + aa, a.fp.r + bb);
          }
          if (!available) {
            pass = false;
            row["computed"] = "missing";
            break;
          }
          const double diff = std::abs(got - expected);
          if (diff >= worst) {
            worst = diff;
            shown_expected = expected;
            shown_computed = got;
          }
          if (diff > expr_tolerance(e.key, expected)) pass = false;
        }
        if (!row.contains("computed")) {
          row["expected"] = shown_expected;
          row["computed"] = shown_computed;
          row["diff"] = worst;
        } else {
          row["expected"] = e.expr;
        }
        break;
      }
      case scenario::Expectation::Kind::zero: {
        double got = 0.0;
        if (e.key == "hl_max")
          got = max_over([](const PointAnalysis& a) { return hl_max(a.gw); });
        else if (e.key == "trace_max")
          got = max_over([](const PointAnalysis& a) {
            double m = a.minimal.trace_l.size()
                           ? a.minimal.trace_l.lpNorm<Eigen::Infinity>()
                           : 0.0;
            if (a.minimal.trace_s.size())
              m = std::max(m, a.minimal.trace_s.lpNorm<Eigen::Infinity>());
            return m;
          });
        else if (e.key == "lemma_eta_max")
          got = max_over([](const PointAnalysis& a) { return a.lemma_eta; });
        else if (e.key == "trace_AW_max")
          got = max_over([](const PointAnalysis& a) {
            return a.minimal.trace_AW.size()
                       ? a.minimal.trace_AW.lpNorm<Eigen::Infinity>()
                       : 0.0;
          });
        else if (e.key == "hs_rad_max")
          got = max_over([](const PointAnalysis& a) { return a.minimal.hs_rad_residual; });
        row["expected"] = 0;
        row["computed"] = got;
        row["diff"] = got;
        pass = got < zero_tolerance(e.key);
        break;
      }
    }
    row["pass"] = pass;
    expect_ok = expect_ok && pass;
    jexp.push_back(std::move(row));
  }
  d["expectations"] = jexp;

  rep.exit_code = (ambient_ok && expect_ok) ? exit_ok : exit_verdict_failure;
  d["exit_code"] = rep.exit_code;
  return rep;
}

}  // namespace lightlike::driver
