#include "wcurv/commands.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "wcurv/assemble.hpp"
#include "wcurv/config.hpp"
#include "wcurv/csv.hpp"
#include "wcurv/linearize.hpp"
#include "wcurv/prescribe.hpp"
#include "wcurv/profile.hpp"
#include "wcurv/random_fields.hpp"
#include "wcurv/report.hpp"
#include "wcurv/warp.hpp"
#include "wcurv/weighted.hpp"

namespace wcurv {

namespace {

using ordered_json = nlohmann::ordered_json;

struct RunContext {
  const CliOptions& opts;
  Config cfg;
  ChartPtr chart;
  std::vector<std::string> dumps;
  int exit_code = kExitOk;
};

double field_min(const ScalarField& f) {
  double v = std::numeric_limits<double>::infinity();
  for_each_valid_node(f.chart(), f.margin(),
                      [&](std::size_t i, const std::array<int, kMaxDim>&) {
                        v = std::min(v, f[i]);
                      });
  return v;
}
double field_max(const ScalarField& f) {
  double v = -std::numeric_limits<double>::infinity();
  for_each_valid_node(f.chart(), f.margin(),
                      [&](std::size_t i, const std::array<int, kMaxDim>&) {
                        v = std::max(v, f[i]);
                      });
  return v;
}
double field_mean(const ScalarField& f) {
  double v = 0.0;
  std::size_t count = 0;
  for_each_valid_node(f.chart(), f.margin(),
                      [&](std::size_t i, const std::array<int, kMaxDim>&) {
                        v += f[i];
                        ++count;
                      });
  return count ? v / count : 0.0;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

// ----- curvature -----

ordered_json run_curvature(RunContext& ctx) {
  MetricMeasureSpace space = build_space(ctx.cfg, ctx.chart);
  SpaceGeometry geo = SpaceGeometry::compute(space);

  ordered_json res;
  res["r_phi"] = {{"sup", sup_abs(geo.r_phi)},
                  {"min", field_min(geo.r_phi)},
                  {"max", field_max(geo.r_phi)},
                  {"mean", field_mean(geo.r_phi)}};
  res["rc_phi_sup"] = sup_abs(geo.rc_phi);
  res["trace_identity_sup"] = sup_abs(trace_identity_defect(geo));

  // the Schouten-type tensor is defined for every m; only the Weyl-type
  // combination degenerates at m + n = 3
  const int n = ctx.chart->dim();
  const double m = space.m;
  Sym2Field p_phi(ctx.chart, geo.rc_phi.margin());
  const double cp = 1.0 / (2.0 * (m + n - 1.0));
  for_each_valid_node(*ctx.chart, p_phi.margin(),
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        for (int i = 0; i < n; ++i)
                          for (int j = i; j < n; ++j)
                            p_phi.at(f, i, j) =
                                geo.rc_phi.at(f, i, j) -
                                cp * geo.r_phi[f] * space.g.at(f, i, j);
                      });
  res["p_phi_sup"] = sup_abs(p_phi);

  const bool have_weyl = std::fabs(m + n - 3.0) >= 1e-12;
  if (have_weyl) {
    WeightedCurvaturePackage pkg = schouten_weyl(geo);
    res["a_phi_sup"] = sup_abs(pkg.a_phi);
    res["characterization_in_range"] = pkg.characterization_in_range;
  } else {
    res["a_phi_sup"] = nullptr;
    res["note"] = "m + n = 3: the weighted Weyl scaling degenerates";
  }

  const std::vector<std::string> wanted =
      split_names(block_get(ctx.cfg, "dump", "fields", ""));
  for (const std::string& name : wanted) {
    const std::string path = ctx.opts.out_dir + "/" + name + ".csv";
    if (name == "r_phi") write_scalar_csv(geo.r_phi, "r_phi", path);
    else if (name == "rc_phi") write_sym2_csv(geo.rc_phi, "rc_phi", path);
    else if (name == "p_phi") write_sym2_csv(p_phi, "p_phi", path);
    else if (name == "g") write_sym2_csv(space.g, "g", path);
    else if (name == "phi") write_scalar_csv(space.phi, "phi", path);
    else
      throw ConfigError("dump.fields", "unknown dump field '" + name + "'");
    ctx.dumps.push_back(name + ".csv");
  }
  return res;
}

// ----- verify -----

struct IdentityRow {
  std::string name;
  std::vector<double> defects;
  double order = 0.0;
  double threshold = 0.0;
  double order_min = 0.0;
  bool exact = false;  // every level at round-off: the order fit is moot
  bool skipped = false;
  std::string skip_reason;
  bool pass = true;
};

ordered_json row_to_json(const IdentityRow& r) {
  ordered_json j;
  j["name"] = r.name;
  if (r.skipped) {
    j["skipped"] = r.skip_reason;
    return j;
  }
  j["defects"] = r.defects;
  j["order"] = r.order;
  if (r.exact) j["exact"] = true;
  j["threshold"] = r.threshold;
  j["order_min"] = r.order_min;
  j["pass"] = r.pass;
  return j;
}

ordered_json run_verify(RunContext& ctx, bool& all_pass) {
  const Config& cfg = ctx.cfg;
  const bool closed = ctx.chart->all_periodic();
  const int levels = std::max(2, ctx.opts.refine);

  std::vector<std::vector<int>> level_sizes;
  std::vector<double> hs;
  for (int l = 0; l < levels; ++l) {
    std::vector<int> sz;
    for (int v : cfg.sizes) {
      // N, 3N/2, 2N, 3N ... : geometric-ish ladder with integer sizes
      const int scaled = l == 0 ? v : v + v * l / 2;
      sz.push_back(scaled);
    }
    level_sizes.push_back(sz);
  }

  // The space under test either comes from the config's field block
  // (verify { space: config }) or from the seeded trig-polynomial
  // generator (the default). Deformations and test functions are always
  // drawn from the generator so the integral identities are exercised on
  // generic data.
  const bool config_space =
      block_get(cfg, "verify", "space", "random") == "config";

  struct LevelData {
    ChartPtr chart;
    MetricMeasureSpace space;
    SpaceGeometry geo;
    Deformation d;
    ScalarField f;
    VecField x_cov;
  };
  std::vector<LevelData> data;
  for (int l = 0; l < levels; ++l) {
    Config lc = cfg;
    lc.sizes = level_sizes[l];
    LevelData ld;
    ld.chart = build_chart(lc, ctx.opts.order_override);
    hs.push_back(ld.chart->spacing(0));
    TrigFieldGenerator gen(ctx.opts.seed, 2, 0.05);
    ld.space = config_space ? build_space(lc, ld.chart)
                            : gen.space(ld.chart, cfg.m);
    if (config_space) {
      // keep the generator stream identical in both modes
      (void)gen.space(ld.chart, cfg.m);
    }
    ld.geo = SpaceGeometry::compute(ld.space);
    ld.d.h = gen.sym2(ld.chart);
    ld.d.psi = gen.scalar(ld.chart);
    ld.f = gen.scalar(ld.chart);
    ld.x_cov = gen.covector(ld.chart);
    data.push_back(std::move(ld));
  }

  std::vector<IdentityRow> rows;
  auto add_row = [&](IdentityRow r) {
    if (!r.skipped) {
      r.order = fit_order(hs, r.defects);
      r.exact = true;
      for (double d : r.defects) r.exact = r.exact && d <= 1e-12;
      r.pass = r.defects.back() <= r.threshold &&
               (r.exact || r.order >= r.order_min);
    }
    rows.push_back(std::move(r));
  };

  {  // integration by parts
    IdentityRow r;
    r.name = "integration_by_parts";
    r.threshold = tolerance_or(cfg, "ibp", 1e-6);
    r.order_min = tolerance_or(cfg, "ibp_order", 2.0);
    if (!closed) {
      r.skipped = true;
      r.skip_reason = "requires a closed chart";
    } else {
      for (const LevelData& ld : data) {
        VecField X = raise(ld.geo.ginv, ld.x_cov);
        VecField df = differential(ld.f);
        ScalarField grad_dot(ld.chart);
        const int n = ld.chart->dim();
        for_each_node(*ld.chart,
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        double v = 0.0;
                        for (int i = 0; i < n; ++i)
                          v += df.at(p, i) * X.at(p, i);
                        grad_dot[p] = v;
                      });
        ScalarField divX = div_phi(ld.geo, lower(ld.space.g, X));
        ScalarField fdiv(ld.chart);
        for_each_node(*ld.chart,
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        fdiv[p] = ld.f[p] * divX[p];
                      });
        r.defects.push_back(std::fabs(integrate_phi(ld.geo, grad_dot) +
                                      integrate_phi(ld.geo, fdiv)));
      }
    }
    add_row(std::move(r));
  }

  {  // weighted bianchi
    IdentityRow r;
    r.name = "weighted_bianchi";
    r.threshold = tolerance_or(cfg, "bianchi", 1e-4);
    r.order_min = tolerance_or(cfg, "bianchi_order", 2.0);
    for (const LevelData& ld : data)
      r.defects.push_back(sup_abs(bianchi_defect(ld.geo)));
    add_row(std::move(r));
  }

  {  // trace identity
    IdentityRow r;
    r.name = "trace_identity";
    r.threshold = tolerance_or(cfg, "trace", 1e-4);
    r.order_min = tolerance_or(cfg, "trace_order", 2.0);
    for (const LevelData& ld : data)
      r.defects.push_back(sup_abs(trace_identity_defect(ld.geo)));
    add_row(std::move(r));
  }

  {  // commutator anchor
    IdentityRow r;
    r.name = "commutator_anchor";
    r.threshold = tolerance_or(cfg, "commutator", 1e-3);
    r.order_min = tolerance_or(cfg, "commutator_order", 2.5);
    for (const LevelData& ld : data)
      r.defects.push_back(commutator_anchor_defect(ld.geo, ld.f));
    add_row(std::move(r));
  }

  {  // three divergence identities
    std::vector<DivergenceIdentityDefects> ds;
    for (const LevelData& ld : data)
      ds.push_back(divergence_identities(ld.geo, ld.f));
    const char* names[3] = {"divergence_identity_lap",
                            "divergence_identity_hess",
                            "divergence_identity_ricci"};
    for (int k = 0; k < 3; ++k) {
      IdentityRow r;
      r.name = names[k];
      r.threshold = tolerance_or(cfg, "divergence", 1e-3);
      r.order_min = tolerance_or(cfg, "divergence_order", 2.0);
      for (const DivergenceIdentityDefects& d : ds)
        r.defects.push_back(sup_abs(k == 0   ? d.lap_term
                                    : k == 1 ? d.hess_term
                                             : d.ricci_term));
      add_row(std::move(r));
    }
  }

  {  // adjointness
    IdentityRow r;
    r.name = "adjointness";
    r.threshold = tolerance_or(cfg, "adjoint", 1e-6);
    r.order_min = tolerance_or(cfg, "adjoint_order", 2.5);
    if (!closed) {
      r.skipped = true;
      r.skip_reason = "requires a closed chart";
    } else {
      for (const LevelData& ld : data)
        r.defects.push_back(adjoint_defect(ld.space, ld.d, ld.f));
    }
    add_row(std::move(r));
  }

  ordered_json lin_fd;
  {  // linearization vs symmetric finite difference (finest level)
    if (!closed) {
      lin_fd["skipped"] = "requires a closed chart";
    } else {
      const LevelData& ld = data.back();
      ScalarField drf = DR(ld.geo, ld.d);
      const double dr_norm = l2_phi_norm(ld.geo, drf);
      auto fd_defect = [&](double t) {
        Sym2Field gp = ld.space.g, gm = ld.space.g;
        ScalarField pp = ld.space.phi, pm = ld.space.phi;
        for (std::size_t i = 0; i < gp.value_count(); ++i) {
          gp.data()[i] += t * ld.d.h.data()[i];
          gm.data()[i] -= t * ld.d.h.data()[i];
        }
        for (std::size_t i = 0; i < pp.value_count(); ++i) {
          pp.data()[i] += t * ld.d.psi.data()[i];
          pm.data()[i] -= t * ld.d.psi.data()[i];
        }
        ScalarField rp = weighted_scalar(
            MetricMeasureSpace(ld.chart, std::move(gp), std::move(pp), cfg.m));
        ScalarField rm = weighted_scalar(
            MetricMeasureSpace(ld.chart, std::move(gm), std::move(pm), cfg.m));
        ScalarField diff(ld.chart);
        for (std::size_t i = 0; i < diff.value_count(); ++i)
          diff[i] = (rp[i] - rm[i]) / (2.0 * t) - drf[i];
        return l2_phi_norm(ld.geo, diff) / dr_norm;
      };
      const double d2 = fd_defect(1e-2);
      const double d3 = fd_defect(1e-3);
      const double slope = std::log10(d2 / d3);
      // the defect bottoms out at the t-independent gap between the
      // formula operator and the exact jacobian of the discrete
      // curvature, which scales like h^p; the default threshold tracks
      // that, and the slope is gated only through linearization_slope
      const double h_fin = ld.chart->spacing(0);
      const double default_threshold =
          std::max(1e-6, 0.5 * std::pow(h_fin, ld.chart->order()));
      const double threshold =
          tolerance_or(cfg, "linearization", default_threshold);
      const double slope_min =
          tolerance_or(cfg, "linearization_slope", -0.1);
      lin_fd["defect_t1e2"] = d2;
      lin_fd["defect_t1e3"] = d3;
      lin_fd["slope"] = slope;
      lin_fd["threshold"] = threshold;
      lin_fd["slope_min"] = slope_min;
      lin_fd["pass"] = d3 <= threshold && slope >= slope_min;
      if (!(d3 <= threshold && slope >= slope_min)) all_pass = false;
    }
  }

  ordered_json res;
  ordered_json jrows = ordered_json::array();
  for (const IdentityRow& r : rows) {
    if (!r.skipped && !r.pass) all_pass = false;
    jrows.push_back(row_to_json(r));
  }
  res["identities"] = jrows;
  res["linearization_fd"] = lin_fd;
  res["levels"] = ordered_json::array();
  for (int l = 0; l < levels; ++l) res["levels"].push_back(level_sizes[l]);
  return res;
}

// ----- static-check -----

ordered_json run_static_check(RunContext& ctx, bool& pass) {
  MetricMeasureSpace space = build_space(ctx.cfg, ctx.chart);
  ScalarField f = build_scalar_field(ctx.cfg, ctx.chart, "f");
  SpaceGeometry geo = SpaceGeometry::compute(space);
  StaticResiduals sr = static_residuals(geo, f);

  const double tol = tolerance_or(ctx.cfg, "static", 1e-6);
  const double sup1 = sup_abs(sr.eq1);
  const double sup2 = sup_abs(sr.eq2);
  pass = sup1 <= tol && sup2 <= tol;

  ordered_json res;
  res["eq1_sup"] = sup1;
  res["eq2_sup"] = sup2;
  res["trace_form_sup"] = sup_abs(sr.trace_form);
  res["hess_form_sup"] = sup_abs(sr.hess_form);
  res["tolerance"] = tol;
  res["weighted_static"] = pass ? "PASS" : "FAIL";
  if (!sr.warning.empty()) res["warning"] = sr.warning;
  res["r_phi"] = {{"min", field_min(geo.r_phi)},
                  {"max", field_max(geo.r_phi)},
                  {"mean", field_mean(geo.r_phi)}};

  if (ctx.chart->dim() >= 2) {
    Sym2Field classical = classical_static_residual(space.g, f);
    const double sup_c = sup_abs(classical);
    res["classical_sup"] = sup_c;
    if (pass && sup_c <= tol)
      res["consistency_scalar_sup"] = sup_abs(static_consistency_scalar(geo));
  }
  return res;
}

// ----- kernel -----

ordered_json run_kernel(RunContext& ctx) {
  MetricMeasureSpace space = build_space(ctx.cfg, ctx.chart);
  const int cap =
      static_cast<int>(block_get_num(ctx.cfg, "kernel", "cap", 4096));
  const double tol = tolerance_or(ctx.cfg, "kernel", 1e-8);
  const int head =
      static_cast<int>(block_get_num(ctx.cfg, "kernel", "head", 12));

  AssembledOperator op = assemble(space, OperatorKind::dr_dr_star, cap);
  GramEigenDecomposition eig = gram_eigendecompose(op);
  KernelResult kr = kernel_detect(op, eig, tol);

  ordered_json res;
  res["kernel_dim"] = kr.dim;
  res["gram_symmetry_defect"] = op.gram_symmetry_defect();
  ordered_json headj = ordered_json::array();
  const std::size_t take =
      std::min<std::size_t>(head, eig.eigenvalues.size());
  for (std::size_t i = 0; i < take; ++i) headj.push_back(eig.eigenvalues[i]);
  res["drdrstar_spectrum_head"] = headj;
  if (kr.dim >= 1 && !kr.basis.empty()) {
    // cosine similarity of the first kernel vector to the constant
    const ScalarField& v = kr.basis.front();
    double dot = 0, nv = 0, nc = 0;
    for (std::size_t i = 0; i < v.value_count(); ++i) {
      dot += v[i];
      nv += v[i] * v[i];
      nc += 1.0;
    }
    res["kernel_constant_cosine"] =
        std::fabs(dot) / std::sqrt(nv * nc);
  }

  SpectralMarginReport margin = static_spectral_margin(
      space, head, cap, tolerance_or(ctx.cfg, "constancy", 1e-6), tol);
  ordered_json mj;
  mj["r_phi_mean"] = margin.r_phi_mean;
  mj["r_phi_variation"] = margin.r_phi_variation;
  mj["r_constant"] = margin.r_constant;
  mj["spectrum_head"] = margin.spectrum_head;
  mj["margin"] = margin.margin;
  mj["lambda_at_min"] = margin.lambda_at_min;
  mj["verdict"] = margin.verdict;
  res["spectral_margin"] = mj;
  return res;
}

// ----- warp-check -----

ordered_json run_warp_check(RunContext& ctx, bool& pass) {
  MetricMeasureSpace space = build_space(ctx.cfg, ctx.chart);
  ordered_json res;
  pass = true;

  const bool want_fiber =
      block_get(ctx.cfg, "warp", "fiber", "on") != "off" &&
      std::fabs(ctx.cfg.m - std::round(ctx.cfg.m)) < 1e-12;
  if (want_fiber) {
    const int fiber_nodes =
        static_cast<int>(block_get_num(ctx.cfg, "warp", "fiber_nodes", 8));
    const int cap =
        static_cast<int>(block_get_num(ctx.cfg, "warp", "dim_cap", 5));
    FiberWarpResult fr = riemannian_fiber_warp(space, fiber_nodes, cap);
    ordered_json fj;
    fj["sup_defect"] = fr.sup_defect;
    fj["fiber_independence"] = fr.fiber_independence;
    const double tol = tolerance_or(ctx.cfg, "warp", 1e-3);
    fj["threshold"] = tol;
    fj["pass"] = fr.sup_defect <= tol;
    if (fr.sup_defect > tol) pass = false;
    res["fiber_warp"] = fj;
  }

  if (config_has_field(ctx.cfg, "f") &&
      block_get(ctx.cfg, "warp", "lorentzian", "on") != "off") {
    ScalarField f = build_scalar_field(ctx.cfg, ctx.chart, "f");
    const int time_nodes =
        static_cast<int>(block_get_num(ctx.cfg, "warp", "time_nodes", 8));
    LorentzianWarpResult lr = lorentzian_static_warp(space, f, time_nodes);
    ordered_json lj;
    lj["fitted_k"] = lr.fitted_k;
    lj["einstein_defect"] = lr.einstein_defect;
    lj["block_base_defect"] = lr.block_base_defect;
    lj["block_mixed_defect"] = lr.block_mixed_defect;
    lj["block_fiber_defect"] = lr.block_fiber_defect;
    lj["time_independence"] = lr.time_independence;
    auto it = ctx.cfg.tolerances.find("einstein");
    if (it != ctx.cfg.tolerances.end()) {
      lj["threshold"] = it->second;
      lj["pass"] = lr.einstein_defect <= it->second;
      if (lr.einstein_defect > it->second) pass = false;
    }
    res["lorentzian_warp"] = lj;
  }
  return res;
}

// ----- prescribe -----

ordered_json run_prescribe(RunContext& ctx, bool& converged) {
  MetricMeasureSpace space = build_space(ctx.cfg, ctx.chart);
  ScalarField target = build_scalar_field(ctx.cfg, ctx.chart, "target");
  // offset mode: the configured field is added to the current curvature
  if (block_get(ctx.cfg, "prescribe", "target_mode", "absolute") == "offset") {
    ScalarField r0 = weighted_scalar(space);
    for (std::size_t i = 0; i < target.value_count(); ++i) target[i] += r0[i];
  }

  NewtonOptions nopts;
  nopts.tol = block_get_num(ctx.cfg, "prescribe", "tol", 1e-6);
  nopts.max_iter =
      static_cast<int>(block_get_num(ctx.cfg, "prescribe", "max_iter", 10));
  nopts.cap =
      static_cast<int>(block_get_num(ctx.cfg, "prescribe", "cap", 4096));
  nopts.kernel_tol = tolerance_or(ctx.cfg, "kernel", 1e-8);

  const std::string mode = block_get(ctx.cfg, "prescribe", "mode", "newton");
  PrescribeResult pr;
  if (mode == "scaling") {
    const std::vector<double> grid = block_get_list(
        ctx.cfg, "prescribe", "c_grid", {1, 2, 5, 10, 20, 50, 100});
    pr = prescribe_with_scaling(space, target, grid, nopts);
  } else if (mode == "newton") {
    pr = newton_prescribe(space, target, nopts);
  } else {
    throw ConfigError("prescribe.mode", "must be 'newton' or 'scaling'");
  }
  converged = pr.converged;

  ordered_json res;
  res["converged"] = pr.converged;
  res["iterations"] = pr.iterations;
  res["residual_l2"] = pr.residual_l2;
  res["halvings"] = pr.halvings;
  res["applied_c"] = pr.applied_c;
  res["minmax_hypothesis"] = pr.minmax_hypothesis;
  if (!pr.message.empty()) res["message"] = pr.message;
  res["residual_trace"] = pr.residual_trace;
  if (!pr.attempts.empty()) {
    ordered_json att = ordered_json::array();
    for (const ScalingAttempt& a : pr.attempts) {
      ordered_json aj;
      aj["c"] = a.c;
      aj["converged"] = a.converged;
      aj["iterations"] = a.iterations;
      aj["final_residual"] = a.final_residual;
      aj["residual_trace"] = a.residual_trace;
      att.push_back(aj);
    }
    res["attempts"] = att;
  }

  const std::vector<std::string> wanted =
      split_names(block_get(ctx.cfg, "dump", "fields", ""));
  for (const std::string& name : wanted) {
    const std::string path = ctx.opts.out_dir + "/" + name + ".csv";
    if (name == "u") write_scalar_csv(pr.u, "u", path);
    else if (name == "residual") write_scalar_csv(pr.residual, "residual", path);
    else if (name == "phi") write_scalar_csv(pr.space.phi, "phi", path);
    else if (name == "g") write_sym2_csv(pr.space.g, "g", path);
    else
      throw ConfigError("dump.fields", "unknown dump field '" + name + "'");
    ctx.dumps.push_back(name + ".csv");
  }
  return res;
}

// ----- ode -----

ordered_json run_ode(RunContext& ctx) {
  ordered_json res;

  // residual check when a 1-d chart with f, phi is configured
  if (ctx.cfg.n == 1 && config_has_field(ctx.cfg, "f") &&
      config_has_field(ctx.cfg, "phi")) {
    ScalarField f = build_scalar_field(ctx.cfg, ctx.chart, "f");
    ScalarField phi = build_scalar_field(ctx.cfg, ctx.chart, "phi");
    ProfileResiduals pr = profile_ode_residuals(f, phi, ctx.cfg.m);
    res["res1_sup"] = sup_abs(pr.res1);
    res["res2_sup"] = sup_abs(pr.res2);
  }

  if (ctx.cfg.blocks.count("ode")) {
    ProfileState init;
    init.x = block_get_num(ctx.cfg, "ode", "x0", 0.0);
    init.f = block_get_num(ctx.cfg, "ode", "f0", 1.0);
    init.fp = block_get_num(ctx.cfg, "ode", "fp0", 0.0);
    init.phi = block_get_num(ctx.cfg, "ode", "phi0", 0.0);
    init.phip = block_get_num(ctx.cfg, "ode", "phip0", 0.0);
    const double x_end = block_get_num(ctx.cfg, "ode", "x_end", 1.0);
    const double step = block_get_num(ctx.cfg, "ode", "step", 1e-3);
    const double floor = block_get_num(ctx.cfg, "ode", "f_floor", 1e-6);
    Trajectory traj = integrate_profile(init, ctx.cfg.m, x_end, step, floor);

    ordered_json tj;
    tj["steps"] = traj.states.size();
    const ProfileState& last = traj.states.back();
    tj["final"] = {{"x", last.x},
                   {"f", last.f},
                   {"f_prime", last.fp},
                   {"phi", last.phi},
                   {"phi_prime", last.phip}};
    tj["stop"] = traj.stop == Trajectory::Stop::completed ? "completed"
                 : traj.stop == Trajectory::Stop::f_floor ? "f_floor"
                                                          : "nonfinite";
    if (!traj.message.empty()) tj["message"] = traj.message;
    res["trajectory"] = tj;

    const std::string csv = block_get(ctx.cfg, "ode", "csv", "trajectory.csv");
    write_trajectory_csv(traj, ctx.opts.out_dir + "/" + csv);
    ctx.dumps.push_back(csv);
  }
  return res;
}

}  // namespace

int run_command(const CliOptions& opts) {
  ordered_json report;
  report["command"] = opts.subcommand;
  report["version"] = 1;
  report["seed"] = opts.seed;
  int exit_code = kExitOk;

  try {
    RunContext ctx{opts, load_config(opts.config_path), nullptr, {}, 0};
    report["config_echo"] = ctx.cfg.source_text;
    // the ode subcommand may run without a chart block
    const bool needs_chart = !(opts.subcommand == "ode" && ctx.cfg.n == 0);
    if (needs_chart) {
      ctx.chart = build_chart(ctx.cfg, opts.order_override);
      report["order"] = ctx.chart->order();
    }

    bool pass = true;
    ordered_json results;
    if (opts.subcommand == "curvature") {
      results = run_curvature(ctx);
    } else if (opts.subcommand == "verify") {
      results = run_verify(ctx, pass);
    } else if (opts.subcommand == "static-check") {
      results = run_static_check(ctx, pass);
    } else if (opts.subcommand == "kernel") {
      results = run_kernel(ctx);
    } else if (opts.subcommand == "warp-check") {
      results = run_warp_check(ctx, pass);
    } else if (opts.subcommand == "prescribe") {
      bool converged = false;
      results = run_prescribe(ctx, converged);
      if (!converged) exit_code = kExitNoConvergence;
    } else if (opts.subcommand == "ode") {
      results = run_ode(ctx);
    } else {
      std::fprintf(stderr, "unknown subcommand '%s'\n",
                   opts.subcommand.c_str());
      return kExitConfigError;
    }
    if (!pass && exit_code == kExitOk) exit_code = kExitVerifyFail;
    report["results"] = results;
    report["dumps"] = ctx.dumps;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    report["error"] = e.what();
    exit_code = kExitConfigError;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    report["error"] = e.what();
    exit_code = kExitNoConvergence;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    report["error"] = e.what();
    exit_code = kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    report["error"] = e.what();
    exit_code = kExitInternal;
  }

  report["exit_status"] = exit_code;
  try {
    write_text_atomic(opts.out_dir + "/report.json", report.dump(2) + "\n");
  } catch (const Error& e) {
    std::fprintf(stderr, "cannot write report: %s\n", e.what());
    if (exit_code == kExitOk) exit_code = kExitInternal;
  }
  return exit_code;
}

}  // namespace wcurv
