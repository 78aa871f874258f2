// SPDX-License-Identifier: Apache-2.0
#include "toralrig/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>

#include "toralrig/cocycle.hpp"
#include "toralrig/error.hpp"
#include "toralrig/extension.hpp"
#include "toralrig/holonomy.hpp"
#include "toralrig/lattice_action.hpp"
#include "toralrig/weyl.hpp"

namespace toralrig {
namespace {

using nlohmann::json;

json vec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json vec(const Eigen::VectorXi& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json mat(const IntMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json error_json(const std::string& stage, const Error& e) {
  return {{"stage", stage}, {"kind", error_kind_name(e.kind())}, {"message", e.what()}, {"payload", e.payload()}};
}

json grid_json(GridSpec g) { return {{"base", g.base}, {"fiber", g.fiber}}; }

json predicates_json(const PredicateFlags& p) {
  return {{"maximal", p.maximal}, {"cartan", p.cartan}, {"tns", p.tns}, {"full", p.full},
          {"resonance_free", p.resonance_free}};
}

json certificate_json(const BunchingCertificate& c) {
  return {{"element", vec(c.a)},
          {"k", c.k},
          {"r", number(c.r)},
          {"margin", c.margin},
          {"sup_first", c.sup_first},
          {"sup_second", c.sup_second},
          {"unstable_inverse_norm", c.unstable_inverse_norm},
          {"sup_derivative", c.sup_derivative},
          {"sup_inverse_derivative", c.sup_inverse_derivative},
          {"method", c.method},
          {"grid", grid_json(c.grid)}};
}

// State shared by the stages of one run.
struct Context {
  const RunConfig& cfg;
  json report;
  std::optional<GeneratorSet> gens;
  LyapunovSpectrum spectrum;
  WeylChamberDecomposition dec;
  std::optional<CircleCocycle> beta;
  int exit_code = kExitOk;

  std::uint64_t seed(std::uint64_t stage) const { return cfg.seed * 1000003ULL + stage; }

  void fail(const std::string& stage, const Error& e) {
    report["error"] = error_json(stage, e);
    exit_code = e.kind() == ErrorKind::StageRefused ? kExitRefused : kExitFailed;
  }
};

void analyze_stage(Context& ctx, std::string& svg) {
  const RunConfig& cfg = ctx.cfg;
  const Tolerances& tol = cfg.tolerances;
  ctx.gens.emplace(cfg.generators);
  const GeneratorSet& gens = *ctx.gens;
  json action = {{"dimension", gens.dimension()}, {"rank", gens.rank()}, {"generators", json::array()}};
  for (const auto& g : gens.generators()) action["generators"].push_back(mat(g));
  ctx.report["action"] = action;
  ActionReport ar = validate_action(gens, tol.witness_bound);
  action["commuting"] = ar.commuting;
  action["unimodular"] = ar.unimodular;
  action["anosov_witnesses"] = json::array();
  for (const auto& w : ar.anosov_witnesses) action["anosov_witnesses"].push_back(vec(w));
  ctx.report["action"] = action;
  ctx.spectrum = std::move(ar.spectrum);
  const GrowthConstants gc = growth_constants(ctx.spectrum, gens, tol.sample_bound, ctx.seed(1));
  json spaces = json::array();
  for (int i = 0; i < ctx.spectrum.size(); ++i) {
    const LyapunovSpace& s = ctx.spectrum.spaces[i];
    spaces.push_back({{"index", i}, {"functional", vec(s.functional)}, {"dimension", s.dim()},
                      {"condition", s.condition}});
  }
  ctx.report["spectrum"] = {
      {"functionals", spaces},
      {"weighted_sum", vec(ctx.spectrum.weighted_sum())},
      {"growth", {{"C", gc.C}, {"L", gc.L}, {"samples", gc.samples}, {"worst_lower", gc.worst_lower},
                  {"worst_upper", gc.worst_upper}}}};
  ctx.dec = chambers(ctx.spectrum, tol.search_bound);
  json hyperplanes = json::array();
  for (const auto& h : ctx.dec.hyperplanes)
    hyperplanes.push_back({{"normal", vec(h.normal)}, {"functionals", h.functionals}});
  json classes = json::array();
  for (const auto& c : ctx.dec.classes)
    classes.push_back({{"members", c.members}, {"direction", vec(c.direction)}, {"dimension", c.dimension}});
  json chambers_json = json::array();
  for (std::size_t c = 0; c < ctx.dec.chambers.size(); ++c) {
    const Chamber& ch = ctx.dec.chambers[c];
    chambers_json.push_back({{"index", c},
                             {"signs", ch.signs},
                             {"functional_signs", ctx.dec.functional_signs(ch)},
                             {"representative", ch.representative ? vec(*ch.representative) : json(nullptr)}});
  }
  ctx.report["weyl"] = {{"hyperplanes", hyperplanes},
                        {"coarse_classes", classes},
                        {"chambers", chambers_json},
                        {"chamber_count", ctx.dec.chambers.size()},
                        {"max_chamber_count", max_chamber_count(static_cast<int>(ctx.dec.hyperplanes.size()),
                                                                gens.rank())},
                        {"search_bound", ctx.dec.search_bound}};
  ctx.report["predicates"] = predicates_json(ctx.dec.predicates);
  if (gens.rank() == 2) svg = chamber_svg(ctx.dec);
}

LatticePoint target_element(const Context& ctx) {
  if (ctx.cfg.element) return *ctx.cfg.element;
  for (const auto& ch : ctx.dec.chambers)
    if (ch.representative) return *ch.representative;
  throw Error(ErrorKind::RepresentativeNotFound, "no chamber representative to certify");
}

// Returns true when every certification check passed.
bool certify_stage(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const Tolerances& tol = cfg.tolerances;
  ctx.beta.emplace(build_cocycle(cfg, *ctx.gens));
  const CircleCocycle& beta = *ctx.beta;
  const GridSpec grid = cfg.grids.certify;
  json out;
  out["compatibility_defect"] = beta.compatibility_defect();
  out["constant"] = beta.constant();
  json bounds = json::array();
  for (int j = 0; j < ctx.gens->rank(); ++j) {
    LatticePoint e = LatticePoint::Zero(ctx.gens->rank());
    e(j) = 1;
    const DerivativeBounds db = derivative_bounds(beta, e, grid);
    bounds.push_back({{"generator", j},
                      {"sup_derivative", db.sup_derivative},
                      {"sup_inverse_derivative", db.sup_inverse_derivative},
                      {"grid_sup_derivative", db.grid_sup_derivative},
                      {"grid_sup_inverse_derivative", db.grid_sup_inverse_derivative},
                      {"margin", db.margin}});
  }
  out["derivative_bounds"] = bounds;

  const PHProbe probe = ph_probe(beta, ctx.spectrum, ctx.dec, grid, tol.k_max);
  json chambers_json = json::array();
  for (const auto& c : probe.chambers) {
    json entry = {{"chamber", c.chamber}, {"representative", vec(c.representative)},
                  {"certified", c.certificate.has_value()}};
    if (c.certificate) entry["certificate"] = certificate_json(*c.certificate);
    else entry["failure"] = c.failure;
    chambers_json.push_back(entry);
  }
  out["ph_probe"] = {{"chambers", chambers_json}, {"all_certified", probe.all_certified}};
  bool ok = probe.all_certified;

  const LatticePoint a = target_element(ctx);
  try {
    out["bunching"] = certificate_json(bunching_check(beta, ctx.spectrum, a, cfg.bunching_r, tol.k_max, grid));
  } catch (const Error& e) {
    out["bunching"] = {{"element", vec(a)}, {"r", number(cfg.bunching_r)}, {"error", error_json("certify", e)}};
    ok = false;
  }
  try {
    const BunchingCertificate base = bunching_check(beta, ctx.spectrum, a, 0.0, tol.k_max, grid);
    const PHRobustnessCertificate rc = ph_robustness(beta, ctx.spectrum, a, base, tol.ph_samples, tol.norm_cap,
                                                     tol.safety, ctx.seed(2), grid, tol.k_max);
    json samples = json::array();
    for (const auto& s : rc.samples)
      samples.push_back({{"b", vec(s.b)}, {"forced", s.forced}, {"k", s.k}, {"margin", s.margin}});
    out["robustness"] = {{"element", vec(rc.a)}, {"k0", rc.k0},         {"lambda", rc.lambda},
                         {"D1", rc.D1},          {"D2", rc.D2},         {"epsilon", rc.epsilon},
                         {"safety", rc.safety},  {"cutoff_N", rc.cutoff_N}, {"n0", rc.n0},
                         {"chi0", rc.chi0},      {"C0", rc.C0},         {"C1", rc.C1},
                         {"samples", samples},   {"passed", rc.samples.size()}};
  } catch (const Error& e) {
    out["robustness"] = {{"element", vec(a)}, {"error", error_json("certify", e)}};
    ok = false;
  }
  const FixedPointReport fp = fixed_point_trivial_check(beta);
  json gens_json = json::array();
  for (const auto& g : fp.generators)
    gens_json.push_back({{"generator", g.generator},
                         {"regular", g.regular},
                         {"fixed_points", g.fixed_points},
                         {"witness", g.witness ? vec(*g.witness) : json(nullptr)},
                         {"best_distance", g.best_distance}});
  out["fixed_point_trivial"] = {{"trivial", fp.trivial}, {"generators", gens_json}};
  out["passed"] = ok;
  ctx.report["certify"] = out;
  return ok;
}

struct Residual {
  std::string name;
  double value;
  double tolerance;
};

void extension_stage(Context& ctx, std::vector<Residual>& residuals, const std::string& out_dir) {
  const RunConfig& cfg = ctx.cfg;
  const Tolerances& tol = cfg.tolerances;
  const CircleCocycle& beta = *ctx.beta;
  json sections = json::array();
  std::vector<LatticePoint> b_set;
  for (const auto& b : lattice_ball(ctx.gens->rank(), 2))
    if (sup_norm(b) > 0) b_set.push_back(b);
  for (int i = 0; i < ctx.spectrum.size(); ++i) {
    const LyapunovSpace& s = ctx.spectrum.spaces[i];
    json entry = {{"index", i}};
    if (s.dim() != 1) {
      entry["skipped"] = "sections are built for one-dimensional Lyapunov spaces";
      sections.push_back(entry);
      continue;
    }
    std::optional<ConeParams> params;
    std::string last_failure = "no chamber expands this Lyapunov space";
    for (const auto& ch : ctx.dec.chambers) {
      if (!ch.representative || s.value(*ch.representative) <= 0.0) continue;
      for (int m = 1; m <= tol.k_max && !params; ++m) {
        try {
          params = cone_params(beta, ctx.spectrum, i, *ch.representative * m, cfg.grids.certify);
        } catch (const Error& e) {
          last_failure = e.what();
        }
      }
      if (params) break;
    }
    if (!params) throw Error(ErrorKind::NotDominated, last_failure, {i});
    const ConeVerification cv =
        cone_contraction_verify(*params, beta, ctx.spectrum, tol.cone_samples, ctx.seed(10 + static_cast<unsigned>(i)));
    const SectionGrid sec =
        invariant_distribution(beta, ctx.spectrum, *params, cfg.grids.section, tol.section_tol, tol.section_max_iter);
    const GrowthReport gr = growth_verify(sec, beta, ctx.spectrum, b_set, tol.growth_samples,
                                          ctx.seed(20 + static_cast<unsigned>(i)));
    const DominatedSplittingReport dr =
        dominated_rates(beta, ctx.spectrum, i, params->a, &sec, 1.0, cfg.grids.certify);
    entry["cone"] = {{"element", vec(params->a)}, {"l", params->l},           {"gamma", params->gamma},
                     {"epsilon", params->epsilon}, {"lambda", params->lambda}, {"sup_C", params->sup_C},
                     {"grid_ratio", params->grid_ratio}, {"verified_samples", cv.samples},
                     {"worst_ratio", cv.worst_ratio}};
    entry["section"] = {{"grid", grid_json(sec.grid)},
                        {"iterations", sec.iterations},
                        {"residual", sec.residual},
                        {"contraction_bound", sec.contraction_bound},
                        {"interpolation_error", sec.interpolation_error},
                        {"sup_slope", sec.sup_abs()},
                        {"growth_constant", sec.growth_constant},
                        {"transversality_constant", sec.transversality_constant}};
    entry["growth"] = {{"checked", gr.checked}, {"worst_lower", gr.worst_lower}, {"worst_upper", gr.worst_upper},
                       {"measured_constant", gr.measured_constant}};
    entry["dominated_splitting"] = {{"r", dr.r}, {"sup_k", dr.sup_k}, {"sup_alpha", dr.sup_alpha},
                                    {"sup_k_alpha_r", dr.sup_k_alpha_r}};
    if (!out_dir.empty() && cfg.outputs.dumps) {
      const std::string path = (std::filesystem::path(out_dir) / ("section_" + std::to_string(i) + ".bin")).string();
      save_section(sec, path);
      entry["dump"] = path;
    }
    residuals.push_back({"section_" + std::to_string(i) + "_residual", sec.residual, tol.section_tol});
    sections.push_back(entry);
  }
  ctx.report["rigidity"]["sections"] = sections;
}

std::vector<LatticePoint> obstruction_elements(const Context& ctx) {
  std::vector<LatticePoint> out;
  const int k = ctx.gens->rank();
  for (int j = 0; j < k; ++j) {
    LatticePoint e = LatticePoint::Zero(k);
    e(j) = 1;
    if (is_hyperbolic(ctx.gens->element(e))) out.push_back(e);
  }
  if (out.empty()) {
    for (const auto& a : lattice_ball(k, ctx.cfg.tolerances.witness_bound))
      if (sup_norm(a) > 0 && is_hyperbolic(ctx.gens->element(a))) {
        out.push_back(a);
        break;
      }
  }
  return out;
}

json obstruction_table(Context& ctx, bool trivial, std::vector<Residual>& residuals) {
  json table = json::array();
  const double limit = 10.0 * ctx.cfg.tolerances.tol;
  for (const auto& a : obstruction_elements(ctx)) {
    std::vector<ObstructionRow> rows;
    int period = ctx.cfg.tolerances.max_period;
    json entry = {{"element", vec(a)}};
    while (period > 0) {
      try {
        rows = periodic_obstruction(*ctx.beta, a, period);
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidInput) throw;
        entry["truncated"] = e.what();
        --period;
      }
    }
    json rows_json = json::array();
    double worst = 0.0;
    for (const auto& r : rows) {
      json rotations = json::array();
      for (const auto& e : r.entries) rotations.push_back(e.rotation);
      rows_json.push_back({{"period", r.period}, {"points", r.points},
                           {"max_distance_from_zero", r.max_distance_from_zero}, {"rotations", rotations}});
      worst = std::max(worst, r.max_distance_from_zero);
    }
    entry["rows"] = rows_json;
    table.push_back(entry);
    if (trivial) residuals.push_back({"obstruction_" + std::to_string(table.size() - 1), worst, limit});
  }
  return table;
}

void holonomy_stage(Context& ctx, std::vector<Residual>& residuals, const std::string& out_dir) {
  const RunConfig& cfg = ctx.cfg;
  const Tolerances& tol = cfg.tolerances;
  const CircleCocycle& beta = *ctx.beta;
  const double limit = 10.0 * tol.tol;
  json& out = ctx.report["rigidity"];

  const CoverLattice cover = cover_lattice(*ctx.gens);
  json divisors = json::array();
  for (const auto& d : cover.elementary_divisors) divisors.push_back(d.str());
  out["cover_lattice"] = {{"basis", mat(cover.basis)}, {"index", cover.index.str()},
                          {"elementary_divisors", divisors}, {"rank", cover.rank}};

  const TransferPlan plan = plan_transfer(beta, ctx.spectrum, ctx.dec, tol.tol, cfg.grids.certify, tol.k_max);
  json legs = json::array();
  for (const auto& leg : plan.legs)
    legs.push_back({{"coarse_class", leg.coarse_class}, {"element", vec(leg.a)}, {"bunching_k", leg.bunching_k},
                    {"rho", leg.rho}, {"steps", leg.steps}});
  const TransferMap h = transfer_map(beta, plan, cover, cfg.grids.transfer, tol.path_samples, ctx.seed(30));
  out["transfer_map"] = {{"legs", legs},
                         {"grid", grid_json(cfg.grids.transfer)},
                         {"nodes", h.nodes()},
                         {"path_defect", h.path_defect},
                         {"truncation_defect", h.truncation_defect}};
  if (!out_dir.empty() && cfg.outputs.dumps) {
    const std::string path = (std::filesystem::path(out_dir) / "transfer.bin").string();
    save_transfer(h, path);
    out["transfer_map"]["dump"] = path;
  }
  residuals.push_back({"path_defect", h.path_defect, limit});
  residuals.push_back({"truncation_defect", h.truncation_defect, limit});

  const ConstantReduction red = reduce_to_constant(beta, h, tol.coboundary_samples, ctx.seed(31));
  json beta0 = json::array();
  for (std::size_t j = 0; j < red.beta0.size(); ++j) {
    const RotationNumber& rn = red.rotation[j];
    beta0.push_back({{"generator", j}, {"rotation_number", rn.value}, {"exact", rn.exact}, {"p", rn.p},
                     {"q", rn.q}, {"distance_from_rotation", distance_from_rotation(red.beta0[j], rn.value, 64)}});
  }
  out["constant_reduction"] = {{"beta0", beta0}, {"constancy_defect", red.defect}};
  residuals.push_back({"constancy_defect", red.defect, limit});

  bool trivial = false;
  try {
    const CoboundaryReport cb = coboundary_verify(beta, plan, h, cover, tol.coboundary_samples, ctx.seed(32));
    trivial = true;
    out["coboundary"] = {{"periodicity_defect", cb.periodicity_defect},
                         {"identity_residual", cb.identity_residual},
                         {"samples", cb.samples}};
    residuals.push_back({"periodicity_defect", cb.periodicity_defect, limit});
    residuals.push_back({"coboundary_residual", cb.identity_residual, limit});
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotFixedPointTrivial) throw;
    out["coboundary"] = {{"finding", error_json("coboundary", e)}};
    out["findings"].push_back(error_json("coboundary", e));
  }
  out["obstruction"] = obstruction_table(ctx, trivial, residuals);
}

void rigidity_stage(Context& ctx, bool force, const std::string& out_dir) {
  const PredicateFlags& p = ctx.dec.predicates;
  if (!p.tns || !p.full)
    throw Error(ErrorKind::StageRefused,
                std::string("rigidity needs a TNS and full action (tns=") + (p.tns ? "true" : "false") +
                    ", full=" + (p.full ? "true" : "false") + ")");
  const bool certified = certify_stage(ctx);
  if (!certified && !force)
    throw Error(ErrorKind::StageRefused, "certification did not pass; rerun with --force to continue");
  ctx.report["rigidity"] = {{"forced", !certified}, {"findings", json::array()}};
  std::vector<Residual> residuals;
  std::string stage = "extension";
  try {
    extension_stage(ctx, residuals, out_dir);
    stage = "holonomy";
    holonomy_stage(ctx, residuals, out_dir);
  } catch (const Error& e) {
    ctx.fail(stage, e);
  }
  json res = json::array();
  bool within = true;
  for (const auto& r : residuals) {
    const bool ok = r.value <= r.tolerance;
    within = within && ok;
    res.push_back({{"name", r.name}, {"value", r.value}, {"tolerance", r.tolerance}, {"ok", ok}});
  }
  ctx.report["rigidity"]["residuals"] = res;
  ctx.report["rigidity"]["within_tolerance"] = within && ctx.exit_code == kExitOk;
  if (!within && ctx.exit_code == kExitOk) ctx.exit_code = kExitFailed;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::Analyze: return "analyze";
    case Command::Certify: return "certify";
    case Command::Rigidity: return "rigidity";
  }
  return "unknown";
}

}  // namespace

RunOutput run_command(Command command, const RunConfig& config, bool force, const std::string& out_dir) {
  Context ctx{config, json::object(), std::nullopt, {}, {}, std::nullopt, kExitOk};
  ctx.report["schema"] = kReportSchema;
  ctx.report["command"] = command_name(command);
  ctx.report["source"] = config.source;
  ctx.report["seed"] = config.seed;
  ctx.report["tolerances"] = {{"tol", config.tolerances.tol}, {"section_tol", config.tolerances.section_tol}};
  ctx.report["grids"] = {{"certify", grid_json(config.grids.certify)},
                         {"section", grid_json(config.grids.section)},
                         {"transfer", grid_json(config.grids.transfer)}};
  RunOutput out;
  std::string stage = "analyze";
  try {
    analyze_stage(ctx, out.svg);
    if (command == Command::Certify) {
      stage = "certify";
      if (!certify_stage(ctx)) ctx.exit_code = kExitFailed;
    } else if (command == Command::Rigidity) {
      stage = "rigidity";
      rigidity_stage(ctx, force, out_dir);
    }
  } catch (const Error& e) {
    ctx.fail(stage, e);
  }
  ctx.report["status"] = ctx.exit_code == kExitOk ? "ok" : "failed";
  out.report = std::move(ctx.report);
  out.exit_code = ctx.exit_code;
  return out;
}

}  // namespace toralrig
