#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "fracsurf/cli/scenario.hpp"

namespace fracsurf::cli {

struct Context {
  const Scenario& sc;
  Execution exec;
  std::string command;
};

inline Record base_record(const Context& ctx, const std::string& quantity) {
  Record r;
  r["command"] = ctx.command;
  r["quantity"] = quantity;
  return r;
}

inline void stamp(Record& r, const Context& ctx) {
  r["config_hash"] = ctx.sc.config_hash();
  r["version"] = kVersion;
}

template <int N>
json point_json(const Vec<N>& p) {
  json a = json::array();
  for (int k = 0; k < N; ++k) a.push_back(p[k]);
  return a;
}

// ---------------------------------------------------------------------------
// perimeter
// ---------------------------------------------------------------------------

template <int N>
SetExpr<N> set_expr(const Scenario& sc, const std::string& key) {
  const json& lits = require(sc.doc(), key, "");
  if (!lits.is_array() || lits.empty()) field_error(key, "expected a non-empty array of solids");
  SetExpr<N> e;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    const std::string field = key + "[" + std::to_string(i) + "]";
    const SolidSet<N> solid = sc.solid<N>(lits[i], field);
    e = lits[i].value("complement", false) ? e.and_out(solid) : e.and_in(solid);
  }
  return e;
}

inline PerimeterMethod parse_method(const json& j) {
  const std::string m = j.is_string() ? j.get<std::string>() : "";
  if (m == "SetPairs") return PerimeterMethod::SetPairs;
  if (m == "CrossingParity") return PerimeterMethod::CrossingParity;
  field_error("methods", "unknown method '" + m + "'");
}

inline void put_estimate(Record& r, const Estimate& e) {
  r["value"] = e.value;
  r["std_error"] = e.std_error;
  r["bias_bound"] = e.bias_bound;
  r["samples"] = e.sample_count;
  r["seed"] = e.seed;
}

template <int N>
std::vector<Record> perimeter_impl(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  const auto svals = sc.s_values();
  const std::uint64_t seed = sc.seed();
  const std::uint64_t n = sc.samples(100000);
  std::vector<Record> out;
  if (sc.doc().contains("a") || sc.doc().contains("b")) {
    const SetExpr<N> a = set_expr<N>(sc, "a"), b = set_expr<N>(sc, "b");
    for (double s : svals) {
      Record r = base_record(ctx, "interaction");
      r["s"] = s;
      put_estimate(r, interaction(a, b, FractionalOrder(s), n, seed, ctx.exec));
      stamp(r, ctx);
      out.push_back(std::move(r));
    }
    return out;
  }
  const SolidSet<N> e = sc.solid<N>(require(sc.doc(), "solid", ""), "solid");
  if (sc.doc().contains("region")) {
    const Region<N> omega = sc.region<N>(sc.doc()["region"], "region");
    for (double s : svals) {
      Record r = base_record(ctx, "perimeter_relative");
      r["method"] = "Lines";
      r["s"] = s;
      put_estimate(r, s_perimeter_relative(e, omega, FractionalOrder(s), n, seed, ctx.exec));
      stamp(r, ctx);
      out.push_back(std::move(r));
    }
    return out;
  }
  std::vector<PerimeterMethod> methods = {PerimeterMethod::SetPairs, PerimeterMethod::CrossingParity};
  if (sc.doc().contains("methods")) {
    methods.clear();
    for (const auto& m : sc.doc()["methods"]) methods.push_back(parse_method(m));
  }
  for (double s : svals)
    for (PerimeterMethod m : methods) {
      Record r = base_record(ctx, "perimeter");
      r["method"] = to_string(m);
      r["s"] = s;
      put_estimate(r, s_perimeter(e, FractionalOrder(s), m, n, seed, ctx.exec));
      stamp(r, ctx);
      out.push_back(std::move(r));
    }
  return out;
}

inline std::vector<Record> cmd_perimeter(const Context& ctx) {
  return ctx.sc.dimension() == 2 ? perimeter_impl<2>(ctx) : perimeter_impl<3>(ctx);
}

// ---------------------------------------------------------------------------
// area
// ---------------------------------------------------------------------------

template <int N>
AreaEstimate area_estimate(const Context& ctx, const OrientedSurface<N>& surf, const Region<N>& omega, double s) {
  AreaConfig cfg;
  cfg.samples = ctx.sc.samples(cfg.samples);
  cfg.seed = ctx.sc.seed();
  cfg.near = ctx.sc.cov_config(ctx.exec);
  cfg.exec = ctx.exec;
  if (ctx.sc.config().contains("delta")) cfg.delta = number(ctx.sc.config()["delta"], "config.delta");
  return s_area(surf, omega, FractionalOrder(s), cfg);
}

template <int N>
std::vector<Record> area_impl(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  const OrientedSurface<N> surf = sc.surface<N>();
  const Region<N> omega = sc.region<N>(require(sc.doc(), "region", ""), "region");
  std::vector<Record> out;
  for (double s : sc.s_values()) {
    const AreaEstimate a = area_estimate(ctx, surf, omega, s);
    Record r = base_record(ctx, "area");
    r["s"] = s;
    r["value"] = a.value;
    r["std_error"] = a.std_error;
    r["bias_bound"] = a.bias_bound;
    r["near"] = a.near;
    r["near_error"] = a.near_error;
    r["far"] = a.far;
    r["far_std_error"] = a.far_std_error;
    r["delta"] = a.delta;
    r["samples"] = a.sample_count;
    r["seed"] = a.seed;
    stamp(r, ctx);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<Record> cmd_area(const Context& ctx) {
  return ctx.sc.dimension() == 2 ? area_impl<2>(ctx) : area_impl<3>(ctx);
}

// ---------------------------------------------------------------------------
// curvature
// ---------------------------------------------------------------------------

inline CurvatureForm parse_form(const json& j) {
  const std::string f = j.is_string() ? j.get<std::string>() : "";
  if (f == "Volume") return CurvatureForm::Volume;
  if (f == "Flux") return CurvatureForm::Flux;
  if (f == "Directional") return CurvatureForm::Directional;
  if (f == "DirectionalAverage") return CurvatureForm::DirectionalAverage;
  field_error("forms", "unknown form '" + f + "'");
}

template <int N>
Vec<N> direction_for(const Scenario& sc, const OrientedSurface<N>& surf, const Vec<N>& z, std::size_t i) {
  if (!sc.doc().contains("directions")) {
    if constexpr (N == 2) return surf.tangent_basis_at(z)[0];
    field_error("directions", "required for the Directional form in 3D");
  }
  const auto dirs = sc.points<N>("directions");
  if (dirs.size() != 1 && i >= dirs.size()) field_error("directions", "need one direction or one per point");
  return (dirs.size() == 1 ? dirs[0] : dirs[i]).normalized();
}

template <int N>
CurvatureResult<N> curvature_of(const OrientedSurface<N>& surf, const Vec<N>& z, const Vec<N>& e,
                                CurvatureForm form, double s, const CurvatureConfig& cfg) {
  const FractionalOrder order(s);
  switch (form) {
    case CurvatureForm::Volume: return mean_curvature_volume(surf, z, order, cfg);
    case CurvatureForm::Flux: return mean_curvature_flux(surf, z, order, cfg);
    case CurvatureForm::Directional: return directional_curvature(surf, z, e, order, cfg);
    case CurvatureForm::DirectionalAverage: return mean_from_directional(surf, z, order, cfg);
  }
  throw ValidationError("unknown curvature form");
}

template <int N>
std::vector<Record> curvature_impl(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  const OrientedSurface<N> surf = sc.surface<N>();
  const auto pts = sc.points<N>("points");
  const CurvatureConfig cfg = sc.curvature_config(ctx.exec);
  std::vector<CurvatureForm> forms = {CurvatureForm::Volume};
  if (sc.doc().contains("forms")) {
    forms.clear();
    for (const auto& f : sc.doc()["forms"]) forms.push_back(parse_form(f));
  }
  std::vector<Record> out;
  for (double s : sc.s_values())
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (CurvatureForm form : forms) {
        Vec<N> e = Vec<N>::Zero();
        if (form == CurvatureForm::Directional) e = direction_for(sc, surf, pts[i], i);
        const auto c = curvature_of(surf, pts[i], e, form, s, cfg);
        Record r = base_record(ctx, form == CurvatureForm::Directional ? "directional_curvature" : "mean_curvature");
        r["form"] = to_string(form);
        r["s"] = s;
        r["point"] = point_json<N>(pts[i]);
        if (form == CurvatureForm::Directional) r["direction"] = point_json<N>(e);
        r["value"] = c.value;
        r["error_estimate"] = c.error_estimate;
        r["degenerate_nodes"] = c.diagnostics.degenerate_nodes;
        r["total_nodes"] = c.diagnostics.total_nodes;
        stamp(r, ctx);
        out.push_back(std::move(r));
      }
  return out;
}

inline std::vector<Record> cmd_curvature(const Context& ctx) {
  return ctx.sc.dimension() == 2 ? curvature_impl<2>(ctx) : curvature_impl<3>(ctx);
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

template <int N>
bool analytic(const OrientedSurface<N>& surf) {
  if constexpr (N == 2) return !surf.template holds<Polyline2D>();
  else return surf.template holds<AnalyticSphere>();
}

template <int N>
std::vector<Record> sweep_impl(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  const std::string quantity = require(sc.doc(), "quantity", "").get<std::string>();
  const auto grid = sc.s_values();
  check_s_grid(grid);
  std::function<std::pair<double, double>(double)> eval;
  std::optional<double> target;
  if (quantity == "perimeter_relative") {
    const SolidSet<N> e = sc.solid<N>(require(sc.doc(), "solid", ""), "solid");
    const Region<N> omega = sc.region<N>(require(sc.doc(), "region", ""), "region");
    const std::uint64_t n = sc.samples(100000), seed = sc.seed();
    eval = [=, &ctx](double s) {
      const Estimate est = s_perimeter_relative(e, omega, FractionalOrder(s), n, seed, ctx.exec);
      return std::make_pair(est.value, est.std_error);
    };
    if (std::holds_alternative<BallSolid<N>>(e.shape()) && surface_inside(e.boundary(), omega))
      target = e.boundary().classical_measure();
  } else if (quantity == "area") {
    const OrientedSurface<N> surf = sc.surface<N>();
    const Region<N> omega = sc.region<N>(require(sc.doc(), "region", ""), "region");
    eval = [=, &ctx](double s) {
      const AreaEstimate a = area_estimate(ctx, surf, omega, s);
      return std::make_pair(a.value, a.std_error);
    };
    if (analytic(surf)) target = surf.classical_measure();
  } else if (quantity == "mean_curvature" || quantity == "directional_curvature") {
    const OrientedSurface<N> surf = sc.surface<N>();
    const Vec<N> z = vec<N>(require(sc.doc(), "point", ""), "point");
    const bool dir = quantity == "directional_curvature";
    Vec<N> e = Vec<N>::Zero();
    if (dir) e = direction_for(sc, surf, z, 0);
    const CurvatureConfig cfg = sc.curvature_config(ctx.exec);
    eval = [=](double s) {
      const auto c = curvature_of(surf, z, e, dir ? CurvatureForm::Directional : CurvatureForm::Volume, s, cfg);
      return std::make_pair(c.value, c.error_estimate);
    };
    if (analytic(surf)) target = classical_curvature(surf, z);
  } else {
    field_error("quantity", "unknown sweep quantity '" + quantity + "'");
  }
  const SweepResult res = scaled_limit_sweep(eval, grid);
  std::vector<Record> out;
  for (const auto& p : res.points) {
    Record r = base_record(ctx, quantity);
    r["s"] = p.s;
    r["value"] = p.value;
    r["error"] = p.error;
    r["scaled"] = p.scaled;
    r["scaled_error"] = p.scaled_error;
    stamp(r, ctx);
    out.push_back(std::move(r));
  }
  bool up = true, down = true;
  for (std::size_t i = 1; i < res.points.size(); ++i) {
    up = up && res.points[i].scaled >= res.points[i - 1].scaled;
    down = down && res.points[i].scaled <= res.points[i - 1].scaled;
  }
  Record r = base_record(ctx, quantity);
  r["limit"] = res.limit.value;
  r["limit_error"] = res.limit.error;
  r["monotone"] = up || down;
  if (target) {
    r["target"] = *target;
    r["relative_deviation"] = std::abs(res.limit.value - *target) / std::abs(*target);
  }
  stamp(r, ctx);
  out.push_back(std::move(r));
  return out;
}

inline std::vector<Record> cmd_sweep(const Context& ctx) {
  return ctx.sc.dimension() == 2 ? sweep_impl<2>(ctx) : sweep_impl<3>(ctx);
}

// ---------------------------------------------------------------------------
// diagnostic: intermediate quantities used by the fixtures
// ---------------------------------------------------------------------------

template <int N>
std::vector<Record> diagnostic_impl(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  const std::string quantity = require(sc.doc(), "quantity", "").get<std::string>();
  std::vector<Record> out;
  auto emit = [&](Record r) {
    stamp(r, ctx);
    out.push_back(std::move(r));
  };
  if (quantity == "near_diagonal") {
    const OrientedSurface<N> surf = sc.surface<N>();
    std::optional<Region<N>> omega;
    if (sc.doc().contains("region")) omega = sc.region<N>(sc.doc()["region"], "region");
    const double delta = number(require(sc.config(), "delta", "config"), "config.delta");
    for (double s : sc.s_values()) {
      const CovEstimate c = cov_near_diagonal_integral<N>(surf, omega, FractionalOrder(s), delta, sc.cov_config(ctx.exec));
      Record r = base_record(ctx, quantity);
      r["s"] = s;
      r["delta"] = delta;
      r["value"] = c.value;
      r["error_estimate"] = c.error;
      emit(std::move(r));
    }
  } else if (quantity == "pv_tilde_chi") {
    const SolidSet<N> e = sc.solid<N>(require(sc.doc(), "solid", ""), "solid");
    if (!e.bounded()) field_error("solid", "must be bounded");
    const OrientedSurface<N> boundary = e.boundary();
    const Vec<N> z = vec<N>(require(sc.doc(), "point", ""), "point");
    const Vec<N> n = boundary.normal_at(z);
    const double r_enc = (z - e.bounding_center()).norm() + e.bounding_radius();
    // membership is exact for primitives; the boundary itself has measure zero
    auto sign = [&](const Vec<N>& y) { return SignedIndicator::of(e.contains(y) ? 1 : -1); };
    auto far = [](const Vec<N>&) { return SignedIndicator::of(-1); };
    for (double s : sc.s_values()) {
      const PVEstimate p = pv_volume_integrate<N>(sign, z, FractionalOrder(s), r_enc, far, sc.pv_config(ctx.exec), n);
      Record r = base_record(ctx, quantity);
      r["s"] = s;
      r["point"] = point_json<N>(z);
      r["value"] = p.value;
      r["error_estimate"] = p.error_estimate;
      r["mean_curvature"] = p.value / unit_sphere_measure(N - 2);
      emit(std::move(r));
    }
  } else if (quantity == "normal_sign") {
    const OrientedSurface<N> surf = sc.surface<N>();
    const Vec<N> z = vec<N>(require(sc.doc(), "point", ""), "point");
    for (const auto& y : sc.points<N>("probes")) {
      const NormalSign sg = interior_normal_sign(surf, z, y);
      Record r = base_record(ctx, quantity);
      r["point"] = point_json<N>(z);
      r["probe"] = point_json<N>(y);
      if (sg.degenerate()) r["degenerate"] = to_string(*sg.reason);
      r["value"] = sg.sigma;
      emit(std::move(r));
    }
  } else {
    field_error("quantity", "unknown diagnostic quantity '" + quantity + "'");
  }
  return out;
}

inline std::vector<Record> cmd_diagnostic(const Context& ctx) {
  return ctx.sc.dimension() == 2 ? diagnostic_impl<2>(ctx) : diagnostic_impl<3>(ctx);
}

inline std::vector<Record> run_command(const std::string& name, const Scenario& sc, const Execution& exec) {
  const Context ctx{sc, exec, name};
  if (name == "perimeter") return cmd_perimeter(ctx);
  if (name == "area") return cmd_area(ctx);
  if (name == "curvature") return cmd_curvature(ctx);
  if (name == "sweep") return cmd_sweep(ctx);
  if (name == "diagnostic") return cmd_diagnostic(ctx);
  throw ValidationError("unknown command '" + name + "'");
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct ValidationReport {
  std::vector<Record> records;
  bool all_passed = true;
};

/// Re-runs every fixture in `dir` (files *.json, by name) and compares the
/// value against the stored oracle within the stored tolerance. Unreadable or
/// malformed fixtures count as failures.
inline ValidationReport cmd_validate(const std::filesystem::path& dir, const Execution& exec) {
  if (!std::filesystem::is_directory(dir)) throw ValidationError("fixture directory " + dir.string() + " not found");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("no fixtures in " + dir.string());
  ValidationReport report;
  for (const auto& path : files) {
    Record r;
    r["command"] = "validate";
    r["fixture"] = path.stem().string();
    bool pass = false;
    try {
      std::ifstream in(path);
      const json fx = json::parse(in);
      r["fixture"] = fx.at("fixture_name").get<std::string>();
      const json& inputs = fx.at("inputs");
      const double oracle = fx.at("oracle_value").get<double>();
      const json& params = fx.at("oracle_params");
      const double tol = params.at("tolerance").get<double>();
      const std::string field = params.value("field", "value");
      const Scenario sc(inputs.at("scenario"), dir);
      const auto recs = run_command(inputs.at("command").get<std::string>(), sc, exec);
      const std::size_t idx = params.value("record", std::size_t{0});
      if (idx >= recs.size() || !recs[idx].contains(field)) throw ValidationError("no '" + field + "' in output");
      const double got = recs[idx][field].get<double>();
      pass = std::abs(got - oracle) <= tol;
      if (params.value("compare", std::string("value")) == "sign") pass = pass && (got > 0.0) == (oracle > 0.0);
      r["computed"] = got;
      r["oracle"] = oracle;
      r["tolerance"] = tol;
      r["deviation"] = std::abs(got - oracle);
      r["config_hash"] = hash_hex(inputs.dump());
    } catch (const std::exception& e) {
      r["error"] = e.what();
    }
    r["pass"] = pass;
    r["version"] = kVersion;
    report.all_passed = report.all_passed && pass;
    report.records.push_back(std::move(r));
  }
  return report;
}

// ---------------------------------------------------------------------------
// output
// ---------------------------------------------------------------------------

inline void write_jsonl(const std::vector<Record>& recs, std::ostream& os) {
  for (const auto& r : recs) os << r.dump() << '\n';
}

/// Column order of the CSV output.
inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "command", "quantity", "fixture", "method",     "form",     "s",        "point",
      "direction", "value",  "error",   "bias_bound", "limit",    "target",   "samples",
      "seed",    "pass",     "config_hash", "version"};
  return cols;
}

inline std::string csv_cell(const Record& r, const std::string& col) {
  auto cell = [](const nlohmann::ordered_json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + v[i].dump();
      return s;
    }
    return v.dump();
  };
  if (col == "error") {
    for (const char* k : {"std_error", "error_estimate", "error", "limit_error"})
      if (r.contains(k)) return cell(r[k]);
    return "";
  }
  if (col == "value" && !r.contains("value") && r.contains("computed")) return cell(r["computed"]);
  return r.contains(col) ? cell(r[col]) : "";
}

inline void write_csv(const std::vector<Record>& recs, std::ostream& os) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : recs) {
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << csv_cell(r, cols[i]);
    os << '\n';
  }
}

}  // namespace fracsurf::cli
