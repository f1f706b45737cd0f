// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fracsurf.hpp"
#include "fracsurf/cli/commands.hpp"

using namespace fracsurf;

namespace {

const std::vector<double> kLimitGrid = {0.30, 0.40, 0.45, 0.49};
const std::vector<double> kFormGrid = {0.1, 0.25, 0.4};

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, bool pass, const std::string& detail) {
  std::printf("CRITERION %d %s: %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

bool monotone_toward(const SweepResult& r) {
  bool up = true, down = true, closer = true;
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    up = up && r.points[i].scaled >= r.points[i - 1].scaled;
    down = down && r.points[i].scaled <= r.points[i - 1].scaled;
    closer = closer && std::abs(r.points[i].scaled - r.limit.value) <= std::abs(r.points[i - 1].scaled - r.limit.value);
  }
  return (up || down) && closer;
}

// 1. SetPairs and CrossingParity agree on the disk and the level-3 sphere mesh.
void criterion1() {
  const std::uint64_t n = 1000000;
  bool pass = true;
  std::string detail;
  auto check = [&](const char* name, auto solid) {
    for (double s : kFormGrid) {
      const auto t0 = std::chrono::steady_clock::now();
      const FractionalOrder o(s);
      const Estimate a = s_perimeter(solid, o, PerimeterMethod::SetPairs, n, 101);
      const Estimate b = s_perimeter(solid, o, PerimeterMethod::CrossingParity, n, 101);
      const double secs = seconds_since(t0);
      const double z = std::abs(a.value - b.value) / std::hypot(a.std_error, b.std_error);
      const bool ok = z <= 3.0 && secs <= 300.0;
      pass = pass && ok;
      detail += std::string(name) + fmt(" s=%.2f %.4f vs %.4f", s, a.value, b.value) +
                fmt(" (%.2f sigma, %.1fs);", z, secs);
    }
  };
  check("disk", SolidSet<2>::ball(Vec2(0, 0), 1.0));
  check(" mesh3", SolidSet<3>::polytope(make_sphere_mesh(Vec3(0, 0, 0), 1.0, 3)));
  report(1, pass, detail);
}

// 2. (1 - 2s) s-Per(B_1, B_2) extrapolates to 2 pi.
void criterion2() {
  const auto e = SolidSet<2>::ball(Vec2(0, 0), 1.0);
  const auto omega = Region<2>::ball(Vec2(0, 0), 2.0);
  const SweepResult r = scaled_limit_sweep(
      [&](double s) {
        const Estimate est = s_perimeter_relative(e, omega, FractionalOrder(s), 1000000, 202);
        return std::make_pair(est.value, est.std_error);
      },
      kLimitGrid);
  const double dev = std::abs(r.limit.value - 2.0 * kPi) / (2.0 * kPi);
  report(2, dev <= 0.02, fmt("limit %.5f +- %.5f vs 2pi, relative deviation %.4f", r.limit.value, r.limit.error, dev));
}

// 3. (1 - 2s) s-Area of the half circle in B(0, 2) extrapolates to pi, monotone.
void criterion3() {
  const auto arc = make_arc(Vec2(0, 0), 1.0, 0.0, kPi);
  const auto omega = Region<2>::ball(Vec2(0, 0), 2.0);
  const SweepResult r = scaled_limit_sweep(
      [&](double s) {
        AreaConfig cfg;
        cfg.samples = 400000;
        cfg.seed = 303;
        const AreaEstimate a = s_area(arc, omega, FractionalOrder(s), cfg);
        return std::make_pair(a.value, a.std_error);
      },
      kLimitGrid);
  const double dev = std::abs(r.limit.value - kPi) / kPi;
  const bool mono = monotone_toward(r);
  std::string scaled;
  for (const auto& p : r.points) scaled += fmt(" %.4f", p.scaled);
  report(3, dev <= 0.02 && mono,
         fmt("limit %.5f +- %.5f vs pi, relative deviation %.4f, monotone ", r.limit.value, r.limit.error, dev) +
             (mono ? "yes" : "no") + ", scaled values" + scaled);
}

// 4. |(1 - 2s) H_s| -> 1 on the unit circle and 1/2 on the radius-2 circle,
// with the sign recorded by the disk oracle fixture at every grid point.
void criterion4() {
  std::ifstream in(std::string(FRACSURF_FIXTURE_DIR) + "/disk_mean_curvature_sign_s025.json");
  const double oracle_sign = nlohmann::json::parse(in).at("oracle_value").get<double>() > 0.0 ? 1.0 : -1.0;
  bool pass = true;
  std::string detail = fmt("recorded sign %+.0f;", oracle_sign);
  for (double radius : {1.0, 2.0}) {
    const auto c = make_circle(Vec2(0, 0), radius);
    const SweepResult r = local_limit_estimate(c, Vec2(radius, 0), kLimitGrid, LimitKind::Mean);
    const double dev = std::abs(std::abs(r.limit.value) - 1.0 / radius) * radius;
    bool signs = true;
    for (const auto& p : r.points) signs = signs && (p.value > 0.0 ? 1.0 : -1.0) == oracle_sign;
    pass = pass && dev <= 0.02 && signs;
    detail += fmt(" R=%.0f limit %.5f +- %.5f, relative deviation %.4f,", radius, r.limit.value, r.limit.error, dev) +
              (signs ? " signs consistent;" : " SIGN MISMATCH;");
  }
  report(4, pass, detail);
}

// 5. Flux and volume forms agree within 3 combined error estimates.
void criterion5() {
  const auto circle = make_circle(Vec2(0, 0), 1.0);
  const auto arc = make_arc(Vec2(0, 0), 1.0, 0.0, kPi);
  struct Case {
    const char* name;
    const Curve2* surf;
    Vec2 z;
  };
  const std::vector<Case> cases = {{"circle(1,0)", &circle, Vec2(1, 0)},
                                   {"arc(0,1)", &arc, Vec2(0, 1)},
                                   {"arc@1.0rad", &arc, Vec2(std::cos(1.0), std::sin(1.0))},
                                   {"arc@2.5rad", &arc, Vec2(std::cos(2.5), std::sin(2.5))}};
  bool pass = true;
  double worst = 0.0;
  for (const auto& c : cases)
    for (double s : kFormGrid) {
      const FractionalOrder o(s);
      const auto v = mean_curvature_volume(*c.surf, c.z, o);
      const auto f = mean_curvature_flux(*c.surf, c.z, o);
      const double ratio = std::abs(v.value - f.value) / (v.error_estimate + f.error_estimate);
      worst = std::max(worst, ratio);
      pass = pass && ratio <= 3.0;
    }
  report(5, pass, fmt("12 cases (circle and arc, s in {0.1,0.25,0.4}); worst |flux-volume| / (errV+errF) = %.3f",
                      worst));
}

// 6. Averaging identity in the plane and on the level-3 sphere mesh.
void criterion6() {
  bool pass = true;
  std::string detail;
  const auto circle = make_circle(Vec2(0, 0), 1.0);
  const auto arc = make_arc(Vec2(0, 0), 1.0, 0.0, kPi);
  for (const auto* c : {&circle, &arc}) {
    const Vec2 z(0, 1);
    for (double s : kFormGrid) {
      const FractionalOrder o(s);
      const Vec2 e = c->tangent_basis_at(z)[0];
      const auto kp = directional_curvature(*c, z, e, o);
      const auto km = directional_curvature(*c, z, Vec2(-e), o);
      const auto h = mean_curvature_volume(*c, z, o);
      const double diff = std::abs(0.5 * (kp.value + km.value) - h.value);
      const double tol = 0.5 * (kp.error_estimate + km.error_estimate) + h.error_estimate;
      pass = pass && diff <= tol;
    }
  }
  detail += "n=2 circle and arc at (0,1), 3 s values: " + std::string(pass ? "ok" : "mismatch") + ";";
  const auto mesh = make_sphere_mesh(Vec3(0, 0, 0), 1.0, 3);
  const Vec3 z(1, 0, 0);  // a vertex on the equator
  const FractionalOrder o(0.25);
  const auto v = mean_curvature_volume(mesh, z, o);
  const auto d = mean_from_directional(mesh, z, o);
  const double diff = std::abs(v.value - d.value);
  const double tol = v.error_estimate + d.error_estimate + 0.02 * std::abs(v.value);
  pass = pass && diff <= tol;
  detail += fmt(" mesh3 vertex s=0.25: volume %.5f, directional average %.5f, |diff| %.2e <= %.2e", v.value, d.value,
                diff, tol);
  report(6, pass, detail);
}

// 7. Flat surfaces give zero, orientation reversal negates bit-exactly,
// dilation scaling holds.
void criterion7() {
  std::string detail;
  // flat
  double flat_max = 0.0;
  const auto line = make_polyline({Vec2(-10, 0), Vec2(10, 0)}, false);
  const auto plate = make_mesh({Vec3(-10, -10, 0), Vec3(10, -10, 0), Vec3(10, 10, 0), Vec3(-10, 10, 0)},
                               {{0, 1, 2}, {0, 2, 3}});
  for (double s : kFormGrid) {
    const FractionalOrder o(s);
    const Vec2 z(0.37, 0);
    for (double v : {mean_curvature_volume(line, z, o).value, mean_curvature_flux(line, z, o).value,
                     directional_curvature(line, z, Vec2(1, 0), o).value,
                     directional_curvature(line, z, Vec2(-1, 0), o).value})
      flat_max = std::max(flat_max, std::abs(v));
    const Vec3 y(0.3, -0.7, 0);
    for (double v : {mean_curvature_volume(plate, y, o).value, mean_curvature_flux(plate, y, o).value,
                     directional_curvature(plate, y, Vec3(1, 0, 0), o).value})
      flat_max = std::max(flat_max, std::abs(v));
  }
  const bool flat_ok = flat_max < 1e-8;
  detail += fmt("flat max |H|,|K| = %.2e;", flat_max);
  // orientation
  bool exact = true;
  int compared = 0;
  const auto arc = make_arc(Vec2(0, 0), 1.0, 0.0, kPi);
  const auto mesh = make_sphere_mesh(Vec3(0, 0, 0), 1.0, 3);
  for (double s : kFormGrid) {
    const FractionalOrder o(s);
    const Vec2 z(std::cos(1.1), std::sin(1.1));
    const Vec2 e = arc.tangent_basis_at(z)[0];
    const auto fa = arc.flipped();
    const std::pair<double, double> pairs2[] = {
        {mean_curvature_volume(arc, z, o).value, mean_curvature_volume(fa, z, o).value},
        {mean_curvature_flux(arc, z, o).value, mean_curvature_flux(fa, z, o).value},
        {directional_curvature(arc, z, e, o).value, directional_curvature(fa, z, e, o).value},
        {mean_from_directional(arc, z, o).value, mean_from_directional(fa, z, o).value},
        {classical_curvature(arc, z), classical_curvature(fa, z)}};
    for (const auto& [a, b] : pairs2) exact = exact && a == -b, ++compared;
  }
  {
    const FractionalOrder o(0.25);
    const Vec3 z(1, 0, 0);
    const auto fm = mesh.flipped();
    const std::pair<double, double> pairs3[] = {
        {mean_curvature_volume(mesh, z, o).value, mean_curvature_volume(fm, z, o).value},
        {mean_curvature_flux(mesh, z, o).value, mean_curvature_flux(fm, z, o).value},
        {mean_from_directional(mesh, z, o).value, mean_from_directional(fm, z, o).value}};
    for (const auto& [a, b] : pairs3) exact = exact && a == -b, ++compared;
  }
  detail += fmt(" orientation: %.0f pairs ", compared) + (exact ? "bit-exact;" : "NOT exact;");
  // dilation
  const double lambda = 2.0;
  double curv_dev = 0.0;
  for (double s : kFormGrid) {
    const FractionalOrder o(s);
    const double f = std::pow(lambda, -2.0 * s);
    const double h1 = mean_curvature_volume(arc, Vec2(0, 1), o).value;
    const double h2 = mean_curvature_volume(make_arc(Vec2(0, 0), lambda, 0.0, kPi), Vec2(0, lambda), o).value;
    curv_dev = std::max(curv_dev, std::abs(h2 / h1 - f) / f);
  }
  double per_z = 0.0;
  for (double s : kFormGrid) {
    const FractionalOrder o(s);
    const double f = std::pow(lambda, 2.0 - 2.0 * s);
    const Estimate a = s_perimeter(SolidSet<2>::ball(Vec2(0, 0), 1.0), o, PerimeterMethod::SetPairs, 1000000, 701);
    const Estimate b = s_perimeter(SolidSet<2>::ball(Vec2(0, 0), lambda), o, PerimeterMethod::SetPairs, 1000000, 702);
    per_z = std::max(per_z, std::abs(b.value - f * a.value) / std::hypot(b.std_error, f * a.std_error));
  }
  const bool dil_ok = curv_dev <= 0.005 && per_z <= 3.0;
  detail += fmt(" dilation: curvature max relative deviation %.2e, s-Per max %.2f sigma", curv_dev, per_z);
  report(7, flat_ok && exact && dil_ok, detail);
}

// 8. Every fixture regenerates within tolerance; suite runtime <= 15 min.
void criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = cli::cmd_validate(FRACSURF_FIXTURE_DIR, Execution{});
  const double secs = seconds_since(t0);
  int passed = 0;
  std::string failed;
  for (const auto& r : rep.records) {
    if (r["pass"].get<bool>()) ++passed;
    else failed += " " + r["fixture"].get<std::string>();
  }
  report(8, rep.all_passed && secs <= 900.0,
         fmt("%.0f/%.0f fixtures within tolerance in %.1fs", passed, static_cast<double>(rep.records.size()), secs) +
             (failed.empty() ? "" : "; failed:" + failed));
}

// 9. Same seed, any worker count: byte-identical output.
void criterion9() {
  using cli::json;
  const std::vector<std::pair<std::string, json>> scenarios = {
      {"perimeter", json::parse(R"({"solid":{"type":"ball","center":[0,0],"radius":1},"s":[0.25],
                                    "samples":100000,"seed":9})")},
      {"perimeter", json::parse(R"({"dimension":3,"solid":{"type":"polytope","surface":{"type":"sphere_mesh",
                                    "center":[0,0,0],"radius":1,"level":2}},"s":0.3,"samples":50000,"seed":9})")},
      {"area", json::parse(R"({"surface":{"type":"arc","center":[0,0],"radius":1,"angle_start":0,
                               "angle_end":3.141592653589793},"region":{"type":"ball","center":[0,0],"radius":2},
                               "s":0.3,"samples":100000,"seed":9})")},
      {"curvature", json::parse(R"({"dimension":3,"surface":{"type":"sphere_mesh","center":[0,0,0],"radius":1,
                                    "level":3},"points":[[1,0,0]],"s":0.25,"forms":["Volume","DirectionalAverage"]})")},
      {"sweep", json::parse(R"({"quantity":"perimeter_relative","solid":{"type":"ball","center":[0,0],"radius":1},
                                "region":{"type":"ball","center":[0,0],"radius":2},"s":[0.3,0.4,0.45],
                                "samples":50000,"seed":9})")}};
  bool pass = true;
  int runs = 0;
  for (const auto& [cmd, doc] : scenarios) {
    std::string first;
    for (unsigned w : {1u, 2u, 4u, 7u}) {
      std::ostringstream os;
      cli::write_jsonl(cli::run_command(cmd, cli::Scenario(doc, "."), Execution{w}), os);
      if (w == 1) first = os.str();
      else pass = pass && os.str() == first;
      ++runs;
    }
  }
  report(9, pass, fmt("%.0f scenarios x workers {1,2,4,7}: ", static_cast<double>(scenarios.size())) +
                      (pass ? "byte-identical" : "OUTPUT DIFFERS"));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::function<void()>> all = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                  criterion6, criterion7, criterion8, criterion9};
  for (std::size_t i = 0; i < all.size(); ++i) {
    try {
      all[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, std::string("exception: ") + e.what());
    }
  }
  std::printf("acceptance: %d of %zu criteria failed (%.1fs)\n", failures, all.size(), seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
