#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracsurf/curvature.hpp"
#include "fracsurf/functionals.hpp"

namespace fracsurf::cli {

using json = nlohmann::json;
using Record = nlohmann::ordered_json;

[[noreturn]] inline void field_error(const std::string& field, const std::string& what) {
  throw ValidationError("scenario field '" + field + "': " + what);
}

inline const json& require(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) field_error(ctx.empty() ? key : ctx + "." + key, "missing");
  return j.at(key);
}

inline double number(const json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  return j.get<double>();
}

template <int N>
Vec<N> vec(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(N))
    field_error(field, "expected an array of " + std::to_string(N) + " numbers");
  Vec<N> v;
  for (int k = 0; k < N; ++k) v[k] = number(j[k], field);
  return v;
}

/// 64-bit FNV-1a of the canonical (key-sorted, compact) dump, as 16 hex digits.
inline std::string hash_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

/// A parsed scenario document plus the directory used to resolve file paths.
class Scenario {
 public:
  Scenario(json doc, std::filesystem::path base) : doc_(std::move(doc)), base_(std::move(base)) {
    if (!doc_.is_object()) throw ValidationError("scenario must be a JSON object");
  }

  static Scenario load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file " + path.string());
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
    }
    return Scenario(std::move(doc), path.parent_path());
  }

  const json& doc() const { return doc_; }
  const std::filesystem::path& base() const { return base_; }

  void override_seed(std::uint64_t seed) { doc_["seed"] = seed; }

  std::string config_hash() const { return hash_hex(doc_.dump()); }

  int dimension() const {
    const int n = doc_.value("dimension", 2);
    if (n != 2 && n != 3) field_error("dimension", "must be 2 or 3");
    return n;
  }

  std::vector<double> s_values() const {
    const json& j = require(doc_, "s", "");
    std::vector<double> out;
    if (j.is_number()) {
      out.push_back(j.get<double>());
    } else if (j.is_array() && !j.empty()) {
      for (const auto& v : j) out.push_back(number(v, "s"));
    } else {
      field_error("s", "expected a number or a non-empty array");
    }
    for (double s : out)
      if (!(s > 0.0 && s < 0.5)) field_error("s", "value " + json(s).dump() + " outside (0, 1/2)");
    return out;
  }

  std::uint64_t seed() const {
    const json& j = require(doc_, "seed", "");
    if (!j.is_number_unsigned()) field_error("seed", "expected a non-negative integer");
    return j.get<std::uint64_t>();
  }

  std::uint64_t samples(std::uint64_t fallback) const {
    if (!doc_.contains("samples")) return fallback;
    const json& j = doc_["samples"];
    if (!j.is_number_unsigned() || j.get<std::uint64_t>() < 2) field_error("samples", "expected an integer >= 2");
    return j.get<std::uint64_t>();
  }

  std::filesystem::path resolve(const std::string& p, const std::string& field) const {
    std::filesystem::path path(p);
    if (path.is_relative()) path = base_ / path;
    if (!std::filesystem::exists(path)) field_error(field, "file " + path.string() + " does not exist");
    return path;
  }

  const json& config() const {
    static const json empty = json::object();
    return doc_.contains("config") ? doc_["config"] : empty;
  }

  PVConfig pv_config(const Execution& exec) const {
    PVConfig c;
    const json& j = config();
    c.shells = j.value("shells", c.shells);
    c.graded_levels = j.value("graded_levels", c.graded_levels);
    c.gauss_nodes = j.value("gauss_nodes", c.gauss_nodes);
    c.azimuth_nodes = j.value("azimuth_nodes", c.azimuth_nodes);
    c.uniform_nodes = j.value("uniform_nodes", c.uniform_nodes);
    c.error_cap = j.value("error_cap", c.error_cap);
    if (c.shells < 1 || c.graded_levels < 1 || c.gauss_nodes < 2 || c.azimuth_nodes < 4)
      field_error("config", "quadrature sizes out of range");
    c.exec = exec;
    return c;
  }

  CurvatureConfig curvature_config(const Execution& exec) const {
    CurvatureConfig c;
    c.pv = pv_config(exec);
    c.boundary_fraction = config().value("boundary_fraction", c.boundary_fraction);
    c.n_directions = config().value("n_directions", c.n_directions);
    return c;
  }

  CovConfig cov_config(const Execution& exec) const {
    CovConfig c;
    const json& j = config();
    c.surface_panels = j.value("surface_panels", c.surface_panels);
    c.angular_panels = j.value("angular_panels", c.angular_panels);
    c.gauss_nodes = j.value("cov_gauss_nodes", c.gauss_nodes);
    c.validation_samples = j.value("validation_samples", c.validation_samples);
    c.exec = exec;
    return c;
  }

  template <int N>
  OrientedSurface<N> surface() const {
    const json& j = require(doc_, "surface", "");
    OrientedSurface<N> s = parse_surface<N>(j);
    const int o = j.value("orientation", 1);
    if (o != 1 && o != -1) field_error("surface.orientation", "must be 1 or -1");
    return o == 1 ? s : s.flipped();
  }

  template <int N>
  SolidSet<N> solid(const json& j, const std::string& field) const {
    const std::string type = require(j, "type", field).get<std::string>();
    if (type == "ball")
      return SolidSet<N>::ball(vec<N>(require(j, "center", field), field + ".center"),
                               positive(require(j, "radius", field), field + ".radius"));
    if (type == "half_space")
      return SolidSet<N>::half_space(vec<N>(require(j, "point", field), field + ".point"),
                                     vec<N>(require(j, "normal", field), field + ".normal").normalized());
    if (type == "box")
      return SolidSet<N>::box(vec<N>(require(j, "lo", field), field + ".lo"),
                              vec<N>(require(j, "hi", field), field + ".hi"));
    if constexpr (N == 3) {
      if (type == "polytope") return SolidSet<3>::polytope(parse_surface<3>(require(j, "surface", field)));
    }
    field_error(field + ".type", "unknown solid type '" + type + "'");
  }

  template <int N>
  Region<N> region(const json& j, const std::string& field) const {
    const std::string type = require(j, "type", field).get<std::string>();
    if (type == "ball")
      return Region<N>::ball(vec<N>(require(j, "center", field), field + ".center"),
                             positive(require(j, "radius", field), field + ".radius"));
    if (type == "box")
      return Region<N>::box(vec<N>(require(j, "lo", field), field + ".lo"),
                            vec<N>(require(j, "hi", field), field + ".hi"));
    field_error(field + ".type", "unknown region type '" + type + "'");
  }

  template <int N>
  std::vector<Vec<N>> points(const std::string& key) const {
    const json& j = require(doc_, key, "");
    if (!j.is_array() || j.empty()) field_error(key, "expected a non-empty array of points");
    std::vector<Vec<N>> out;
    for (const auto& p : j) out.push_back(vec<N>(p, key));
    return out;
  }

 private:
  static double positive(const json& j, const std::string& field) {
    const double v = number(j, field);
    if (!(v > 0.0)) field_error(field, "must be positive");
    return v;
  }

  template <int N>
  OrientedSurface<N> parse_surface(const json& j) const {
    const std::string type = require(j, "type", "surface").get<std::string>();
    if constexpr (N == 2) {
      if (type == "circle")
        return make_circle(vec<2>(require(j, "center", "surface"), "surface.center"),
                           positive(require(j, "radius", "surface"), "surface.radius"));
      if (type == "arc")
        return make_arc(vec<2>(require(j, "center", "surface"), "surface.center"),
                        positive(require(j, "radius", "surface"), "surface.radius"),
                        number(require(j, "angle_start", "surface"), "surface.angle_start"),
                        number(require(j, "angle_end", "surface"), "surface.angle_end"));
      if (type == "polyline") {
        if (j.contains("path")) {
          std::ifstream in(resolve(j["path"].get<std::string>(), "surface.path"));
          return load_polyline(in);
        }
        std::vector<Vec2> v;
        for (const auto& p : require(j, "vertices", "surface")) v.push_back(vec<2>(p, "surface.vertices"));
        return make_polyline(std::move(v), j.value("closed", false));
      }
    } else {
      if (type == "sphere")
        return make_sphere(vec<3>(require(j, "center", "surface"), "surface.center"),
                           positive(require(j, "radius", "surface"), "surface.radius"));
      if (type == "sphere_mesh")
        return make_sphere_mesh(vec<3>(require(j, "center", "surface"), "surface.center"),
                                positive(require(j, "radius", "surface"), "surface.radius"), j.value("level", 3));
      if (type == "mesh") {
        std::ifstream in(resolve(require(j, "path", "surface").get<std::string>(), "surface.path"));
        return load_mesh(in);
      }
    }
    field_error("surface.type", "unknown surface type '" + type + "' for dimension " + std::to_string(N));
  }

  json doc_;
  std::filesystem::path base_;
};

}  // namespace fracsurf::cli
