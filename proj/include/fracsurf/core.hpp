#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fracsurf {

inline constexpr const char* kVersion = "0.3.0";

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;
using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Volume of the unit ball in R^d (alpha_1 = 2, alpha_2 = pi).
constexpr double unit_ball_volume(int d) {
  switch (d) {
    case 0: return 1.0;
    case 1: return 2.0;
    case 2: return kPi;
    case 3: return 4.0 * kPi / 3.0;
    default: throw std::invalid_argument("unit_ball_volume: unsupported dimension");
  }
}

/// Hausdorff measure of the unit d-sphere (omega_0 = 2, omega_1 = 2 pi, omega_2 = 4 pi).
constexpr double unit_sphere_measure(int d) {
  switch (d) {
    case 0: return 2.0;
    case 1: return 2.0 * kPi;
    case 2: return 4.0 * kPi;
    default: throw std::invalid_argument("unit_sphere_measure: unsupported dimension");
  }
}

// Error hierarchy. The CLI maps ValidationError to exit code 2 and
// ConvergenceError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, int line)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Sign of x as +1/-1; zero maps to +1.
inline int sign_of(double x) { return std::signbit(x) ? -1 : 1; }

/// Unit vector orthogonal to n (n unit), chosen deterministically from n alone.
template <int N>
Vec<N> any_orthogonal(const Vec<N>& n) {
  if constexpr (N == 2) {
    return Vec2(-n.y(), n.x());
  } else {
    // Branchless-stable frame (Duff et al. 2017).
    const double sgn = std::copysign(1.0, n.z());
    const double a = -1.0 / (sgn + n.z());
    const double b = n.x() * n.y() * a;
    return Vec3(1.0 + sgn * n.x() * n.x() * a, sgn * b, -sgn * n.x()).normalized();
  }
}

}  // namespace fracsurf
