#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fracsurf {

struct Extrapolated {
  double value = 0.0;
  double error = 0.0;
};

/// Richardson extrapolation of partial sums S_k taken at eps_k = eps_0 r^-k
/// (r = `ratio`), assuming S_k = S + sum_j c_j eps_k^p_j. Uses the last
/// exponents.size() + 1 entries. The error is the magnitude of the last
/// correction applied.
inline Extrapolated richardson(const std::vector<double>& partial, const std::vector<double>& exponents,
                               double ratio = 2.0) {
  if (partial.empty()) throw std::invalid_argument("richardson: no values");
  const std::size_t depth = std::min(exponents.size(), partial.size() - 1);
  std::vector<double> t(partial.end() - static_cast<long>(depth + 1), partial.end());
  double correction = depth == 0 ? 0.0 : std::abs(t[depth] - t[depth - 1]);
  for (std::size_t j = 0; j < depth; ++j) {
    const double f = std::pow(ratio, exponents[j]) - 1.0;
    for (std::size_t k = depth; k > j; --k) {
      const double step = (t[k] - t[k - 1]) / f;
      t[k] += step;
      if (k == depth) correction = std::abs(step);
    }
  }
  return {t[depth], correction};
}

/// Lagrange weights for evaluating the interpolating polynomial at x0.
inline std::vector<double> lagrange_weights(const std::vector<double>& x, double x0) {
  std::vector<double> l(x.size(), 1.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (j != i) l[i] *= (x0 - x[j]) / (x[i] - x[j]);
  return l;
}

/// Polynomial extrapolation of y(x) to x = 0 through all points. The error
/// combines the change from dropping the point farthest from 0 (model error)
/// with the propagated statistical errors sigma (may be empty).
inline Extrapolated extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y,
                                        const std::vector<double>& sigma = {}) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("extrapolate_to_zero: need >= 2 points");
  const auto l = lagrange_weights(x, 0.0);
  double value = 0.0, var = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    value += l[i] * y[i];
    if (!sigma.empty()) var += (l[i] * sigma[i]) * (l[i] * sigma[i]);
  }
  std::size_t far = 0;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs(x[i]) > std::abs(x[far])) far = i;
  std::vector<double> xr, yr;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (i != far) {
      xr.push_back(x[i]);
      yr.push_back(y[i]);
    }
  double reduced = 0.0;
  const auto lr = lagrange_weights(xr, 0.0);
  for (std::size_t i = 0; i < xr.size(); ++i) reduced += lr[i] * yr[i];
  return {value, std::abs(value - reduced) + std::sqrt(var)};
}

}  // namespace fracsurf
