#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fracsurf/execution.hpp"
#include "fracsurf/kernel.hpp"

namespace fracsurf {

/// Result record shared by the Monte-Carlo functionals.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  double bias_bound = 0.0;
  std::uint64_t sample_count = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kChunkSize = 4096;

/// Mean and standard error of f over n draws. Draws are grouped in fixed
/// chunks, chunk c using Rng(seed, stream * 2^32 + c), and chunk sums are
/// reduced in chunk order, so the result does not depend on the worker count.
/// `f` returns nullopt for a degenerate draw, which is redrawn.
template <class F>
Estimate mc_mean(std::uint64_t n, std::uint64_t seed, std::uint64_t stream, const Execution& exec, F&& f) {
  if (n < 2) throw ValidationError("sample count must be at least 2");
  const std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<double> sums(chunks), squares(chunks);
  parallel_for(chunks, exec, [&](std::size_t c) {
    Rng rng(seed, (stream << 32) + c);
    const std::uint64_t begin = c * kChunkSize;
    const std::uint64_t end = std::min(n, begin + kChunkSize);
    std::vector<double> vals;
    vals.reserve(end - begin);
    for (std::uint64_t i = begin; i < end; ++i) {
      int tries = 0;
      for (;;) {
        const std::optional<double> v = f(rng);
        if (v) {
          vals.push_back(*v);
          break;
        }
        if (++tries > 1000) throw ConvergenceError("too many consecutive degenerate samples");
      }
    }
    double s = ordered_sum(vals);
    for (auto& v : vals) v *= v;
    sums[c] = s;
    squares[c] = ordered_sum(vals);
  });
  const double total = ordered_sum(sums);
  const double total_sq = ordered_sum(squares);
  const double mean = total / static_cast<double>(n);
  const double var = std::max(0.0, (total_sq - total * mean) / static_cast<double>(n - 1));
  Estimate e;
  e.value = mean;
  e.std_error = std::sqrt(var / static_cast<double>(n));
  e.sample_count = n;
  e.seed = seed;
  return e;
}

/// Uniform unit vector in R^N.
template <int N>
Vec<N> random_direction(Rng& rng) {
  if constexpr (N == 2) {
    const double a = 2.0 * kPi * rng.uniform();
    return Vec2(std::cos(a), std::sin(a));
  } else {
    const double z = 2.0 * rng.uniform() - 1.0;
    const double a = 2.0 * kPi * rng.uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec3(r * std::cos(a), r * std::sin(a), z);
  }
}

template <int N>
struct PairSample {
  Vec<N> x;
  Vec<N> y;
  double density = 0.0;
};

/// Importance-sampled double integral: mean of weight * integrand / density.
/// `integrand` returns nullopt for degenerate pairs, which are redrawn.
template <int N, class Sampler, class Weight, class Integrand>
Estimate mc_pair_integral(Sampler&& sampler, Weight&& weight, Integrand&& integrand, std::uint64_t n,
                          std::uint64_t seed, const Execution& exec = {}, std::uint64_t stream = 0) {
  return mc_mean(n, seed, stream, exec, [&](Rng& rng) -> std::optional<double> {
    const PairSample<N> p = sampler(rng);
    if (!(p.density > 0.0)) throw ValidationError("pair sampler produced a zero-density sample");
    const double w = weight(p);
    if (w == 0.0) return 0.0;
    const std::optional<double> v = integrand(p);
    if (!v) return std::nullopt;
    return w * *v / p.density;
  });
}

/// x uniform in an axis-aligned box; y = x + r u with u uniform and r drawn
/// with density proportional to r^(-1-2s) on [r_min, r_max], so that the pair
/// density is proportional to |x - y|^(-n-2s).
template <int N>
class RadialPairSampler {
 public:
  RadialPairSampler(const Vec<N>& lo, const Vec<N>& hi, double s, double r_min, double r_max)
      : lo_(lo), hi_(hi), s_(s), r_min_(r_min), r_max_(r_max) {
    if (!(r_min > 0.0 && r_max > r_min)) throw ValidationError("radial sampler needs 0 < r_min < r_max");
    a_ = std::pow(r_min, -2.0 * s);
    b_ = std::pow(r_max, -2.0 * s);
    norm_ = (a_ - b_) / (2.0 * s);
    volume_ = (hi - lo).prod();
  }

  PairSample<N> operator()(Rng& rng) const {
    Vec<N> x;
    for (int k = 0; k < N; ++k) x[k] = lo_[k] + (hi_[k] - lo_[k]) * rng.uniform();
    const double r = std::pow(a_ - rng.uniform() * (a_ - b_), -1.0 / (2.0 * s_));
    const Vec<N> y = x + r * random_direction<N>(rng);
    return {x, y, density(r)};
  }

  double density(double r) const {
    return std::pow(r, -1.0 - 2.0 * s_) / norm_ / (unit_sphere_measure(N - 1) * std::pow(r, N - 1)) / volume_;
  }

  /// kappa-mass of the pairs closer than r_min that straddle a flat interface
  /// of the given measure: interface * r_min^(1-2s) / (1-2s).
  double truncation_bias(double interface_measure) const {
    return interface_measure * std::pow(r_min_, 1.0 - 2.0 * s_) / (1.0 - 2.0 * s_);
  }

 private:
  Vec<N> lo_, hi_;
  double s_, r_min_, r_max_;
  double a_ = 0, b_ = 0, norm_ = 0, volume_ = 0;
};

}  // namespace fracsurf
