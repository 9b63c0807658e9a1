#pragma once
// Single-site disorder laws and reproducible disorder realizations.
//
// Site values are drawn in counter mode: the value at site u depends only on
// (seed, u), so restricting or enlarging the sampled site set never changes
// values at sites already present.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mpal/common.hpp"
#include "mpal/rng.hpp"

namespace mpal {

// Single-site density on [0, v_max]: either uniform or a piecewise-linear
// density given by knots and density values (normalized internally).
struct Distribution {
  enum class Kind { Uniform, PiecewiseLinear };

  Kind kind = Kind::Uniform;
  double v_max = 1.0;
  std::vector<double> knots;        // increasing, first 0, last v_max
  std::vector<double> densities;    // nonnegative raw values at the knots
  bool smooth_hint = false;         // descriptor-level claim, never exploited

  static Distribution uniform(double v_max) {
    if (!(v_max > 0.0)) throw ConfigError("distribution: v_max must be positive");
    Distribution d;
    d.kind = Kind::Uniform;
    d.v_max = v_max;
    return d;
  }

  static Distribution piecewise_linear(double v_max, std::vector<double> knots,
                                       std::vector<double> densities,
                                       bool smooth_hint = false) {
    if (!(v_max > 0.0)) throw ConfigError("distribution: v_max must be positive");
    if (knots.size() < 2 || knots.size() != densities.size()) {
      throw ConfigError("distribution: need matching knot/density lists of length >= 2");
    }
    if (knots.front() != 0.0 || knots.back() != v_max) {
      throw ConfigError("distribution: knots must start at 0 and end at v_max");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
      if (!(knots[i] > knots[i - 1])) throw ConfigError("distribution: knots must be increasing");
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      if (densities[i] < 0.0 || densities[i + 1] < 0.0) {
        throw ConfigError("distribution: densities must be nonnegative");
      }
      total += 0.5 * (densities[i] + densities[i + 1]) * (knots[i + 1] - knots[i]);
    }
    if (!(total > 0.0)) throw ConfigError("distribution: density integrates to zero");
    Distribution d;
    d.kind = Kind::PiecewiseLinear;
    d.v_max = v_max;
    d.knots = std::move(knots);
    d.densities = std::move(densities);
    d.smooth_hint = smooth_hint;
    for (double& v : d.densities) v /= total;
    return d;
  }

  // Supremum of the normalized density.
  double sup_density() const {
    if (kind == Kind::Uniform) return 1.0 / v_max;
    double m = 0.0;
    for (double v : densities) m = std::max(m, v);
    return m;
  }

  double min_density() const {
    if (kind == Kind::Uniform) return 1.0 / v_max;
    double m = kInfinity;
    for (double v : densities) m = std::min(m, v);
    return m;
  }

  // Assumption flags for the single-site law: compact support in [0, v_max]
  // holds by construction; strict positivity and smoothness are reported, not
  // enforced.
  bool strictly_positive() const { return min_density() > 0.0; }

  // Inverse CDF at u in [0, 1).
  double sample(double u) const {
    if (kind == Kind::Uniform) return u * v_max;
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const double t0 = knots[i];
      const double t1 = knots[i + 1];
      const double r0 = densities[i];
      const double r1 = densities[i + 1];
      const double seg = 0.5 * (r0 + r1) * (t1 - t0);
      if (u <= cum + seg || i + 2 == knots.size()) {
        const double target = u - cum;
        const double slope = (r1 - r0) / (t1 - t0);
        double t;
        if (std::abs(slope) < 1e-300) {
          t = r0 > 0.0 ? t0 + target / r0 : t0;
        } else {
          // Solve r0 s + slope s^2 / 2 = target for the offset s >= 0.
          const double disc = r0 * r0 + 2.0 * slope * target;
          t = t0 + (std::sqrt(std::max(0.0, disc)) - r0) / slope;
        }
        return std::min(std::max(t, t0), t1);
      }
      cum += seg;
    }
    return v_max;
  }
};

struct DisorderRealization {
  std::uint64_t seed = 0;
  Distribution distribution;
  std::map<int, double> site_values;

  double at(int site) const {
    auto it = site_values.find(site);
    if (it == site_values.end()) {
      throw UsageError("DisorderRealization: site " + std::to_string(site) + " was not sampled");
    }
    return it->second;
  }

  bool covers(const std::vector<int>& sites) const {
    for (int s : sites) {
      if (site_values.find(s) == site_values.end()) return false;
    }
    return true;
  }
};

// Per-site draw used both by bulk sampling and by incremental extension.
inline double disorder_value_at(std::uint64_t seed, int site, const Distribution& dist) {
  return dist.sample(rng::site_unit(seed, site));
}

inline DisorderRealization sample_disorder(std::uint64_t seed, const std::vector<int>& sites,
                                           const Distribution& dist) {
  DisorderRealization real;
  real.seed = seed;
  real.distribution = dist;
  for (int s : sites) real.site_values[s] = disorder_value_at(seed, s, dist);
  return real;
}

}  // namespace mpal
