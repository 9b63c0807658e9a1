#pragma once
// Multi-scale analysis parameter sets and the two scale schedules: the
// forward length/mass recursion L_k = L_{k-1}^gamma,
// m_k = m_{k-1}(1 - 3 L_{k-1}^{-(1-tau)/2})(1 - 250 N^2 L_{k-1}^{1-tau gamma}),
// and the backwards decay-parameter recursion p(n-1) = gamma(p(n)+2nd+2)+1.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mpal/common.hpp"

namespace mpal {

struct MsaParameters {
  double beta = 0.3;
  double tau = 0.8;
  double gamma = 1.5;
  double m = 0.5;  // target inverse localization length

  double tau_tilde() const { return 0.5 * (1.0 + tau); }
};

// Enforces beta < 1/gamma < 1 < gamma < 2, max(gamma beta, 1/gamma) < tau < 1,
// m > 0.
inline void validate_msa_parameters(const MsaParameters& p) {
  if (!(1.0 < p.gamma && p.gamma < 2.0)) {
    throw ConfigError("msa parameters: gamma must lie in (1, 2), got " + format_g17(p.gamma));
  }
  if (!(p.beta > 0.0 && p.beta < 1.0 / p.gamma)) {
    throw ConfigError("msa parameters: beta must lie in (0, 1/gamma), got " + format_g17(p.beta));
  }
  const double tau_lo = std::max(p.gamma * p.beta, 1.0 / p.gamma);
  if (!(p.tau > tau_lo && p.tau < 1.0)) {
    throw ConfigError("msa parameters: tau must lie in (max(gamma beta, 1/gamma), 1), got " +
                      format_g17(p.tau));
  }
  if (!(p.m > 0.0)) {
    throw ConfigError("msa parameters: m must be positive, got " + format_g17(p.m));
  }
}

struct ScaleRow {
  int k = 0;
  double L = 0.0;        // +infinity once the double range is exceeded
  double log10_L = 0.0;  // exact in log space at every k
  double m = 0.0;
  double M = 0.0;  // mass certified by the step leaving scale k; equals m_{k+1}
};

struct ScaleSchedule {
  std::vector<ScaleRow> rows;
  // Limit of m_k for k -> infinity; NaN when the recursion turns non-positive.
  double m_limit = 0.0;
  std::optional<int> first_invalid_scale;

  bool mass_positive() const { return !first_invalid_scale.has_value(); }
};

namespace detail {

// Both mass factors at the scale with natural logarithm ln_L.
inline std::pair<double, double> mass_factors(double ln_L, double tau, double gamma,
                                              int n_particles) {
  const double f1 = 1.0 - 3.0 * std::exp(-0.5 * (1.0 - tau) * ln_L);
  const double f2 =
      1.0 - 250.0 * n_particles * n_particles * std::exp((1.0 - tau * gamma) * ln_L);
  return {f1, f2};
}

}  // namespace detail

// Tabulates the forward recursion starting from m_0 = 2m. The length column
// is carried in log space so large k never overflow. A non-positive mass
// factor is recorded in first_invalid_scale; with strict = true it throws
// instead.
inline ScaleSchedule scale_schedule(double L0, double gamma, double m, int n_particles,
                                    const MsaParameters& params, int k_max, bool strict = false) {
  MsaParameters effective = params;
  effective.gamma = gamma;
  effective.m = m;
  validate_msa_parameters(effective);
  if (!(L0 >= 2.0)) {
    throw UsageError("scale_schedule: L0 must be at least 2, got " + format_g17(L0));
  }
  if (k_max < 0) throw UsageError("scale_schedule: k_max must be nonnegative");

  ScaleSchedule schedule;
  double ln_L = std::log(L0);
  double mass = 2.0 * m;
  for (int k = 0; k <= k_max; ++k) {
    const auto [f1, f2] = detail::mass_factors(ln_L, params.tau, gamma, n_particles);
    ScaleRow row;
    row.k = k;
    row.log10_L = ln_L / std::log(10.0);
    row.L = std::exp(ln_L);
    row.m = mass;
    row.M = mass * f1 * f2;
    schedule.rows.push_back(row);

    if ((f1 <= 0.0 || f2 <= 0.0 || row.M <= 0.0) && !schedule.first_invalid_scale) {
      schedule.first_invalid_scale = k + 1;
      if (strict) {
        throw ConfigError("scale_schedule: mass factor non-positive entering scale " +
                          std::to_string(k + 1));
      }
    }
    mass = row.M;
    ln_L *= gamma;
  }

  if (schedule.first_invalid_scale) {
    schedule.m_limit = std::numeric_limits<double>::quiet_NaN();
  } else {
    // The factors increase towards 1 with the scale, so the tail product
    // converges after a handful of terms.
    double tail_mass = mass;
    for (int j = 0; j < 500; ++j) {
      const auto [f1, f2] = detail::mass_factors(ln_L, params.tau, gamma, n_particles);
      if (f1 == 1.0 && f2 == 1.0) break;
      tail_mass *= f1 * f2;
      ln_L *= gamma;
    }
    schedule.m_limit = tail_mass;
  }
  return schedule;
}

struct DecaySchedule {
  std::vector<double> p;  // p[n-1] = p(n) for n = 1..N
  double p_star = 0.0;
  // The induction theorem's seed hypothesis (2/gamma - 1)^{-1}(4Nd+2) <= p(N).
  bool seed_hypothesis_met = false;
  // Chain inequality p(n) <= (p(n-1) - 1)/gamma - 2nd - 2 for n = 2..N.
  bool chain_ok = false;
  bool p_star_bound_ok = false;  // max_n p(n) <= p_star / 2
};

// Backwards recursion from the N-free seed p(N) = max(p, (2/gamma-1)^{-1}(4d+2)).
inline DecaySchedule decay_parameter_schedule(double p, int n_particles, double gamma, int d = 1) {
  if (!(1.0 < gamma && gamma < 2.0)) {
    throw UsageError("decay_parameter_schedule: gamma must lie in (1, 2), got " +
                     format_g17(gamma));
  }
  if (n_particles < 1) throw UsageError("decay_parameter_schedule: N must be positive");
  if (d < 1) throw UsageError("decay_parameter_schedule: d must be positive");

  // (2/gamma - 1)^{-1}, written as gamma/(2 - gamma) so representable gammas
  // give exact seeds (the acceptance chain is compared exactly).
  const double seed_coeff = gamma / (2.0 - gamma);
  DecaySchedule out;
  out.p.assign(n_particles, 0.0);
  out.p[n_particles - 1] = std::max(p, seed_coeff * (4.0 * d + 2.0));
  for (int n = n_particles; n >= 2; --n) {
    out.p[n - 2] = gamma * (out.p[n - 1] + 2.0 * n * d + 2.0) + 1.0;
  }

  out.seed_hypothesis_met =
      seed_coeff * (4.0 * n_particles * d + 2.0) <= out.p[n_particles - 1];
  out.chain_ok = true;
  for (int n = 2; n <= n_particles; ++n) {
    const double bound = (out.p[n - 2] - 1.0) / gamma - 2.0 * n * d - 2.0;
    if (out.p[n - 1] > bound + 1e-12) out.chain_ok = false;
  }

  double max_p = 0.0;
  for (double v : out.p) max_p = std::max(max_p, v);
  out.p_star = 40.0 * std::max(1.0 / (gamma - 1.0), seed_coeff) * std::pow(gamma, n_particles) *
               std::max(p, static_cast<double>(n_particles * d));
  out.p_star_bound_ok = max_p <= out.p_star / 2.0;
  return out;
}

}  // namespace mpal
