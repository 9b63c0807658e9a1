#pragma once
// Per-realization induction machinery: the good event at one scale, the
// boundary-hopping walk that certifies eigenvector decay, the initial-scale
// criterion, and the per-seed driver that composes them with the decay
// verifiers.
//
// The modified cover splits Lambda_L around a bad center b into good cubes
// (cover cubes at symmetrized distance >= 8 N ell from b) and the buffer
// Upsilon = Lambda_{10 N ell}(b) intersected with the big cube. A walk step
// from a good-cube core hops to the cube's exterior boundary at rate
// e^{-m' d}; a step from inside the buffer hops to the guard boundary at the
// buffered rate e^{-(m'/2) ell}. Every claimed inequality is re-verified on
// the computed eigenvector with an explicit numerical allowance.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mpal/common.hpp"
#include "mpal/disorder.hpp"
#include "mpal/hamiltonian.hpp"
#include "mpal/interactivity.hpp"
#include "mpal/lattice.hpp"
#include "mpal/lemmas.hpp"
#include "mpal/localization.hpp"
#include "mpal/rng.hpp"
#include "mpal/schedules.hpp"
#include "mpal/spectral.hpp"

namespace mpal {

// l1 distance between orbits: sorting both tuples minimizes the sum of
// coordinate gaps over all pairings.
inline int l1_orbit_distance(const Config& x, const Config& y) {
  if (x.size() != y.size()) {
    throw UsageError("l1_orbit_distance: dimension mismatch");
  }
  const Config a = rearrange(x);
  const Config b = rearrange(y);
  int d = 0;
  for (std::size_t j = 0; j < a.size(); ++j) d += std::abs(a[j] - b[j]);
  return d;
}

// ---------- cover blocks ----------

// Restrictions of the operator to every cover cube, aligned with
// cover.centers.
struct CoverBlocks {
  std::vector<AssembledHamiltonian> h;
  std::vector<Eigensystem> es;
};

inline CoverBlocks assemble_cover_blocks(const Cover& cover,
                                         const DisorderRealization& realization, double lambda,
                                         const InteractionPotential& interaction,
                                         std::size_t cap = kDefaultDenseCap) {
  CoverBlocks blocks;
  blocks.h.reserve(cover.centers.size());
  blocks.es.reserve(cover.centers.size());
  for (const Config& a : cover.centers) {
    blocks.h.push_back(
        assemble(enumerate_cube(cover_cube(cover, a)), realization, lambda, interaction, cap));
    blocks.es.push_back(eigensystem(blocks.h.back()));
  }
  return blocks;
}

inline std::vector<CubeCertificate> certify_cover(const Cover& cover, const CoverBlocks& blocks,
                                                  const MsaParameters& params, double m) {
  validate_msa_parameters(params);
  if (blocks.h.size() != cover.centers.size() || blocks.es.size() != cover.centers.size()) {
    throw UsageError("certify_cover: blocks are not aligned with the cover centers");
  }
  std::vector<CubeCertificate> certificates;
  certificates.reserve(cover.centers.size());
  for (std::size_t i = 0; i < cover.centers.size(); ++i) {
    certificates.push_back(
        certify_cube(blocks.es[i], blocks.h[i], m, cover.small_half_width, params.tau));
  }
  return certificates;
}

// The induction step centers its buffer on a cube that failed certification;
// when every cube certified, any choice is valid and the first center keeps
// the selection deterministic.
inline Config choose_bad_center(const Cover& cover,
                                const std::vector<CubeCertificate>& certificates) {
  if (certificates.size() != cover.centers.size()) {
    throw UsageError("choose_bad_center: certificates are not aligned with the cover centers");
  }
  for (std::size_t i = 0; i < certificates.size(); ++i) {
    if (!certificates[i].pass) return cover.centers[i];
  }
  return cover.centers.front();
}

// ---------- the good event ----------

struct SeparationFailure {
  Config a1;
  Config a2;
  bool buffered1 = false;  // block was Lambda_{10 N ell}(a1) within the big cube
  bool buffered2 = false;
  double distance = 0.0;
  double threshold = 0.0;
};

struct EventReport {
  bool e_pi = true;  // every partially interactive cover cube is m-localizing
  bool e_fi = true;  // far fully interactive pairs have a localizing member
  bool e_nr = true;  // far pairs are spectrally separated in all four combos
  std::vector<Config> failed_pi;
  std::vector<std::pair<Config, Config>> failed_fi;
  std::vector<SeparationFailure> failed_nr;

  bool good() const { return e_pi && e_fi && e_nr; }
};

// Evaluates the three clauses of the good event on one realization. E_FI
// ranges over fully interactive pairs at distance >= 8 N ell, E_NR over all
// pairs at distance >= 200 N^2 ell, each in the four combinations of the
// small cube and its buffered enlargement; separation means spectral
// distance >= (1/2) e^{-L^beta}.
inline EventReport evaluate_events(const Cover& cover, const CoverBlocks& blocks,
                                   const std::vector<CubeCertificate>& certificates,
                                   const DisorderRealization& realization, double lambda,
                                   const InteractionPotential& interaction,
                                   const MsaParameters& params,
                                   std::size_t cap = kDefaultDenseCap) {
  validate_msa_parameters(params);
  const std::size_t count = cover.centers.size();
  if (blocks.h.size() != count || blocks.es.size() != count || certificates.size() != count) {
    throw UsageError("evaluate_events: blocks or certificates are not aligned with the cover");
  }
  const int n = cover.big.particles();
  const double ell = cover.small_half_width;

  EventReport report;
  std::vector<bool> partial(count);
  for (std::size_t i = 0; i < count; ++i) {
    partial[i] = classify_cube(cover.centers[i], ell, interaction).partially_interactive();
    if (partial[i] && !certificates[i].pass) {
      report.e_pi = false;
      report.failed_pi.push_back(cover.centers[i]);
    }
  }

  const double threshold = separation_threshold(cover.big.half_width, params.beta);
  std::unordered_map<std::size_t, Eigensystem> buffered_cache;
  auto buffered_spectrum = [&](std::size_t i) -> const Eigensystem& {
    auto it = buffered_cache.find(i);
    if (it == buffered_cache.end()) {
      const SymmetricSet block =
          cube_intersection(make_cube(cover.centers[i], 10.0 * n * ell), cover.big_set);
      it = buffered_cache
               .emplace(i, eigensystem(assemble(block, realization, lambda, interaction, cap)))
               .first;
    }
    return it->second;
  };

  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const double d = sym_distance(cover.centers[i], cover.centers[j]);
      if (!partial[i] && !partial[j] && d >= 8.0 * n * ell && !certificates[i].pass &&
          !certificates[j].pass) {
        report.e_fi = false;
        report.failed_fi.emplace_back(cover.centers[i], cover.centers[j]);
      }
      if (d >= 200.0 * n * n * ell) {
        for (int combo = 0; combo < 4; ++combo) {
          const bool b1 = (combo & 2) != 0;
          const bool b2 = (combo & 1) != 0;
          const Eigensystem& s1 = b1 ? buffered_spectrum(i) : blocks.es[i];
          const Eigensystem& s2 = b2 ? buffered_spectrum(j) : blocks.es[j];
          const double distance = spectral_distance(s1, s2);
          if (distance < threshold) {
            report.e_nr = false;
            report.failed_nr.push_back(
                {cover.centers[i], cover.centers[j], b1, b2, distance, threshold});
          }
        }
      }
    }
  }
  return report;
}

// ---------- the induction walk ----------

struct MassStep {
  double value = 0.0;
  bool valid = false;  // both mass factors positive
};

// Decay mass claimed by one induction step at scale ell. The claim carries
// substance only when both mass factors are positive, which needs ell far
// beyond any dense-solver scale; below that the product of two negative
// factors is a positive number with no meaning, so valid gates its use.
inline MassStep iteration_mass(double m, double ell, int n_particles,
                               const MsaParameters& params) {
  const auto [f1, f2] =
      detail::mass_factors(std::log(ell), params.tau, params.gamma, n_particles);
  return {m * f1 * f2, f1 > 0.0 && f2 > 0.0};
}

enum class StepKind { good, bad };

struct IterationStep {
  Config y;
  StepKind kind = StepKind::good;
  double gain = 1.0;       // e^{-m' d} for good steps, e^{-(m'/2) ell} for bad
  int distance = 0;        // d_S(y, next point)
  double value = 0.0;      // |psi(y)|
  double allowance = 0.0;  // additive numerical slack of this step's bound
  double buffer_distance = -1.0;  // bad steps: d_S(next point, Upsilon)
  bool overlap = false;           // y lay in the core of several good cubes
  bool ok = false;                // |psi(y)| <= gain |psi(next)| + allowance
};

struct IterationTrace {
  bool applicable = false;
  std::string reason;  // first unmet precondition when not applicable
  Config y0;
  std::vector<IterationStep> steps;
  Config y_final;
  Config x_mu;  // maximal-|psi| configuration of the resonant region, sorted
  Config theta_mu_center;
  bool theta_mu_is_upsilon = false;
  double resonance = kInfinity;  // dist(mu, sigma(Theta_mu))
  double stop_distance = 0.0;
  double m_prime = 0.0;
  double M = 0.0;
  bool m_applicable = false;  // mass valid and d_S(y0, x_mu) >= L^tau
  double product_gain = 1.0;
  double chain_allowance = 0.0;
  double chain_lhs = 0.0;  // |psi(y0)|
  double chain_rhs = 0.0;  // product_gain |psi(y_final)| + chain_allowance
  double sum_good_distance = 0.0;
  bool pass = false;
};

// A walk longer than the configuration space cannot terminate; the partial
// trace rides along for diagnosis.
struct IterationDivergence : NumericalError {
  IterationTrace trace;

  explicit IterationDivergence(IterationTrace t)
      : NumericalError("run_iteration: walk did not terminate within " +
                       std::to_string(t.steps.size()) + " steps from " +
                       config_to_string(t.y0)),
        trace(std::move(t)) {}
};

// Runs the decay walk for one computed eigenpair (psi, mu) of the big cube.
// The resonant region Theta_mu is the member of {good cubes} union {Upsilon}
// whose spectrum is closest to mu; none within the separation threshold
// renders the trace not applicable. From y0 the walk hops along boundaries,
// multiplying the per-step gains, until it comes within stop_distance of
// x_mu (defaults to 200 N^2 ell). A negative psi_residual is computed on
// demand. Good steps need their cube certified and non-resonant; bad steps
// need the buffered-decay lemma applicable; either failure yields a
// not-applicable trace. A walk exceeding the configuration count throws
// IterationDivergence.
inline IterationTrace run_iteration(const Eigen::VectorXd& psi, double mu, const Config& y0,
                                    const AssembledHamiltonian& h_big, const Cover& cover,
                                    const CoverBlocks& blocks,
                                    const std::vector<CubeCertificate>& certificates,
                                    const BufferedCube& buffered, const BufferedBlocks& bblocks,
                                    const MsaParameters& params, double m,
                                    double stop_distance = -1.0, double psi_residual = -1.0) {
  validate_msa_parameters(params);
  if (psi.size() != h_big.dimension()) {
    throw UsageError("run_iteration: psi length does not match the big-cube index");
  }
  if (h_big.lookup(y0) < 0) {
    throw UsageError("run_iteration: y0 " + config_to_string(y0) + " is not in the big cube");
  }
  const std::size_t count = cover.centers.size();
  if (blocks.h.size() != count || blocks.es.size() != count || certificates.size() != count) {
    throw UsageError("run_iteration: blocks or certificates are not aligned with the cover");
  }
  if (bblocks.h_guards.size() != buffered.guards.size() ||
      bblocks.es_guards.size() != buffered.guards.size()) {
    throw UsageError("run_iteration: buffered blocks are not aligned with the guard centers");
  }
  if (buffered.big_center != cover.big.center ||
      buffered.big_half_width != cover.big.half_width || buffered.ell != cover.small_half_width) {
    throw UsageError("run_iteration: buffered geometry does not match the cover");
  }

  const int n = cover.big.particles();
  const double ell = cover.small_half_width;
  const double big_l = cover.big.half_width;

  IterationTrace trace;
  trace.y0 = y0;
  trace.stop_distance = stop_distance < 0.0 ? 200.0 * n * n * ell : stop_distance;
  trace.m_prime = decay_rate_step(m, ell, params.tau);
  const MassStep mass = iteration_mass(m, ell, n, params);
  trace.M = mass.value;

  std::vector<std::size_t> good;
  for (std::size_t i = 0; i < count; ++i) {
    if (sym_distance(cover.centers[i], buffered.b) >= 8.0 * n * ell) good.push_back(i);
  }

  const double threshold = separation_threshold(big_l, params.beta);
  double best = kInfinity;
  std::size_t best_index = 0;
  bool best_upsilon = false;
  for (std::size_t i : good) {
    const double d = detail::distance_to_spectrum(mu, blocks.es[i].eigenvalues);
    if (d < best) {
      best = d;
      best_index = i;
    }
  }
  {
    const double d = detail::distance_to_spectrum(mu, bblocks.es_upsilon.eigenvalues);
    if (d < best) {
      best = d;
      best_upsilon = true;
    }
  }
  trace.resonance = best;
  if (!(best < threshold)) {
    trace.reason =
        "no member of the modified cover is resonant with mu (closest spectral distance " +
        format_g17(best) + ", threshold " + format_g17(threshold) + ")";
    return trace;
  }
  const std::vector<Config>& theta_mu =
      best_upsilon ? bblocks.h_upsilon.index : blocks.h[best_index].index;
  trace.theta_mu_is_upsilon = best_upsilon;
  trace.theta_mu_center = best_upsilon ? buffered.b : cover.centers[best_index];
  // The index is lex ordered, so keeping strict maxima makes x_mu the
  // canonical representative of the peak.
  {
    double peak = -1.0;
    for (const Config& c : theta_mu) {
      const double v = std::abs(psi[h_big.lookup(c)]);
      if (v > peak) {
        peak = v;
        trace.x_mu = c;
      }
    }
    trace.x_mu = rearrange(trace.x_mu);
  }

  auto residual = [&]() {
    if (psi_residual < 0.0) psi_residual = detail::residual_norm(h_big, psi, mu);
    return psi_residual;
  };

  struct GoodCube {
    bool ready = false;
    double gap = 0.0;
    SymmetricSet core;
    std::vector<Config> exterior;  // lex ordered
  };
  std::unordered_map<std::size_t, GoodCube> good_data;
  auto good_cube = [&](std::size_t i) -> GoodCube& {
    GoodCube& g = good_data[i];
    if (!g.ready) {
      g.ready = true;
      g.gap = detail::distance_to_spectrum(mu, blocks.es[i].eigenvalues);
      g.core = cover_core(cover, cover.centers[i]);
      g.exterior = boundary(blocks.h[i].theta, h_big.theta).exterior.expand();
    }
    return g;
  };

  bool bad_ready = false;
  BufferedDecayReport bad_report;
  Config bad_landing;
  auto prepare_bad = [&]() {
    if (bad_ready) return;
    bad_ready = true;
    bad_report =
        verify_buffered_decay(psi, mu, buffered, h_big, bblocks, params, m, nullptr, residual());
    if (!bad_report.applicable) return;
    std::vector<Config> landing_zone;
    for (const AssembledHamiltonian& guard : bblocks.h_guards) {
      const std::vector<Config> ext = boundary(guard.theta, h_big.theta).exterior.expand();
      landing_zone.insert(landing_zone.end(), ext.begin(), ext.end());
    }
    std::sort(landing_zone.begin(), landing_zone.end());
    landing_zone.erase(std::unique(landing_zone.begin(), landing_zone.end()),
                       landing_zone.end());
    double peak = -1.0;
    for (const Config& v : landing_zone) {
      const double value = std::abs(psi[h_big.lookup(v)]);
      if (value > peak) {
        peak = value;
        bad_landing = v;
      }
    }
  };

  const std::size_t max_steps = h_big.theta.size();
  Config y = y0;
  while (sym_distance(y, trace.x_mu) >= trace.stop_distance) {
    IterationStep step;
    step.y = y;
    step.value = std::abs(psi[h_big.lookup(y)]);
    const Config y_rep = rearrange(y);
    const Config canonical = truncation_center(y_rep, cover.big.center, big_l, ell);

    std::size_t chosen = count;
    int containing = 0;
    for (std::size_t i : good) {
      if (!good_cube(i).core.contains_rep(y_rep)) continue;
      ++containing;
      if (chosen == count || cover.centers[i] == canonical) chosen = i;
    }
    step.overlap = containing > 1;

    Config next;
    if (chosen != count) {
      const GoodCube& g = good_cube(chosen);
      if (!certificates[chosen].pass) {
        trace.reason = "good cube " + config_to_string(cover.centers[chosen]) +
                       " is not m-localizing";
        return trace;
      }
      if (g.gap < threshold) {
        trace.reason = "good cube " + config_to_string(cover.centers[chosen]) +
                       " is resonant with mu (gap " + format_g17(g.gap) + ", threshold " +
                       format_g17(threshold) + ")";
        return trace;
      }
      step.kind = StepKind::good;
      double best_weight = -1.0;
      for (const Config& v : g.exterior) {
        const double w =
            std::exp(-trace.m_prime * sym_distance(y, v)) * std::abs(psi[h_big.lookup(v)]);
        if (w > best_weight) {
          best_weight = w;
          next = v;
        }
      }
      step.distance = sym_distance(y, next);
      if (step.distance < ell) {
        throw InternalError("run_iteration: good step of length " +
                            std::to_string(step.distance) + " from core point " +
                            config_to_string(y));
      }
      step.gain = std::exp(-trace.m_prime * step.distance);
      step.allowance = std::sqrt(static_cast<double>(blocks.h[chosen].dimension())) *
                       (residual() + blocks.es[chosen].max_residual) / g.gap;
      trace.sum_good_distance += step.distance;
    } else {
      // Not in any good core: the covering theorem puts y inside the buffer.
      if (!buffered.upsilon.contains_rep(y_rep)) {
        throw InternalError("run_iteration: point " + config_to_string(y) +
                            " escapes both the good cores and Upsilon");
      }
      prepare_bad();
      if (!bad_report.applicable) {
        trace.reason = "buffered step: " + bad_report.reason;
        return trace;
      }
      step.kind = StepKind::bad;
      next = bad_landing;
      step.distance = sym_distance(y, next);
      step.gain = bad_report.gain;
      step.allowance = bad_report.allowance;
      step.buffer_distance = distance_to_set(next, buffered.upsilon);
      if (step.buffer_distance > 2.0 * n * ell + ell + 1.0) {
        throw InternalError("run_iteration: bad step landed " +
                            format_g17(step.buffer_distance) + " outside Upsilon at " +
                            config_to_string(next));
      }
    }

    step.ok = step.value <= step.gain * std::abs(psi[h_big.lookup(next)]) + step.allowance;
    trace.chain_allowance += trace.product_gain * step.allowance;
    trace.product_gain *= step.gain;
    trace.steps.push_back(std::move(step));
    y = next;
    if (trace.steps.size() > max_steps) {
      trace.y_final = y;
      throw IterationDivergence(std::move(trace));
    }
  }

  trace.applicable = true;
  trace.y_final = y;
  trace.chain_lhs = std::abs(psi[h_big.lookup(y0)]);
  trace.chain_rhs =
      trace.product_gain * std::abs(psi[h_big.lookup(y)]) + trace.chain_allowance;
  bool all_ok = true;
  for (const IterationStep& step : trace.steps) all_ok = all_ok && step.ok;
  const double d0 = sym_distance(y0, trace.x_mu);
  trace.m_applicable = mass.valid && d0 >= std::pow(big_l, params.tau);
  bool mass_ok = true;
  if (trace.m_applicable) {
    mass_ok = trace.chain_lhs <= std::exp(-trace.M * d0) + trace.chain_allowance;
  }
  trace.pass = all_ok && mass_ok;
  return trace;
}

// ---------- initial scale ----------

struct InitialDecayReport {
  bool pass = false;
  double worst_margin = kInfinity;  // bound / value over all tracked entries
  double ratio = 0.0;               // 2N / (eta - 2N)
  double allowance = 0.0;
};

// Gershgorin-style eigenvector decay at the initial scale: each eigenvector
// is anchored at the configuration whose diagonal entry is closest to its
// eigenvalue, and every entry at positive l1 orbit distance from the anchor
// must be bounded by ratio^distance plus the allowance. Entries in the
// anchor's own orbit carry the trivial bound 1 and are exempt.
inline InitialDecayReport initial_decay_check(const AssembledHamiltonian& h,
                                              const Eigensystem& es, double eta) {
  const int n = h.theta.particles();
  if (!(eta > 4.0 * n)) {
    throw UsageError("initial_decay_check: requires eta > 4N, got " + format_g17(eta));
  }
  InitialDecayReport report;
  report.ratio = 2.0 * n / (eta - 2.0 * n);
  // One resolvent row per distance step divides the solver residual by the
  // off-anchor margin eta - 2N; the geometric series over distances sums to
  // 1 / (1 - ratio), finite because eta > 4N.
  report.allowance = es.max_residual / ((eta - 2.0 * n) * (1.0 - report.ratio));

  bool all = true;
  for (int k = 0; k < es.dimension(); ++k) {
    int anchor = 0;
    double closest = kInfinity;
    for (int i = 0; i < h.dimension(); ++i) {
      const double d = std::abs(h.matrix(i, i) - es.eigenvalues[k]);
      if (d < closest) {
        closest = d;
        anchor = i;
      }
    }
    const Config& x = h.index[anchor];
    for (int i = 0; i < h.dimension(); ++i) {
      const int dist = l1_orbit_distance(h.index[i], x);
      if (dist == 0) continue;
      const double bound = std::pow(report.ratio, dist) + report.allowance;
      const double value = std::abs(es.eigenvectors(i, k));
      all = all && value <= bound;
      const double margin = value == 0.0 ? kInfinity : bound / value;
      report.worst_margin = std::min(report.worst_margin, margin);
    }
  }
  report.pass = all;
  return report;
}

struct InitialScaleReport {
  bool separated = false;
  double min_separation = kInfinity;  // over non-equivalent diagonal pairs
  Config worst_x;
  Config worst_y;
  bool decay_checked = false;
  bool decay_pass = false;
  double worst_margin = kInfinity;
  double eta = 0.0;
  double ratio = 0.0;
  double allowance = 0.0;
};

// Initial-scale criterion on one realization: the diagonal entries of
// distinct orbits must be pairwise eta-separated, and on separation every
// eigenvector must satisfy the Gershgorin decay bound. A single orbit is
// vacuously separated. Separation failure leaves the decay unchecked.
inline InitialScaleReport initial_scale(const SymmetricSet& theta,
                                        const DisorderRealization& realization, double lambda,
                                        const InteractionPotential& interaction, double eta) {
  const int n = theta.particles();
  if (!(eta > 4.0 * n)) {
    throw UsageError("initial_scale: requires eta > 4N, got " + format_g17(eta));
  }
  const AssembledHamiltonian h = assemble(theta, realization, lambda, interaction);

  InitialScaleReport report;
  report.eta = eta;
  report.ratio = 2.0 * n / (eta - 2.0 * n);
  const std::vector<Config>& reps = theta.reps();
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const double di = h.matrix(h.lookup(reps[i]), h.lookup(reps[i]));
    for (std::size_t j = i + 1; j < reps.size(); ++j) {
      const double dj = h.matrix(h.lookup(reps[j]), h.lookup(reps[j]));
      const double gap = std::abs(di - dj);
      if (gap < report.min_separation) {
        report.min_separation = gap;
        report.worst_x = reps[i];
        report.worst_y = reps[j];
      }
    }
  }
  report.separated = report.min_separation >= eta;
  if (!report.separated) return report;

  const Eigensystem es = eigensystem(h);
  const InitialDecayReport decay = initial_decay_check(h, es, eta);
  report.decay_checked = true;
  report.decay_pass = decay.pass;
  report.worst_margin = decay.worst_margin;
  report.allowance = decay.allowance;
  return report;
}

// ---------- per-seed driver ----------

struct LemmaTally {
  int checked = 0;
  int applicable = 0;
  int passed = 0;
};

struct EmsaSeedReport {
  std::uint64_t seed = 0;
  Config bad_center;
  EventReport events;
  LemmaTally local_decay;  // one check per eigenpair per cover cube
  LemmaTally crude;        // ditto, at eta equal to the achieved gap
  LemmaTally buffered;     // one check per eigenpair
  LemmaTally traces;       // one walk per eigenpair
  int divergences = 0;
  std::vector<IterationTrace> trace_list;
};

// Runs the whole per-realization pipeline for one seed: assemble the big
// cube and its cover, certify, evaluate the good event, build the buffer
// around the chosen bad center, then check every decay lemma and run the
// walk for every eigenpair. A negative big_l selects the schedule relation
// L = ell^gamma. The crude bound is exercised at the sharpest valid eta,
// the achieved spectral gap; cubes whose gap is not positive, or does not
// resolve above the block eigenvalue uncertainty, are counted but not
// applicable. Diverged walks are tallied and their partial traces kept.
inline EmsaSeedReport run_emsa_seed(std::uint64_t seed, const Config& center, double ell,
                                    double big_l, double lambda, const Distribution& dist,
                                    const InteractionPotential& interaction,
                                    const MsaParameters& params, double m,
                                    double ell_min = kDefaultEllMin,
                                    double stop_distance = -1.0,
                                    std::size_t cap = kDefaultDenseCap) {
  validate_msa_parameters(params);
  if (!(ell >= 1.0)) {
    throw UsageError("run_emsa_seed: requires ell >= 1, got " + format_g17(ell));
  }
  const double L = big_l < 0.0 ? std::pow(ell, params.gamma) : big_l;
  if (!(L > ell)) {
    throw UsageError("run_emsa_seed: big scale " + format_g17(L) +
                     " does not exceed ell " + format_g17(ell));
  }

  EmsaSeedReport report;
  report.seed = seed;
  const Cover cover = make_cover(center, L, ell);
  const DisorderRealization realization =
      sample_disorder(seed, project_sites(cover.big_set), dist);
  const AssembledHamiltonian h_big = assemble(cover.big_set, realization, lambda, interaction, cap);
  const Eigensystem es_big = eigensystem(h_big);
  const CoverBlocks blocks = assemble_cover_blocks(cover, realization, lambda, interaction, cap);
  const std::vector<CubeCertificate> certificates = certify_cover(cover, blocks, params, m);
  report.events =
      evaluate_events(cover, blocks, certificates, realization, lambda, interaction, params, cap);
  report.bad_center = choose_bad_center(cover, certificates);
  const BufferedCube buffered = build_buffered(cover, report.bad_center);
  const BufferedBlocks bblocks =
      assemble_buffered_blocks(buffered, realization, lambda, interaction, cap);
  std::vector<CubeCertificate> guard_certificates;
  guard_certificates.reserve(buffered.guards.size());
  for (std::size_t i = 0; i < buffered.guards.size(); ++i) {
    guard_certificates.push_back(
        certify_cube(bblocks.es_guards[i], bblocks.h_guards[i], m, ell, params.tau));
  }

  report.trace_list.reserve(es_big.dimension());
  for (int k = 0; k < es_big.dimension(); ++k) {
    const Eigen::VectorXd psi = es_big.eigenvectors.col(k);
    const double mu = es_big.eigenvalues[k];
    const double psi_residual = detail::residual_norm(h_big, psi, mu);

    for (std::size_t j = 0; j < cover.centers.size(); ++j) {
      ++report.local_decay.checked;
      const LocalDecayReport local =
          verify_local_decay(psi, mu, cover_cube(cover, cover.centers[j]), h_big, blocks.h[j],
                             blocks.es[j], params, m, ell_min, &certificates[j], psi_residual);
      if (local.applicable) {
        ++report.local_decay.applicable;
        if (local.pass) ++report.local_decay.passed;
      }

      ++report.crude.checked;
      const double gap = detail::distance_to_spectrum(mu, blocks.es[j].eigenvalues);
      if (gap > 0.0) {
        const CrudeBoundReport crude =
            crude_bound_check(psi, mu, blocks.h[j], h_big, gap, &blocks.es[j], psi_residual);
        if (crude.applicable) {
          ++report.crude.applicable;
          if (crude.pass) ++report.crude.passed;
        }
      }
    }

    ++report.buffered.checked;
    const BufferedDecayReport buff = verify_buffered_decay(
        psi, mu, buffered, h_big, bblocks, params, m, &guard_certificates, psi_residual);
    if (buff.applicable) {
      ++report.buffered.applicable;
      if (buff.pass) ++report.buffered.passed;
    }

    // Walk start: the big-cube point farthest from the eigenvector's peak,
    // ties to the lex-first index entry.
    int peak = 0;
    for (int i = 1; i < psi.size(); ++i) {
      if (std::abs(psi[i]) > std::abs(psi[peak])) peak = i;
    }
    const Config anchor = rearrange(h_big.index[peak]);
    Config y0 = h_big.index.front();
    int far = -1;
    for (const Config& y : h_big.index) {
      const int d = sym_distance(y, anchor);
      if (d > far) {
        far = d;
        y0 = y;
      }
    }

    ++report.traces.checked;
    try {
      IterationTrace trace =
          run_iteration(psi, mu, y0, h_big, cover, blocks, certificates, buffered, bblocks,
                        params, m, stop_distance, psi_residual);
      if (trace.applicable) {
        ++report.traces.applicable;
        if (trace.pass) ++report.traces.passed;
      }
      report.trace_list.push_back(std::move(trace));
    } catch (const IterationDivergence& e) {
      ++report.divergences;
      report.trace_list.push_back(e.trace);
    }
  }
  return report;
}

}  // namespace mpal
