#pragma once
// Finite-volume decay checks: local decay through a localizing cube, the
// crude boundary bound, and decay across a buffered cube.
//
// Each verifier distinguishes "not applicable" (a stated precondition fails,
// nothing is asserted) from "checked" (preconditions hold and the inequality
// either passes or fails). Computed eigenpairs carry solver residuals, so
// every checked inequality gets an explicit additive allowance derived from
// the resolvent bound that produces it; the allowance is reported next to the
// margin it protects.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "mpal/common.hpp"
#include "mpal/hamiltonian.hpp"
#include "mpal/lattice.hpp"
#include "mpal/localization.hpp"
#include "mpal/schedules.hpp"
#include "mpal/spectral.hpp"

namespace mpal {

// Smallest cube half-width at which the decay lemmas are exercised. The
// underlying estimates hold only above a scale threshold; the verifier
// surfaces the unmet bound as "not applicable" instead of hard-coding it.
inline constexpr double kDefaultEllMin = 4.0;

// Decay rate after one scale step: m' = m (1 - 3 ell^{-(1-tau)/2}).
inline double decay_rate_step(double m, double ell, double tau) {
  return m * (1.0 - 3.0 * std::pow(ell, -(1.0 - tau) / 2.0));
}

// Multiplier allowed across a buffered cube: e^{-(m'/2) ell}.
inline double buffered_gain(double m_prime, double ell) {
  return std::exp(-0.5 * m_prime * ell);
}

namespace detail {

inline double distance_to_spectrum(double mu, const Eigen::VectorXd& values) {
  double best = kInfinity;
  for (int i = 0; i < values.size(); ++i) best = std::min(best, std::abs(mu - values[i]));
  return best;
}

inline double residual_norm(const AssembledHamiltonian& h, const Eigen::VectorXd& psi, double mu) {
  return (h.matrix * psi - mu * psi).norm();
}

}  // namespace detail

// ---------- local decay through a localizing cube ----------

struct DecayCheckRow {
  Config y;            // expanded configuration in the core
  double value = 0.0;  // |psi(y)|
  double bound = 0.0;  // boundary maximum of e^{-m' d_S(y,v)} |psi(v)|, plus allowance
  double margin = 0.0;  // bound / value, +inf when value is 0
};

struct LocalDecayReport {
  bool applicable = false;
  std::string reason;  // first unmet precondition when not applicable
  double m_prime = 0.0;
  double gap = 0.0;        // dist(mu, sigma(H_cube))
  double threshold = 0.0;  // (1/2) e^{-L^beta} at L = ell^gamma
  double allowance = 0.0;
  std::vector<DecayCheckRow> rows;
  double worst_margin = kInfinity;
  bool pass = false;
};

// Checks |psi(y)| <= max_v e^{-m' d_S(y, v)} |psi(v)| over the core of the
// cube, the maximum running over the exterior boundary of the cube in Theta.
// psi is a computed eigenvector of h_theta with eigenvalue mu; h_cube and
// es_cube describe the restriction to Lambda_ell intersected with Theta.
// Preconditions (any unmet one yields a not-applicable report): ell at least
// ell_min, dist(mu, sigma(H_cube)) at least (1/2) e^{-L^beta} with
// L = ell^gamma, and the cube m-localizing.
// A caller holding the cube's certificate or the residual ||H psi - mu psi||
// may pass them to skip the recomputation; they must belong to the same
// h_cube and eigenpair.
inline LocalDecayReport verify_local_decay(const Eigen::VectorXd& psi, double mu,
                                           const Cube& cube_l, const AssembledHamiltonian& h_theta,
                                           const AssembledHamiltonian& h_cube,
                                           const Eigensystem& es_cube, const MsaParameters& params,
                                           double m, double ell_min = kDefaultEllMin,
                                           const CubeCertificate* certificate = nullptr,
                                           double psi_residual = -1.0) {
  validate_msa_parameters(params);
  if (psi.size() != h_theta.dimension()) {
    throw UsageError("verify_local_decay: psi length does not match the ambient index");
  }
  if (cube_l.particles() != h_theta.theta.particles()) {
    throw UsageError("verify_local_decay: particle count mismatch");
  }
  const SymmetricSet cube_set = cube_intersection(cube_l, h_theta.theta);
  if (cube_set.empty()) {
    throw UsageError("verify_local_decay: cube does not meet Theta");
  }
  if (cube_set.reps() != h_cube.theta.reps()) {
    throw UsageError("verify_local_decay: h_cube is not the restriction to the cube");
  }
  if (es_cube.dimension() != h_cube.dimension()) {
    throw UsageError("verify_local_decay: eigensystem does not match h_cube");
  }

  const double ell = cube_l.half_width;
  const double big_l = std::pow(ell, params.gamma);
  LocalDecayReport report;
  report.m_prime = decay_rate_step(m, ell, params.tau);
  report.threshold = separation_threshold(big_l, params.beta);
  report.gap = detail::distance_to_spectrum(mu, es_cube.eigenvalues);

  if (ell < ell_min) {
    report.reason = "cube half-width " + format_g17(ell) + " is below the configured minimum " +
                    format_g17(ell_min);
    return report;
  }
  if (report.gap < report.threshold) {
    report.reason = "spectral gap " + format_g17(report.gap) + " is below the threshold " +
                    format_g17(report.threshold);
    return report;
  }
  CubeCertificate owned_certificate;
  if (certificate == nullptr) {
    owned_certificate = certify_cube(es_cube, h_cube, m, ell, params.tau);
    certificate = &owned_certificate;
  }
  if (!certificate->pass) {
    report.reason = "cube is not m-localizing";
    return report;
  }

  const SymmetricSet core = inner_core(cube_set, h_theta.theta, std::pow(ell, params.tau_tilde()));
  if (core.empty()) {
    report.reason = "empty core";
    return report;
  }
  const BoundaryEdgeSet edge = boundary(cube_set, h_theta.theta);
  if (edge.exterior.empty()) {
    report.reason = "empty exterior boundary";
    return report;
  }
  report.applicable = true;

  // Resolvent propagation of the two solver residuals: the eigenfunction
  // expansion divides by |mu - nu| >= gap once, and the row sums of the cube
  // eigenbasis contribute at most sqrt(dim).
  if (psi_residual < 0.0) psi_residual = detail::residual_norm(h_theta, psi, mu);
  report.allowance = std::sqrt(static_cast<double>(h_cube.dimension())) *
                     (psi_residual + es_cube.max_residual) / report.gap;

  const std::vector<Config> core_points = core.expand();
  const std::vector<Config> boundary_points = edge.exterior.expand();
  report.rows.reserve(core_points.size());
  bool all_pass = true;
  for (const Config& y : core_points) {
    DecayCheckRow row;
    row.y = y;
    row.value = std::abs(psi[h_theta.lookup(y)]);
    double best = 0.0;
    for (const Config& v : boundary_points) {
      const double d = static_cast<double>(sym_distance(y, v));
      best = std::max(best, std::exp(-report.m_prime * d) * std::abs(psi[h_theta.lookup(v)]));
    }
    row.bound = best + report.allowance;
    row.margin = row.value == 0.0 ? kInfinity : row.bound / row.value;
    all_pass = all_pass && row.value <= row.bound;
    report.worst_margin = std::min(report.worst_margin, row.margin);
    report.rows.push_back(std::move(row));
  }
  report.pass = all_pass;
  return report;
}

// ---------- crude boundary bound ----------

struct CrudeBoundReport {
  bool applicable = false;
  std::string reason;
  double gap = 0.0;  // dist(mu, sigma(H_phi))
  double lhs = 0.0;  // ||psi||_{l2(Phi)}
  double rhs = 0.0;  // 2N eta^{-1} sqrt(#boundary) max |psi(v)|, plus allowance
  double allowance = 0.0;
  double margin = 0.0;  // rhs / lhs, +inf when lhs is 0
  bool pass = false;
};

// Checks ||psi||_{l2(Phi)} <= 2N eta^{-1} (#exterior boundary)^{1/2}
// max_{v in boundary} |psi(v)| for a computed eigenpair (psi, mu) of h_theta
// and a restriction h_phi of the same operator to a subset Phi. Applicable
// only when dist(mu, sigma(H_phi)) >= eta, eta resolves above the eigenvalue
// uncertainty of the block solve, and the boundary is nonempty.
// es_phi, when supplied, must be the eigensystem of h_phi; psi_residual,
// when nonnegative, must equal ||H_theta psi - mu psi||.
inline CrudeBoundReport crude_bound_check(const Eigen::VectorXd& psi, double mu,
                                          const AssembledHamiltonian& h_phi,
                                          const AssembledHamiltonian& h_theta, double eta,
                                          const Eigensystem* es_phi = nullptr,
                                          double psi_residual = -1.0) {
  if (!(eta > 0.0)) {
    throw UsageError("crude_bound_check: eta must be positive");
  }
  if (psi.size() != h_theta.dimension()) {
    throw UsageError("crude_bound_check: psi length does not match the ambient index");
  }
  if (!h_phi.theta.is_subset_of(h_theta.theta)) {
    throw UsageError("crude_bound_check: Phi is not a subset of Theta");
  }

  CrudeBoundReport report;
  Eigensystem owned_es;
  if (es_phi == nullptr) {
    owned_es = eigensystem(h_phi);
    es_phi = &owned_es;
  }
  report.gap = detail::distance_to_spectrum(mu, es_phi->eigenvalues);
  if (report.gap < eta) {
    report.reason = "spectral gap " + format_g17(report.gap) + " is below eta " + format_g17(eta);
    return report;
  }
  // The computed block spectrum carries every exact eigenvalue within this
  // radius, so dist(mu, sigma(H_phi)) for the exact matrix is only certified
  // down to eta minus the radius.
  double spectral_radius = 0.0;
  for (int i = 0; i < es_phi->dimension(); ++i) {
    spectral_radius = std::max(spectral_radius, std::abs(es_phi->eigenvalues[i]));
  }
  const double uncertainty =
      std::sqrt(static_cast<double>(h_phi.dimension())) * es_phi->max_residual +
      spectral_radius * es_phi->max_gram_deviation;
  if (eta <= uncertainty) {
    report.reason = "eta " + format_g17(eta) + " does not resolve above the eigenvalue uncertainty " +
                    format_g17(uncertainty);
    return report;
  }
  const BoundaryEdgeSet edge = boundary(h_phi.theta, h_theta.theta);
  if (edge.exterior.empty()) {
    report.reason = "empty exterior boundary";
    return report;
  }
  report.applicable = true;

  const int n = h_theta.theta.particles();
  double mass = 0.0;
  for (const Config& x : h_phi.theta.expand()) {
    const double value = psi[h_theta.lookup(x)];
    mass += value * value;
  }
  report.lhs = std::sqrt(mass);

  double boundary_max = 0.0;
  std::size_t boundary_count = 0;
  for (const Config& v : edge.exterior.expand()) {
    boundary_max = std::max(boundary_max, std::abs(psi[h_theta.lookup(v)]));
    ++boundary_count;
  }
  // The proof applies (H_phi - mu)^{-1} once; its norm is certified only by
  // the deflated gap eta - uncertainty, so the boundary term picks up the
  // deflation correction and the psi residual divides by the deflated gap.
  if (psi_residual < 0.0) psi_residual = detail::residual_norm(h_theta, psi, mu);
  const double main = 2.0 * static_cast<double>(n) / eta *
                      std::sqrt(static_cast<double>(boundary_count)) * boundary_max;
  const double deflated = eta - uncertainty;
  report.allowance = main * (uncertainty / deflated) + psi_residual / deflated;
  report.rhs = main + report.allowance;
  report.margin = report.lhs == 0.0 ? kInfinity : report.rhs / report.lhs;
  report.pass = report.lhs <= report.rhs;
  return report;
}

// ---------- buffered cubes ----------

// Buffer geometry around a bad center b inside Lambda_L: Upsilon is
// Lambda_{10 N ell}(b) intersected with the big cube, and the guard centers
// are the cover centers a with 8 N ell <= d_S(a, b) <= 12 N ell. Every guard
// cube Lambda_ell(a) lies inside the big cube because a is a cover center.
struct BufferedCube {
  Config b;  // sorted bad center
  SymmetricSet upsilon;
  std::vector<Config> guards;  // sorted centers, lex order
  double ell = 0.0;
  Config big_center;
  double big_half_width = 0.0;
  bool whole = false;  // Upsilon swallowed the big cube, boundary check vacuous
};

// Builds the buffered cube at b and verifies the covering clause: every
// interior-boundary point of Upsilon lies in the ell-core of some guard cube.
// A violation is a geometry bug, not a property of the realization.
inline BufferedCube build_buffered(const Cover& cover, const Config& b) {
  const Config rep = rearrange(b);
  if (std::find(cover.centers.begin(), cover.centers.end(), rep) == cover.centers.end()) {
    throw UsageError("build_buffered: b is not a cover center");
  }
  const int n = cover.big.particles();
  const double ell = cover.small_half_width;

  BufferedCube buffered;
  buffered.b = rep;
  buffered.ell = ell;
  buffered.big_center = cover.big.center;
  buffered.big_half_width = cover.big.half_width;
  buffered.upsilon =
      cube_intersection(make_cube(rep, 10.0 * n * ell), cover.big_set);
  for (const Config& a : cover.centers) {
    const int d = sym_distance(a, rep);
    if (8.0 * n * ell <= d && d <= 12.0 * n * ell) buffered.guards.push_back(a);
  }
  buffered.whole = buffered.upsilon.orbit_count() == cover.big_set.orbit_count();

  const BoundaryEdgeSet edge = boundary(buffered.upsilon, cover.big_set);
  std::unordered_map<Config, SymmetricSet, ConfigHash> cores;
  for (const Config& x : edge.interior.reps()) {
    bool covered = false;
    for (const Config& a : buffered.guards) {
      if (sym_distance(x, a) > cover_cube(cover, a).radius()) continue;
      auto it = cores.find(a);
      if (it == cores.end()) it = cores.emplace(a, cover_core(cover, a)).first;
      if (it->second.contains_rep(x)) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      throw InternalError("build_buffered: interior boundary point " + config_to_string(x) +
                          " is not covered by any guard core");
    }
  }
  return buffered;
}

// Restrictions of the big-cube operator needed by verify_buffered_decay:
// Upsilon and every guard cube, each with its eigensystem.
struct BufferedBlocks {
  AssembledHamiltonian h_upsilon;
  Eigensystem es_upsilon;
  std::vector<AssembledHamiltonian> h_guards;  // aligned with buffered.guards
  std::vector<Eigensystem> es_guards;
};

inline BufferedBlocks assemble_buffered_blocks(const BufferedCube& buffered,
                                               const DisorderRealization& realization,
                                               double lambda,
                                               const InteractionPotential& interaction,
                                               std::size_t cap = kDefaultDenseCap) {
  BufferedBlocks blocks;
  blocks.h_upsilon = assemble(buffered.upsilon, realization, lambda, interaction, cap);
  blocks.es_upsilon = eigensystem(blocks.h_upsilon);
  blocks.h_guards.reserve(buffered.guards.size());
  blocks.es_guards.reserve(buffered.guards.size());
  for (const Config& a : buffered.guards) {
    const SymmetricSet cube = enumerate_cube(make_cube(a, buffered.ell));
    blocks.h_guards.push_back(assemble(cube, realization, lambda, interaction, cap));
    blocks.es_guards.push_back(eigensystem(blocks.h_guards.back()));
  }
  return blocks;
}

struct BufferedDecayReport {
  bool applicable = false;
  std::string reason;
  double m_prime = 0.0;
  double gain = 0.0;  // e^{-(m'/2) ell}
  double lhs = 0.0;   // max over Upsilon of |psi|
  double rhs = 0.0;   // gain times the guard-boundary maximum, plus allowance
  double allowance = 0.0;
  double margin = 0.0;  // rhs / lhs, +inf when lhs is 0
  bool pass = false;
};

// Checks max_{y in Upsilon} |psi(y)| <= e^{-(m'/2) ell} max over guard-cube
// exterior boundaries of |psi(v)| for a computed eigenpair (psi, mu) of the
// big cube. Applicable when mu keeps the separation threshold from sigma of
// Upsilon and of every guard cube, and every guard cube is m-localizing.
// guard_certificates, when supplied, must align with buffered.guards;
// psi_residual, when nonnegative, must equal ||H_big psi - mu psi||.
inline BufferedDecayReport verify_buffered_decay(
    const Eigen::VectorXd& psi, double mu, const BufferedCube& buffered,
    const AssembledHamiltonian& h_big, const BufferedBlocks& blocks, const MsaParameters& params,
    double m, const std::vector<CubeCertificate>* guard_certificates = nullptr,
    double psi_residual = -1.0) {
  validate_msa_parameters(params);
  if (psi.size() != h_big.dimension()) {
    throw UsageError("verify_buffered_decay: psi length does not match the big-cube index");
  }
  if (blocks.h_guards.size() != buffered.guards.size() ||
      blocks.es_guards.size() != buffered.guards.size()) {
    throw UsageError("verify_buffered_decay: blocks are not aligned with the guard centers");
  }
  if (guard_certificates != nullptr && guard_certificates->size() != buffered.guards.size()) {
    throw UsageError(
        "verify_buffered_decay: guard certificates are not aligned with the guard centers");
  }
  if (!buffered.upsilon.is_subset_of(h_big.theta)) {
    throw UsageError("verify_buffered_decay: Upsilon is not a subset of the big cube");
  }

  BufferedDecayReport report;
  report.m_prime = decay_rate_step(m, buffered.ell, params.tau);
  report.gain = buffered_gain(report.m_prime, buffered.ell);
  if (buffered.whole || buffered.guards.empty()) {
    report.reason = "no buffer geometry";
    return report;
  }

  const double threshold = separation_threshold(buffered.big_half_width, params.beta);
  const double gap_upsilon = detail::distance_to_spectrum(mu, blocks.es_upsilon.eigenvalues);
  if (gap_upsilon < threshold) {
    report.reason = "spectral gap at Upsilon " + format_g17(gap_upsilon) +
                    " is below the threshold " + format_g17(threshold);
    return report;
  }
  double min_gap = gap_upsilon;
  double max_block_residual = blocks.es_upsilon.max_residual;
  for (std::size_t i = 0; i < buffered.guards.size(); ++i) {
    const double gap = detail::distance_to_spectrum(mu, blocks.es_guards[i].eigenvalues);
    if (gap < threshold) {
      report.reason = "spectral gap at guard " + config_to_string(buffered.guards[i]) + " is " +
                      format_g17(gap) + ", below the threshold " + format_g17(threshold);
      return report;
    }
    min_gap = std::min(min_gap, gap);
    max_block_residual = std::max(max_block_residual, blocks.es_guards[i].max_residual);
  }
  for (std::size_t i = 0; i < buffered.guards.size(); ++i) {
    CubeCertificate owned_certificate;
    const CubeCertificate* certificate;
    if (guard_certificates != nullptr) {
      certificate = &(*guard_certificates)[i];
    } else {
      owned_certificate =
          certify_cube(blocks.es_guards[i], blocks.h_guards[i], m, buffered.ell, params.tau);
      certificate = &owned_certificate;
    }
    if (!certificate->pass) {
      report.reason = "guard cube " + config_to_string(buffered.guards[i]) +
                      " is not m-localizing";
      return report;
    }
  }
  report.applicable = true;

  double lhs = 0.0;
  for (const Config& y : buffered.upsilon.expand()) {
    lhs = std::max(lhs, std::abs(psi[h_big.lookup(y)]));
  }
  report.lhs = lhs;

  double boundary_max = 0.0;
  for (std::size_t i = 0; i < buffered.guards.size(); ++i) {
    const BoundaryEdgeSet edge = boundary(blocks.h_guards[i].theta, h_big.theta);
    for (const Config& v : edge.exterior.expand()) {
      boundary_max = std::max(boundary_max, std::abs(psi[h_big.lookup(v)]));
    }
  }

  // The chain applies one crude step through Upsilon and one local-decay step
  // through a guard cube; 4N sqrt(dim) bounds the crude constant and the
  // eigenbasis row sums, and each step divides the residuals by its gap.
  const double n = static_cast<double>(h_big.theta.particles());
  if (psi_residual < 0.0) psi_residual = detail::residual_norm(h_big, psi, mu);
  report.allowance = 4.0 * n * std::sqrt(static_cast<double>(h_big.dimension())) *
                     (psi_residual + max_block_residual) / min_gap * std::max(1.0, report.gain);
  report.rhs = report.gain * boundary_max + report.allowance;
  report.margin = report.lhs == 0.0 ? kInfinity : report.rhs / report.lhs;
  report.pass = report.lhs <= report.rhs;
  return report;
}

}  // namespace mpal
