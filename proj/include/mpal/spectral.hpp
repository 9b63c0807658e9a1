#pragma once
// Dense diagonalization with a verified solver contract, spectral distances,
// spectral separation of set families, and empirical Wegner statistics.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "mpal/common.hpp"
#include "mpal/hamiltonian.hpp"
#include "mpal/rng.hpp"

namespace mpal {

// Solver contract, enforced after every diagonalization.
inline constexpr double kEigResidualTol = 1e-10;  // relative to ||H||
inline constexpr double kEigGramTol = 1e-10;

struct Eigensystem {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // column i belongs to eigenvalue i
  std::vector<std::vector<int>> clusters;  // consecutive indices, gaps <= deg_tol
  double deg_tol = 0.0;
  double matrix_norm = 0.0;      // spectral norm, max |eigenvalue|
  double max_residual = 0.0;     // measured ||H v - theta v||_2 over columns
  double max_gram_deviation = 0.0;

  int dimension() const { return static_cast<int>(eigenvalues.size()); }

  std::vector<double> eigenvalue_list() const {
    return {eigenvalues.data(), eigenvalues.data() + eigenvalues.size()};
  }

  int cluster_of(int index) const {
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      for (int i : clusters[c]) {
        if (i == index) return static_cast<int>(c);
      }
    }
    return -1;
  }
};

// Diagonalizes a symmetric matrix and enforces the solver contract.
// deg_tol < 0 selects the default 1e-9 * ||H||.
inline Eigensystem eigensystem_matrix(const Eigen::MatrixXd& matrix, const std::string& provenance,
                                      double deg_tol = -1.0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigensystem: solver failed to converge on " + provenance);
  }

  Eigensystem es;
  es.eigenvalues = solver.eigenvalues();
  es.eigenvectors = solver.eigenvectors();
  const int n = es.dimension();
  es.matrix_norm = 0.0;
  for (int i = 0; i < n; ++i) es.matrix_norm = std::max(es.matrix_norm, std::abs(es.eigenvalues[i]));

  const Eigen::MatrixXd residual =
      matrix * es.eigenvectors - es.eigenvectors * es.eigenvalues.asDiagonal();
  es.max_residual = 0.0;
  for (int i = 0; i < n; ++i) es.max_residual = std::max(es.max_residual, residual.col(i).norm());
  es.max_gram_deviation =
      (es.eigenvectors.transpose() * es.eigenvectors - Eigen::MatrixXd::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();

  if (es.max_residual > kEigResidualTol * es.matrix_norm) {
    throw NumericalError("eigensystem: residual " + format_g17(es.max_residual) +
                         " breaks the solver contract on " + provenance);
  }
  if (es.max_gram_deviation > kEigGramTol) {
    throw NumericalError("eigensystem: Gram deviation " + format_g17(es.max_gram_deviation) +
                         " breaks the solver contract on " + provenance);
  }

  es.deg_tol = deg_tol >= 0.0 ? deg_tol : 1e-9 * es.matrix_norm;
  for (int i = 0; i < n; ++i) {
    if (i == 0 || es.eigenvalues[i] - es.eigenvalues[i - 1] > es.deg_tol) {
      es.clusters.push_back({i});
    } else {
      es.clusters.back().push_back(i);
    }
  }
  return es;
}

inline Eigensystem eigensystem(const AssembledHamiltonian& h, double deg_tol = -1.0) {
  const std::string provenance = "H(seed=" + format_u64(h.realization_seed) +
                                 ", dim=" + std::to_string(h.dimension()) + ")";
  return eigensystem_matrix(h.matrix, provenance, deg_tol);
}

// Residual norm of one computed eigenpair; feeds the backward-error allowance
// of the decay-lemma verifiers.
inline double eigenpair_residual(const AssembledHamiltonian& h, const Eigensystem& es, int index) {
  return (h.matrix * es.eigenvectors.col(index) - es.eigenvalues[index] * es.eigenvectors.col(index))
      .norm();
}

// Minimal gap between two sorted spectra via a single merge pass.
inline double spectral_distance(const Eigensystem& a, const Eigensystem& b) {
  if (a.dimension() == 0 || b.dimension() == 0) {
    throw UsageError("spectral_distance: empty spectrum");
  }
  double best = kInfinity;
  int i = 0;
  int j = 0;
  while (i < a.dimension() && j < b.dimension()) {
    best = std::min(best, std::abs(a.eigenvalues[i] - b.eigenvalues[j]));
    if (a.eigenvalues[i] <= b.eigenvalues[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return best;
}

// Threshold 1/2 e^{-L^beta}. Underflows to zero for L^beta beyond the double
// exponent range; that is accepted and logged, and any positive distance then
// separates.
inline double separation_threshold(double L, double beta) {
  const double exponent = std::pow(L, beta);
  const double threshold = 0.5 * std::exp(-exponent);
  if (threshold == 0.0) {
    log_info("separation threshold underflowed to 0 at L^beta = " + format_g17(exponent));
  }
  return threshold;
}

struct SeparationVerdict {
  int first = 0;
  int second = 0;
  double distance = 0.0;
  double threshold = 0.0;
  bool applicable = false;
  bool separated = false;
};

struct FamilySeparation {
  std::vector<SeparationVerdict> pairs;
  bool family_separated = true;  // all applicable pairs separated
};

// Pairwise spectral separation over a family. A pair is applicable when
// d_S(Theta_j, Theta_j') >= 8N max(diam_S Theta_j, diam_S Theta_j').
inline FamilySeparation family_separation(const std::vector<SymmetricSet>& thetas,
                                          const std::vector<Eigensystem>& systems, double L,
                                          double beta, int n_particles) {
  if (thetas.size() != systems.size()) {
    throw UsageError("family_separation: misaligned set and eigensystem lists");
  }
  FamilySeparation out;
  const double threshold = separation_threshold(L, beta);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    for (std::size_t j = i + 1; j < thetas.size(); ++j) {
      SeparationVerdict v;
      v.first = static_cast<int>(i);
      v.second = static_cast<int>(j);
      v.threshold = threshold;
      const double diam = std::max(sym_diameter(thetas[i]), sym_diameter(thetas[j]));
      v.applicable = set_distance(thetas[i], thetas[j]) >= 8.0 * n_particles * diam;
      if (v.applicable) {
        v.distance = spectral_distance(systems[i], systems[j]);
        v.separated = v.distance >= threshold;
        if (!v.separated) out.family_separated = false;
      }
      out.pairs.push_back(v);
    }
  }
  return out;
}

struct WegnerRow {
  double s = 0.0;
  std::size_t count = 0;   // trials with distance <= s
  double fraction = 0.0;
  Interval ci;
};

// Empirical CDF of the spectral distance between two independently resampled
// restricted Hamiltonians.
inline std::vector<WegnerRow> wegner_empirical(const SymmetricSet& theta1,
                                               const SymmetricSet& theta2, double lambda,
                                               const InteractionPotential& interaction,
                                               const Distribution& distribution,
                                               const std::vector<double>& s_grid,
                                               std::size_t trials, std::uint64_t seed,
                                               std::size_t cap = kDefaultDenseCap) {
  const int n = theta1.particles();
  const double diam = std::max(sym_diameter(theta1), sym_diameter(theta2));
  if (set_distance(theta1, theta2) < 8.0 * n * diam) {
    throw ConfigError("wegner_empirical: sets do not satisfy the 8N max-diameter condition");
  }

  std::vector<int> sites = project_sites(theta1);
  const std::vector<int> sites2 = project_sites(theta2);
  sites.insert(sites.end(), sites2.begin(), sites2.end());

  std::vector<double> distances;
  distances.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = rng::split(seed, t);
    const DisorderRealization real = sample_disorder(trial_seed, sites, distribution);
    const Eigensystem a = eigensystem(assemble(theta1, real, lambda, interaction, cap));
    const Eigensystem b = eigensystem(assemble(theta2, real, lambda, interaction, cap));
    distances.push_back(spectral_distance(a, b));
  }

  std::vector<WegnerRow> rows;
  for (double s : s_grid) {
    WegnerRow row;
    row.s = s;
    for (double d : distances) {
      if (d <= s) ++row.count;
    }
    row.fraction = trials == 0 ? 0.0 : static_cast<double>(row.count) / static_cast<double>(trials);
    row.ci = wilson95(row.count, trials);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mpal
