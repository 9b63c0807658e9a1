#pragma once
// Assembly of restricted N-particle Hamiltonians H_Theta, pair interactions,
// boundary operators, and the exact geometric decomposition check.
//
// Matrices are indexed by the full configuration enumeration of a symmetric
// set (all orderings, lexicographic). Diagonal entries are computed on sorted
// representatives and copied across each orbit, so they are bitwise
// permutation invariant.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mpal/common.hpp"
#include "mpal/disorder.hpp"
#include "mpal/lattice.hpp"

namespace mpal {

inline constexpr std::size_t kDefaultDenseCap = 20000;

// Even finite-range pair potential; C_U = max displacement + 1 (1 if empty).
class InteractionPotential {
 public:
  InteractionPotential() = default;

  // Entries may name either displacement sign; the mirror is filled in
  // automatically and conflicting explicit values are rejected. Explicit
  // zeros are dropped so the stored support is exactly supp(U).
  static InteractionPotential from_pairs(const std::vector<std::pair<int, double>>& entries) {
    std::map<int, double> values;
    for (const auto& [u, v] : entries) {
      for (int s : {u, -u}) {
        auto it = values.find(s);
        if (it != values.end() && it->second != v) {
          throw ConfigError("interaction: conflicting values for displacements " +
                            std::to_string(u) + " and " + std::to_string(-u));
        }
        values[s] = v;
      }
    }
    InteractionPotential out;
    for (const auto& [u, v] : values) {
      if (v != 0.0) out.support_values_[u] = v;
    }
    return out;
  }

  double at(int displacement) const {
    auto it = support_values_.find(displacement);
    return it == support_values_.end() ? 0.0 : it->second;
  }

  bool empty() const { return support_values_.empty(); }

  // Interaction range C_U.
  int range() const {
    int m = 0;
    for (const auto& [u, v] : support_values_) m = std::max(m, std::abs(u));
    return m + 1;
  }

  const std::map<int, double>& support() const { return support_values_; }

  // Sum of U over unordered particle pairs of a configuration.
  double pair_energy(const Config& x) const {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = i + 1; j < x.size(); ++j) {
        total += at(x[i] - x[j]);
      }
    }
    return total;
  }

 private:
  std::map<int, double> support_values_;
};

struct AssembledHamiltonian {
  SymmetricSet theta;
  std::vector<Config> index;  // full configuration enumeration, lex order
  Eigen::MatrixXd matrix;
  double lambda = 0.0;
  std::uint64_t realization_seed = 0;
  std::unordered_map<Config, int, ConfigHash> position;

  int dimension() const { return static_cast<int>(index.size()); }

  int lookup(const Config& x) const {
    auto it = position.find(x);
    return it == position.end() ? -1 : it->second;
  }
};

inline AssembledHamiltonian assemble(const SymmetricSet& theta, const DisorderRealization& realization,
                                     double lambda, const InteractionPotential& interaction,
                                     std::size_t cap = kDefaultDenseCap) {
  if (theta.empty()) throw UsageError("assemble: Theta must be nonempty");
  const std::size_t dim = theta.size();
  if (dim > cap) {
    throw ConfigError("assemble: cube has " + std::to_string(dim) +
                      " configurations, above the dense cap " + std::to_string(cap));
  }

  AssembledHamiltonian h;
  h.theta = theta;
  h.index = theta.expand();
  h.lambda = lambda;
  h.realization_seed = realization.seed;
  h.position.reserve(h.index.size());
  for (std::size_t i = 0; i < h.index.size(); ++i) {
    h.position.emplace(h.index[i], static_cast<int>(i));
  }

  const int n = static_cast<int>(dim);
  h.matrix = Eigen::MatrixXd::Zero(n, n);

  // Diagonal per orbit representative, copied to every orbit member.
  for (const Config& rep : theta.reps()) {
    double potential = 0.0;
    for (int site : rep) potential += realization.at(site);
    const double value = lambda * potential + interaction.pair_energy(rep);
    Config p = rep;
    do {
      h.matrix(h.lookup(p), h.lookup(p)) = value;
    } while (std::next_permutation(p.begin(), p.end()));
  }

  // Kinetic part: -1 between ell^1-adjacent configurations inside Theta.
  for (int row = 0; row < n; ++row) {
    Config y = h.index[row];
    for (std::size_t j = 0; j < y.size(); ++j) {
      for (int delta : {-1, 1}) {
        y[j] += delta;
        const int col = h.lookup(y);
        if (col >= 0) h.matrix(row, col) = -1.0;
        y[j] -= delta;
      }
    }
  }
  return h;
}

// Cross-boundary hopping block: entries -1 at (x,y) and (y,x) for every
// ell^1-adjacent pair with x in Phi and y in Theta \ Phi. Adding it to the
// direct sum of the restricted Hamiltonians reproduces H_Theta exactly.
struct BoundaryOperator {
  std::vector<Config> index;  // enumeration of Theta, matching assemble()
  Eigen::MatrixXd matrix;
};

inline BoundaryOperator boundary_operator(const SymmetricSet& phi, const SymmetricSet& theta) {
  if (!phi.is_subset_of(theta)) {
    throw UsageError("boundary_operator: Phi is not a subset of Theta");
  }
  BoundaryOperator out;
  out.index = theta.expand();
  const int n = static_cast<int>(out.index.size());
  out.matrix = Eigen::MatrixXd::Zero(n, n);

  std::unordered_map<Config, int, ConfigHash> position;
  position.reserve(out.index.size());
  for (std::size_t i = 0; i < out.index.size(); ++i) {
    position.emplace(out.index[i], static_cast<int>(i));
  }

  for (int row = 0; row < n; ++row) {
    const Config& x = out.index[row];
    if (!phi.contains(x)) continue;
    Config y = x;
    for (std::size_t j = 0; j < y.size(); ++j) {
      for (int delta : {-1, 1}) {
        y[j] += delta;
        auto it = position.find(y);
        if (it != position.end() && !phi.contains(y)) {
          out.matrix(row, it->second) = -1.0;
          out.matrix(it->second, row) = -1.0;
        }
        y[j] -= delta;
      }
    }
  }
  return out;
}

// Max-abs residual of H_Theta - (H_Phi (+) H_{Theta\Phi}) - Gamma. All three
// pieces reuse identical arithmetic, so the residual must be exactly zero.
inline double check_geometric_decomposition(const SymmetricSet& theta, const SymmetricSet& phi,
                                            const DisorderRealization& realization, double lambda,
                                            const InteractionPotential& interaction,
                                            std::size_t cap = kDefaultDenseCap) {
  if (!phi.is_subset_of(theta)) {
    throw UsageError("check_geometric_decomposition: Phi is not a subset of Theta");
  }
  const AssembledHamiltonian whole = assemble(theta, realization, lambda, interaction, cap);
  const int n = whole.dimension();
  Eigen::MatrixXd reassembled = Eigen::MatrixXd::Zero(n, n);

  for (const SymmetricSet& part : {phi, theta.set_difference(phi)}) {
    if (part.empty()) continue;
    const AssembledHamiltonian block = assemble(part, realization, lambda, interaction, cap);
    for (int i = 0; i < block.dimension(); ++i) {
      const int gi = whole.lookup(block.index[i]);
      for (int j = 0; j < block.dimension(); ++j) {
        const int gj = whole.lookup(block.index[j]);
        reassembled(gi, gj) += block.matrix(i, j);
      }
    }
  }
  reassembled += boundary_operator(phi, theta).matrix;

  double residual = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      residual = std::max(residual, std::abs(whole.matrix(i, j) - reassembled(i, j)));
    }
  }
  return residual;
}

// Largest distance from an eigenvalue to the nearest diagonal entry. The
// Gershgorin bound keeps this at or below the row radius 2N.
inline double gershgorin_max_deviation(const AssembledHamiltonian& h,
                                       const std::vector<double>& eigenvalues) {
  double worst = 0.0;
  for (double mu : eigenvalues) {
    double nearest = kInfinity;
    for (int i = 0; i < h.dimension(); ++i) {
      nearest = std::min(nearest, std::abs(mu - h.matrix(i, i)));
    }
    worst = std::max(worst, nearest);
  }
  return worst;
}

}  // namespace mpal
