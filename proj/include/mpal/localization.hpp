#pragma once
// m-localizing certificates for eigenvectors and cubes.
//
// A normalized vector phi on Theta is (x, m)-localizing when every y in Theta
// with d_S(y, x) >= L^tau satisfies |phi(y)| <= e^{-m d_S(y, x)}. The bound is
// non-strict and the threshold L^tau is compared as a real. A cube is
// m-localizing when some orthonormal eigenbasis certifies every eigenvalue
// slot; solvers return an arbitrary basis inside degenerate clusters, so a
// failing cluster is rotated through a position observable before failure is
// declared.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "mpal/common.hpp"
#include "mpal/lattice.hpp"
#include "mpal/spectral.hpp"

namespace mpal {

inline constexpr double kNormTol = 1e-10;
inline constexpr std::size_t kFindCenterCap = 10000;

struct LocalizationCertificate {
  int eigen_index = -1;
  Config center;             // sorted representative; empty when none was found
  double m = 0.0;
  double L = 0.0;
  double tau = 0.0;
  // min over tested y of (-log|phi(y)| - m d_S(y, center)); +infinity when the
  // exempt zone swallows every y. pass <=> margin >= 0.
  double margin = kInfinity;
  bool pass = false;
  bool has_center = false;
  bool rotated = false;      // certificate refers to a rotated cluster basis
  bool scan_capped = false;  // center search hit the representative cap
};

struct CubeCertificate {
  std::vector<LocalizationCertificate> vectors;  // one per eigenvalue slot
  bool pass = false;
  std::vector<int> rotated_clusters;  // cluster ids whose basis was rotated
  Eigen::MatrixXd basis;              // the eigenbasis the verdict refers to
};

namespace detail {

inline int index_position(const std::vector<Config>& index, const Config& x) {
  auto it = std::lower_bound(index.begin(), index.end(), x);
  if (it == index.end() || *it != x) return -1;
  return static_cast<int>(it - index.begin());
}

}  // namespace detail

// Exact localization predicate for one vector and one candidate center.
inline LocalizationCertificate check_vector(const Eigen::VectorXd& phi,
                                            const std::vector<Config>& index, const Config& center,
                                            double m, double L, double tau) {
  if (static_cast<std::size_t>(phi.size()) != index.size()) {
    throw UsageError("check_vector: vector length does not match the index");
  }
  if (std::abs(phi.norm() - 1.0) > kNormTol) {
    throw UsageError("check_vector: vector is not normalized");
  }
  if (detail::index_position(index, rearrange(center)) < 0) {
    throw UsageError("check_vector: center lies outside Theta");
  }

  LocalizationCertificate cert;
  cert.center = rearrange(center);
  cert.m = m;
  cert.L = L;
  cert.tau = tau;
  cert.has_center = true;

  const double exempt = std::pow(L, tau);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const double d = sym_distance(index[i], cert.center);
    if (d < exempt) continue;
    const double term = -std::log(std::abs(phi[static_cast<int>(i)])) - m * d;
    cert.margin = std::min(cert.margin, term);
  }
  cert.pass = cert.margin >= 0.0;
  return cert;
}

// Center search: the argmax-|phi| representative first, then all orbit
// representatives up to the cap; past the cap only the argmax and its 2N
// ell^1 neighbors are tried and the certificate records the truncation.
inline LocalizationCertificate find_center(const Eigen::VectorXd& phi,
                                           const std::vector<Config>& index,
                                           const SymmetricSet& theta, double m, double L,
                                           double tau, std::size_t cap = kFindCenterCap) {
  if (index.empty()) throw UsageError("find_center: empty index");
  int argmax = 0;
  for (int i = 1; i < phi.size(); ++i) {
    if (std::abs(phi[i]) > std::abs(phi[argmax])) argmax = i;
  }
  const Config first = rearrange(index[argmax]);

  LocalizationCertificate cert = check_vector(phi, index, first, m, L, tau);
  if (cert.pass) return cert;

  LocalizationCertificate best = cert;
  const bool capped = theta.orbit_count() > cap;
  std::vector<Config> candidates;
  if (!capped) {
    candidates = theta.reps();
  } else {
    Config y = index[argmax];
    for (std::size_t j = 0; j < y.size(); ++j) {
      for (int delta : {-1, 1}) {
        y[j] += delta;
        if (theta.contains(y)) candidates.push_back(rearrange(y));
        y[j] -= delta;
      }
    }
  }
  for (const Config& c : candidates) {
    if (c == first) continue;
    LocalizationCertificate attempt = check_vector(phi, index, c, m, L, tau);
    attempt.scan_capped = capped;
    if (attempt.pass) return attempt;
    if (attempt.margin > best.margin) best = attempt;
  }

  best.pass = false;
  best.has_center = false;
  best.scan_capped = capped;
  return best;
}

// Certify a whole eigenbasis. Clusters whose solver basis fails are rotated:
// the position observable Q(x) = sum_j x_j^2 restricted to the cluster span is
// diagonalized and the rotated columns are re-tested; the rotation is kept
// only if it certifies the entire cluster.
inline CubeCertificate certify_cube(const Eigensystem& es, const AssembledHamiltonian& h, double m,
                                    double L, double tau, std::size_t cap = kFindCenterCap) {
  CubeCertificate out;
  out.basis = es.eigenvectors;
  out.vectors.resize(es.dimension());
  out.pass = true;

  Eigen::VectorXd q(h.dimension());
  for (int i = 0; i < h.dimension(); ++i) {
    double sum = 0.0;
    for (int site : h.index[i]) sum += static_cast<double>(site) * site;
    q[i] = sum;
  }

  for (std::size_t c = 0; c < es.clusters.size(); ++c) {
    const std::vector<int>& cluster = es.clusters[c];
    std::vector<LocalizationCertificate> plain(cluster.size());
    bool all_pass = true;
    for (std::size_t k = 0; k < cluster.size(); ++k) {
      plain[k] = find_center(es.eigenvectors.col(cluster[k]), h.index, h.theta, m, L, tau, cap);
      plain[k].eigen_index = cluster[k];
      all_pass = all_pass && plain[k].pass;
    }

    if (!all_pass && cluster.size() > 1) {
      Eigen::MatrixXd span(h.dimension(), cluster.size());
      for (std::size_t k = 0; k < cluster.size(); ++k) {
        span.col(static_cast<int>(k)) = es.eigenvectors.col(cluster[k]);
      }
      const Eigen::MatrixXd observable = span.transpose() * q.asDiagonal() * span;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rotation(observable);
      if (rotation.info() == Eigen::Success) {
        Eigen::MatrixXd rotated = span * rotation.eigenvectors();
        for (int k = 0; k < rotated.cols(); ++k) rotated.col(k).normalize();
        std::vector<LocalizationCertificate> turned(cluster.size());
        bool rotated_pass = true;
        for (std::size_t k = 0; k < cluster.size(); ++k) {
          turned[k] =
              find_center(rotated.col(static_cast<int>(k)), h.index, h.theta, m, L, tau, cap);
          turned[k].eigen_index = cluster[k];
          turned[k].rotated = true;
          rotated_pass = rotated_pass && turned[k].pass;
        }
        if (rotated_pass) {
          out.rotated_clusters.push_back(static_cast<int>(c));
          for (std::size_t k = 0; k < cluster.size(); ++k) {
            out.basis.col(cluster[k]) = rotated.col(static_cast<int>(k));
          }
          plain = std::move(turned);
          all_pass = true;
        }
      }
    }

    for (std::size_t k = 0; k < cluster.size(); ++k) {
      out.vectors[cluster[k]] = plain[k];
    }
    out.pass = out.pass && all_pass;
  }
  return out;
}

struct ShellRow {
  int r = 0;
  double shell_max = 0.0;
};

// Maximal |phi| per occupied distance shell around the center.
inline std::vector<ShellRow> decay_profile(const Eigen::VectorXd& phi,
                                           const std::vector<Config>& index, const Config& center) {
  if (static_cast<std::size_t>(phi.size()) != index.size()) {
    throw UsageError("decay_profile: vector length does not match the index");
  }
  const Config c = rearrange(center);
  if (detail::index_position(index, c) < 0) {
    throw UsageError("decay_profile: center lies outside Theta");
  }
  std::vector<ShellRow> rows;
  std::vector<std::pair<int, double>> shell;
  for (std::size_t i = 0; i < index.size(); ++i) {
    shell.emplace_back(sym_distance(index[i], c), std::abs(phi[static_cast<int>(i)]));
  }
  std::sort(shell.begin(), shell.end());
  for (const auto& [r, value] : shell) {
    if (rows.empty() || rows.back().r != r) {
      rows.push_back({r, value});
    } else {
      rows.back().shell_max = std::max(rows.back().shell_max, value);
    }
  }
  return rows;
}

}  // namespace mpal
