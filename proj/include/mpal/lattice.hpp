#pragma once
// Symmetrized lattice geometry for N indistinguishable particles on Z.
//
// A configuration is a length-N integer vector. The canonical representative
// of a permutation orbit is its non-decreasing rearrangement; symmetric sets
// store one representative per orbit and expand orbits on demand. All
// distances below are permutation-invariant in both arguments.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "mpal/common.hpp"

namespace mpal {

// ---------- configurations and distances ----------

inline Config rearrange(Config x) {
  std::sort(x.begin(), x.end());
  return x;
}

inline bool is_nondecreasing(const Config& x) {
  return std::is_sorted(x.begin(), x.end());
}

// Symmetrized sup distance: min over particle relabelings of the sup norm,
// which equals the sup norm of the sorted rearrangements.
inline int sym_distance(const Config& x, const Config& y) {
  if (x.size() != y.size()) {
    throw UsageError("sym_distance: configurations have different particle counts");
  }
  const Config a = rearrange(x);
  const Config b = rearrange(y);
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d;
}

// Orbit ell^1 distance: min over relabelings of the ell^1 norm. The sorted
// matching is optimal for the line, so this is the ell^1 norm of the sorted
// rearrangements.
inline long long orbit_l1_distance(const Config& x, const Config& y) {
  if (x.size() != y.size()) {
    throw UsageError("orbit_l1_distance: configurations have different particle counts");
  }
  const Config a = rearrange(x);
  const Config b = rearrange(y);
  long long d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += std::abs(static_cast<long long>(a[i]) - b[i]);
  }
  return d;
}

// Number of distinct permutations of a sorted representative: N!/prod(mult!).
inline std::size_t orbit_size(const Config& rep) {
  std::size_t result = 1;
  std::size_t i = 0;
  std::size_t pos = 0;
  while (i < rep.size()) {
    std::size_t run = 1;
    while (i + run < rep.size() && rep[i + run] == rep[i]) ++run;
    for (std::size_t k = 1; k <= run; ++k) {
      ++pos;
      result = result * pos / k;  // binomial(pos, k) accumulation stays integral
    }
    i += run;
  }
  return result;
}

// ---------- symmetric sets ----------

class SymmetricSet {
 public:
  SymmetricSet() = default;
  explicit SymmetricSet(int particles) : n_(particles) {}

  static SymmetricSet from_configs(int particles, const std::vector<Config>& configs) {
    SymmetricSet s(particles);
    s.reps_.reserve(configs.size());
    for (const Config& c : configs) {
      if (static_cast<int>(c.size()) != particles) {
        throw UsageError("SymmetricSet: configuration has wrong particle count");
      }
      s.reps_.push_back(rearrange(c));
    }
    std::sort(s.reps_.begin(), s.reps_.end());
    s.reps_.erase(std::unique(s.reps_.begin(), s.reps_.end()), s.reps_.end());
    return s;
  }

  int particles() const { return n_; }
  bool empty() const { return reps_.empty(); }
  std::size_t orbit_count() const { return reps_.size(); }
  const std::vector<Config>& reps() const { return reps_; }

  // Total number of configurations across all orbits.
  std::size_t size() const {
    std::size_t total = 0;
    for (const Config& r : reps_) total += orbit_size(r);
    return total;
  }

  bool contains(const Config& x) const {
    return std::binary_search(reps_.begin(), reps_.end(), rearrange(x));
  }

  bool contains_rep(const Config& rep) const {
    return std::binary_search(reps_.begin(), reps_.end(), rep);
  }

  // Full configuration list in lexicographic order.
  std::vector<Config> expand() const {
    std::vector<Config> all;
    all.reserve(size());
    for (const Config& r : reps_) {
      Config p = r;
      do {
        all.push_back(p);
      } while (std::next_permutation(p.begin(), p.end()));
    }
    std::sort(all.begin(), all.end());
    return all;
  }

  SymmetricSet set_difference(const SymmetricSet& other) const {
    SymmetricSet out(n_);
    std::set_difference(reps_.begin(), reps_.end(), other.reps_.begin(), other.reps_.end(),
                        std::back_inserter(out.reps_));
    return out;
  }

  SymmetricSet set_intersection(const SymmetricSet& other) const {
    SymmetricSet out(n_);
    std::set_intersection(reps_.begin(), reps_.end(), other.reps_.begin(), other.reps_.end(),
                          std::back_inserter(out.reps_));
    return out;
  }

  SymmetricSet set_union(const SymmetricSet& other) const {
    SymmetricSet out(n_);
    std::set_union(reps_.begin(), reps_.end(), other.reps_.begin(), other.reps_.end(),
                   std::back_inserter(out.reps_));
    return out;
  }

  bool is_subset_of(const SymmetricSet& other) const {
    return std::includes(other.reps_.begin(), other.reps_.end(), reps_.begin(), reps_.end());
  }

 private:
  int n_ = 0;
  std::vector<Config> reps_;  // lexicographically ordered, unique, each sorted
};

// Largest single-coordinate spread across the set; equals the maximum
// symmetrized distance between two members. Zero for empty or singleton sets.
inline int sym_diameter(const SymmetricSet& s) {
  if (s.empty()) return 0;
  const int n = s.particles();
  int diam = 0;
  for (int j = 0; j < n; ++j) {
    int lo = s.reps().front()[j];
    int hi = lo;
    for (const Config& r : s.reps()) {
      lo = std::min(lo, r[j]);
      hi = std::max(hi, r[j]);
    }
    diam = std::max(diam, hi - lo);
  }
  return diam;
}

// Distance from a configuration to a set; +infinity for the empty set.
inline double distance_to_set(const Config& x, const SymmetricSet& s) {
  if (s.empty()) return kInfinity;
  const Config rep = rearrange(x);
  int best = std::numeric_limits<int>::max();
  for (const Config& r : s.reps()) {
    int d = 0;
    for (std::size_t i = 0; i < rep.size(); ++i) d = std::max(d, std::abs(rep[i] - r[i]));
    best = std::min(best, d);
  }
  return best;
}

inline double set_distance(const SymmetricSet& a, const SymmetricSet& b) {
  if (a.empty() || b.empty()) return kInfinity;
  double best = kInfinity;
  for (const Config& r : a.reps()) best = std::min(best, distance_to_set(r, b));
  return best;
}

// ---------- cubes ----------

// Symmetrized cube of real half-width L about a center; membership uses the
// integer radius floor(L) while recursions keep the real value.
struct Cube {
  Config center;       // stored sorted
  double half_width = 0.0;

  int radius() const { return static_cast<int>(std::floor(half_width)); }
  int particles() const { return static_cast<int>(center.size()); }
};

inline Cube make_cube(const Config& center, double half_width) {
  if (!(half_width >= 0.0)) {
    throw UsageError("make_cube: half-width must be nonnegative");
  }
  return Cube{rearrange(center), half_width};
}

inline bool cube_contains(const Cube& c, const Config& x) {
  if (x.size() != c.center.size()) return false;
  const Config rep = rearrange(x);
  const int R = c.radius();
  for (std::size_t i = 0; i < rep.size(); ++i) {
    if (std::abs(rep[i] - c.center[i]) > R) return false;
  }
  return true;
}

// All orbit representatives of the cube: non-decreasing tuples with the j-th
// entry within floor(L) of the j-th sorted center coordinate.
inline SymmetricSet enumerate_cube(const Cube& c) {
  const int n = c.particles();
  const int R = c.radius();
  SymmetricSet out(n);
  std::vector<Config> reps;
  Config current(n);
  auto rec = [&](auto&& self, int j, int lower) -> void {
    if (j == n) {
      reps.push_back(current);
      return;
    }
    const int lo = std::max(c.center[j] - R, lower);
    const int hi = c.center[j] + R;
    for (int v = lo; v <= hi; ++v) {
      current[j] = v;
      self(self, j + 1, v);
    }
  };
  rec(rec, 0, std::numeric_limits<int>::min());
  return SymmetricSet::from_configs(n, reps);
}

inline SymmetricSet cube_intersection(const Cube& c, const SymmetricSet& s) {
  std::vector<Config> kept;
  for (const Config& r : s.reps()) {
    if (cube_contains(c, r)) kept.push_back(r);
  }
  return SymmetricSet::from_configs(s.particles(), kept);
}

// ---------- boundaries and cores ----------

struct BoundaryEdge {
  Config interior;  // representative in Phi
  Config exterior;  // representative in Theta \ Phi
};

struct BoundaryEdgeSet {
  std::vector<BoundaryEdge> rep_edges;  // ordered by (interior, exterior)
  SymmetricSet interior;                // first projections of the edges
  SymmetricSet exterior;                // second projections of the edges
  std::size_t full_edge_count = 0;      // ordered pairs over full config space
};

// Edge set {(u,v) in Phi x (Theta\Phi) : d_S(u,v) = 1}.
inline BoundaryEdgeSet boundary(const SymmetricSet& phi, const SymmetricSet& theta) {
  if (!phi.is_subset_of(theta)) {
    throw UsageError("boundary: Phi is not a subset of Theta");
  }
  const SymmetricSet complement = theta.set_difference(phi);
  BoundaryEdgeSet out;
  std::vector<Config> ins;
  std::vector<Config> outs;
  for (const Config& u : phi.reps()) {
    for (const Config& v : complement.reps()) {
      int d = 0;
      for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - v[i]));
      if (d == 1) {
        out.rep_edges.push_back({u, v});
        ins.push_back(u);
        outs.push_back(v);
        out.full_edge_count += orbit_size(u) * orbit_size(v);
      }
    }
  }
  out.interior = SymmetricSet::from_configs(phi.particles(), ins);
  out.exterior = SymmetricSet::from_configs(phi.particles(), outs);
  return out;
}

// Core Phi^{Theta,r}: members of Phi at distance >= r from Theta \ Phi.
// The empty complement leaves Phi untouched (distance to the empty set is
// +infinity).
inline SymmetricSet inner_core(const SymmetricSet& phi, const SymmetricSet& theta, double r) {
  if (!phi.is_subset_of(theta)) {
    throw UsageError("inner_core: Phi is not a subset of Theta");
  }
  const SymmetricSet complement = theta.set_difference(phi);
  std::vector<Config> kept;
  for (const Config& x : phi.reps()) {
    if (distance_to_set(x, complement) >= r) kept.push_back(x);
  }
  return SymmetricSet::from_configs(phi.particles(), kept);
}

// ---------- covers ----------

// Cover of Lambda_L(b) by cubes of half-width ell whose centers range over the
// cube of radius floor(L) - floor(ell) about b.
struct Cover {
  Cube big;
  double small_half_width = 0.0;
  std::vector<Config> centers;  // lex-ordered sorted representatives
  SymmetricSet big_set;         // enumeration of the big cube
};

inline Cover make_cover(const Config& b, double L, double ell) {
  if (!(ell >= 1.0) || ell > L) {
    throw UsageError("make_cover: need 1 <= ell <= L");
  }
  Cover cover;
  cover.big = make_cube(b, L);
  cover.small_half_width = ell;
  const int K = cover.big.radius() - static_cast<int>(std::floor(ell));
  const SymmetricSet centers = enumerate_cube(Cube{cover.big.center, static_cast<double>(K)});
  cover.centers = centers.reps();
  cover.big_set = enumerate_cube(cover.big);
  return cover;
}

inline Cube cover_cube(const Cover& cover, const Config& a) {
  return Cube{rearrange(a), cover.small_half_width};
}

// Core of the cover cube at a: members of Lambda_ell(a) at distance >= ell
// from the rest of the big cube.
inline SymmetricSet cover_core(const Cover& cover, const Config& a) {
  const SymmetricSet small = enumerate_cube(cover_cube(cover, a));
  return inner_core(small, cover.big_set, cover.small_half_width);
}

// Center of the cover cube whose core contains x: clamp each sorted coordinate
// of x to the window of half-width floor(L) - floor(ell) about the sorted
// center of the big cube.
inline Config truncation_center(const Config& x, const Config& b, double L, double ell) {
  if (!is_nondecreasing(x) || !is_nondecreasing(b)) {
    throw UsageError("truncation_center: inputs must be non-decreasing");
  }
  const int RL = static_cast<int>(std::floor(L));
  const int Rl = static_cast<int>(std::floor(ell));
  if (sym_distance(x, b) > RL) {
    throw UsageError("truncation_center: configuration lies outside the big cube");
  }
  const int K = RL - Rl;
  Config a(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    a[j] = std::max(b[j] - K, std::min(x[j], b[j] + K));
  }
  if (!is_nondecreasing(a)) {
    throw InternalError("truncation_center: clamped center lost monotonicity");
  }
  return a;
}

// ---------- projections ----------

// One-particle sites occupied by some configuration of the set.
inline std::vector<int> project_sites(const SymmetricSet& s) {
  std::vector<int> sites;
  for (const Config& r : s.reps()) sites.insert(sites.end(), r.begin(), r.end());
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return sites;
}

// Number operator: particles of x sitting at site u.
inline int number_at(const Config& x, int u) {
  return static_cast<int>(std::count(x.begin(), x.end(), u));
}

inline std::string config_to_string(const Config& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(c[i]);
  }
  return out;
}

}  // namespace mpal
