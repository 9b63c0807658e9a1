#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "mpal/spectral.hpp"

using namespace mpal;

namespace {

SymmetricSet cube_set(const Config& center, double half_width) {
  return enumerate_cube(make_cube(center, half_width));
}

AssembledHamiltonian assemble_on(const SymmetricSet& theta, std::uint64_t seed, double lambda,
                                 const Distribution& dist,
                                 const InteractionPotential& interaction) {
  return assemble(theta, sample_disorder(seed, project_sites(theta), dist), lambda, interaction);
}

Eigensystem from_values(std::vector<double> values) {
  Eigensystem es;
  std::sort(values.begin(), values.end());
  es.eigenvalues = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<int>(values.size()));
  return es;
}

}  // namespace

TEST_CASE("eigensystem of a 1x1 matrix returns its single entry") {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = -3.25;
  const Eigensystem es = eigensystem_matrix(m, "unit");
  REQUIRE(es.dimension() == 1);
  CHECK(es.eigenvalues[0] == Catch::Approx(-3.25).margin(1e-14));
  CHECK(es.clusters.size() == 1);
}

TEST_CASE("free path on three sites has spectrum -sqrt(2), 0, sqrt(2)") {
  const SymmetricSet theta = cube_set({0}, 1.0);
  const auto h = assemble_on(theta, 99, 0.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  const Eigensystem es = eigensystem(h);
  REQUIRE(es.dimension() == 3);
  CHECK(es.eigenvalues[0] == Catch::Approx(-std::sqrt(2.0)).margin(1e-12));
  CHECK(es.eigenvalues[1] == Catch::Approx(0.0).margin(1e-12));
  CHECK(es.eigenvalues[2] == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("solver contract holds on random symmetric matrices") {
  std::mt19937_64 gen(41);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(50, 50);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j <= i; ++j) {
      a(i, j) = normal(gen);
      a(j, i) = a(i, j);
    }
  }
  const Eigensystem es = eigensystem_matrix(a, "random 50x50");
  CHECK(es.max_residual <= kEigResidualTol * es.matrix_norm);
  CHECK(es.max_gram_deviation <= kEigGramTol);
  for (int i = 1; i < es.dimension(); ++i) {
    CHECK(es.eigenvalues[i] >= es.eigenvalues[i - 1]);
  }
  // Residual of a single pair is bounded by the recorded maximum.
  Eigen::MatrixXd copy = a;
  AssembledHamiltonian fake;
  fake.matrix = copy;
  for (int i = 0; i < es.dimension(); ++i) {
    CHECK(eigenpair_residual(fake, es, i) <= es.max_residual + 1e-15);
  }
}

TEST_CASE("trace equals the eigenvalue sum to relative 1e-8") {
  const SymmetricSet theta = cube_set({-2, 3}, 3.0);
  const auto interaction = InteractionPotential::from_pairs({{0, 2.0}, {1, -0.5}});
  const auto h = assemble_on(theta, 1234, 7.0, Distribution::uniform(1.0), interaction);
  const Eigensystem es = eigensystem(h);
  const double trace = h.matrix.trace();
  const double eigsum = es.eigenvalues.sum();
  const double scale = std::max(1.0, std::abs(trace));
  CHECK(std::abs(trace - eigsum) <= 1e-8 * scale);
}

TEST_CASE("spectrum is invariant under permutation conjugation") {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> normal;
  const int n = 24;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      a(i, j) = normal(gen);
      a(j, i) = a(i, j);
    }
  }
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), gen);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) p(perm[i], i) = 1.0;
  const Eigen::MatrixXd b = p.transpose() * a * p;

  const Eigensystem ea = eigensystem_matrix(a, "base");
  const Eigensystem eb = eigensystem_matrix(b, "conjugated");
  for (int i = 0; i < n; ++i) {
    CHECK(ea.eigenvalues[i] == Catch::Approx(eb.eigenvalues[i]).margin(1e-10 * ea.matrix_norm));
  }
}

TEST_CASE("clusters group eigenvalues by consecutive gaps") {
  Eigen::VectorXd d(5);
  d << 0.0, 1e-10, 1.0, 1.0 + 5e-10, 3.0;
  const Eigensystem es = eigensystem_matrix(d.asDiagonal(), "diag", 1e-9);
  REQUIRE(es.clusters.size() == 3);
  CHECK(es.clusters[0] == std::vector<int>{0, 1});
  CHECK(es.clusters[1] == std::vector<int>{2, 3});
  CHECK(es.clusters[2] == std::vector<int>{4});
  CHECK(es.cluster_of(0) == 0);
  CHECK(es.cluster_of(3) == 1);
  CHECK(es.cluster_of(4) == 2);
  CHECK(es.cluster_of(99) == -1);
  CHECK(es.deg_tol == 1e-9);
}

TEST_CASE("spectral_distance of {0,1} and {3,5} is 2") {
  CHECK(spectral_distance(from_values({0.0, 1.0}), from_values({3.0, 5.0})) == 2.0);
  CHECK(spectral_distance(from_values({3.0, 5.0}), from_values({0.0, 1.0})) == 2.0);
}

TEST_CASE("spectral_distance agrees with the all-pairs oracle") {
  std::mt19937_64 gen(172);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> a(30), b(30);
    for (auto& v : a) v = unif(gen);
    for (auto& v : b) v = unif(gen);
    const Eigensystem ea = from_values(a);
    const Eigensystem eb = from_values(b);
    double oracle = kInfinity;
    for (int i = 0; i < 30; ++i) {
      for (int j = 0; j < 30; ++j) {
        oracle = std::min(oracle, std::abs(ea.eigenvalues[i] - eb.eigenvalues[j]));
      }
    }
    CHECK(spectral_distance(ea, eb) == oracle);
  }
}

TEST_CASE("spectral_distance rejects empty spectra") {
  CHECK_THROWS_AS(spectral_distance(Eigensystem{}, from_values({1.0})), UsageError);
}

TEST_CASE("separation threshold follows the closed form and may underflow") {
  CHECK(separation_threshold(8.0, 0.3) ==
        Catch::Approx(0.5 * std::exp(-std::pow(8.0, 0.3))).epsilon(1e-15));
  CHECK(separation_threshold(1.0, 0.5) == Catch::Approx(0.5 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(separation_threshold(1e6, 1.0) == 0.0);
}

TEST_CASE("family_separation is vacuous for singleton families") {
  const SymmetricSet theta = cube_set({0, 0}, 1.0);
  const auto h = assemble_on(theta, 5, 1.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  const FamilySeparation fs = family_separation({theta}, {eigensystem(h)}, 8.0, 0.3, 2);
  CHECK(fs.pairs.empty());
  CHECK(fs.family_separated);
}

TEST_CASE("family_separation skips pairs violating the distance condition") {
  const SymmetricSet theta = cube_set({0, 0}, 2.0);
  const auto h = assemble_on(theta, 6, 1.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  const Eigensystem es = eigensystem(h);
  const FamilySeparation fs = family_separation({theta, theta}, {es, es}, 8.0, 0.3, 2);
  REQUIRE(fs.pairs.size() == 1);
  CHECK_FALSE(fs.pairs[0].applicable);
  CHECK(fs.family_separated);
  CHECK_THROWS_AS(family_separation({theta}, {es, es}, 8.0, 0.3, 2), UsageError);
}

TEST_CASE("distant strongly disordered cubes are spectrally separated in >=99% of trials") {
  const SymmetricSet theta1 = cube_set({0, 0}, 1.0);
  const SymmetricSet theta2 = cube_set({40, 40}, 1.0);
  REQUIRE(set_distance(theta1, theta2) >= 8.0 * 2 * std::max(sym_diameter(theta1),
                                                             sym_diameter(theta2)));
  const auto interaction = InteractionPotential::from_pairs({{0, 1.0}, {1, 0.5}});
  const Distribution dist = Distribution::uniform(1.0);
  const double lambda = 1e4;

  std::vector<int> sites = project_sites(theta1);
  const std::vector<int> extra = project_sites(theta2);
  sites.insert(sites.end(), extra.begin(), extra.end());

  const std::size_t trials = 1000;
  std::size_t separated = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto real = sample_disorder(rng::split(2026, t), sites, dist);
    const Eigensystem a = eigensystem(assemble(theta1, real, lambda, interaction));
    const Eigensystem b = eigensystem(assemble(theta2, real, lambda, interaction));
    const FamilySeparation fs = family_separation({theta1, theta2}, {a, b}, 8.0, 0.3, 2);
    REQUIRE(fs.pairs.size() == 1);
    REQUIRE(fs.pairs[0].applicable);
    if (fs.family_separated) ++separated;
  }
  CHECK(separated >= 990);
}

TEST_CASE("wegner_empirical reproduces CDF basics on disjoint windows") {
  const SymmetricSet theta1 = cube_set({0}, 2.0);
  const SymmetricSet theta2 = cube_set({40}, 2.0);
  const auto rows =
      wegner_empirical(theta1, theta2, 10.0, InteractionPotential::from_pairs({}),
                       Distribution::uniform(1.0), {0.0, 1e-3, 1e-1, 1e6}, 1000, 31);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].s == 0.0);
  CHECK(rows[0].count == 0);
  CHECK(rows[3].fraction == 1.0);
  // CDF is monotone in s.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].count >= rows[i - 1].count);
  }
  // Small gaps are rare: shrinking s by two decades drops the mass well below
  // the s = 1e-1 level.
  CHECK(rows[1].fraction + 0.1 < rows[2].fraction);
  for (const auto& row : rows) {
    CHECK(row.ci.lo <= row.fraction);
    CHECK(row.fraction <= row.ci.hi);
  }
}

TEST_CASE("wegner_empirical enforces the 8N max-diameter condition") {
  const SymmetricSet theta1 = cube_set({0}, 2.0);
  const SymmetricSet theta2 = cube_set({10}, 2.0);
  CHECK_THROWS_AS(wegner_empirical(theta1, theta2, 10.0, InteractionPotential::from_pairs({}),
                                   Distribution::uniform(1.0), {1.0}, 10, 31),
                  ConfigError);
}
