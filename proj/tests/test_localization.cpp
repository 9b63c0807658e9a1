#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "mpal/localization.hpp"

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

Eigen::VectorXd delta_at(const std::vector<Config>& index, const Config& x) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<int>(index.size()));
  const Config rep = rearrange(x);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] == rep) v[static_cast<int>(i)] = 1.0;
  }
  return v;
}

}  // namespace

TEST_CASE("uniform mass over nine sites is not localizing at m = 1") {
  const SymmetricSet theta = cube_set({4}, 4.0);
  const auto h = assemble_on(theta, 3, 1.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  Eigen::VectorXd phi = Eigen::VectorXd::Constant(9, 1.0 / 3.0);

  const LocalizationCertificate at_center = check_vector(phi, h.index, {4}, 1.0, 4.0, 0.7);
  CHECK_FALSE(at_center.pass);
  CHECK(at_center.margin < 0.0);

  const LocalizationCertificate best = find_center(phi, h.index, theta, 1.0, 4.0, 0.7);
  CHECK_FALSE(best.pass);
  CHECK_FALSE(best.has_center);
  CHECK_FALSE(best.scan_capped);
}

TEST_CASE("an e^{-2d} profile is 1-localizing but not 3-localizing") {
  const SymmetricSet theta = cube_set({0}, 5.0);
  const auto h = assemble_on(theta, 3, 1.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  Eigen::VectorXd phi(static_cast<int>(h.index.size()));
  for (std::size_t i = 0; i < h.index.size(); ++i) {
    phi[static_cast<int>(i)] = std::exp(-2.0 * sym_distance(h.index[i], {0}));
  }
  phi.normalize();

  CHECK(check_vector(phi, h.index, {0}, 1.0, 4.0, 0.7).pass);
  CHECK_FALSE(check_vector(phi, h.index, {0}, 3.0, 4.0, 0.7).pass);
  CHECK_FALSE(find_center(phi, h.index, theta, 3.0, 4.0, 0.7).pass);
}

TEST_CASE("a point mass is localizing with infinite margin") {
  const SymmetricSet theta = cube_set({-1, 1}, 3.0);
  const auto h = assemble_on(theta, 9, 1.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  const Eigen::VectorXd phi = delta_at(h.index, {1, -1});
  const LocalizationCertificate cert = check_vector(phi, h.index, {-1, 1}, 2.0, 3.0, 0.8);
  CHECK(cert.pass);
  CHECK(cert.margin == kInfinity);

  const LocalizationCertificate found = find_center(phi, h.index, theta, 2.0, 3.0, 0.8);
  CHECK(found.pass);
  CHECK(found.has_center);
  CHECK(found.center == Config{-1, 1});
}

TEST_CASE("margins are monotone in m and non-decreasing in tau") {
  const SymmetricSet theta = cube_set({0}, 6.0);
  const auto h = assemble_on(theta, 17, 1.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  std::mt19937_64 gen(505);
  std::normal_distribution<double> normal;
  Eigen::VectorXd phi(static_cast<int>(h.index.size()));
  for (int i = 0; i < phi.size(); ++i) phi[i] = normal(gen);
  phi.normalize();

  const double loose = check_vector(phi, h.index, {0}, 0.25, 6.0, 0.7).margin;
  const double tight = check_vector(phi, h.index, {0}, 1.5, 6.0, 0.7).margin;
  CHECK(tight < loose);
  const double wide_zone = check_vector(phi, h.index, {0}, 0.25, 6.0, 0.95).margin;
  CHECK(wide_zone >= loose);
}

TEST_CASE("certificates treat the center as an orbit representative") {
  const SymmetricSet theta = cube_set({0, 4}, 2.0);
  const auto h = assemble_on(theta, 21, 1.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  const Eigen::VectorXd phi = delta_at(h.index, {0, 4});
  const LocalizationCertificate a = check_vector(phi, h.index, {0, 4}, 1.0, 2.0, 0.8);
  const LocalizationCertificate b = check_vector(phi, h.index, {4, 0}, 1.0, 2.0, 0.8);
  CHECK(a.center == b.center);
  CHECK(a.margin == b.margin);
  CHECK(a.pass == b.pass);
}

TEST_CASE("certificate preconditions are enforced") {
  const SymmetricSet theta = cube_set({0}, 2.0);
  const auto h = assemble_on(theta, 2, 1.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(5);
  phi[0] = 0.5;  // not normalized
  CHECK_THROWS_AS(check_vector(phi, h.index, {0}, 1.0, 2.0, 0.8), UsageError);
  phi[0] = 1.0;
  CHECK_THROWS_AS(check_vector(phi, h.index, {7}, 1.0, 2.0, 0.8), UsageError);
  Eigen::VectorXd short_vec = Eigen::VectorXd::Zero(4);
  CHECK_THROWS_AS(check_vector(short_vec, h.index, {0}, 1.0, 2.0, 0.8), UsageError);
  CHECK_THROWS_AS(decay_profile(phi, h.index, {7}), UsageError);
  CHECK_THROWS_AS(decay_profile(short_vec, h.index, {0}), UsageError);
}

TEST_CASE("find_center truncates its scan above the representative cap") {
  const SymmetricSet theta = cube_set({0}, 4.0);
  const auto h = assemble_on(theta, 13, 1.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  Eigen::VectorXd phi = Eigen::VectorXd::Constant(9, 1.0 / 3.0);
  const LocalizationCertificate capped = find_center(phi, h.index, theta, 1.0, 4.0, 0.7, 4);
  CHECK_FALSE(capped.pass);
  CHECK(capped.scan_capped);
}

TEST_CASE("strong disorder certifies almost every realization of a small cube") {
  const SymmetricSet theta = cube_set({0}, 3.0);
  const Distribution dist = Distribution::uniform(1.0);
  const auto interaction = InteractionPotential::from_pairs({});
  int certified = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto h = assemble_on(theta, rng::split(808, t), 1e6, dist, interaction);
    const CubeCertificate cube = certify_cube(eigensystem(h), h, 1.0, 3.0, 0.8);
    if (cube.pass) ++certified;
  }
  CHECK(certified >= 99);
}

TEST_CASE("the free Laplacian on a long path is not localizing") {
  const SymmetricSet theta = cube_set({0}, 5.0);
  const auto h = assemble_on(theta, 12, 0.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  const CubeCertificate cube = certify_cube(eigensystem(h), h, 0.5, 5.0, 0.8);
  CHECK_FALSE(cube.pass);
}

TEST_CASE("a single-point cube certifies trivially") {
  const SymmetricSet theta = SymmetricSet::from_configs(1, {{3}});
  const auto h = assemble_on(theta, 8, 5.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  const CubeCertificate cube = certify_cube(eigensystem(h), h, 1.0, 1.0, 0.8);
  CHECK(cube.pass);
  REQUIRE(cube.vectors.size() == 1);
  CHECK(cube.vectors[0].margin == kInfinity);
}

TEST_CASE("degenerate clusters are rotated through the position observable") {
  // Two isolated sites with identical potential: H is a multiple of the
  // identity, so the mixed basis below is a legitimate solver output.
  const SymmetricSet theta = SymmetricSet::from_configs(1, {{0}, {7}});
  DisorderRealization real;
  real.seed = 0;
  real.distribution = Distribution::uniform(1.0);
  real.site_values = {{0, 0.3}, {7, 0.3}};
  const auto h = assemble(theta, real, 1.0, InteractionPotential::from_pairs({}));
  REQUIRE(h.matrix(0, 1) == 0.0);

  Eigensystem es = eigensystem(h);
  REQUIRE(es.clusters.size() == 1);
  const double r = 1.0 / std::sqrt(2.0);
  es.eigenvectors << r, r, r, -r;

  const CubeCertificate cube = certify_cube(es, h, 0.5, 2.0, 0.8);
  CHECK(cube.pass);
  REQUIRE(cube.rotated_clusters == std::vector<int>{0});
  for (const auto& cert : cube.vectors) {
    CHECK(cert.pass);
    CHECK(cert.rotated);
  }
  // The rotated basis is the pair of site deltas, in some order and sign.
  for (int col = 0; col < 2; ++col) {
    CHECK(cube.basis.col(col).cwiseAbs().maxCoeff() == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("decay_profile reports the maximum modulus per occupied shell") {
  const SymmetricSet theta = cube_set({0}, 4.0);
  const auto h = assemble_on(theta, 44, 1.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  Eigen::VectorXd phi(9);
  // Sites -4..4; choose distinct magnitudes to pin each shell maximum.
  phi << 0.01, 0.02, 0.3, 0.1, 0.8, 0.2, 0.25, 0.05, 0.03;
  phi.normalize();
  const auto rows = decay_profile(phi, h.index, {0});
  REQUIRE(rows.size() == 5);
  const double z = phi.norm();  // 1 after normalize
  CHECK(z == Catch::Approx(1.0).margin(1e-12));
  for (int r = 0; r < 5; ++r) {
    CHECK(rows[r].r == r);
    double expect = 0.0;
    for (int site = -4; site <= 4; ++site) {
      if (std::abs(site) == r) expect = std::max(expect, std::abs(phi[site + 4]));
    }
    CHECK(rows[r].shell_max == Catch::Approx(expect).margin(1e-15));
  }
}

TEST_CASE("decay_profile matches a brute-force scan on a two-particle cube") {
  const SymmetricSet theta = cube_set({-1, 2}, 2.0);
  const auto h = assemble_on(theta, 91, 1.0, Distribution::uniform(1.0),
                             InteractionPotential::from_pairs({}));
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  Eigen::VectorXd phi(static_cast<int>(h.index.size()));
  for (int i = 0; i < phi.size(); ++i) phi[i] = normal(gen);
  phi.normalize();

  const Config center = {-1, 2};
  const auto rows = decay_profile(phi, h.index, center);
  int covered = 0;
  for (const auto& row : rows) {
    double expect = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < h.index.size(); ++i) {
      if (sym_distance(h.index[i], center) == row.r) {
        expect = std::max(expect, std::abs(phi[static_cast<int>(i)]));
        ++count;
      }
    }
    CHECK(count > 0);
    CHECK(row.shell_max == expect);
    covered += count;
  }
  CHECK(covered == static_cast<int>(h.index.size()));
}
