#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "mpal/disorder.hpp"
#include "mpal/rng.hpp"

using namespace mpal;

// Reference SplitMix64 engine, written independently of rng.hpp.
namespace {
struct SplitMix64Engine {
  std::uint64_t state;
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }
};
}  // namespace

TEST_CASE("stream_value reproduces the published SplitMix64 sequence") {
  CHECK(rng::stream_value(0, 0) == 0xE220A8397B1DCDAFull);
  CHECK(rng::stream_value(0, 1) == 0x6E789E6AA1B965F4ull);
  CHECK(rng::stream_value(0, 2) == 0x06C45D188009454Full);
  CHECK(rng::stream_value(0, 3) == 0xF88BB8A8724C81ECull);
  CHECK(rng::stream_value(42, 0) == 0xBDD732262FEB6E95ull);
  CHECK(rng::stream_value(42, 1) == 0x28EFE333B266F103ull);

  SplitMix64Engine engine{977123};
  for (std::uint64_t k = 0; k < 100; ++k) {
    CHECK(rng::stream_value(977123, k) == engine.next());
  }
}

TEST_CASE("zigzag interleaves the integers") {
  CHECK(rng::zigzag(0) == 0);
  CHECK(rng::zigzag(-1) == 1);
  CHECK(rng::zigzag(1) == 2);
  CHECK(rng::zigzag(-2) == 3);
  CHECK(rng::zigzag(2) == 4);
  CHECK(rng::zigzag(-3) == 5);
}

TEST_CASE("frozen site draw vectors") {
  CHECK(rng::site_raw(42, -3) == 0xDE4431FA3C80DB06ull);
  CHECK(rng::site_unit(42, -3) == 0.8682280765465323);
  CHECK(rng::site_unit(42, 0) == 0.7415648787718233);
  CHECK(rng::unit_double(rng::stream_value(0, 0)) == 0.8833108082136426);
  CHECK(rng::split(12345, 0) == 0x22118258A9D111A0ull);
  CHECK(rng::split(12345, 1) == 0x346EDCE5F713F8EDull);
}

TEST_CASE("unit_double stays in the half-open unit interval") {
  for (std::uint64_t k = 0; k < 2000; ++k) {
    const double u = rng::unit_double(rng::stream_value(5, k));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(rng::unit_double(0) == 0.0);
  CHECK(rng::unit_double(~0ull) < 1.0);
}

TEST_CASE("uniform disorder stays inside its support") {
  const Distribution dist = Distribution::uniform(1.0);
  std::vector<int> sites;
  for (int s = -40; s <= 40; ++s) sites.push_back(s);
  const DisorderRealization real = sample_disorder(9001, sites, dist);
  for (const auto& [site, value] : real.site_values) {
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
  }
  CHECK(real.covers(sites));
  CHECK_THROWS_AS(real.at(1000), UsageError);
}

TEST_CASE("site values do not depend on the requested site set") {
  const Distribution dist = Distribution::uniform(2.5);
  const DisorderRealization small = sample_disorder(321, {-3, 0, 7}, dist);
  std::vector<int> many;
  for (int s = -50; s <= 50; ++s) many.push_back(s);
  const DisorderRealization large = sample_disorder(321, many, dist);
  for (int s : {-3, 0, 7}) {
    CHECK(small.at(s) == large.at(s));
  }
  CHECK(small.at(0) == disorder_value_at(321, 0, dist));
}

TEST_CASE("uniform draws have the right empirical mean") {
  const Distribution dist = Distribution::uniform(1.0);
  double sum = 0.0;
  const int n = 100000;
  for (int s = 0; s < n; ++s) sum += disorder_value_at(777, s, dist);
  const double mean = sum / n;
  CHECK(std::abs(mean - 0.5) < 0.01);
}

TEST_CASE("piecewise-linear inverse CDF matches closed forms") {
  // Triangle density rho(t) = 2t on [0,1]: CDF t^2, quantile sqrt(u).
  const Distribution tri = Distribution::piecewise_linear(1.0, {0.0, 1.0}, {0.0, 2.0});
  CHECK(tri.sample(0.25) == Catch::Approx(0.5).margin(1e-12));
  CHECK(tri.sample(0.81) == Catch::Approx(0.9).margin(1e-12));
  CHECK(tri.sample(0.0) == Catch::Approx(0.0).margin(1e-12));
  CHECK(tri.sup_density() == Catch::Approx(2.0));
  CHECK_FALSE(tri.strictly_positive());

  // Unnormalized flat density is rescaled to uniform.
  const Distribution flat = Distribution::piecewise_linear(2.0, {0.0, 2.0}, {7.0, 7.0});
  CHECK(flat.sample(0.5) == Catch::Approx(1.0).margin(1e-12));
  CHECK(flat.sup_density() == Catch::Approx(0.5));
  CHECK(flat.strictly_positive());

  // Empirical mean of the triangle law is 2/3.
  double sum = 0.0;
  const int n = 40000;
  for (int s = 0; s < n; ++s) sum += disorder_value_at(555, s, tri);
  CHECK(std::abs(sum / n - 2.0 / 3.0) < 0.01);
}

TEST_CASE("piecewise-linear samples stay inside the support") {
  const Distribution dist =
      Distribution::piecewise_linear(1.0, {0.0, 0.2, 0.8, 1.0}, {0.5, 2.0, 2.0, 0.5});
  for (int s = -2000; s <= 2000; ++s) {
    const double v = disorder_value_at(99, s, dist);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("distribution descriptors are validated") {
  CHECK_THROWS_AS(Distribution::uniform(0.0), ConfigError);
  CHECK_THROWS_AS(Distribution::piecewise_linear(1.0, {0.0}, {1.0}), ConfigError);
  CHECK_THROWS_AS(Distribution::piecewise_linear(1.0, {0.0, 0.5}, {1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(Distribution::piecewise_linear(1.0, {0.0, 1.0}, {-1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(Distribution::piecewise_linear(1.0, {0.0, 1.0}, {0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(Distribution::piecewise_linear(1.0, {0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}),
                  ConfigError);
}
