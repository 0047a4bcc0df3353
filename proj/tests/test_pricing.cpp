#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "cpv/pricing.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cpv;

TEST_CASE("mci basics") {
  PriceCurve curve{{10.0, 30.0}};
  CHECK(mci({0.5, 0.5}, curve) == doctest::Approx(20.0));
  CHECK(mci({1.0, 0.0}, curve) == doctest::Approx(10.0));
  CHECK(mci({0.0, 1.0}, curve) == doctest::Approx(30.0));

  PriceCurve day{{1, 2, 3, 4, 5, 6}};
  Vec uniform(6, 1.0 / 6.0);
  CHECK(mci(uniform, day) == doctest::Approx(3.5));

  CHECK_THROWS_AS(mci({0.5, 0.5, 0.0}, curve), std::invalid_argument);
  CHECK_THROWS_AS(mci({0.6, 0.6}, curve), std::invalid_argument);
  CHECK_THROWS_AS(mci({1.2, -0.2}, curve), std::invalid_argument);
}

TEST_CASE("mci is linear and bounded by the curve") {
  std::mt19937_64 rng(5);
  PriceCurve curve;
  std::uniform_real_distribution<double> price(-0.1, 0.6);
  for (int t = 0; t < 24; ++t) curve.prices.push_back(price(rng));
  double lo = *std::min_element(curve.prices.begin(), curve.prices.end());
  double hi = *std::max_element(curve.prices.begin(), curve.prices.end());

  for (int trial = 0; trial < 200; ++trial) {
    Vec a = oracle::random_unit_sum(rng, 24);
    Vec b = oracle::random_unit_sum(rng, 24);
    double alpha = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    Vec mix(24);
    for (int t = 0; t < 24; ++t) mix[t] = alpha * a[t] + (1.0 - alpha) * b[t];
    double direct = mci(mix, curve);
    double combined = alpha * mci(a, curve) + (1.0 - alpha) * mci(b, curve);
    CHECK(std::abs(direct - combined) <= 1e-12);
    CHECK(direct >= lo - 1e-9);
    CHECK(direct <= hi + 1e-9);
  }
}

TEST_CASE("price_clusters prices every center") {
  ClusterModel model;
  model.centers = {{0.7, 0.2, 0.1}, {0.1, 0.1, 0.8}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  model.sizes = {1, 1, 1};

  PriceCurve flat{{0.25, 0.25, 0.25}};
  auto flat_prices = price_clusters(model, flat);
  for (double p : flat_prices.price) CHECK(p == doctest::Approx(0.25));

  PriceCurve curve{{0.1, 0.3, 0.6}};
  auto prices = price_clusters(model, curve);
  REQUIRE(prices.price.size() == 3);
  for (std::size_t n = 0; n < 3; ++n)
    CHECK(prices.price[n] == doctest::Approx(mci(model.centers[n], curve)));

  ClusterModel lone;
  lone.centers = {{0.5, 0.25, 0.25}};
  lone.sizes = {4};
  auto single = price_clusters(lone, curve);
  CHECK(single.price.size() == 1);
  CHECK(single.price[0] == doctest::Approx(mci(lone.centers[0], curve)));
}

TEST_CASE("load_price_curve validates the schema") {
  testutil::TempDir dir;

  std::string good = "hour,price\n";
  for (int t = 0; t < 24; ++t) good += std::to_string(t) + ",0.2\n";
  testutil::write_file(dir.file("good.csv"), good);
  auto curve = load_price_curve(dir.file("good.csv"), 24);
  CHECK(curve.prices.size() == 24);

  std::string missing = "hour,price\n";
  for (int t = 0; t < 23; ++t) missing += std::to_string(t) + ",0.2\n";
  testutil::write_file(dir.file("missing.csv"), missing);
  try {
    load_price_curve(dir.file("missing.csv"), 24);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("missing hour") != std::string::npos);
  }

  std::string dup = "hour,price\n";
  for (int t = 0; t < 24; ++t) dup += std::to_string(t == 8 ? 7 : t) + ",0.2\n";
  testutil::write_file(dir.file("dup.csv"), dup);
  try {
    load_price_curve(dir.file("dup.csv"), 24);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("duplicate hour 7") != std::string::npos);
  }

  std::string bad = "hour,price\n0,nan\n1,0.2\n";
  testutil::write_file(dir.file("bad.csv"), bad);
  CHECK_THROWS_AS(load_price_curve(dir.file("bad.csv"), 2), InputError);

  // Round trip through the writer.
  write_prices_csv(dir.file("rt.csv"), synthetic_price_curve(24));
  auto rt = load_price_curve(dir.file("rt.csv"), 24);
  CHECK(rt.prices.size() == 24);
}

TEST_CASE("synthetic curve has a two-peak day shape") {
  auto curve = synthetic_price_curve(24);
  REQUIRE(curve.prices.size() == 24);
  double night = curve.prices[2];
  double morning = curve.prices[8];
  double evening = curve.prices[19];
  CHECK(morning > night);
  CHECK(evening > morning);
  for (double p : curve.prices) CHECK(std::isfinite(p));
}
