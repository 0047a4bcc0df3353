#include <cmath>
#include <limits>

#include "doctest.h"

#include "cpv/pricing.hpp"
#include "cpv/sysload.hpp"

using namespace cpv;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct World {
  Dataset ds;
  ClusterModel model;
  ClusterPrices prices;
  std::vector<DisguiseRecord> records;
};

World synthetic_world(double sigma, std::uint64_t seed) {
  MixtureSpec spec;
  spec.prototypes = {{2.0, 0.2, 0.2, 0.2, 0.2, 0.2},
                     {0.2, 0.2, 2.0, 0.2, 0.2, 0.2},
                     {0.2, 0.2, 0.2, 0.2, 2.0, 0.2}};
  spec.counts = {25, 25, 25};
  spec.sigma = sigma;
  spec.seed = seed;
  World w;
  auto synth = synthesize(spec);
  w.ds = std::move(synth.dataset);
  w.model = fit(w.ds, 3, {});
  PriceCurve curve{{0.5, 0.3, 0.2, 0.35, 0.05, 0.4}};
  w.prices = price_clusters(w.model, curve);
  w.records = compute_all_cr(w.ds, w.model, w.prices);
  return w;
}

Vec raw_aggregate(const Dataset& ds) {
  Vec total(ds.profiles.front().weights.size(), 0.0);
  for (const auto& p : ds.profiles)
    for (std::size_t t = 0; t < total.size(); ++t) total[t] += p.total_energy * p.weights[t];
  return total;
}

}  // namespace

TEST_CASE("aggregate at theta = 0 is the raw aggregate") {
  World w = synthetic_world(0.25, 15);
  double min_cr = kInf;
  for (const auto& r : w.records) min_cr = std::min(min_cr, r.cr);
  REQUIRE(min_cr > 0.0);  // no exact-boundary profile in this draw

  auto row = aggregate(w.ds, w.records, w.model, 0.0);
  Vec expected = raw_aggregate(w.ds);
  for (std::size_t t = 0; t < expected.size(); ++t)
    CHECK(row.hourly_load[t] == expected[t]);
  CHECK(row.peak_ratio == doctest::Approx(1.0));
}

TEST_CASE("single profile substitution") {
  Dataset ds;
  NormalizedProfile p;
  p.profile_id = "only";
  p.weights = {0.8, 0.2};
  p.total_energy = 12.0;
  ds.profiles.push_back(p);

  ClusterModel model;
  model.centers = {{0.8, 0.2}, {0.1, 0.9}};
  model.assignment = {0};
  model.sizes = {1, 0};

  DisguiseRecord r;
  r.profile_id = "only";
  r.home_cluster = 0;
  r.target = 1;
  r.cr = 0.2;
  r.disguised_weights = disguised_profile(p.weights, model.centers[1], 0.2);
  std::vector<DisguiseRecord> records = {r};

  auto row = aggregate(ds, records, model, 0.3);
  for (std::size_t t = 0; t < 2; ++t)
    CHECK(row.hourly_load[t] == doctest::Approx(12.0 * r.disguised_weights[t]));

  // Full extent relocates to the target center.
  auto full = aggregate(ds, records, model, 0.3, DisguiseExtent::Full);
  for (std::size_t t = 0; t < 2; ++t)
    CHECK(full.hourly_load[t] == doctest::Approx(12.0 * model.centers[1][t]));

  CHECK_THROWS_AS(aggregate(ds, records, model, -0.1), std::invalid_argument);
}

TEST_CASE("aggregate matches brute-force substitution") {
  World w = synthetic_world(0.35, 77);
  for (double theta : {0.0, 0.05, 0.2, 0.45}) {
    auto row = aggregate(w.ds, w.records, w.model, theta);
    Vec expected(6, 0.0);
    for (std::size_t i = 0; i < w.ds.profiles.size(); ++i) {
      const auto& p = w.ds.profiles[i];
      const Vec& weights = (std::isfinite(w.records[i].cr) && w.records[i].cr <= theta)
                               ? w.records[i].disguised_weights
                               : p.weights;
      for (std::size_t t = 0; t < 6; ++t) expected[t] += p.total_energy * weights[t];
    }
    for (std::size_t t = 0; t < 6; ++t)
      CHECK(row.hourly_load[t] == doctest::Approx(expected[t]).epsilon(1e-12));

    // Peak fields match an exhaustive scan.
    double peak = 0.0;
    int hour = 0;
    for (std::size_t t = 0; t < 6; ++t) {
      if (row.hourly_load[t] > peak) {
        peak = row.hourly_load[t];
        hour = static_cast<int>(t);
      }
    }
    CHECK(row.peak == peak);
    CHECK(row.peak_hour == hour);
  }
}

TEST_CASE("peak_sweep conserves energy and matches single calls") {
  World w = synthetic_world(0.35, 123);
  std::vector<double> grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  auto rows = peak_sweep(w.ds, w.records, w.model, grid);
  REQUIRE(rows.size() == grid.size());

  double base_total = 0.0;
  for (double v : rows.front().hourly_load) base_total += v;
  CHECK(rows.front().peak_ratio == doctest::Approx(1.0));

  for (std::size_t g = 0; g < grid.size(); ++g) {
    CHECK(rows[g].theta == grid[g]);
    double total = 0.0;
    for (double v : rows[g].hourly_load) total += v;
    CHECK(std::abs(total - base_total) <= 1e-6 * base_total);

    auto solo = aggregate(w.ds, w.records, w.model, grid[g]);
    for (std::size_t t = 0; t < 6; ++t) CHECK(rows[g].hourly_load[t] == solo.hourly_load[t]);
    CHECK(rows[g].peak_ratio == doctest::Approx(solo.peak_ratio));
  }

  auto threaded = peak_sweep(w.ds, w.records, w.model, grid, DisguiseExtent::Cr, 4);
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t t = 0; t < 6; ++t)
      CHECK(threaded[g].hourly_load[t] == rows[g].hourly_load[t]);
}

TEST_CASE("identical profiles under flat prices never move") {
  Dataset ds;
  for (int i = 0; i < 10; ++i) {
    NormalizedProfile p;
    p.profile_id = "p" + std::to_string(i);
    p.weights = {0.25, 0.25, 0.25, 0.25};
    p.total_energy = 8.0;
    ds.profiles.push_back(p);
  }
  auto model = fit(ds, 1, {});
  PriceCurve flat{{0.2, 0.2, 0.2, 0.2}};
  auto prices = price_clusters(model, flat);
  auto records = compute_all_cr(ds, model, prices);
  for (const auto& r : records) CHECK(r.cr == kInf);

  std::vector<double> grid = {0.0, 0.25, 0.5, 1.0};
  auto rows = peak_sweep(ds, records, model, grid);
  for (const auto& row : rows) {
    CHECK(row.peak_ratio == doctest::Approx(1.0));
    for (std::size_t t = 0; t < 4; ++t)
      CHECK(row.hourly_load[t] == rows.front().hourly_load[t]);
  }
}
