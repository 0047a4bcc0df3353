#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "cpv/disguise.hpp"
#include "oracles.hpp"

using namespace cpv;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Dataset dataset_from_weights(const std::vector<Vec>& weights) {
  Dataset ds;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    NormalizedProfile p;
    p.profile_id = "p" + std::to_string(i);
    p.weights = weights[i];
    p.total_energy = 10.0 + static_cast<double>(i);
    ds.profiles.push_back(std::move(p));
  }
  return ds;
}

ClusterModel manual_model(const std::vector<Vec>& centers, const std::vector<int>& assignment) {
  ClusterModel model;
  model.centers = centers;
  model.assignment = assignment;
  model.sizes.assign(centers.size(), 0);
  for (int a : assignment) ++model.sizes[static_cast<std::size_t>(a)];
  return model;
}

}  // namespace

TEST_CASE("switch_condition endpoint and boundary cases") {
  Vec home{0.0, 1.0};
  Vec target{1.0, 0.0};

  // At lambda = 1 the modified profile sits on the target center.
  CHECK(switch_condition({0.3, 0.7}, home, target, 1.0));

  // Equidistant profile satisfies the condition with equality at lambda = 0.
  CHECK(switch_condition({0.5, 0.5}, home, target, 0.0));

  // A profile at its own center needs half the way.
  CHECK_FALSE(switch_condition(home, home, target, 0.25));
  CHECK(switch_condition(home, home, target, 0.5));

  CHECK_THROWS_AS(switch_condition({0.5, 0.5, 0.0}, home, target, 0.5), std::invalid_argument);
}

TEST_CASE("min_effort analytic anchors") {
  // d at the home center: f(l) = (2l - 1) * D, root exactly 1/2.
  Vec home{0.0, 1.0};
  Vec target{1.0, 0.0};
  CHECK(min_effort(home, home, target) == 0.5);

  // Equidistant d: zero effort.
  CHECK(min_effort({0.5, 0.5}, home, target) == 0.0);

  // Worked H = 2 instance: f(l) = 3l - 1.
  double lam = min_effort({0.25, 0.75}, home, target);
  CHECK(std::abs(lam - 1.0 / 3.0) <= 1e-12);
  CHECK(std::abs(lam - oracle::bisect_min_effort({0.25, 0.75}, home, target)) <= 1e-9);

  // Duplicate centers: the condition already holds at lambda = 0.
  CHECK(min_effort({0.25, 0.75}, home, home) == 0.0);
  CHECK(min_effort(home, home, home) == 0.0);
}

TEST_CASE("min_effort agrees with the bisection oracle") {
  std::mt19937_64 rng(2024);
  for (std::size_t hours : {2u, 5u, 24u}) {
    for (int trial = 0; trial < 400; ++trial) {
      Vec d = oracle::random_unit_sum(rng, hours);
      Vec home = oracle::random_unit_sum(rng, hours);
      Vec target = oracle::random_unit_sum(rng, hours);
      double exact = min_effort(d, home, target);
      double approx = oracle::bisect_min_effort(d, home, target);
      CHECK(std::abs(exact - approx) <= 1e-9);
    }
  }
}

TEST_CASE("min_effort root certificate") {
  std::mt19937_64 rng(7);
  int finite_roots = 0;
  for (int trial = 0; trial < 500; ++trial) {
    Vec d = oracle::random_unit_sum(rng, 24);
    Vec home = oracle::random_unit_sum(rng, 24);
    Vec target = oracle::random_unit_sum(rng, 24);
    double lam = min_effort(d, home, target);
    if (!(lam > 0.0 && lam < 1.0)) continue;
    ++finite_roots;
    CHECK(std::abs(oracle::f_literal(d, home, target, lam)) <= 1e-9);
    CHECK(switch_condition(d, home, target, lam + 1e-9));
    CHECK_FALSE(switch_condition(d, home, target, lam - 1e-9));
  }
  CHECK(finite_roots > 100);  // the corpus must actually exercise the solver
}

TEST_CASE("min_effort is translation invariant") {
  // Coarse dyadic coordinates plus a dyadic shift keep every difference
  // exact, so the solver must return the identical value.
  Vec d{0.5, 0.25, 0.125, 0.125};
  Vec home{0.25, 0.5, 0.25, 0.0};
  Vec target{0.0, 0.125, 0.375, 0.5};
  double base = min_effort(d, home, target);
  Vec d2 = d, h2 = home, t2 = target;
  for (std::size_t t = 0; t < 4; ++t) {
    d2[t] += 0.25;
    h2[t] += 0.25;
    t2[t] += 0.25;
  }
  CHECK(min_effort(d2, h2, t2) == base);

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    Vec rd = oracle::random_unit_sum(rng, 8);
    Vec rh = oracle::random_unit_sum(rng, 8);
    Vec rt = oracle::random_unit_sum(rng, 8);
    double lam = min_effort(rd, rh, rt);
    for (std::size_t t = 0; t < 8; ++t) {
      rd[t] -= 1.1;
      rh[t] -= 1.1;
      rt[t] -= 1.1;
    }
    CHECK(min_effort(rd, rh, rt) == doctest::Approx(lam).epsilon(1e-10));
  }
}

TEST_CASE("disguised_profile") {
  Vec d{1.0, 0.0};
  Vec c{0.0, 1.0};
  CHECK(disguised_profile(d, c, 0.0) == d);
  CHECK(disguised_profile(d, c, 1.0) == c);
  auto mid = disguised_profile(d, c, 0.5);
  CHECK(mid[0] == doctest::Approx(0.5));
  CHECK(mid[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(disguised_profile(d, c, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(disguised_profile(d, c, -0.1), std::invalid_argument);
}

TEST_CASE("compute_cr candidate filtering") {
  // Three equidistant basis centers; prices make cluster 1 the cheapest.
  std::vector<Vec> centers = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  Dataset ds = dataset_from_weights({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  auto model = manual_model(centers, {0, 1, 2});

  ClusterPrices prices{{0.5, 0.1, 0.3}};
  auto rec0 = compute_cr(0, ds, model, prices);
  CHECK(rec0.cr == doctest::Approx(0.5));
  CHECK(rec0.target == 1);
  double sum = 0.0;
  for (double w : rec0.disguised_weights) sum += w;
  CHECK(std::abs(sum - 1.0) <= 1e-9);

  // The globally cheapest cluster has nowhere to go.
  auto rec1 = compute_cr(1, ds, model, prices);
  CHECK(rec1.cr == kInf);
  CHECK(rec1.target == -1);
  CHECK(rec1.disguised_weights.empty());

  // Flat prices: nobody can improve.
  ClusterPrices flat{{0.2, 0.2, 0.2}};
  for (std::size_t i = 0; i < 3; ++i) CHECK(compute_cr(i, ds, model, flat).cr == kInf);

  CHECK_THROWS_AS(compute_cr(9, ds, model, prices), std::invalid_argument);
}

TEST_CASE("compute_cr tie-breaking prefers price then index") {
  std::vector<Vec> centers = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  Dataset ds = dataset_from_weights({{1, 0, 0}});
  auto model = manual_model(centers, {0});

  // Equal efforts to both targets; cluster 2 is cheaper.
  ClusterPrices cheaper_far{{3.0, 2.0, 1.0}};
  CHECK(compute_cr(0, ds, model, cheaper_far).target == 2);

  // Equal efforts and equal prices: lower index wins.
  ClusterPrices equal{{3.0, 1.0, 1.0}};
  CHECK(compute_cr(0, ds, model, equal).target == 1);
}

TEST_CASE("compute_cr matches per-candidate bisection") {
  MixtureSpec spec;
  spec.prototypes = {{2.0, 0.2, 0.2, 0.2, 0.2, 0.2},
                     {0.2, 2.0, 0.2, 0.2, 0.2, 0.2},
                     {0.2, 0.2, 0.2, 2.0, 0.2, 0.2}};
  spec.counts = {25, 25, 25};
  spec.sigma = 0.35;
  spec.seed = 61;
  auto synth = synthesize(spec);
  auto model = fit(synth.dataset, 3, {});
  PriceCurve curve{{0.55, 0.25, 0.3, 0.05, 0.35, 0.4}};
  auto prices = price_clusters(model, curve);

  auto records = compute_all_cr(synth.dataset, model, prices);
  for (std::size_t i = 0; i < records.size(); ++i) {
    int home = model.assignment[i];
    double best = kInf;
    int best_target = -1;
    for (std::size_t n = 0; n < model.centers.size(); ++n) {
      if (static_cast<int>(n) == home) continue;
      if (!(prices.price[n] < prices.price[home])) continue;
      double lam = oracle::bisect_min_effort(synth.dataset.profiles[i].weights,
                                             model.centers[home], model.centers[n]);
      if (lam < best) {
        best = lam;
        best_target = static_cast<int>(n);
      }
    }
    if (best == kInf) {
      CHECK(records[i].cr == kInf);
    } else {
      CHECK(std::abs(records[i].cr - best) <= 1e-9);
      CHECK(records[i].target == best_target);
      CHECK(prices.price[records[i].target] < prices.price[home]);
    }
  }

  // Thread count must not change results.
  auto serial = compute_all_cr(synth.dataset, model, prices, SwitchRule::Paper, 1);
  auto parallel = compute_all_cr(synth.dataset, model, prices, SwitchRule::Paper, 4);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].cr == parallel[i].cr);
    CHECK(serial[i].target == parallel[i].target);
  }
}

TEST_CASE("strict rule needs at least the pairwise effort") {
  // A decoy center sits right next to the target but is priced above home,
  // so it is never a candidate; looking nearest among all centers still has
  // to clear it, which takes more effort than the pairwise condition.
  std::vector<Vec> centers = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.05, 0.9, 0.05}};
  Dataset ds = dataset_from_weights({{0.9, 0.05, 0.05}});
  auto model = manual_model(centers, {0});
  ClusterPrices prices{{0.5, 0.1, 0.6}};

  auto paper = compute_cr(0, ds, model, prices, SwitchRule::Paper);
  auto strict = compute_cr(0, ds, model, prices, SwitchRule::Strict);
  REQUIRE(paper.target == 1);
  REQUIRE(strict.target == 1);
  CHECK(strict.cr > paper.cr + 0.01);

  // At the strict effort the disguised profile really is nearest to the
  // target among all centers.
  auto moved = disguised_profile(ds.profiles[0].weights, model.centers[1], strict.cr + 1e-9);
  CHECK(oracle::brute_nearest(model.centers, moved) == 1);

  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    Dataset random_ds = dataset_from_weights({oracle::random_unit_sum(rng, 3)});
    auto m2 = manual_model(centers, {0});
    auto p = compute_cr(0, random_ds, m2, prices, SwitchRule::Paper);
    auto s = compute_cr(0, random_ds, m2, prices, SwitchRule::Strict);
    if (std::isfinite(p.cr)) CHECK(s.cr >= p.cr - 1e-12);
  }
}

TEST_CASE("trajectories") {
  std::vector<DisguiseRecord> records;
  auto add = [&](int home, int target, double cr) {
    DisguiseRecord r;
    r.profile_id = "p" + std::to_string(records.size());
    r.home_cluster = home;
    r.target = target;
    r.cr = cr;
    records.push_back(r);
  };
  add(0, 1, 0.0);
  add(0, 1, 0.05);
  add(0, 2, 0.2);
  add(1, 2, 0.4);
  add(2, -1, kInf);

  auto at_zero = trajectories(records, 0.0);
  REQUIRE(at_zero.size() == 1);
  CHECK(at_zero.at({0, 1}) == 1);

  auto everyone = trajectories(records, 1.0);
  CHECK(everyone.at({0, 1}) == 2);
  CHECK(everyone.at({0, 2}) == 1);
  CHECK(everyone.at({1, 2}) == 1);
  CHECK(everyone.size() == 3);  // infinite CR never shows up

  auto mid = trajectories(records, 0.2);
  long total = 0;
  for (const auto& [key, count] : mid) total += count;
  CHECK(total == 3);

  CHECK_THROWS_AS(trajectories(records, -0.1), std::invalid_argument);
}
