#include "cpv/disguise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpv/csv.hpp"
#include "cpv/parallel.hpp"

namespace cpv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_size(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

bool switch_condition(const Vec& d, const Vec& c_home, const Vec& c_target, double lambda) {
  require_same_size(d, c_home, "switch_condition");
  require_same_size(d, c_target, "switch_condition");
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t t = 0; t < d.size(); ++t) {
    lhs += std::abs((1.0 - lambda) * d[t] + lambda * c_target[t] - c_home[t]);
    rhs += std::abs((1.0 - lambda) * (d[t] - c_target[t]));
  }
  return lhs >= rhs;
}

double min_effort(const Vec& d, const Vec& c_home, const Vec& c_target) {
  require_same_size(d, c_home, "min_effort");
  require_same_size(d, c_target, "min_effort");
  const std::size_t h = d.size();

  // f(l) = ||a + l*v||_1 - (1-l)*D. Convex and non-decreasing on [0,1]:
  // moving distance l*D along the segment toward c_target shrinks the
  // distance to any fixed point by at most l*D, while the distance to
  // c_target shrinks by exactly l*D.
  Vec a(h), v(h);
  double dist_target = 0.0;
  for (std::size_t t = 0; t < h; ++t) {
    a[t] = d[t] - c_home[t];
    v[t] = c_target[t] - d[t];
    dist_target += std::abs(v[t]);
  }
  auto f = [&](double lam) {
    double s = 0.0;
    for (std::size_t t = 0; t < h; ++t) s += std::abs(a[t] + lam * v[t]);
    return s - (1.0 - lam) * dist_target;
  };

  double f_prev = f(0.0);
  if (f_prev >= 0.0) return 0.0;

  std::vector<double> brk;
  brk.reserve(h + 1);
  for (std::size_t t = 0; t < h; ++t) {
    if (v[t] == 0.0) continue;
    double b = -a[t] / v[t];
    if (b > 0.0 && b < 1.0) brk.push_back(b);
  }
  std::sort(brk.begin(), brk.end());
  brk.push_back(1.0);

  double x_prev = 0.0;
  for (double x : brk) {
    double fx = f(x);
    if (fx >= 0.0) {
      // f is linear between consecutive breakpoints; solve the crossing
      // exactly. fx > f_prev here since f_prev < 0 <= fx.
      double root = x_prev + (x - x_prev) * (-f_prev) / (fx - f_prev);
      return std::clamp(root, 0.0, 1.0);
    }
    x_prev = x;
    f_prev = fx;
  }
  return 1.0;  // f(1) >= 0 analytically; reachable only through rounding
}

Vec disguised_profile(const Vec& d, const Vec& c_target, double lambda) {
  require_same_size(d, c_target, "disguised_profile");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("disguised_profile: lambda outside [0,1]");
  Vec out(d.size());
  for (std::size_t t = 0; t < d.size(); ++t)
    out[t] = (1.0 - lambda) * d[t] + lambda * c_target[t];
  return out;
}

namespace {

// Under the strict rule the modified profile has to end up nearest to the
// target among all centers. Each pairwise requirement against a competitor m
// has the same piecewise-linear structure with c_home replaced by c_m, and
// each is monotone in lambda, so the strict threshold is the max of the
// pairwise ones.
double strict_effort(const Vec& d, const std::vector<Vec>& centers, int target) {
  double lam = 0.0;
  for (std::size_t m = 0; m < centers.size(); ++m) {
    if (static_cast<int>(m) == target) continue;
    lam = std::max(lam, min_effort(d, centers[m], centers[static_cast<std::size_t>(target)]));
  }
  return lam;
}

}  // namespace

EffortResult best_effort(const Vec& d, const ClusterModel& model, const ClusterPrices& prices,
                         int home, SwitchRule rule) {
  if (home < 0 || static_cast<std::size_t>(home) >= model.centers.size())
    throw std::invalid_argument("best_effort: home cluster out of range");
  const double p_home = prices.price[static_cast<std::size_t>(home)];
  // Center sums carry a few ulps of rounding, so mathematically equal
  // cluster prices (a flat curve, duplicated centers) come out a hair apart.
  // Prices within this tolerance count as equal and are not improvements.
  const double price_tol = 1e-12 * std::max(1.0, std::abs(p_home));
  EffortResult best;
  best.lambda_star = kInf;
  double best_price = kInf;
  for (std::size_t n = 0; n < model.centers.size(); ++n) {
    if (static_cast<int>(n) == home) continue;
    double p_n = prices.price[n];
    if (!(p_n < p_home - price_tol)) continue;
    double lam = rule == SwitchRule::Paper
                     ? min_effort(d, model.centers[static_cast<std::size_t>(home)],
                                  model.centers[n])
                     : strict_effort(d, model.centers, static_cast<int>(n));
    bool better = lam < best.lambda_star ||
                  (lam == best.lambda_star &&
                   (p_n < best_price || (p_n == best_price && static_cast<int>(n) < best.target)));
    if (better) {
      best.lambda_star = lam;
      best.target = static_cast<int>(n);
      best_price = p_n;
      best.feasible = true;
    }
  }
  return best;
}

DisguiseRecord compute_cr(std::size_t i, const Dataset& data, const ClusterModel& model,
                          const ClusterPrices& prices, SwitchRule rule) {
  if (i >= data.profiles.size()) throw std::invalid_argument("compute_cr: invalid profile index");
  const NormalizedProfile& p = data.profiles[i];
  DisguiseRecord rec;
  rec.profile_id = p.profile_id;
  rec.home_cluster = model.assignment[i];
  EffortResult effort = best_effort(p.weights, model, prices, rec.home_cluster, rule);
  if (effort.feasible) {
    rec.cr = effort.lambda_star;
    rec.target = effort.target;
    rec.disguised_weights =
        disguised_profile(p.weights, model.centers[static_cast<std::size_t>(effort.target)],
                          effort.lambda_star);
  } else {
    rec.cr = kInf;
    rec.target = -1;
  }
  return rec;
}

std::vector<DisguiseRecord> compute_all_cr(const Dataset& data, const ClusterModel& model,
                                           const ClusterPrices& prices, SwitchRule rule,
                                           int threads) {
  std::vector<DisguiseRecord> records(data.profiles.size());
  parallel_for(data.profiles.size(), threads,
               [&](std::size_t i) { records[i] = compute_cr(i, data, model, prices, rule); });
  return records;
}

std::map<std::pair<int, int>, long> trajectories(const std::vector<DisguiseRecord>& records,
                                                 double theta) {
  if (theta < 0.0) throw std::invalid_argument("trajectories: theta must be >= 0");
  std::map<std::pair<int, int>, long> counts;
  for (const auto& r : records) {
    if (!std::isfinite(r.cr) || r.cr > theta) continue;
    ++counts[{r.home_cluster, r.target}];
  }
  return counts;
}

void write_cr_csv(const std::string& path, const std::vector<DisguiseRecord>& records) {
  csv::Writer w(path);
  w.row({"profile_id", "home_cluster", "cr", "target_cluster"});
  for (const auto& r : records)
    w.row({r.profile_id, std::to_string(r.home_cluster), csv::fmt(r.cr),
           std::to_string(r.target)});
  w.close();
}

std::vector<DisguiseRecord> read_cr_csv(const std::string& path) {
  csv::Table table = csv::read(path);
  if (table.header != std::vector<std::string>{"profile_id", "home_cluster", "cr", "target_cluster"})
    throw InputError("'" + path + "': malformed header for a cr file");
  std::vector<DisguiseRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& fields = table.rows[r];
    const std::string ctx = "'" + path + "' row " + std::to_string(table.line_numbers[r]);
    if (fields.size() != 4) throw InputError(ctx + "': wrong field count");
    DisguiseRecord rec;
    rec.profile_id = fields[0];
    rec.home_cluster = static_cast<int>(csv::to_long(fields[1], ctx));
    rec.cr = csv::to_double(fields[2], ctx);
    rec.target = static_cast<int>(csv::to_long(fields[3], ctx));
    records.push_back(std::move(rec));
  }
  return records;
}

void attach_disguised(std::vector<DisguiseRecord>& records, const Dataset& data,
                      const ClusterModel& model) {
  if (records.size() != data.profiles.size())
    throw InputError("cr.csv does not match profiles.csv (row count)");
  for (std::size_t i = 0; i < records.size(); ++i) {
    DisguiseRecord& r = records[i];
    if (r.profile_id != data.profiles[i].profile_id)
      throw InputError("cr.csv does not match profiles.csv (profile_id at row " +
                       std::to_string(i + 2) + ")");
    if (!std::isfinite(r.cr)) continue;
    if (r.target < 0 || static_cast<std::size_t>(r.target) >= model.centers.size())
      throw InputError("cr.csv: target cluster out of range");
    r.disguised_weights = disguised_profile(
        data.profiles[i].weights, model.centers[static_cast<std::size_t>(r.target)], r.cr);
  }
}

void write_trajectories_csv(const std::string& path, double theta,
                            const std::map<std::pair<int, int>, long>& counts) {
  csv::Writer w(path);
  w.row({"theta", "from", "to", "count"});
  for (const auto& [key, count] : counts)
    w.row({csv::fmt(theta), std::to_string(key.first), std::to_string(key.second),
           std::to_string(count)});
  w.close();
}

}  // namespace cpv
