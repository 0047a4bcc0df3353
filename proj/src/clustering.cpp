#include "cpv/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cpv/csv.hpp"
#include "cpv/parallel.hpp"

namespace cpv {

double l1_distance(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("l1_distance: length mismatch");
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) sum += std::abs(a[t] - b[t]);
  return sum;
}

namespace {

int nearest_center(const std::vector<Vec>& centers, const Vec& w) {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < centers.size(); ++m) {
    double d = l1_distance(w, centers[m]);
    if (d < best_dist) {  // strict: ties keep the lowest index
      best_dist = d;
      best = static_cast<int>(m);
    }
  }
  return best;
}

void renormalize(Vec& center, const std::vector<const Vec*>& members) {
  double sum = 0.0;
  for (double v : center) sum += v;
  if (sum <= 1e-12) {
    // Degenerate coordinate-wise median (can be all-zero when members have
    // disjoint supports); the mean of unit-sum members always has sum 1.
    std::fill(center.begin(), center.end(), 0.0);
    for (const Vec* m : members)
      for (std::size_t t = 0; t < center.size(); ++t) center[t] += (*m)[t];
    sum = 0.0;
    for (double v : center) sum += v;
  }
  for (double& v : center) v /= sum;
}

Vec update_center(const std::vector<const Vec*>& members, std::size_t hours,
                  CenterUpdate rule, Vec& scratch) {
  Vec center(hours, 0.0);
  if (rule == CenterUpdate::Mean) {
    for (const Vec* m : members)
      for (std::size_t t = 0; t < hours; ++t) center[t] += (*m)[t];
    for (double& v : center) v /= static_cast<double>(members.size());
  } else {
    const std::size_t m = members.size();
    scratch.resize(m);
    for (std::size_t t = 0; t < hours; ++t) {
      for (std::size_t i = 0; i < m; ++i) scratch[i] = (*members[i])[t];
      auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(m / 2);
      std::nth_element(scratch.begin(), mid, scratch.end());
      double hi = *mid;
      if (m % 2 == 1) {
        center[t] = hi;
      } else {
        double lo = *std::max_element(scratch.begin(), mid);
        center[t] = 0.5 * (lo + hi);
      }
    }
  }
  renormalize(center, members);
  return center;
}

}  // namespace

ClusterModel fit(const Dataset& data, int k, const FitConfig& config) {
  const std::size_t n = data.profiles.size();
  if (n == 0) throw std::invalid_argument("fit: empty dataset");
  if (k < 1) throw std::invalid_argument("fit: k must be positive");
  if (static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("fit: k exceeds the number of profiles");
  if (config.max_iters < 1) throw std::invalid_argument("fit: max_iters must be >= 1");
  const std::size_t hours = data.profiles.front().weights.size();

  // Greedy farthest-point seeding: the first center is drawn from the seed,
  // every later one is the point farthest from the chosen set.
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> chosen;
  chosen.push_back(static_cast<std::size_t>(rng() % n));
  Vec nearest(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    const Vec& last = data.profiles[chosen.back()].weights;
    for (std::size_t i = 0; i < n; ++i)
      nearest[i] = std::min(nearest[i], l1_distance(data.profiles[i].weights, last));
    std::size_t far = 0;
    double far_dist = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i] > far_dist) {
        far_dist = nearest[i];
        far = i;
      }
    }
    chosen.push_back(far);
  }

  ClusterModel model;
  model.centers.reserve(static_cast<std::size_t>(k));
  for (std::size_t idx : chosen) model.centers.push_back(data.profiles[idx].weights);
  model.assignment.assign(n, 0);
  model.sizes.assign(static_cast<std::size_t>(k), 0);

  auto assign_all = [&]() -> long {
    std::vector<int> next(n);
    parallel_for(n, config.threads, [&](std::size_t i) {
      next[i] = nearest_center(model.centers, data.profiles[i].weights);
    });
    long changed = 0;
    std::fill(model.sizes.begin(), model.sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (next[i] != model.assignment[i]) ++changed;
      model.assignment[i] = next[i];
      ++model.sizes[static_cast<std::size_t>(next[i])];
    }
    return changed;
  };
  auto compute_objective = [&]() {
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      obj += l1_distance(data.profiles[i].weights,
                         model.centers[static_cast<std::size_t>(model.assignment[i])]);
    return obj;
  };
  auto update_all = [&]() {
    std::vector<std::vector<const Vec*>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i)
      members[static_cast<std::size_t>(model.assignment[i])].push_back(
          &data.profiles[i].weights);
    Vec scratch;
    std::vector<int> empties;
    for (int c = 0; c < k; ++c) {
      if (members[static_cast<std::size_t>(c)].empty()) {
        empties.push_back(c);
        continue;
      }
      model.centers[static_cast<std::size_t>(c)] =
          update_center(members[static_cast<std::size_t>(c)], hours, config.center_update,
                        scratch);
    }
    // Reseed each emptied center at the member currently farthest from its
    // own center (each donor used once per round; ties -> lowest index).
    if (!empties.empty()) {
      std::vector<bool> donated(n, false);
      for (int c : empties) {
        std::size_t far = 0;
        double far_dist = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (donated[i]) continue;
          double d = l1_distance(data.profiles[i].weights,
                                 model.centers[static_cast<std::size_t>(model.assignment[i])]);
          if (d > far_dist) {
            far_dist = d;
            far = i;
          }
        }
        donated[far] = true;
        model.centers[static_cast<std::size_t>(c)] = data.profiles[far].weights;
      }
    }
  };

  assign_all();
  model.objective = compute_objective();
  model.objective_history.push_back(model.objective);

  double prev_obj = model.objective;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    update_all();
    long changed = assign_all();
    model.objective = compute_objective();
    model.objective_history.push_back(model.objective);
    model.iterations = iter;
    if (changed == 0) break;
    if (prev_obj - model.objective < config.tol) break;
    prev_obj = model.objective;
  }

  // A cluster emptied by the very last reassignment gets one repair pass.
  if (std::find(model.sizes.begin(), model.sizes.end(), 0) != model.sizes.end()) {
    update_all();
    assign_all();
    model.objective = compute_objective();
    model.objective_history.push_back(model.objective);
  }
  return model;
}

int assign(const ClusterModel& model, const Vec& weights) {
  if (model.centers.empty()) throw std::invalid_argument("assign: model is not fitted");
  return nearest_center(model.centers, weights);
}

double cluster_radius(const ClusterModel& model, const Dataset& data, int cluster) {
  if (cluster < 0 || static_cast<std::size_t>(cluster) >= model.centers.size())
    throw std::invalid_argument("cluster_radius: unknown cluster index");
  double radius = -1.0;
  const Vec& center = model.centers[static_cast<std::size_t>(cluster)];
  for (std::size_t i = 0; i < data.profiles.size(); ++i) {
    if (model.assignment[i] != cluster) continue;
    radius = std::max(radius, l1_distance(center, data.profiles[i].weights));
  }
  if (radius < 0.0) throw std::runtime_error("cluster_radius: empty cluster");
  return radius;
}

void write_centers_csv(const std::string& path, const ClusterModel& model, int hours) {
  csv::Writer w(path);
  std::vector<std::string> header = {"cluster"};
  for (const auto& c : csv::hour_cols(hours)) header.push_back(c);
  header.push_back("size");
  w.row(header);
  for (std::size_t c = 0; c < model.centers.size(); ++c) {
    std::vector<std::string> fields = {std::to_string(c)};
    for (double v : model.centers[c]) fields.push_back(csv::fmt(v));
    fields.push_back(std::to_string(model.sizes[c]));
    w.row(fields);
  }
  w.close();
}

void write_assignments_csv(const std::string& path, const Dataset& data,
                           const ClusterModel& model) {
  csv::Writer w(path);
  w.row({"profile_id", "cluster"});
  for (std::size_t i = 0; i < data.profiles.size(); ++i)
    w.row({data.profiles[i].profile_id, std::to_string(model.assignment[i])});
  w.close();
}

CentersFile read_centers_csv(const std::string& path, int hours) {
  csv::Table table = csv::read(path);
  std::vector<std::string> expected = {"cluster"};
  for (const auto& c : csv::hour_cols(hours)) expected.push_back(c);
  expected.push_back("size");
  if (table.header != expected)
    throw InputError("'" + path + "': malformed header for a centers file");
  CentersFile out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& fields = table.rows[r];
    const std::string ctx = "'" + path + "' row " + std::to_string(table.line_numbers[r]);
    if (fields.size() != expected.size()) throw InputError(ctx + "': wrong field count");
    long cluster = csv::to_long(fields[0], ctx);
    if (cluster != static_cast<long>(r))
      throw InputError(ctx + "': clusters must be 0..k-1 in order");
    Vec center(static_cast<std::size_t>(hours));
    for (int t = 0; t < hours; ++t)
      center[static_cast<std::size_t>(t)] = csv::to_double(fields[static_cast<std::size_t>(1 + t)], ctx);
    out.centers.push_back(std::move(center));
    out.sizes.push_back(static_cast<int>(csv::to_long(fields.back(), ctx)));
  }
  if (out.centers.empty()) throw InputError("'" + path + "': no centers");
  return out;
}

std::vector<std::pair<std::string, int>> read_assignments_csv(const std::string& path) {
  csv::Table table = csv::read(path);
  if (table.header != std::vector<std::string>{"profile_id", "cluster"})
    throw InputError("'" + path + "': malformed header for an assignments file");
  std::vector<std::pair<std::string, int>> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& fields = table.rows[r];
    const std::string ctx = "'" + path + "' row " + std::to_string(table.line_numbers[r]);
    if (fields.size() != 2) throw InputError(ctx + "': wrong field count");
    out.emplace_back(fields[0], static_cast<int>(csv::to_long(fields[1], ctx)));
  }
  return out;
}

ClusterModel model_from_files(const CentersFile& centers,
                              const std::vector<std::pair<std::string, int>>& assignments,
                              const Dataset& data) {
  if (assignments.size() != data.profiles.size())
    throw InputError("assignments.csv does not match profiles.csv (row count)");
  ClusterModel model;
  model.centers = centers.centers;
  model.sizes.assign(centers.centers.size(), 0);
  model.assignment.resize(assignments.size());
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i].first != data.profiles[i].profile_id)
      throw InputError("assignments.csv does not match profiles.csv (profile_id at row " +
                       std::to_string(i + 2) + ")");
    int c = assignments[i].second;
    if (c < 0 || static_cast<std::size_t>(c) >= model.centers.size())
      throw InputError("assignments.csv: cluster index out of range");
    model.assignment[i] = c;
    ++model.sizes[static_cast<std::size_t>(c)];
  }
  if (model.sizes != centers.sizes)
    throw InputError("centers.csv sizes do not match assignments.csv");
  double obj = 0.0;
  for (std::size_t i = 0; i < data.profiles.size(); ++i)
    obj += l1_distance(data.profiles[i].weights,
                       model.centers[static_cast<std::size_t>(model.assignment[i])]);
  model.objective = obj;
  return model;
}

}  // namespace cpv
