#include "cpv/zones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpv/csv.hpp"
#include "cpv/parallel.hpp"

namespace cpv {

void ThetaGrid::validate() const {
  if (!(start >= 0.0)) throw std::invalid_argument("theta grid: start must be >= 0");
  if (!(stop > start)) throw std::invalid_argument("theta grid: stop must exceed start");
  if (!(step > 0.0)) throw std::invalid_argument("theta grid: step must be > 0");
  if (start + step > stop + step * 1e-9)
    throw std::invalid_argument("theta grid: needs at least 2 points");
}

std::vector<double> ThetaGrid::points() const {
  validate();
  std::vector<double> pts;
  for (std::size_t i = 0;; ++i) {
    double v = start + static_cast<double>(i) * step;
    if (v > stop + step * 1e-9) break;
    pts.push_back(v);
  }
  return pts;
}

long n_sensitive(const std::vector<DisguiseRecord>& records, int cluster, double theta) {
  if (cluster < 0) throw std::invalid_argument("n_sensitive: unknown cluster index");
  long count = 0;
  for (const auto& r : records)
    if (r.home_cluster == cluster && r.cr <= theta) ++count;
  return count;
}

double stable_radius(const std::vector<DisguiseRecord>& records, const Dataset& data,
                     const ClusterModel& model, int cluster, double theta) {
  if (cluster < 0 || static_cast<std::size_t>(cluster) >= model.centers.size())
    throw std::invalid_argument("stable_radius: unknown cluster index");
  const Vec& center = model.centers[static_cast<std::size_t>(cluster)];
  double min_strategic = std::numeric_limits<double>::infinity();
  bool any_member = false;
  bool any_strategic = false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (model.assignment[i] != cluster) continue;
    any_member = true;
    if (records[i].cr > theta) continue;
    any_strategic = true;
    min_strategic = std::min(min_strategic, l1_distance(center, data.profiles[i].weights));
  }
  if (!any_member) throw std::runtime_error("stable_radius: empty cluster");
  if (!any_strategic) return cluster_radius(model, data, cluster);
  return min_strategic;
}

std::vector<ZoneRow> sweep(const std::vector<DisguiseRecord>& records, const Dataset& data,
                           const ClusterModel& model, const std::vector<double>& grid,
                           int threads) {
  const std::size_t n = data.profiles.size();
  if (records.size() != n) throw std::invalid_argument("sweep: records do not cover all profiles");
  const int k = static_cast<int>(model.centers.size());

  // Distances to own centers and full radii are theta-independent.
  Vec dist(n);
  for (std::size_t i = 0; i < n; ++i)
    dist[i] = l1_distance(model.centers[static_cast<std::size_t>(model.assignment[i])],
                          data.profiles[i].weights);
  Vec full_radius(static_cast<std::size_t>(k), 0.0);
  double max_full_radius = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto c = static_cast<std::size_t>(model.assignment[i]);
    full_radius[c] = std::max(full_radius[c], dist[i]);
  }
  for (double r : full_radius) max_full_radius = std::max(max_full_radius, r);

  const std::size_t rows_per_theta = static_cast<std::size_t>(k) + 1;
  std::vector<ZoneRow> rows(grid.size() * rows_per_theta);
  parallel_for(grid.size(), threads, [&](std::size_t g) {
    const double theta = grid[g];
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    Vec radius(static_cast<std::size_t>(k), std::numeric_limits<double>::infinity());
    long total = 0;
    double agg_radius = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (records[i].cr > theta) continue;
      auto c = static_cast<std::size_t>(records[i].home_cluster);
      ++counts[c];
      ++total;
      radius[c] = std::min(radius[c], dist[i]);
      agg_radius = std::min(agg_radius, dist[i]);
    }
    ZoneRow* out = &rows[g * rows_per_theta];
    out[0].theta = theta;
    out[0].cluster = -1;
    out[0].n_sensitive = total;
    out[0].pct_sensitive = n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n);
    out[0].radius = total == 0 ? max_full_radius : agg_radius;
    for (int c = 0; c < k; ++c) {
      ZoneRow& row = out[static_cast<std::size_t>(c) + 1];
      row.theta = theta;
      row.cluster = c;
      row.n_sensitive = counts[static_cast<std::size_t>(c)];
      int size = model.sizes[static_cast<std::size_t>(c)];
      row.pct_sensitive =
          size == 0 ? 0.0 : static_cast<double>(row.n_sensitive) / static_cast<double>(size);
      row.radius = row.n_sensitive == 0 ? full_radius[static_cast<std::size_t>(c)]
                                        : radius[static_cast<std::size_t>(c)];
    }
  });
  return rows;
}

void write_zones_csv(const std::string& path, const std::vector<ZoneRow>& rows) {
  csv::Writer w(path);
  w.row({"theta", "cluster", "n_sensitive", "pct_sensitive", "radius"});
  for (const auto& r : rows)
    w.row({csv::fmt(r.theta), std::to_string(r.cluster), std::to_string(r.n_sensitive),
           csv::fmt(r.pct_sensitive), csv::fmt(r.radius)});
  w.close();
}

}  // namespace cpv
