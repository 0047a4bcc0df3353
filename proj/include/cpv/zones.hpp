#pragma once

#include <string>
#include <vector>

#include "cpv/clustering.hpp"
#include "cpv/disguise.hpp"

namespace cpv {

struct ThetaGrid {
  double start = 0.0;
  double stop = 0.5;
  double step = 0.005;

  void validate() const;  // 0 <= start < stop, step > 0, at least 2 points
  std::vector<double> points() const;
};

// One sweep row. cluster = -1 carries the population aggregate.
struct ZoneRow {
  double theta = 0.0;
  int cluster = 0;
  long n_sensitive = 0;
  double pct_sensitive = 0.0;
  double radius = 0.0;
};

// Count of cluster members with cr <= theta.
long n_sensitive(const std::vector<DisguiseRecord>& records, int cluster, double theta);

// Minimum center distance over strategic members (cr <= theta); when none
// exist the stable zone covers the whole cluster, so the full cluster radius
// is returned.
double stable_radius(const std::vector<DisguiseRecord>& records, const Dataset& data,
                     const ClusterModel& model, int cluster, double theta);

// One row per (grid point x cluster) plus an aggregate row per grid point
// (cluster = -1), ordered by (theta, cluster).
std::vector<ZoneRow> sweep(const std::vector<DisguiseRecord>& records, const Dataset& data,
                           const ClusterModel& model, const std::vector<double>& grid,
                           int threads = 0);

void write_zones_csv(const std::string& path, const std::vector<ZoneRow>& rows);

}  // namespace cpv
