#include "cpv/sysload.hpp"

#include <cmath>
#include <stdexcept>

#include "cpv/csv.hpp"
#include "cpv/parallel.hpp"

namespace cpv {

SystemLoadRow aggregate(const Dataset& data, const std::vector<DisguiseRecord>& records,
                        const ClusterModel& model, double theta, DisguiseExtent extent,
                        std::optional<double> baseline_peak) {
  if (theta < 0.0) throw std::invalid_argument("aggregate: theta must be >= 0");
  if (records.size() != data.profiles.size())
    throw std::invalid_argument("aggregate: records do not cover all profiles");
  const std::size_t hours = data.profiles.empty() ? 0 : data.profiles.front().weights.size();

  SystemLoadRow row;
  row.theta = theta;
  row.hourly_load.assign(hours, 0.0);
  for (std::size_t i = 0; i < data.profiles.size(); ++i) {
    const NormalizedProfile& p = data.profiles[i];
    const DisguiseRecord& r = records[i];
    const bool disguises = std::isfinite(r.cr) && r.cr <= theta;
    const Vec* weights = &p.weights;
    if (disguises) {
      if (extent == DisguiseExtent::Full) {
        weights = &model.centers[static_cast<std::size_t>(r.target)];
      } else {
        if (r.disguised_weights.empty())
          throw std::logic_error("aggregate: record has no disguised weights attached");
        weights = &r.disguised_weights;
      }
    }
    for (std::size_t t = 0; t < hours; ++t) row.hourly_load[t] += p.total_energy * (*weights)[t];
  }

  row.peak = 0.0;
  row.peak_hour = 0;
  for (std::size_t t = 0; t < hours; ++t) {
    if (row.hourly_load[t] > row.peak) {
      row.peak = row.hourly_load[t];
      row.peak_hour = static_cast<int>(t);
    }
  }
  double base = baseline_peak ? *baseline_peak
                              : (theta == 0.0
                                     ? row.peak
                                     : aggregate(data, records, model, 0.0, extent).peak);
  row.peak_ratio = base > 0.0 ? row.peak / base : 1.0;
  return row;
}

std::vector<SystemLoadRow> peak_sweep(const Dataset& data,
                                      const std::vector<DisguiseRecord>& records,
                                      const ClusterModel& model, const std::vector<double>& grid,
                                      DisguiseExtent extent, int threads) {
  const double baseline = aggregate(data, records, model, 0.0, extent).peak;
  std::vector<SystemLoadRow> rows(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t g) {
    rows[g] = aggregate(data, records, model, grid[g], extent, baseline);
  });
  return rows;
}

void write_sysload_csv(const std::string& path, const std::vector<SystemLoadRow>& rows,
                       int hours) {
  csv::Writer w(path);
  std::vector<std::string> header = {"theta"};
  for (const auto& c : csv::hour_cols(hours)) header.push_back(c);
  header.push_back("peak");
  header.push_back("peak_hour");
  header.push_back("peak_ratio");
  w.row(header);
  for (const auto& r : rows) {
    std::vector<std::string> fields = {csv::fmt(r.theta)};
    for (double v : r.hourly_load) fields.push_back(csv::fmt(v));
    fields.push_back(csv::fmt(r.peak));
    fields.push_back(std::to_string(r.peak_hour));
    fields.push_back(csv::fmt(r.peak_ratio));
    w.row(fields);
  }
  w.close();
}

}  // namespace cpv
