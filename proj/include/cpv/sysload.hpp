#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpv/clustering.hpp"
#include "cpv/disguise.hpp"
#include "cpv/profiles.hpp"

namespace cpv {

// Cr: each strategic profile moves only as far as its own minimal effort.
// Full: it relocates all the way to the target center.
enum class DisguiseExtent { Cr, Full };

struct SystemLoadRow {
  double theta = 0.0;
  Vec hourly_load;  // kWh per hour
  double peak = 0.0;
  int peak_hour = 0;
  double peak_ratio = 1.0;  // vs the theta = 0 peak
};

// Every profile with cr <= theta is replaced by its disguised profile scaled
// by its total energy; totals are conserved. baseline_peak, when absent, is
// computed from a theta = 0 pass.
SystemLoadRow aggregate(const Dataset& data, const std::vector<DisguiseRecord>& records,
                        const ClusterModel& model, double theta,
                        DisguiseExtent extent = DisguiseExtent::Cr,
                        std::optional<double> baseline_peak = std::nullopt);

std::vector<SystemLoadRow> peak_sweep(const Dataset& data,
                                      const std::vector<DisguiseRecord>& records,
                                      const ClusterModel& model, const std::vector<double>& grid,
                                      DisguiseExtent extent = DisguiseExtent::Cr, int threads = 0);

void write_sysload_csv(const std::string& path, const std::vector<SystemLoadRow>& rows, int hours);

}  // namespace cpv
