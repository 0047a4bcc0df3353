#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cpv/errors.hpp"
#include "cpv/profiles.hpp"
#include "cpv/types.hpp"

namespace cpv {

enum class CenterUpdate { Median, Mean };

struct FitConfig {
  std::uint64_t seed = 1;
  int max_iters = 300;
  double tol = 1e-10;  // absolute objective improvement
  CenterUpdate center_update = CenterUpdate::Median;
  int threads = 0;  // 0 = machine parallelism
};

struct ClusterModel {
  std::vector<Vec> centers;  // unit l1 sum each
  std::vector<int> assignment;  // profile index -> cluster index
  std::vector<int> sizes;
  double objective = 0.0;  // total l1 distance of members to their centers
  int iterations = 0;
  std::vector<double> objective_history;  // objective after seeding, then per iteration
};

double l1_distance(const Vec& a, const Vec& b);

// Lloyd-style alternation under the l1 metric. Centers update by
// coordinate-wise median (objective-consistent) or mean, re-normalized to
// unit sum after every update. Initialization is seeded greedy
// farthest-point; ties always break to the lowest index, so a fixed
// (data, k, seed, config) gives a bit-identical model.
ClusterModel fit(const Dataset& data, int k, const FitConfig& config = {});

// Nearest center under l1; ties -> lowest index.
int assign(const ClusterModel& model, const Vec& weights);

// Max member distance to the cluster center. Throws on an empty cluster.
double cluster_radius(const ClusterModel& model, const Dataset& data, int cluster);

void write_centers_csv(const std::string& path, const ClusterModel& model, int hours);
void write_assignments_csv(const std::string& path, const Dataset& data, const ClusterModel& model);

struct CentersFile {
  std::vector<Vec> centers;
  std::vector<int> sizes;
};

CentersFile read_centers_csv(const std::string& path, int hours);
std::vector<std::pair<std::string, int>> read_assignments_csv(const std::string& path);

// Rebuilds a model from emitted centers.csv/assignments.csv against the
// ingested dataset; validates that ids and sizes line up.
ClusterModel model_from_files(const CentersFile& centers,
                              const std::vector<std::pair<std::string, int>>& assignments,
                              const Dataset& data);

}  // namespace cpv
