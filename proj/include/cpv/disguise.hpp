#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cpv/clustering.hpp"
#include "cpv/pricing.hpp"
#include "cpv/profiles.hpp"
#include "cpv/types.hpp"

namespace cpv {

// Paper: the modified profile only has to look closer to the target center
// than to the home center. Strict: it has to be nearest to the target among
// all centers.
enum class SwitchRule { Paper, Strict };

struct EffortResult {
  double lambda_star = 0.0;  // +inf when infeasible
  int target = -1;
  bool feasible = false;
};

// Per-profile disguise summary. target is -1 and disguised_weights empty when
// no cheaper cluster is reachable (cr = +inf).
struct DisguiseRecord {
  std::string profile_id;
  int home_cluster = -1;
  double cr = 0.0;
  int target = -1;
  Vec disguised_weights;
};

// The switch inequality, evaluated literally:
//   ||(1-l)d + l*c_target - c_home||_1 >= ||(1-l)(d - c_target)||_1
bool switch_condition(const Vec& d, const Vec& c_home, const Vec& c_target, double lambda);

// Smallest lambda in [0,1] satisfying the switch inequality. Writes the
// inequality as f(l) = ||a + l*v||_1 - (1-l)*D with a = d - c_home,
// v = c_target - d, D = ||d - c_target||_1. f is convex piecewise-linear
// with breakpoints -a_t/v_t; the sign-change segment is solved exactly, so
// no iteration or tolerance is involved. f(1) = ||c_target - c_home||_1 >= 0
// guarantees a solution exists.
double min_effort(const Vec& d, const Vec& c_home, const Vec& c_target);

// (1-lambda)*d + lambda*c_target. Throws when lambda is outside [0,1].
Vec disguised_profile(const Vec& d, const Vec& c_target, double lambda);

// Cheapest-reachable-cluster search over candidates {n != home : p_n < p_home}.
// Effort ties break to the lower-priced target, then the lower index.
EffortResult best_effort(const Vec& d, const ClusterModel& model, const ClusterPrices& prices,
                         int home, SwitchRule rule);

DisguiseRecord compute_cr(std::size_t i, const Dataset& data, const ClusterModel& model,
                          const ClusterPrices& prices, SwitchRule rule = SwitchRule::Paper);

std::vector<DisguiseRecord> compute_all_cr(const Dataset& data, const ClusterModel& model,
                                           const ClusterPrices& prices,
                                           SwitchRule rule = SwitchRule::Paper, int threads = 0);

// Counts of profiles with cr <= theta, keyed by (home, target).
std::map<std::pair<int, int>, long> trajectories(const std::vector<DisguiseRecord>& records,
                                                 double theta);

void write_cr_csv(const std::string& path, const std::vector<DisguiseRecord>& records);

// Reads cr.csv back; disguised weights are not stored in the file, use
// attach_disguised to recompute them from the centers.
std::vector<DisguiseRecord> read_cr_csv(const std::string& path);
void attach_disguised(std::vector<DisguiseRecord>& records, const Dataset& data,
                      const ClusterModel& model);

void write_trajectories_csv(const std::string& path, double theta,
                            const std::map<std::pair<int, int>, long>& counts);

}  // namespace cpv
