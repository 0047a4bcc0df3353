#pragma once

#include <string>
#include <vector>

#include "cpv/disguise.hpp"
#include "cpv/pricing.hpp"
#include "cpv/profiles.hpp"

namespace cpv {

// Actual scales the bill difference by the profile's real daily kWh;
// normalized reproduces the per-unit-energy form.
enum class BenefitBasis { Actual, Normalized };

struct BenefitRecord {
  std::string profile_id;
  double benefit = 0.0;  // currency per day
  BenefitBasis basis = BenefitBasis::Actual;
  bool strategic = false;
};

struct UtilityParams {
  double u_max = 0.0;  // satiation constant
  double c = 0.0;      // discomfort per unit l1 deviation, >= 0
};

struct BenefitCurveRow {
  double theta = 0.0;
  double avg_cumulative = 0.0;  // mean benefit over profiles with cr <= theta
  double avg_marginal = 0.0;    // mean over profiles whose cr falls in the last bin
  long n_strategic = 0;
};

// Bill difference of disguising. Since the original and disguised profiles
// both have unit sum, the bill difference reduces to p_home - p_target
// (times total energy under the actual basis). Non-strategic records get
// benefit 0.
BenefitRecord bill_benefit(const DisguiseRecord& record, const NormalizedProfile& profile,
                           const ClusterPrices& prices, BenefitBasis basis);

// u_max - c * ||d_tilde - d||_1
double happiness(const Vec& d_tilde, const Vec& d, const UtilityParams& params);

// happiness minus the electricity bill at the given rate.
double utility(const Vec& profile_weights, double total_energy, double price, const Vec& d_ref,
               const UtilityParams& params);

// utility(disguised, p_target) - utility(original, p_home); positive means
// disguising pays off net of discomfort. 0 for non-strategic records.
double utility_gain(const DisguiseRecord& record, const NormalizedProfile& profile,
                    const ClusterPrices& prices, const UtilityParams& params);

std::vector<BenefitCurveRow> benefit_curves(const std::vector<DisguiseRecord>& records,
                                            const std::vector<NormalizedProfile>& profiles,
                                            const ClusterPrices& prices,
                                            const std::vector<double>& grid, BenefitBasis basis);

void write_benefits_csv(const std::string& path, const std::vector<BenefitRecord>& records);
void write_benefit_curve_csv(const std::string& path, const std::vector<BenefitCurveRow>& rows);

}  // namespace cpv
