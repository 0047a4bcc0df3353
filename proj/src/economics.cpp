#include "cpv/economics.hpp"

#include <cmath>
#include <stdexcept>

#include "cpv/clustering.hpp"
#include "cpv/csv.hpp"

namespace cpv {

namespace {

double cluster_price(const ClusterPrices& prices, int cluster, const char* what) {
  if (cluster < 0 || static_cast<std::size_t>(cluster) >= prices.price.size())
    throw std::invalid_argument(std::string(what) + ": missing cluster price");
  return prices.price[static_cast<std::size_t>(cluster)];
}

}  // namespace

BenefitRecord bill_benefit(const DisguiseRecord& record, const NormalizedProfile& profile,
                           const ClusterPrices& prices, BenefitBasis basis) {
  BenefitRecord out;
  out.profile_id = profile.profile_id;
  out.basis = basis;
  if (!std::isfinite(record.cr)) return out;  // benefit 0, non-strategic
  double p_home = cluster_price(prices, record.home_cluster, "bill_benefit");
  double p_target = cluster_price(prices, record.target, "bill_benefit");
  // Original and disguised profiles both have unit sum, so the bill
  // difference collapses to the price gap.
  double gap = p_home - p_target;
  out.benefit = basis == BenefitBasis::Actual ? profile.total_energy * gap : gap;
  out.strategic = true;
  return out;
}

double happiness(const Vec& d_tilde, const Vec& d, const UtilityParams& params) {
  return params.u_max - params.c * l1_distance(d_tilde, d);
}

double utility(const Vec& profile_weights, double total_energy, double price, const Vec& d_ref,
               const UtilityParams& params) {
  return happiness(profile_weights, d_ref, params) - price * total_energy;
}

double utility_gain(const DisguiseRecord& record, const NormalizedProfile& profile,
                    const ClusterPrices& prices, const UtilityParams& params) {
  if (!std::isfinite(record.cr)) return 0.0;
  if (record.disguised_weights.empty())
    throw std::logic_error("utility_gain: record has no disguised weights attached");
  double p_home = cluster_price(prices, record.home_cluster, "utility_gain");
  double p_target = cluster_price(prices, record.target, "utility_gain");
  double disguised = utility(record.disguised_weights, profile.total_energy, p_target,
                             profile.weights, params);
  double original =
      utility(profile.weights, profile.total_energy, p_home, profile.weights, params);
  return disguised - original;
}

std::vector<BenefitCurveRow> benefit_curves(const std::vector<DisguiseRecord>& records,
                                            const std::vector<NormalizedProfile>& profiles,
                                            const ClusterPrices& prices,
                                            const std::vector<double>& grid,
                                            BenefitBasis basis) {
  if (grid.empty()) throw std::invalid_argument("benefit_curves: empty grid");
  if (records.size() != profiles.size())
    throw std::invalid_argument("benefit_curves: records do not cover all profiles");

  std::vector<double> benefit(records.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i)
    benefit[i] = bill_benefit(records[i], profiles[i], prices, basis).benefit;

  std::vector<BenefitCurveRow> rows;
  rows.reserve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double theta = grid[g];
    // First bin is closed at zero: [0, theta_0]; later bins are
    // (theta_{g-1}, theta_g].
    const double bin_lo = g == 0 ? -1.0 : grid[g - 1];
    double cum_sum = 0.0, marg_sum = 0.0;
    long cum_n = 0, marg_n = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const double cr = records[i].cr;
      if (!(cr <= theta)) continue;
      cum_sum += benefit[i];
      ++cum_n;
      if (cr > bin_lo) {
        marg_sum += benefit[i];
        ++marg_n;
      }
    }
    BenefitCurveRow row;
    row.theta = theta;
    row.n_strategic = cum_n;
    row.avg_cumulative = cum_n == 0 ? 0.0 : cum_sum / static_cast<double>(cum_n);
    row.avg_marginal = marg_n == 0 ? 0.0 : marg_sum / static_cast<double>(marg_n);
    rows.push_back(row);
  }
  return rows;
}

void write_benefits_csv(const std::string& path, const std::vector<BenefitRecord>& records) {
  csv::Writer w(path);
  w.row({"profile_id", "benefit", "basis"});
  for (const auto& r : records)
    w.row({r.profile_id, csv::fmt(r.benefit),
           r.basis == BenefitBasis::Actual ? "actual" : "normalized"});
  w.close();
}

void write_benefit_curve_csv(const std::string& path, const std::vector<BenefitCurveRow>& rows) {
  csv::Writer w(path);
  w.row({"theta", "avg_cumulative", "avg_marginal", "n_strategic"});
  for (const auto& r : rows)
    w.row({csv::fmt(r.theta), csv::fmt(r.avg_cumulative), csv::fmt(r.avg_marginal),
           std::to_string(r.n_strategic)});
  w.close();
}

}  // namespace cpv
