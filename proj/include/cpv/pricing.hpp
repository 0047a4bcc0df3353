#pragma once

#include <string>

#include "cpv/clustering.hpp"
#include "cpv/types.hpp"

namespace cpv {

// Real-time hourly price curve (currency per kWh). Negative entries are
// permitted; real-time markets can clear negative.
struct PriceCurve {
  Vec prices;
};

struct ClusterPrices {
  Vec price;  // price[n] = mci of center n
};

// Price-weighted sum of a unit-sum profile. The input must sum to 1 within
// 1e-6.
double mci(const Vec& profile, const PriceCurve& curve);

ClusterPrices price_centers(const std::vector<Vec>& centers, const PriceCurve& curve);
ClusterPrices price_clusters(const ClusterModel& model, const PriceCurve& curve);

// CSV schema: `hour,price`, one row per hour 0..H-1 in any order.
PriceCurve load_price_curve(const std::string& path, int hours);
void write_prices_csv(const std::string& path, const PriceCurve& curve);

// Synthetic two-peak day shape for demos; not derived from any market data.
PriceCurve synthetic_price_curve(int hours);

}  // namespace cpv
