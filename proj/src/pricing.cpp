#include "cpv/pricing.hpp"

#include <cmath>
#include <stdexcept>

#include "cpv/csv.hpp"

namespace cpv {

double mci(const Vec& profile, const PriceCurve& curve) {
  if (profile.size() != curve.prices.size())
    throw std::invalid_argument("mci: dimension mismatch");
  double sum = 0.0;
  for (double w : profile) {
    if (w < 0.0) throw std::invalid_argument("mci: profile has a negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument("mci: profile is not l1-normalized");
  double price = 0.0;
  for (std::size_t t = 0; t < profile.size(); ++t) price += profile[t] * curve.prices[t];
  return price;
}

ClusterPrices price_centers(const std::vector<Vec>& centers, const PriceCurve& curve) {
  ClusterPrices out;
  out.price.reserve(centers.size());
  for (const Vec& c : centers) out.price.push_back(mci(c, curve));
  return out;
}

ClusterPrices price_clusters(const ClusterModel& model, const PriceCurve& curve) {
  return price_centers(model.centers, curve);
}

PriceCurve load_price_curve(const std::string& path, int hours) {
  csv::Table table = csv::read(path);
  if (table.header != std::vector<std::string>{"hour", "price"})
    throw InputError("'" + path + "': malformed header, expected 'hour,price'");
  PriceCurve curve;
  curve.prices.assign(static_cast<std::size_t>(hours), 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(hours), false);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& fields = table.rows[r];
    const std::string ctx = "'" + path + "' row " + std::to_string(table.line_numbers[r]);
    if (fields.size() != 2) throw InputError(ctx + "': wrong field count");
    long hour = csv::to_long(fields[0], ctx);
    if (hour < 0 || hour >= hours)
      throw InputError(ctx + "': hour " + std::to_string(hour) + " out of range");
    if (seen[static_cast<std::size_t>(hour)])
      throw InputError("'" + path + "': duplicate hour " + std::to_string(hour));
    double price = csv::to_double(fields[1], ctx);
    if (!std::isfinite(price))
      throw InputError("'" + path + "': non-finite price at hour " + std::to_string(hour));
    curve.prices[static_cast<std::size_t>(hour)] = price;
    seen[static_cast<std::size_t>(hour)] = true;
  }
  for (int t = 0; t < hours; ++t)
    if (!seen[static_cast<std::size_t>(t)])
      throw InputError("'" + path + "': missing hour " + std::to_string(t));
  return curve;
}

void write_prices_csv(const std::string& path, const PriceCurve& curve) {
  csv::Writer w(path);
  w.row({"hour", "price"});
  for (std::size_t t = 0; t < curve.prices.size(); ++t)
    w.row({std::to_string(t), csv::fmt(curve.prices[t])});
  w.close();
}

PriceCurve synthetic_price_curve(int hours) {
  if (hours < 1) throw std::invalid_argument("hours must be positive");
  PriceCurve curve;
  curve.prices.reserve(static_cast<std::size_t>(hours));
  for (int t = 0; t < hours; ++t) {
    // Map onto a 24h clock so small H still gets a day shape.
    double x = (t + 0.5) * 24.0 / hours;
    double morning = std::exp(-(x - 8.5) * (x - 8.5) / (2.0 * 2.0 * 2.0));
    double evening = std::exp(-(x - 19.0) * (x - 19.0) / (2.0 * 2.5 * 2.5));
    curve.prices.push_back(0.10 + 0.20 * morning + 0.35 * evening);
  }
  return curve;
}

}  // namespace cpv
