#include "cpv/profiles.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "cpv/csv.hpp"

namespace cpv {

namespace {

bool valid_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (s[i] < '0' || s[i] > '9') return false;
  int month = (s[5] - '0') * 10 + (s[6] - '0');
  int day = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

// Portable gaussian via Box-Muller so synthetic datasets are reproducible
// across standard library implementations.
double gauss(std::mt19937_64& rng) {
  double u1 = 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;  // (0, 1]
  double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;        // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace

NormalizedProfile normalize(const LoadProfile& raw) {
  double total = 0.0;
  for (double e : raw.energy) {
    if (!std::isfinite(e)) throw std::invalid_argument("non-finite energy");
    if (e < 0.0) throw std::invalid_argument("negative energy");
    total += e;
  }
  if (total <= 0.0) throw std::invalid_argument("zero total energy");
  NormalizedProfile p;
  p.profile_id = raw.profile_id;
  p.total_energy = total;
  p.weights.resize(raw.energy.size());
  for (std::size_t t = 0; t < raw.energy.size(); ++t) p.weights[t] = raw.energy[t] / total;
  return p;
}

Dataset ingest_csv(const std::string& path, int hours) {
  if (hours < 1) throw std::invalid_argument("hours must be positive");
  csv::Table table = csv::read(path);

  std::vector<std::string> expected = {"user_id", "date"};
  for (const auto& c : csv::hour_cols(hours)) expected.push_back(c);
  if (table.header != expected) {
    throw InputError("'" + path + "': malformed header, expected 'user_id,date," +
                     csv::hour_col(0) + ",...," + csv::hour_col(hours - 1) + "'");
  }

  Dataset ds;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& fields = table.rows[r];
    long line = table.line_numbers[r];
    if (fields.size() != expected.size()) {
      throw InputError("'" + path + "' row " + std::to_string(line) + ": expected " +
                       std::to_string(expected.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    const std::string& user = fields[0];
    const std::string& date = fields[1];
    std::string reason;
    if (!valid_iso_date(date)) reason = "malformed date";
    Vec energy(static_cast<std::size_t>(hours), 0.0);
    double total = 0.0;
    for (int t = 0; t < hours && reason.empty(); ++t) {
      const std::string& cell = fields[static_cast<std::size_t>(2 + t)];
      if (cell.empty()) {
        reason = "missing value";
        break;
      }
      double v = 0.0;
      if (!csv::try_double(cell, v)) {
        reason = "malformed number";
      } else if (!std::isfinite(v)) {
        reason = "non-finite energy";
      } else if (v < 0.0) {
        reason = "negative energy";
      } else {
        energy[static_cast<std::size_t>(t)] = v;
        total += v;
      }
    }
    if (reason.empty() && total <= 0.0) reason = "zero total energy";
    if (!reason.empty()) {
      ds.rejected.push_back({line, reason});
      continue;
    }
    NormalizedProfile p;
    p.profile_id = user + ":" + date;
    p.total_energy = total;
    p.weights.resize(energy.size());
    for (std::size_t t = 0; t < energy.size(); ++t) p.weights[t] = energy[t] / total;
    ds.profiles.push_back(std::move(p));
  }
  return ds;
}

SynthResult synthesize(const MixtureSpec& spec) {
  if (spec.prototypes.empty()) throw std::invalid_argument("empty prototype list");
  if (spec.counts.size() != spec.prototypes.size())
    throw std::invalid_argument("counts must match prototypes");
  if (spec.sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  const std::size_t hours = spec.prototypes.front().size();
  for (const auto& proto : spec.prototypes) {
    if (proto.size() != hours) throw std::invalid_argument("prototype length mismatch");
    for (double v : proto) {
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("prototypes must be non-negative and finite");
    }
  }

  std::mt19937_64 rng(spec.seed);
  SynthResult result;
  long row = 0;
  for (std::size_t j = 0; j < spec.prototypes.size(); ++j) {
    for (int c = 0; c < spec.counts[j]; ++c) {
      ++row;
      Vec energy(hours);
      double total = 0.0;
      for (std::size_t t = 0; t < hours; ++t) {
        double v = spec.prototypes[j][t];
        if (spec.sigma > 0.0) v += spec.sigma * gauss(rng);
        energy[t] = v > 0.0 ? v : 0.0;
        total += energy[t];
      }
      if (total <= 0.0) {
        result.dataset.rejected.push_back({row, "zero total energy"});
        continue;
      }
      NormalizedProfile p;
      char id[24];
      std::snprintf(id, sizeof(id), "s%05ld", row);
      p.profile_id = id;
      p.total_energy = total;
      p.weights.resize(hours);
      for (std::size_t t = 0; t < hours; ++t) p.weights[t] = energy[t] / total;
      result.dataset.profiles.push_back(std::move(p));
      result.labels.push_back(static_cast<int>(j));
    }
  }
  return result;
}

void write_profiles_csv(const std::string& path, const std::vector<LoadProfile>& rows,
                        int hours) {
  csv::Writer w(path);
  std::vector<std::string> header = {"user_id", "date"};
  for (const auto& c : csv::hour_cols(hours)) header.push_back(c);
  w.row(header);
  for (const auto& r : rows) {
    std::vector<std::string> fields = {r.user_id, r.date};
    for (double e : r.energy) fields.push_back(csv::fmt(e));
    w.row(fields);
  }
  w.close();
}

void write_rejected_csv(const std::string& path, const std::vector<RejectedRow>& rejected) {
  csv::Writer w(path);
  w.row({"row_number", "reason"});
  for (const auto& r : rejected) w.row({std::to_string(r.row), r.reason});
  w.close();
}

}  // namespace cpv
