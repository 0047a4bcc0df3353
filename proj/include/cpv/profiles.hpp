#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpv/types.hpp"

namespace cpv {

// One consumer-day of raw hourly energy in kWh.
struct LoadProfile {
  std::string profile_id;
  std::string user_id;
  std::string date;  // ISO-8601 YYYY-MM-DD
  Vec energy;
};

// l1-unit-sum profile; all pricing and clustering math operates on these.
struct NormalizedProfile {
  std::string profile_id;
  Vec weights;
  double total_energy = 0.0;  // kWh of the original day
};

struct RejectedRow {
  long row = 0;  // 1-based line number in the source file
  std::string reason;
};

struct Dataset {
  std::vector<NormalizedProfile> profiles;  // ingestion order, stable
  std::vector<RejectedRow> rejected;
};

// weights = energy / sum(energy). Throws on all-zero, negative or non-finite
// entries.
NormalizedProfile normalize(const LoadProfile& raw);

// Reads `user_id,date,h00,...` rows. Invalid rows (negative, non-finite,
// missing, all-zero, bad date) are recorded in Dataset::rejected; a wrong
// field count or a bad header is fatal.
Dataset ingest_csv(const std::string& path, int hours);

struct MixtureSpec {
  std::vector<Vec> prototypes;  // non-negative, any positive scale
  std::vector<int> counts;      // one per prototype
  double sigma = 0.0;           // additive noise level, truncated at zero
  std::uint64_t seed = 1;
};

struct SynthResult {
  Dataset dataset;
  std::vector<int> labels;  // generating prototype per accepted profile
};

// Deterministic for a fixed seed (the gaussian draw is hand-rolled, so
// results do not depend on the standard library implementation).
SynthResult synthesize(const MixtureSpec& spec);

void write_profiles_csv(const std::string& path, const std::vector<LoadProfile>& rows, int hours);
void write_rejected_csv(const std::string& path, const std::vector<RejectedRow>& rejected);

}  // namespace cpv
