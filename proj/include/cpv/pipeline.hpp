#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpv/clustering.hpp"
#include "cpv/disguise.hpp"
#include "cpv/economics.hpp"
#include "cpv/sysload.hpp"
#include "cpv/zones.hpp"

namespace cpv {

std::string to_string(CenterUpdate v);
std::string to_string(SwitchRule v);
std::string to_string(BenefitBasis v);
std::string to_string(DisguiseExtent v);
CenterUpdate parse_center_update(const std::string& s);
SwitchRule parse_switch_rule(const std::string& s);
BenefitBasis parse_benefit_basis(const std::string& s);
DisguiseExtent parse_disguise_extent(const std::string& s);

struct RunConfig {
  std::string profiles_path;
  std::string prices_path;
  bool synthetic_prices = false;
  std::string out_dir = "out";
  int k = 30;
  std::uint64_t seed = 1;
  int hours = 24;
  CenterUpdate center_update = CenterUpdate::Median;
  SwitchRule switch_rule = SwitchRule::Paper;
  BenefitBasis benefit_basis = BenefitBasis::Actual;
  DisguiseExtent disguise_extent = DisguiseExtent::Cr;
  ThetaGrid grid{};
  double trajectory_theta = 0.01;
  bool has_utility = false;
  UtilityParams utility{};
  int threads = 0;
  int max_iters = 300;
  double tol = 1e-10;

  nlohmann::json to_json() const;
};

// `key = value` lines, # comments; keys spell the long CLI flags.
void apply_config_file(RunConfig& cfg, const std::string& path);

// Shared state for one CLI invocation: the manifest plus the list of files
// written so far (so `run` can clean up on failure). Staged subcommands load
// the existing manifest and verify the checksums of everything they consume.
struct PipelineContext {
  RunConfig cfg;
  nlohmann::json manifest;
  std::vector<std::string> written;

  PipelineContext(const RunConfig& config, bool fresh);

  std::string out(const std::string& name) const;
  void consume(const std::string& path, const std::string& key);
  void record(const std::string& path, const std::string& key);
  void set_count(const std::string& key, long value);
  void stage_time(const std::string& stage, double ms);
  void save();
};

// Pipeline stages; each reads its inputs from files and emits its reports,
// so a staged sequence and a monolithic run produce byte-identical output.
void pipe_validate(PipelineContext& ctx);
void pipe_cluster(PipelineContext& ctx);    // ingest + fit
ClusterPrices pipe_price(PipelineContext& ctx);
void pipe_disguise(PipelineContext& ctx);
void pipe_zones(PipelineContext& ctx);
void pipe_economics(PipelineContext& ctx);
void pipe_sysload(PipelineContext& ctx);

// Full pipeline; partial outputs are removed on failure. Returns the final
// manifest.
nlohmann::json run(const RunConfig& cfg);

struct SynthConfig {
  std::string out_path = "profiles.csv";
  std::string prices_out;  // optional: also write the synthetic price curve
  int n = 600;
  int blobs = 3;
  double sigma = 0.01;
  std::uint64_t seed = 1;
  int hours = 24;
};

// Writes a demo profiles.csv from procedurally generated blob prototypes.
void run_synth(const SynthConfig& cfg);

}  // namespace cpv
