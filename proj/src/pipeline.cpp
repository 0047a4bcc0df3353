#include "cpv/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <type_traits>

#include "cpv/csv.hpp"

namespace fs = std::filesystem;

namespace cpv {

std::string to_string(CenterUpdate v) { return v == CenterUpdate::Median ? "median" : "mean"; }
std::string to_string(SwitchRule v) { return v == SwitchRule::Paper ? "paper" : "strict"; }
std::string to_string(BenefitBasis v) {
  return v == BenefitBasis::Actual ? "actual" : "normalized";
}
std::string to_string(DisguiseExtent v) { return v == DisguiseExtent::Cr ? "cr" : "full"; }

CenterUpdate parse_center_update(const std::string& s) {
  if (s == "median") return CenterUpdate::Median;
  if (s == "mean") return CenterUpdate::Mean;
  throw InputError("center-update must be 'median' or 'mean', got '" + s + "'");
}
SwitchRule parse_switch_rule(const std::string& s) {
  if (s == "paper") return SwitchRule::Paper;
  if (s == "strict") return SwitchRule::Strict;
  throw InputError("switch-rule must be 'paper' or 'strict', got '" + s + "'");
}
BenefitBasis parse_benefit_basis(const std::string& s) {
  if (s == "actual") return BenefitBasis::Actual;
  if (s == "normalized") return BenefitBasis::Normalized;
  throw InputError("benefit-basis must be 'actual' or 'normalized', got '" + s + "'");
}
DisguiseExtent parse_disguise_extent(const std::string& s) {
  if (s == "cr") return DisguiseExtent::Cr;
  if (s == "full") return DisguiseExtent::Full;
  throw InputError("disguise-extent must be 'cr' or 'full', got '" + s + "'");
}

namespace {

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InputError("config: '" + key + "' must be a boolean, got '" + s + "'");
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Prefixes errors with the pipeline stage that raised them and records the
// stage wall time on success.
template <class F>
auto timed_stage(PipelineContext& ctx, const char* name, F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t0] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      ctx.stage_time(name, elapsed_ms());
    } else {
      auto result = fn();
      ctx.stage_time(name, elapsed_ms());
      return result;
    }
  } catch (const InputError& e) {
    throw InputError("stage " + std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error("stage " + std::string(name) + ": " + e.what());
  }
}

Dataset load_profiles(PipelineContext& ctx) {
  if (ctx.cfg.profiles_path.empty()) throw InputError("no profiles file configured");
  ctx.consume(ctx.cfg.profiles_path, "profiles.csv");
  Dataset ds = ingest_csv(ctx.cfg.profiles_path, ctx.cfg.hours);
  if (ds.profiles.empty())
    throw InputError("no valid profiles in '" + ctx.cfg.profiles_path + "'");
  ctx.set_count("profiles", static_cast<long>(ds.profiles.size()));
  ctx.set_count("rejected", static_cast<long>(ds.rejected.size()));
  return ds;
}

PriceCurve load_curve(PipelineContext& ctx) {
  if (ctx.cfg.synthetic_prices) return synthetic_price_curve(ctx.cfg.hours);
  if (ctx.cfg.prices_path.empty())
    throw InputError("no prices file configured (use --prices or --synthetic-prices)");
  ctx.consume(ctx.cfg.prices_path, "prices.csv");
  return load_price_curve(ctx.cfg.prices_path, ctx.cfg.hours);
}

ClusterModel load_model(PipelineContext& ctx, const Dataset& ds) {
  const std::string centers_path = ctx.out("centers.csv");
  const std::string assignments_path = ctx.out("assignments.csv");
  ctx.consume(centers_path, "centers.csv");
  ctx.consume(assignments_path, "assignments.csv");
  CentersFile centers = read_centers_csv(centers_path, ctx.cfg.hours);
  auto assignments = read_assignments_csv(assignments_path);
  return model_from_files(centers, assignments, ds);
}

std::vector<DisguiseRecord> load_records(PipelineContext& ctx, const Dataset& ds) {
  const std::string path = ctx.out("cr.csv");
  ctx.consume(path, "cr.csv");
  auto records = read_cr_csv(path);
  if (records.size() != ds.profiles.size())
    throw InputError("cr.csv does not match profiles.csv (row count)");
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].profile_id != ds.profiles[i].profile_id)
      throw InputError("cr.csv does not match profiles.csv (profile_id at row " +
                       std::to_string(i + 2) + ")");
  return records;
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["profiles"] = profiles_path;
  j["prices"] = prices_path;
  j["synthetic_prices"] = synthetic_prices;
  j["out"] = out_dir;
  j["k"] = k;
  j["seed"] = seed;
  j["hours"] = hours;
  j["center_update"] = to_string(center_update);
  j["switch_rule"] = to_string(switch_rule);
  j["benefit_basis"] = to_string(benefit_basis);
  j["disguise_extent"] = to_string(disguise_extent);
  j["theta_start"] = grid.start;
  j["theta_stop"] = grid.stop;
  j["theta_step"] = grid.step;
  j["trajectory_theta"] = trajectory_theta;
  j["has_utility"] = has_utility;
  j["u_max"] = utility.u_max;
  j["c"] = utility.c;
  j["threads"] = threads;
  j["max_iters"] = max_iters;
  j["tol"] = tol;
  return j;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    const std::string ctx = "config '" + key + "'";
    if (key == "profiles") cfg.profiles_path = value;
    else if (key == "prices") cfg.prices_path = value;
    else if (key == "synthetic-prices") cfg.synthetic_prices = parse_bool(value, key);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "k") cfg.k = static_cast<int>(csv::to_long(value, ctx));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(csv::to_long(value, ctx));
    else if (key == "hours") cfg.hours = static_cast<int>(csv::to_long(value, ctx));
    else if (key == "center-update") cfg.center_update = parse_center_update(value);
    else if (key == "switch-rule") cfg.switch_rule = parse_switch_rule(value);
    else if (key == "benefit-basis") cfg.benefit_basis = parse_benefit_basis(value);
    else if (key == "disguise-extent") cfg.disguise_extent = parse_disguise_extent(value);
    else if (key == "theta-start") cfg.grid.start = csv::to_double(value, ctx);
    else if (key == "theta-stop") cfg.grid.stop = csv::to_double(value, ctx);
    else if (key == "theta-step") cfg.grid.step = csv::to_double(value, ctx);
    else if (key == "trajectory-theta") cfg.trajectory_theta = csv::to_double(value, ctx);
    else if (key == "u-max") { cfg.utility.u_max = csv::to_double(value, ctx); cfg.has_utility = true; }
    else if (key == "c") { cfg.utility.c = csv::to_double(value, ctx); cfg.has_utility = true; }
    else if (key == "threads") cfg.threads = static_cast<int>(csv::to_long(value, ctx));
    else if (key == "max-iters") cfg.max_iters = static_cast<int>(csv::to_long(value, ctx));
    else if (key == "tol") cfg.tol = csv::to_double(value, ctx);
    else throw InputError("config: unknown key '" + key + "'");
  }
}

PipelineContext::PipelineContext(const RunConfig& config, bool fresh) : cfg(config) {
  manifest = nlohmann::json::object();
  const std::string manifest_path = out("manifest.json");
  if (!fresh && fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    try {
      in >> manifest;
    } catch (const nlohmann::json::exception&) {
      throw InputError("corrupt manifest.json in '" + cfg.out_dir + "'");
    }
  }
  if (!manifest.contains("files")) manifest["files"] = nlohmann::json::object();
  if (!manifest.contains("counts")) manifest["counts"] = nlohmann::json::object();
  if (!manifest.contains("timings_ms")) manifest["timings_ms"] = nlohmann::json::object();
  manifest["config"] = cfg.to_json();
}

std::string PipelineContext::out(const std::string& name) const {
  return (fs::path(cfg.out_dir) / name).string();
}

void PipelineContext::consume(const std::string& path, const std::string& key) {
  if (!fs::exists(path))
    throw InputError("missing " + key + " (expected at '" + path + "')");
  const std::string sum = csv::checksum_file(path);
  auto& files = manifest["files"];
  if (files.contains(key) && files[key].get<std::string>() != sum)
    throw InputError("checksum mismatch for " + key +
                     " (the file changed since the manifest was written)");
  files[key] = sum;
}

void PipelineContext::record(const std::string& path, const std::string& key) {
  manifest["files"][key] = csv::checksum_file(path);
  written.push_back(path);
}

void PipelineContext::set_count(const std::string& key, long value) {
  manifest["counts"][key] = value;
}

void PipelineContext::stage_time(const std::string& stage, double ms) {
  manifest["timings_ms"][stage] = ms;
}

void PipelineContext::save() {
  fs::create_directories(cfg.out_dir);
  const std::string path = out("manifest.json");
  std::ofstream outfile(path, std::ios::binary);
  if (!outfile) throw InputError("cannot write '" + path + "'");
  outfile << manifest.dump(2) << '\n';
}

void pipe_validate(PipelineContext& ctx) {
  timed_stage(ctx, "validate", [&] {
    if (ctx.cfg.profiles_path.empty()) throw InputError("no profiles file configured");
    Dataset ds = ingest_csv(ctx.cfg.profiles_path, ctx.cfg.hours);
    std::cout << "validate: " << ds.profiles.size() << " valid profiles, " << ds.rejected.size()
              << " rejected rows in '" << ctx.cfg.profiles_path << "'\n";
    if (ctx.cfg.synthetic_prices) {
      std::cout << "validate: using the synthetic price curve\n";
    } else if (!ctx.cfg.prices_path.empty()) {
      load_price_curve(ctx.cfg.prices_path, ctx.cfg.hours);
      std::cout << "validate: prices file '" << ctx.cfg.prices_path << "' is well-formed\n";
    }
    ctx.cfg.grid.validate();
  });
}

void pipe_cluster(PipelineContext& ctx) {
  Dataset ds = timed_stage(ctx, "ingest", [&] {
    Dataset d = load_profiles(ctx);
    fs::create_directories(ctx.cfg.out_dir);
    write_rejected_csv(ctx.out("rejected.csv"), d.rejected);
    ctx.record(ctx.out("rejected.csv"), "rejected.csv");
    std::cout << "ingest: " << d.profiles.size() << " valid profiles, " << d.rejected.size()
              << " rejected\n";
    return d;
  });
  timed_stage(ctx, "cluster", [&] {
    FitConfig fc;
    fc.seed = ctx.cfg.seed;
    fc.max_iters = ctx.cfg.max_iters;
    fc.tol = ctx.cfg.tol;
    fc.center_update = ctx.cfg.center_update;
    fc.threads = ctx.cfg.threads;
    ClusterModel model = fit(ds, ctx.cfg.k, fc);
    write_centers_csv(ctx.out("centers.csv"), model, ctx.cfg.hours);
    ctx.record(ctx.out("centers.csv"), "centers.csv");
    write_assignments_csv(ctx.out("assignments.csv"), ds, model);
    ctx.record(ctx.out("assignments.csv"), "assignments.csv");
    ctx.set_count("clusters", ctx.cfg.k);
    std::cout << "cluster: k=" << ctx.cfg.k << ", " << model.iterations
              << " iterations, objective " << csv::fmt(model.objective) << "\n";
  });
  ctx.save();
}

ClusterPrices pipe_price(PipelineContext& ctx) {
  auto prices = timed_stage(ctx, "pricing", [&] {
    PriceCurve curve = load_curve(ctx);
    const std::string centers_path = ctx.out("centers.csv");
    ctx.consume(centers_path, "centers.csv");
    CentersFile centers = read_centers_csv(centers_path, ctx.cfg.hours);
    ClusterPrices p = price_centers(centers.centers, curve);
    double lo = p.price.front(), hi = p.price.front();
    for (double v : p.price) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    std::cout << "pricing: " << p.price.size() << " cluster prices in [" << csv::fmt(lo) << ", "
              << csv::fmt(hi) << "]\n";
    return p;
  });
  ctx.save();
  return prices;
}

void pipe_disguise(PipelineContext& ctx) {
  timed_stage(ctx, "disguise", [&] {
    Dataset ds = load_profiles(ctx);
    ClusterModel model = load_model(ctx, ds);
    PriceCurve curve = load_curve(ctx);
    ClusterPrices prices = price_clusters(model, curve);
    auto records = compute_all_cr(ds, model, prices, ctx.cfg.switch_rule, ctx.cfg.threads);
    write_cr_csv(ctx.out("cr.csv"), records);
    ctx.record(ctx.out("cr.csv"), "cr.csv");
    auto counts = trajectories(records, ctx.cfg.trajectory_theta);
    write_trajectories_csv(ctx.out("trajectories.csv"), ctx.cfg.trajectory_theta, counts);
    ctx.record(ctx.out("trajectories.csv"), "trajectories.csv");
    long finite = 0;
    for (const auto& r : records)
      if (std::isfinite(r.cr)) ++finite;
    std::cout << "disguise: " << finite << "/" << records.size()
              << " profiles have a finite CR\n";
  });
  ctx.save();
}

void pipe_zones(PipelineContext& ctx) {
  timed_stage(ctx, "zones", [&] {
    Dataset ds = load_profiles(ctx);
    ClusterModel model = load_model(ctx, ds);
    auto records = load_records(ctx, ds);
    auto rows = sweep(records, ds, model, ctx.cfg.grid.points(), ctx.cfg.threads);
    write_zones_csv(ctx.out("zones.csv"), rows);
    ctx.record(ctx.out("zones.csv"), "zones.csv");
    std::cout << "zones: " << ctx.cfg.grid.points().size() << " grid points, "
              << rows.size() << " rows\n";
  });
  ctx.save();
}

void pipe_economics(PipelineContext& ctx) {
  timed_stage(ctx, "economics", [&] {
    Dataset ds = load_profiles(ctx);
    ClusterModel model = load_model(ctx, ds);
    PriceCurve curve = load_curve(ctx);
    ClusterPrices prices = price_clusters(model, curve);
    auto records = load_records(ctx, ds);
    std::vector<BenefitRecord> benefits;
    benefits.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
      benefits.push_back(
          bill_benefit(records[i], ds.profiles[i], prices, ctx.cfg.benefit_basis));
    write_benefits_csv(ctx.out("benefits.csv"), benefits);
    ctx.record(ctx.out("benefits.csv"), "benefits.csv");
    auto rows = benefit_curves(records, ds.profiles, prices, ctx.cfg.grid.points(),
                               ctx.cfg.benefit_basis);
    write_benefit_curve_csv(ctx.out("benefit_curve.csv"), rows);
    ctx.record(ctx.out("benefit_curve.csv"), "benefit_curve.csv");
    std::cout << "economics: benefit curve over " << rows.size() << " grid points\n";
    if (ctx.cfg.has_utility) {
      attach_disguised(records, ds, model);
      double sum = 0.0;
      long strategic = 0;
      for (std::size_t i = 0; i < records.size(); ++i) {
        if (!std::isfinite(records[i].cr)) continue;
        sum += utility_gain(records[i], ds.profiles[i], prices, ctx.cfg.utility);
        ++strategic;
      }
      std::cout << "economics: mean utility gain over " << strategic << " strategic profiles: "
                << csv::fmt(strategic == 0 ? 0.0 : sum / static_cast<double>(strategic)) << "\n";
    }
  });
  ctx.save();
}

void pipe_sysload(PipelineContext& ctx) {
  timed_stage(ctx, "sysload", [&] {
    Dataset ds = load_profiles(ctx);
    ClusterModel model = load_model(ctx, ds);
    auto records = load_records(ctx, ds);
    attach_disguised(records, ds, model);
    auto rows = peak_sweep(ds, records, model, ctx.cfg.grid.points(), ctx.cfg.disguise_extent,
                           ctx.cfg.threads);
    write_sysload_csv(ctx.out("sysload.csv"), rows, ctx.cfg.hours);
    ctx.record(ctx.out("sysload.csv"), "sysload.csv");
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.peak_ratio);
    std::cout << "sysload: worst peak ratio " << csv::fmt(worst) << "\n";
  });
  ctx.save();
}

nlohmann::json run(const RunConfig& cfg) {
  PipelineContext ctx(cfg, /*fresh=*/true);
  try {
    pipe_cluster(ctx);
    pipe_price(ctx);
    pipe_disguise(ctx);
    pipe_zones(ctx);
    pipe_economics(ctx);
    pipe_sysload(ctx);
    ctx.save();
  } catch (...) {
    for (const auto& path : ctx.written) {
      std::error_code ec;
      fs::remove(path, ec);
    }
    std::error_code ec;
    fs::remove(ctx.out("manifest.json"), ec);
    throw;
  }
  std::cout << "run: manifest written to " << ctx.out("manifest.json") << "\n";
  return ctx.manifest;
}

void run_synth(const SynthConfig& cfg) {
  if (cfg.n < 1) throw InputError("synth: n must be positive");
  if (cfg.blobs < 1) throw InputError("synth: blobs must be positive");
  if (cfg.hours < 1) throw InputError("synth: hours must be positive");

  MixtureSpec spec;
  spec.sigma = cfg.sigma;
  spec.seed = cfg.seed;
  for (int j = 0; j < cfg.blobs; ++j) {
    // A peaked day shape per blob, spread around the clock.
    double mu = cfg.hours * (j + 0.5) / cfg.blobs;
    double width = std::max(1.0, cfg.hours / 12.0);
    Vec proto(static_cast<std::size_t>(cfg.hours));
    for (int t = 0; t < cfg.hours; ++t) {
      double dt = std::abs(t + 0.5 - mu);
      dt = std::min(dt, cfg.hours - dt);  // wrap around midnight
      proto[static_cast<std::size_t>(t)] =
          8.0 * (0.05 + std::exp(-dt * dt / (2.0 * width * width)));
    }
    spec.prototypes.push_back(std::move(proto));
    spec.counts.push_back(cfg.n / cfg.blobs + (j < cfg.n % cfg.blobs ? 1 : 0));
  }

  SynthResult synth = synthesize(spec);
  std::vector<LoadProfile> rows;
  rows.reserve(synth.dataset.profiles.size());
  for (std::size_t i = 0; i < synth.dataset.profiles.size(); ++i) {
    const NormalizedProfile& p = synth.dataset.profiles[i];
    LoadProfile raw;
    raw.user_id = "p" + std::to_string(synth.labels[i]) + "-" + std::to_string(i);
    raw.date = "2015-05-01";
    raw.energy.resize(p.weights.size());
    for (std::size_t t = 0; t < p.weights.size(); ++t)
      raw.energy[t] = p.weights[t] * p.total_energy;
    rows.push_back(std::move(raw));
  }
  write_profiles_csv(cfg.out_path, rows, cfg.hours);
  std::cout << "synth: wrote " << rows.size() << " profiles to " << cfg.out_path << "\n";
  if (!cfg.prices_out.empty()) {
    write_prices_csv(cfg.prices_out, synthetic_price_curve(cfg.hours));
    std::cout << "synth: wrote the synthetic price curve to " << cfg.prices_out << "\n";
  }
}

}  // namespace cpv
