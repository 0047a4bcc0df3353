// cpvsim: clustering-oriented tariff simulator and disguise vulnerability
// analyzer. Subcommands mirror the pipeline stages; `run` executes them all.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cpv/csv.hpp"
#include "cpv/errors.hpp"
#include "cpv/pipeline.hpp"

namespace {

struct CliOptions {
  cpv::RunConfig cfg;
  std::string config_path;  // handled by preload_config; bound here for --help
  std::string center_update = "median";
  std::string switch_rule = "paper";
  std::string benefit_basis = "actual";
  std::string disguise_extent = "cr";
  CLI::Option* u_max_opt = nullptr;
  CLI::Option* c_opt = nullptr;
};

void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path,
                  "configuration file (key = value lines; flags override)")
      ->type_name("PATH");
  cmd->add_option("--profiles", opt.cfg.profiles_path, "input load profiles CSV")->type_name("PATH");
  cmd->add_option("--prices", opt.cfg.prices_path, "hourly price curve CSV")->type_name("PATH");
  cmd->add_flag("--synthetic-prices", opt.cfg.synthetic_prices,
                "use the built-in synthetic two-peak price curve");
  cmd->add_option("--out", opt.cfg.out_dir, "output directory")->type_name("DIR");
  cmd->add_option("--k", opt.cfg.k, "number of clusters");
  cmd->add_option("--seed", opt.cfg.seed, "random seed");
  cmd->add_option("--hours", opt.cfg.hours, "profile dimension H");
  cmd->add_option("--center-update", opt.center_update, "center update rule: median|mean");
  cmd->add_option("--switch-rule", opt.switch_rule, "switch condition: paper|strict");
  cmd->add_option("--benefit-basis", opt.benefit_basis, "benefit basis: actual|normalized");
  cmd->add_option("--disguise-extent", opt.disguise_extent, "disguise extent: cr|full");
  cmd->add_option("--theta-start", opt.cfg.grid.start, "theta grid start");
  cmd->add_option("--theta-stop", opt.cfg.grid.stop, "theta grid stop");
  cmd->add_option("--theta-step", opt.cfg.grid.step, "theta grid step");
  cmd->add_option("--trajectory-theta", opt.cfg.trajectory_theta,
                  "theta used for the trajectories report");
  opt.u_max_opt = cmd->add_option("--u-max", opt.cfg.utility.u_max, "utility satiation constant");
  opt.c_opt = cmd->add_option("--c", opt.cfg.utility.c, "discomfort per unit l1 deviation");
  cmd->add_option("--threads", opt.cfg.threads, "worker threads (0 = machine parallelism)");
  cmd->add_option("--max-iters", opt.cfg.max_iters, "clustering iteration cap");
  cmd->add_option("--tol", opt.cfg.tol, "clustering objective tolerance");
}

cpv::RunConfig finalize(CliOptions& opt) {
  opt.cfg.center_update = cpv::parse_center_update(opt.center_update);
  opt.cfg.switch_rule = cpv::parse_switch_rule(opt.switch_rule);
  opt.cfg.benefit_basis = cpv::parse_benefit_basis(opt.benefit_basis);
  opt.cfg.disguise_extent = cpv::parse_disguise_extent(opt.disguise_extent);
  if ((opt.u_max_opt && opt.u_max_opt->count() > 0) || (opt.c_opt && opt.c_opt->count() > 0))
    opt.cfg.has_utility = true;
  return opt.cfg;
}

// --config is honored before CLI11 sees the flags, so explicit flags override
// the file.
void preload_config(int argc, char** argv, cpv::RunConfig& cfg) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") cpv::apply_config_file(cfg, argv[i + 1]);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clustering-oriented tariff pricing and disguise vulnerability simulator"};
  app.require_subcommand(1);

  CliOptions opt;

  cpv::SynthConfig synth_cfg;
  CLI::App* synth = app.add_subcommand("synth", "generate a demo profiles.csv");
  synth->add_option("--out", synth_cfg.out_path, "output profiles CSV")->type_name("PATH");
  synth->add_option("--prices-out", synth_cfg.prices_out,
                    "also write the synthetic price curve here")->type_name("PATH");
  synth->add_option("--n", synth_cfg.n, "number of profiles");
  synth->add_option("--blobs", synth_cfg.blobs, "number of generating prototypes");
  synth->add_option("--sigma", synth_cfg.sigma, "additive noise level");
  synth->add_option("--seed", synth_cfg.seed, "random seed");
  synth->add_option("--hours", synth_cfg.hours, "profile dimension H");

  CLI::App* validate = app.add_subcommand("validate", "schema-check input files, write nothing");
  CLI::App* cluster = app.add_subcommand("cluster", "ingest profiles and fit the cluster model");
  CLI::App* price = app.add_subcommand("price", "print the per-cluster price table");
  CLI::App* disguise = app.add_subcommand("disguise", "compute CR records and trajectories");
  CLI::App* zones = app.add_subcommand("zones", "sweep sensitive-zone statistics over theta");
  CLI::App* economics = app.add_subcommand("economics", "benefit records and benefit curves");
  CLI::App* sysload = app.add_subcommand("sysload", "system load sweep under mass disguising");
  CLI::App* run = app.add_subcommand("run", "execute the full pipeline");
  for (CLI::App* cmd : {validate, cluster, price, disguise, zones, economics, sysload, run})
    add_common_options(cmd, opt);

  try {
    preload_config(argc, argv, opt.cfg);
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const cpv::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (synth->parsed()) {
      cpv::run_synth(synth_cfg);
      return 0;
    }
    cpv::RunConfig cfg = finalize(opt);
    if (run->parsed()) {
      cpv::run(cfg);
      return 0;
    }
    cpv::PipelineContext ctx(cfg, /*fresh=*/false);
    if (validate->parsed()) {
      cpv::pipe_validate(ctx);
    } else if (cluster->parsed()) {
      cpv::pipe_cluster(ctx);
    } else if (price->parsed()) {
      cpv::ClusterPrices prices = cpv::pipe_price(ctx);
      std::cout << "cluster,price\n";
      for (std::size_t n = 0; n < prices.price.size(); ++n)
        std::cout << n << "," << cpv::csv::fmt(prices.price[n]) << "\n";
    } else if (disguise->parsed()) {
      cpv::pipe_disguise(ctx);
    } else if (zones->parsed()) {
      cpv::pipe_zones(ctx);
    } else if (economics->parsed()) {
      cpv::pipe_economics(ctx);
    } else if (sysload->parsed()) {
      cpv::pipe_sysload(ctx);
    }
    return 0;
  } catch (const cpv::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
