#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sitewatch/commands.hpp"
#include "sitewatch/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Workplace safety-awareness pipeline: detection evaluation, "
               "experiment simulation, replay monitoring and report rendering"};
  app.require_subcommand(1);

  sitewatch::cli::EvaluateOptions eval_opts;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score predictions against ground-truth labels (AP50, curves)");
  evaluate->add_option("--gt", eval_opts.gt_dir, "Ground-truth label directory")->required();
  evaluate->add_option("--pred", eval_opts.pred_dir, "Prediction label directory")->required();
  evaluate->add_option("--iou", eval_opts.iou, "IoU matching threshold")->default_val(0.5);
  evaluate->add_option("--out", eval_opts.out_dir, "Output directory")->required();

  sitewatch::cli::SimulateOptions sim_opts;
  std::uint64_t sim_seed = 7;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Run the five-experiment protocol and report success rates");
  simulate->add_option("--experiment", sim_opts.experiment, "Experiment id 1..5 or 'all'")
      ->default_val("all");
  simulate->add_option("--trials", sim_opts.trials, "Trials per experiment")->default_val(6);
  CLI::Option* seed_opt = simulate->add_option("--seed", sim_seed, "Base seed");
  simulate->add_option("--config", sim_opts.config_path, "Config file");
  simulate->add_option("--out", sim_opts.out_dir, "Output directory")->required();

  sitewatch::cli::MonitorOptions mon_opts;
  CLI::App* monitor =
      app.add_subcommand("monitor", "Replay a detection stream through the full pipeline");
  monitor->add_option("--replay", mon_opts.replay_path, "Replay JSON-lines file")->required();
  monitor->add_option("--config", mon_opts.config_path, "Config file");
  monitor->add_option("--out", mon_opts.out_dir, "Output directory")->required();

  sitewatch::cli::ReportOptions rep_opts;
  CLI::App* report = app.add_subcommand("report", "Render report tables from a results directory");
  report->add_option("--in", rep_opts.in_dir, "Input directory")->required();
  report->add_option("--out", rep_opts.out_path, "Also write the document to this file");

  CLI::App* defaults = app.add_subcommand("print-config", "Print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sitewatch::cli::kExitUsage;
  }

  try {
    if (evaluate->parsed()) {
      return sitewatch::cli::run_evaluate(eval_opts, std::cout, std::cerr);
    }
    if (simulate->parsed()) {
      if (seed_opt->count() > 0) sim_opts.seed = sim_seed;
      return sitewatch::cli::run_simulate(sim_opts, std::cout, std::cerr);
    }
    if (monitor->parsed()) {
      return sitewatch::cli::run_monitor(mon_opts, std::cout, std::cerr);
    }
    if (report->parsed()) {
      return sitewatch::cli::run_report(rep_opts, std::cout, std::cerr);
    }
    if (defaults->parsed()) {
      std::cout << sitewatch::io::default_config_text();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sitewatch::cli::kExitData;
  }
  return sitewatch::cli::kExitUsage;
}
