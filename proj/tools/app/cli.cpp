#include <iostream>

#include <CLI11.hpp>

#include "app/commands.hpp"

namespace qmcst::app {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasi-Monte Carlo point sets by discrepancy transference", "qmcst"};
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed = 0;
  int workers = 0;
  app.add_option("--config", g.config_path, "Experiment config (JSON)");
  app.add_option("--out", g.out_dir, "Output directory");
  auto* workers_opt = app.add_option("--workers", workers, "Concurrent repetitions")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");

  auto* generate = app.add_subcommand("generate", "Run the transference and write point sets plus a manifest");
  auto* stardisc = app.add_subcommand("stardisc", "Star discrepancy of a qmcpts file");
  std::string disc_file;
  std::size_t samples = 100000;
  stardisc->add_option("file", disc_file, "Point set file")->required();
  stardisc->add_option("--samples", samples, "Random corners for the d > 3 lower bound");
  auto* table1 = app.add_subcommand("table1", "Star discrepancy table for d = 2");
  auto* bench = app.add_subcommand("bench", "Integration error sweep");
  auto* audit = app.add_subcommand("audit", "Check the lineage identity of a manifest");
  std::string manifest, regions;
  std::size_t random_dyadic = 0;
  audit->add_option("manifest", manifest, "manifest.json from generate")->required();
  audit->add_option("regions", regions, "Regions file: lines 'lo_1 hi_1 ... lo_d hi_d'");
  audit->add_option("--random-dyadic", random_dyadic, "Add N random dyadic boxes (seeded by --seed)");
  for (auto* sub : {generate, stardisc, table1, bench, audit}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qmcst: " << e.what() << "\n";
    return kExitUsage;
  }
  if (*workers_opt) g.workers = workers;
  if (*seed_opt) g.seed = seed;

  try {
    if (*generate) return cmd_generate(g, out, err);
    if (*stardisc) return cmd_stardisc(g, disc_file, samples, out, err);
    if (*table1) return cmd_table1(g, out, err);
    if (*bench) return cmd_bench(g, out, err);
    return cmd_audit(g, manifest, regions, random_dyadic, out, err);
  } catch (const ConfigError& e) {
    err << "qmcst: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "qmcst: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "qmcst: error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace qmcst::app
