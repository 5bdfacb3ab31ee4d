#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "shapekit/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "shapekit: derivative-weighted RKHS functional fitting and "
      "shape-constraint testing"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 1 validation failure, 2 input error,\n"
      "            3 solver failure, 4 degenerate inference.");

  std::string config, data, grid, out;
  std::uint64_t seed = 0;
  std::uint64_t validate_seed = 42;
  int threads = 1;

  CLI::App* fit =
      app.add_subcommand("fit", "Fit the regularized functional estimator");
  fit->add_option("--config", config, "key = value configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--data", data,
                  "data CSV: x1..xd, optional y, optional w_<index> columns")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--out", out, "output JSON path")->required();

  CLI::App* test = app.add_subcommand(
      "test", "Fit, then test the shape constraint on a grid");
  test->add_option("--config", config, "key = value configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  test->add_option("--data", data,
                   "data CSV: x1..xd, optional y, optional w_<index> columns")
      ->required()
      ->check(CLI::ExistingFile);
  test->add_option("--grid", grid, "grid CSV: x1..xd")
      ->required()
      ->check(CLI::ExistingFile);
  test->add_option("--out", out, "output stem; writes <out>.json and <out>.csv")
      ->required();
  CLI::Option* test_seed =
      test->add_option("--seed", seed, "override test.seed from the config");
  test->add_option("--threads", threads,
                   "worker threads for the Monte Carlo p-value");

  CLI::App* sim =
      app.add_subcommand("simulate", "Run the size/power experiment");
  sim->add_option("--config", config, "key = value configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--out", out, "output CSV path (plus a .meta.json sidecar)")
      ->required();
  CLI::Option* sim_seed = sim->add_option(
      "--seed", seed, "override simulation.seed from the config");
  sim->add_option("--threads", threads, "worker threads across replications");

  CLI::App* val =
      app.add_subcommand("validate", "Run the numerical oracle suites");
  val->add_option("--seed", validate_seed, "oracle RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // every command-line problem is an input error
  }

  shapekit::CliOptions opts;
  opts.threads = threads;

  if (fit->parsed()) return shapekit::cmd_fit(config, data, out, opts);
  if (test->parsed()) {
    if (test_seed->count() > 0) opts.seed = seed;
    return shapekit::cmd_test(config, data, grid, out, opts);
  }
  if (sim->parsed()) {
    if (sim_seed->count() > 0) opts.seed = seed;
    return shapekit::cmd_simulate(config, out, opts);
  }
  if (val->parsed()) return shapekit::cmd_validate(validate_seed);
  return 2;
}
