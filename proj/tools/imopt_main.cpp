#include <CLI11.hpp>
#include <iostream>

#include "imopt/bench.hpp"
#include "imopt/selftest.hpp"

int main(int argc, char** argv) {
  CLI::App app{"imopt: first-order solvers with inexact models"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "execute a solver run from a key=value config");
  run->add_option("config", config_path, "config file path")->required();

  std::string instance_path, out_path;
  double eps = 1e-3;
  std::vector<double> gamma_grid;
  auto* cmp = app.add_subcommand("compare-sinkhorn",
                                 "proximal vs plain Sinkhorn inner-iteration table");
  cmp->add_option("instance", instance_path, "OT instance CSV")->required();
  cmp->add_option("--eps", eps, "target accuracy");
  cmp->add_option("--gamma", gamma_grid, "gamma grid for the proximal method");
  cmp->add_option("--out", out_path, "output CSV path");

  auto* self = app.add_subcommand("selftest", "run the acceptance suite");

  std::string vm_config;
  auto* vm = app.add_subcommand("validate-model", "sample-validate a model config");
  vm->add_option("config", vm_config, "config file path")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return imopt::cli_run(config_path, std::cout, std::cerr);
  if (cmp->parsed())
    return imopt::cli_compare_sinkhorn(instance_path, eps, gamma_grid, out_path, std::cout,
                                       std::cerr);
  if (self->parsed()) return imopt::cli_selftest(std::cout, std::cerr);
  if (vm->parsed()) return imopt::cli_validate_model(vm_config, std::cout, std::cerr);
  return 1;
}
