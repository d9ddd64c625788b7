#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "imopt/run.hpp"

namespace imopt {

// Flat key=value config ('#' comments, one pair per line).
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_file(const std::string& path);
ConfigMap parse_config_text(const std::string& text);

struct RunConfig {
  std::string solver;
  std::string problem = "quadratic";
  std::string set_text;
  std::string setup = "euclidean";
  int dim = 8;
  std::uint64_t seed = 1;
  double eps = 1e-3;
  double L0 = 1.0;
  double delta = 0.0;
  double delta_tilde = 0.0;
  int max_iter = 100;
  double cond = 100.0;
  double lambda = 0.1;
  double nu = 0.0;
  double L_nu = 2.0;
  double mu = 0.0;
  double R2 = 0.0;  // 0: derive from the instance
  double gamma0 = 0.0;
  std::string instance;  // OT instance path
  bool oracle = false;
  std::string out;

  static RunConfig from_map(const ConfigMap& m);  // throws ConfigError
};

// trace CSV emission (schema "# imopt-trace v1"; byte-deterministic)
void write_trace_csv(std::ostream& os, const SolverRun& run, double R2, bool fgm_weights);
void write_vi_trace_csv(std::ostream& os, const VIRun& run,
                        const std::vector<double>* gap_series = nullptr);

// CLI entry points; exit codes: 0 ok, 2 solver failure, 3 config error.
int cli_run(const std::string& config_path, std::ostream& out, std::ostream& err);
int cli_compare_sinkhorn(const std::string& instance_path, double eps,
                         const std::vector<double>& gamma_grid, const std::string& out_path,
                         std::ostream& out, std::ostream& err);
int cli_validate_model(const std::string& config_path, std::ostream& out, std::ostream& err);

}  // namespace imopt
