#pragma once

#include <limits>
#include <string>
#include <vector>

#include "imopt/sets.hpp"

namespace imopt {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct IterRecord {
  int k = 0;
  double L = 0;        // accepted L_{k+1}
  double alpha = 0;    // alpha_{k+1}
  double A = 0;        // A_{k+1}
  int attempts = 0;    // i_k + 1 line-search trials
  double delta = 0;    // delta_k consumed by the certificate
  double delta_tilde = 0;
  double f_delta = kNaN;  // f_delta at the accepted iterate
};

struct Certificate {
  double r2_over_A = 0;
  double delta_term = 0;
  double delta_tilde_term = 0;
  double bound_value() const { return r2_over_A + delta_term + delta_tilde_term; }
};

struct SolverRun {
  std::vector<IterRecord> iters;
  std::vector<Vec> x_seq;  // x_1..x_N (desk scale; prefix certificates)
  Vec x_last;
  Vec x_bar;  // weighted average output of GM
  Certificate certificate;
  int total_attempts = 0;
  std::string stopped_by;  // "max_iter" | "target_eps" | "predicate"

  // strongly convex variant
  Vec y_best;
  double f_best = kNaN;
  double decay_factor = kNaN;     // (1 - mu/L)^{N}
  double additive_bound = kNaN;   // delta + delta_tilde

  // restart variants
  int stages = 0;
  long total_iterations = 0;
  std::vector<double> stage_radii_sq;

  int n_iters() const { return static_cast<int>(iters.size()); }
  double A_N() const { return iters.empty() ? 0.0 : iters.back().A; }
  double L_max() const {
    double m = 0;
    for (const auto& r : iters) m = std::max(m, r.L);
    return m;
  }
};

struct VIIterRecord {
  int k = 0;
  double L = 0;
  int attempts = 0;
  double delta = 0;
};

struct VIRun {
  std::vector<VIIterRecord> iters;
  std::vector<Vec> w_seq;
  std::vector<Vec> z_seq;  // z_0 .. z_N (z_0 = prox center)
  Vec w_hat;
  double S_N = 0;
  double certificate = kNaN;  // V_max/S_N + 2 delta + 2 delta_tilde
  double v_max = kNaN;
  double delta = 0, delta_tilde = 0;
  int total_attempts = 0;
  long subproblem_solves = 0;
  std::string stopped_by;  // "s_target" | "max_iter"
  double predicted_iteration_bound = kNaN;

  // restarted variant
  Vec x_final;
  int stages = 0;
  long total_inner_iterations = 0;
  std::vector<double> stage_radii_sq;

  int n_iters() const { return static_cast<int>(iters.size()); }
};

}  // namespace imopt
