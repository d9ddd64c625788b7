#pragma once

#include <functional>
#include <optional>

#include "imopt/model.hpp"
#include "imopt/run.hpp"

namespace imopt {

struct GMConfig {
  double L0 = 1.0;
  int max_iter = 100;
  InexactnessBudget budget;
  std::optional<double> target_eps;  // stop once the certificate drops below
  bool adaptive = true;              // false: constant L = L0, no line search
  std::function<bool(const Vec&, int)> stop_predicate;  // tests: stop on true
};

// Adaptive gradient method with a (delta, L)-model. Backtracking doubles
// L_{k+1} = 2^{i_k - 1} L_k (the first trial halves the previous constant)
// until f_delta(x_{k+1}) <= f_delta(x_k) + psi(x_{k+1}, x_k)
//                          + L_{k+1} V[x_k](x_{k+1}) + delta_k.
// Output x_bar = (1/A_N) sum alpha_{k+1} x_{k+1} with certificate
//   R^2/A_N + (2/A_N) sum alpha_{k+1} delta_k + (1/A_N) sum alpha_{k+1} dt_k.
SolverRun gm_solve(const ModelOracle& model, const ProxSetup& setup, const FeasibleSet& set,
                   const Vec& x0, double R2, const GMConfig& cfg);

// Recomputes the certificate from a finished run; when L_declared is given,
// also checks A_N >= N / (2 L).
Certificate gm_certificate(const SolverRun& run, double R2,
                           std::optional<double> L_declared = {});

// Certificate of the prefix N <= run length (for per-N validity checks).
Certificate gm_certificate_prefix(const SolverRun& run, int N, double R2);
Vec gm_xbar_prefix(const SolverRun& run, int N);

// Non-adaptive constant-step variant for right relative mu-strong convexity:
// tracks the best iterate and the bounds
//   f(y_{k+1}) - f* <= L V[x0](x*) (1 - mu/L)^{k+1} + delta + delta_tilde,
//   V[x_{k+1}](x*) <= (delta + delta_tilde)/mu + (1 - mu/L)^{k+1} V[x0](x*).
SolverRun gm_strongly_convex_solve(const ModelOracle& model, const StrongConvexityTag& tag,
                                   const ProxSetup& setup, const FeasibleSet& set,
                                   const Vec& x0, double L_fixed, int N,
                                   const InexactnessBudget& budget);

// Restarted GM for left relative mu-strong convexity: max(1, ceil(log2(R0^2/eps)))
// stages of ceil(4L/mu) iterations each; the final stage output satisfies
// V[x_bar](x*) <= eps + 2 delta_tilde/mu + 4 delta/mu.
SolverRun gm_restart_solve(const ModelOracle& model, const StrongConvexityTag& tag,
                           const ProxSetup& setup, const FeasibleSet& set, const Vec& x0,
                           double R0_sq, double eps, double L, const InexactnessBudget& budget);

}  // namespace imopt
