#pragma once

#include <functional>
#include <optional>

#include "imopt/model.hpp"
#include "imopt/model_zoo.hpp"
#include "imopt/run.hpp"

namespace imopt {

struct FGMConfig {
  double L0 = 1.0;
  int max_iter = 100;
  InexactnessBudget budget;
  std::optional<double> universal_eps;  // delta_k = eps alpha_{k+1} / (4 A_{k+1})
  bool fw_mode = false;                 // u-step replaced by the LMO
  std::optional<double> R_Q;            // bound with V[y](x) <= R_Q^2 on Q (FW)
  bool adaptive = true;
  std::optional<double> target_eps;
  std::function<bool(const Vec&, int)> stop_predicate;
};

// Fast gradient method with a (delta, L)-model w.r.t. the setup norm
// (requires a 1-strongly convex prox function). Certificate
//   R^2/A_N + 2 (sum delta_k A_{k+1})/A_N + (sum dt_k / L_{k+1})/A_N.
SolverRun fgm_solve(const ModelOracle& model, const ProxSetup& setup, const FeasibleSet& set,
                    const Vec& x0, double R2, const FGMConfig& cfg);

Certificate fgm_certificate_prefix(const SolverRun& run, int N, double R2);

// Universal method: builds the Holder model, runs fgm_solve with the
// delta_k = eps alpha/(4A) schedule, stops once R^2/A_N <= eps/2.
SolverRun fgm_universal_solve(const HolderProblem& p, const ProxSetup& setup,
                              const FeasibleSet& set, const Vec& x0, double R2, double eps,
                              FGMConfig cfg = {});

// Restarted non-adaptive FGM for left relative mu-strong convexity:
// ceil(log4(mu R^2 / eps)) stages of ceil(6 sqrt(L/mu)) iterations.
SolverRun fgm_restart_solve(const ModelOracle& model, const StrongConvexityTag& tag,
                            const ProxSetup& setup, const FeasibleSet& set, const Vec& x0,
                            double R2, double eps, const InexactnessBudget& budget);

// Universal conditional gradient: the u-update minimizes the linear part
// only; each iteration records the implied dt_k = 2 L_{k+1} R_Q^2.
SolverRun fw_solve(const ModelOracle& model, const FeasibleSet& set, const Vec& x0, double eps,
                   FGMConfig cfg);

}  // namespace imopt
