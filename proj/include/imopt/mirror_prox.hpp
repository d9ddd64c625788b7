#pragma once

#include "imopt/model.hpp"
#include "imopt/model_zoo.hpp"
#include "imopt/run.hpp"

namespace imopt {

struct MirrorProxConfig {
  double eps = 1e-3;
  double delta = 0.0;  // model error, constant within one run
  double L0 = 1.0;
  int max_iter = 10000;
  double delta_tilde = 0.0;
  double V_max = 0.0;  // user bound on max_u V[z0](u); saddle_solve fills <= 0
};

// Generalized Mirror Prox. Per iteration: extrapolation w_k and update
// z_{k+1} from model.prox_step, backtracking on
//   psi(z_{k+1}, z_k) <= psi(z_{k+1}, w_k) + psi(w_k, z_k)
//                        + L_{k+1}(V[z_k](w_k) + V[w_k](z_{k+1})) + delta.
// Stops when S_N = sum 1/L_{k+1} >= V_max/eps or at max_iter. Output
// w_hat = (1/S_N) sum w_k / L_{k+1} with certificate
//   max_u psi(w_hat, u) <= V_max/S_N + 2 delta + 2 delta_tilde.
VIRun mirror_prox_solve(const VIModelOracle& model, const ProxSetup& setup,
                        const FeasibleSet& set, const MirrorProxConfig& cfg);

// Universal instantiation for a Holder-continuous monotone operator: builds
// the operator model with delta = eps/2 and L(eps/2), records the predicted
// iteration bound ceil(2 (2 L_nu/eps)^{2/(1+nu)} V_max).
VIRun mirror_prox_universal_solve(std::function<Vec(const Vec&)> g, double nu, double L_nu,
                                  const ProxSetup& setup, const FeasibleSet& set, double eps,
                                  double L0, int max_iter, double V_max,
                                  SimpleTerm h = SimpleTerm::none());

// Restarted Mirror Prox for mu-strongly monotone models: stage p rescales the
// prox function to d((x - x_p)/R_p), runs the monotone method until
// S >= Omega/(mu R_p^2), and shrinks R_{p+1}^2 = R0^2 2^{-(p+1)} + (1-2^{-p}) eps/2.
VIRun mirror_prox_restart_solve(const VIModelOracle& model, const ProxSetup& setup,
                                const FeasibleSet& set, const Vec& x0, double R0_sq,
                                double eps, int max_inner_iter = 100000);

struct SaddleResult {
  Vec u_hat;
  Vec v_hat;
  double gap = kNaN;
  VIRun run;
};

// Builds the composite saddle model from the spec struct, runs Mirror Prox on
// Q1 x Q2 (entropy setup when both blocks are simplices, Euclidean
// otherwise), and evaluates the duality gap by best response.
SaddleResult saddle_solve(const SaddleSpec& spec, double eps, MirrorProxConfig cfg = {});

// Duality gap of the prefix average w_hat_N of a saddle run.
double saddle_prefix_gap(const SaddleSpec& spec, const VIRun& run, int N);
double saddle_gap(const SaddleSpec& spec, const Vec& u, const Vec& v);

// Prefix weighted average of any mirror-prox run.
Vec vi_what_prefix(const VIRun& run, int N);

}  // namespace imopt
