#pragma once

#include <string>

#include "imopt/model_zoo.hpp"
#include "imopt/run.hpp"

namespace imopt {

struct OTInstance {
  Mat C;  // nonnegative cost matrix, n x n
  Vec l;  // row marginal on the simplex
  Vec w;  // column marginal on the simplex

  int n() const { return static_cast<int>(C.rows()); }
  void check() const;
};

struct TransportPlan {
  Mat x;
  double marginal_residual = 0;  // ||row(x)-l||_1 + ||col(x)-w||_1
  bool converged = true;
  int sweeps = 0;
  std::vector<double> residual_history;  // per sweep

  double cost(const OTInstance& inst) const { return (inst.C.array() * x.array()).sum(); }
  double residual_against(const Vec& l, const Vec& w) const;
};

// sum x ln(x/y) - sum x + sum y with entries floored before the logs
double kl_matrix(const Mat& x, const Mat& y);

struct SinkhornDuals {
  Vec f, g;  // log-domain potentials (money units)
  bool valid = false;
};

// Entropic-OT subproblem  min <C,x> + gamma KL(x || prior)  over the
// transport polytope, by alternating dual scaling. Switches to log-domain
// updates when gamma < 1e-2 max C. Stops at marginal l1 residual <= tol;
// on sweep exhaustion returns the best plan with converged = false.
TransportPlan sinkhorn(const OTInstance& inst, double gamma, const Mat& prior, double tol,
                       int max_sweeps, SinkhornDuals* warm = nullptr);

// Rounds a nonnegative matrix to the transport polytope (row/column scaling
// plus a rank-one correction); moves the plan by at most twice its marginal
// residual in l1.
TransportPlan round_to_polytope(const Mat& x, const Vec& l, const Vec& w);

struct ProxSinkhornOptions {
  int max_outer = 2000;
  int max_inner_sweeps = 200000;
  bool adaptive_gamma = true;
  int inner_sweep_cap = 0;  // >0: cap inner sweeps instead of tol (doubling rule)
  std::function<double(int, double, double)> inner_tol_rule;  // (k, gamma, eps) -> tol
};

struct ProxSinkhornResult {
  TransportPlan plan;
  SolverRun run;  // outer trace: L = gamma_k, alpha = 1/gamma_k, f = cost
  std::vector<Mat> plan_seq;  // x_1 .. x_N (desk scale)
  std::vector<int> inner_sweeps;
  std::vector<double> gammas;
  std::vector<double> costs;
  std::vector<double> residuals;
  long total_inner_sweeps = 0;
  double final_cost = kNaN;
  double gamma_final = kNaN;
  bool gamma_frozen = false;
};

// Outer KL-proximal point on the OT linear program (non-adaptive Algorithm-1
// structure with the proximal model psi(x,y) = <C, x-y> and V = KL): each
// step solves the entropic subproblem at the current gamma with the previous
// plan as prior, warm-starting the duals. gamma halves per outer iteration
// until the inner sweep count exceeds 10x the first stage, then freezes.
ProxSinkhornResult proximal_sinkhorn(const OTInstance& inst, double gamma0, double eps,
                                     ProxSinkhornOptions opts = {});

// Practical doubling rule: run with inner sweep cap N, restart the whole
// procedure with N := 2N until the final cost stops moving.
ProxSinkhornResult proximal_sinkhorn_doubling(const OTInstance& inst, double gamma0,
                                              double eps, int nbar0 = 4, int max_rounds = 12);

// Exact LP optimum by successive shortest augmenting paths on the bipartite
// graph with integer-scaled marginals. Requires n <= 12 and marginals
// representable as integers over `scale` up to 1e-9 rounding.
double exact_ot_oracle(const OTInstance& inst, long scale);

// CSV instance format: line "n,<N>", then N cost rows, then "l:,..."/"w:,...".
OTInstance load_ot_instance(const std::string& path);
void save_ot_instance(const OTInstance& inst, const std::string& path);
OTInstance random_ot_instance(int n, long scale, Rng& rng);

}  // namespace imopt
