#include "imopt/fgm.hpp"

#include <cmath>

#include "imopt/errors.hpp"

namespace imopt {

namespace {

constexpr int kMaxBacktracks = 60;

bool exit_test_holds(double lhs, double rhs) {
  return lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs));
}

double largest_alpha_root(double L, double A) {
  // largest root of L a^2 - a - A = 0
  return (1.0 + std::sqrt(1.0 + 4.0 * L * A)) / (2.0 * L);
}

}  // namespace

SolverRun fgm_solve(const ModelOracle& model, const ProxSetup& setup, const FeasibleSet& set,
                    const Vec& x0, double R2, const FGMConfig& cfg) {
  require(cfg.L0 > 0, "fgm: L0 > 0");
  require(cfg.max_iter >= 1, "fgm: max_iter >= 1");
  cfg.budget.check();
  if (!setup.one_strongly_convex())
    throw NotOneStronglyConvex("fgm requires a 1-strongly convex prox function");
  if (cfg.fw_mode && !cfg.R_Q)
    throw InvalidArgument("fw mode requires the R_Q bound");
  if (cfg.fw_mode && !model.linear_psi())
    throw InvalidArgument("fw mode requires a model with linear psi");
  if (cfg.fw_mode && !set.has_lmo())
    throw UnsupportedSet("fw mode requires a set with a linear minimization oracle");

  SolverRun run;
  Vec x = set.project(x0);
  Vec u = x;
  double A = 0;
  double L_prev = cfg.L0;
  double sum_deltaA = 0, sum_dt_over_L = 0;
  const double L_floor = cfg.L0 * std::pow(2.0, -60);
  const double dt_budget = cfg.budget.delta_tilde;

  for (int k = 0; k < cfg.max_iter; ++k) {
    double L_cand = cfg.adaptive ? std::max(0.5 * L_prev, L_floor) : cfg.L0;
    int attempts = 0;
    Vec y, u_next, x_next;
    double alpha = 0, A_cand = 0, delta_k = 0, dt_k = 0, f_next = 0;

    for (;;) {
      ++attempts;
      if (attempts > kMaxBacktracks + 1)
        throw LineSearchDiverged("fgm: exit test not satisfied after 60 doublings");
      alpha = largest_alpha_root(L_cand, A);
      A_cand = A + alpha;
      y = (alpha * u + A * x) / A_cand;
      double f_y = model.f_delta(y);
      if (cfg.fw_mode) {
        u_next = set.lmo(model.psi_gradient(y));
        dt_k = 2.0 * L_cand * (*cfg.R_Q) * (*cfg.R_Q);
      } else {
        u_next = model.prox_step(y, u, alpha, setup, set, dt_budget / L_cand);
        dt_k = dt_budget;
      }
      delta_k = std::max(cfg.budget.delta_for(k, alpha, A_cand), model.used_delta());
      x_next = (alpha * u_next + A * x) / A_cand;
      f_next = model.f_delta(x_next);
      double nrm = setup.norm(x_next - y);
      double rhs = f_y + model.psi(x_next, y) + 0.5 * L_cand * nrm * nrm + delta_k;
      if (!cfg.adaptive || exit_test_holds(f_next, rhs)) break;
      L_cand *= 2.0;
    }

    A = A_cand;
    u = u_next;
    x = x_next;
    L_prev = L_cand;
    sum_deltaA += delta_k * A;
    sum_dt_over_L += dt_k / L_cand;
    run.iters.push_back({k, L_cand, alpha, A, attempts, delta_k, dt_k, f_next});
    run.x_seq.push_back(x);
    run.total_attempts += attempts;

    run.certificate = {R2 / A, 2.0 * sum_deltaA / A, sum_dt_over_L / A};
    if (cfg.universal_eps) {
      // guarantee f(x_N) - f* <= R^2/A_N + eps/2 (+ FW term); stop on the
      // computable part
      double resid = (R2 + (cfg.fw_mode ? 2.0 * run.n_iters() * (*cfg.R_Q) * (*cfg.R_Q) : 0.0)) / A;
      if (resid <= 0.5 * *cfg.universal_eps) {
        run.stopped_by = "target_eps";
        break;
      }
    }
    if (cfg.target_eps && run.certificate.bound_value() <= *cfg.target_eps) {
      run.stopped_by = "target_eps";
      break;
    }
    if (cfg.stop_predicate && cfg.stop_predicate(x, k)) {
      run.stopped_by = "predicate";
      break;
    }
  }
  if (run.stopped_by.empty()) run.stopped_by = "max_iter";
  run.x_last = x;
  run.x_bar = x;
  run.total_iterations = run.n_iters();
  return run;
}

Certificate fgm_certificate_prefix(const SolverRun& run, int N, double R2) {
  require(N >= 1 && N <= run.n_iters(), "fgm_certificate_prefix: bad N");
  double A = run.iters[N - 1].A;
  double sdA = 0, sdt = 0;
  for (int k = 0; k < N; ++k) {
    sdA += run.iters[k].delta * run.iters[k].A;
    sdt += run.iters[k].delta_tilde / run.iters[k].L;
  }
  return {R2 / A, 2.0 * sdA / A, sdt / A};
}

SolverRun fgm_universal_solve(const HolderProblem& p, const ProxSetup& setup,
                              const FeasibleSet& set, const Vec& x0, double R2, double eps,
                              FGMConfig cfg) {
  require(eps > 0, "universal fgm: eps > 0");
  cfg.universal_eps = eps;
  cfg.budget.delta_schedule = [eps](int, double alpha, double A) {
    return eps * alpha / (4.0 * A);
  };
  auto model = make_universal_model(p, cfg.budget.delta_schedule);
  return fgm_solve(*model, setup, set, x0, R2, cfg);
}

SolverRun fgm_restart_solve(const ModelOracle& model, const StrongConvexityTag& tag,
                            const ProxSetup& setup, const FeasibleSet& set, const Vec& x0,
                            double R2, double eps, const InexactnessBudget& budget) {
  require(tag.kind == StrongConvexityTag::Kind::LeftRelative,
          "fgm_restart_solve expects a LeftRelative tag");
  if (eps <= 0) throw InvalidArgument("fgm_restart_solve: eps > 0");
  require(tag.mu > 0, "fgm_restart_solve: mu > 0");
  const double L = model.declared_L_hint();

  SolverRun out;
  Vec x = set.project(x0);
  out.x_last = x;
  out.x_bar = x;
  if (tag.mu * R2 <= eps) {  // log4 term <= 0: nothing to do
    out.stopped_by = "stages_done";
    return out;
  }
  int p = static_cast<int>(std::ceil(std::log2(tag.mu * R2 / eps) / 2.0));
  int N_stage = static_cast<int>(std::ceil(6.0 * std::sqrt(L / tag.mu)));

  FGMConfig cfg;
  cfg.L0 = L;
  cfg.adaptive = false;  // the restart analysis assumes a fixed constant
  cfg.max_iter = N_stage;
  cfg.budget = budget;
  double r2 = R2;
  for (int stage = 0; stage < p; ++stage) {
    SolverRun sr = fgm_solve(model, setup, set, x, r2, cfg);
    x = sr.x_last;
    out.total_attempts += sr.total_attempts;
    out.total_iterations += sr.n_iters();
    for (auto& it : sr.iters) out.iters.push_back(it);
    for (auto& xv : sr.x_seq) out.x_seq.push_back(xv);
    out.stage_radii_sq.push_back(r2);
    r2 /= 4.0;
  }
  out.stages = p;
  out.x_last = x;
  out.x_bar = x;
  out.stopped_by = "stages_done";
  out.certificate = {eps, 0, 0};
  return out;
}

SolverRun fw_solve(const ModelOracle& model, const FeasibleSet& set, const Vec& x0, double eps,
                   FGMConfig cfg) {
  require(eps > 0, "fw: eps > 0");
  if (!cfg.R_Q) throw InvalidArgument("fw: R_Q required");
  cfg.fw_mode = true;
  cfg.universal_eps = eps;
  cfg.budget.delta_schedule = [eps](int, double alpha, double A) {
    return eps * alpha / (4.0 * A);
  };
  const double R2 = (*cfg.R_Q) * (*cfg.R_Q);  // V[x0](x*) <= R_Q^2 by assumption
  return fgm_solve(model, ProxSetup::euclidean(), set, x0, R2, cfg);
}

}  // namespace imopt
