#include "imopt/gm.hpp"

#include <cmath>

#include "imopt/errors.hpp"

namespace imopt {

namespace {

constexpr int kMaxBacktracks = 60;

bool exit_test_holds(double lhs, double rhs) {
  // 1e-12 relative slack absorbs float noise on the equality boundary
  return lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs));
}

}  // namespace

SolverRun gm_solve(const ModelOracle& model, const ProxSetup& setup, const FeasibleSet& set,
                   const Vec& x0, double R2, const GMConfig& cfg) {
  require(cfg.L0 > 0, "gm: L0 > 0");
  require(cfg.max_iter >= 1, "gm: max_iter >= 1");
  cfg.budget.check();

  SolverRun run;
  Vec x = set.project(x0);
  Vec x_bar_acc = Vec::Zero(x.size());
  double L_prev = cfg.L0;
  double A = 0;
  double sum_alpha_delta = 0, sum_alpha_dt = 0;
  const double L_floor = cfg.L0 * std::pow(2.0, -60);
  const double dt_budget = cfg.budget.delta_tilde;

  for (int k = 0; k < cfg.max_iter; ++k) {
    double f_x = model.f_delta(x);
    double L_cand = cfg.adaptive ? std::max(0.5 * L_prev, L_floor) : cfg.L0;
    int attempts = 0;
    Vec x_next;
    double delta_k = 0, f_next = 0;

    for (;;) {
      ++attempts;
      if (attempts > kMaxBacktracks + 1)
        throw LineSearchDiverged("gm: exit test not satisfied after 60 doublings");
      double alpha = 1.0 / L_cand;
      double A_cand = A + alpha;
      // prox accuracy is stated for psi + L V; the alpha-form solver gets dt/L
      x_next = model.prox_step(x, x, alpha, setup, set, dt_budget * alpha);
      delta_k = std::max(cfg.budget.delta_for(k, alpha, A_cand), model.used_delta());
      f_next = model.f_delta(x_next);
      double rhs = f_x + model.psi(x_next, x) + L_cand * setup.bregman(x, x_next) + delta_k;
      if (!cfg.adaptive || exit_test_holds(f_next, rhs)) break;
      L_cand *= 2.0;
    }

    double alpha = 1.0 / L_cand;
    A += alpha;
    sum_alpha_delta += alpha * delta_k;
    sum_alpha_dt += alpha * dt_budget;
    x_bar_acc += alpha * x_next;
    run.iters.push_back({k, L_cand, alpha, A, attempts, delta_k, dt_budget, f_next});
    run.x_seq.push_back(x_next);
    run.total_attempts += attempts;
    x = x_next;
    L_prev = L_cand;

    run.certificate = {R2 / A, 2.0 * sum_alpha_delta / A, sum_alpha_dt / A};
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
  run.x_bar = x_bar_acc / A;
  run.total_iterations = run.n_iters();
  return run;
}

Certificate gm_certificate(const SolverRun& run, double R2, std::optional<double> L_declared) {
  Certificate c = gm_certificate_prefix(run, run.n_iters(), R2);
  if (L_declared) {
    double A = run.A_N();
    double N = run.n_iters();
    if (A < N / (2.0 * *L_declared) - 1e-12)
      throw Error("gm_certificate: A_N >= N/(2L) violated; wrong declared L?");
  }
  return c;
}

Certificate gm_certificate_prefix(const SolverRun& run, int N, double R2) {
  require(N >= 1 && N <= run.n_iters(), "gm_certificate_prefix: bad N");
  double A = run.iters[N - 1].A;
  double sd = 0, sdt = 0;
  for (int k = 0; k < N; ++k) {
    sd += run.iters[k].alpha * run.iters[k].delta;
    sdt += run.iters[k].alpha * run.iters[k].delta_tilde;
  }
  return {R2 / A, 2.0 * sd / A, sdt / A};
}

Vec gm_xbar_prefix(const SolverRun& run, int N) {
  require(N >= 1 && N <= run.n_iters(), "gm_xbar_prefix: bad N");
  Vec acc = Vec::Zero(run.x_seq[0].size());
  for (int k = 0; k < N; ++k) acc += run.iters[k].alpha * run.x_seq[k];
  return acc / run.iters[N - 1].A;
}

SolverRun gm_strongly_convex_solve(const ModelOracle& model, const StrongConvexityTag& tag,
                                   const ProxSetup& setup, const FeasibleSet& set,
                                   const Vec& x0, double L_fixed, int N,
                                   const InexactnessBudget& budget) {
  require(tag.kind == StrongConvexityTag::Kind::RightRelative,
          "gm_strongly_convex_solve expects a RightRelative tag");
  if (tag.mu > L_fixed) throw InvalidArgument("gm_strongly_convex_solve: mu <= L required");
  require(N >= 1, "gm_strongly_convex_solve: N >= 1");
  budget.check();

  SolverRun run;
  Vec x = set.project(x0);
  run.y_best = x;
  run.f_best = model.f_value(x);
  const double alpha = 1.0 / L_fixed;
  double A = 0;
  for (int k = 0; k < N; ++k) {
    Vec x_next = model.prox_step(x, x, alpha, setup, set, budget.delta_tilde * alpha);
    double delta_k = std::max(budget.delta, model.used_delta());
    A += alpha;
    run.iters.push_back({k, L_fixed, alpha, A, 1, delta_k, budget.delta_tilde,
                         model.f_delta(x_next)});
    run.x_seq.push_back(x_next);
    ++run.total_attempts;
    x = x_next;
    double fx = model.f_value(x);
    if (fx < run.f_best) {
      run.f_best = fx;
      run.y_best = x;
    }
  }
  run.x_last = x;
  run.x_bar = run.y_best;
  run.stopped_by = "max_iter";
  run.total_iterations = N;
  // closed-form report: gap <= L V[x0](x*) (1-mu/L)^N + delta + delta_tilde
  run.decay_factor = std::pow(1.0 - tag.mu / L_fixed, N);
  run.additive_bound = budget.delta + budget.delta_tilde;
  run.certificate = {L_fixed * run.decay_factor, budget.delta, budget.delta_tilde};
  return run;
}

SolverRun gm_restart_solve(const ModelOracle& model, const StrongConvexityTag& tag,
                           const ProxSetup& setup, const FeasibleSet& set, const Vec& x0,
                           double R0_sq, double eps, double L, const InexactnessBudget& budget) {
  require(tag.kind == StrongConvexityTag::Kind::LeftRelative,
          "gm_restart_solve expects a LeftRelative tag");
  if (eps <= 0) throw InvalidArgument("gm_restart_solve: eps > 0");
  require(tag.mu > 0 && L > 0, "gm_restart_solve: mu, L > 0");

  // stage count max(1, ceil(log2(R^2/eps))); the eps >= R^2 corner runs one stage
  int p = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(R0_sq / eps, 1e-300)))));
  int N_stage = static_cast<int>(std::ceil(4.0 * L / tag.mu));

  SolverRun out;
  Vec x = set.project(x0);
  double r2 = R0_sq;
  GMConfig cfg;
  cfg.L0 = L;
  cfg.max_iter = N_stage;
  cfg.budget = budget;
  cfg.adaptive = true;
  for (int stage = 0; stage < p; ++stage) {
    SolverRun stage_run = gm_solve(model, setup, set, x, r2, cfg);
    x = stage_run.x_bar;
    out.total_attempts += stage_run.total_attempts;
    out.total_iterations += stage_run.n_iters();
    for (auto& it : stage_run.iters) out.iters.push_back(it);
    for (auto& xv : stage_run.x_seq) out.x_seq.push_back(xv);
    out.stage_radii_sq.push_back(r2);
    r2 = 0.5 * r2 + budget.delta_tilde / tag.mu + 2.0 * budget.delta / tag.mu;
  }
  out.stages = p;
  out.x_last = x;
  out.x_bar = x;
  out.stopped_by = "stages_done";
  // guarantee V[x_bar](x*) <= eps + 2 dt/mu + 4 d/mu
  out.certificate = {eps, 4.0 * budget.delta / tag.mu, 2.0 * budget.delta_tilde / tag.mu};
  return out;
}

}  // namespace imopt
