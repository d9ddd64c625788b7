#include "imopt/mirror_prox.hpp"

#include <cmath>

#include "imopt/errors.hpp"

namespace imopt {

namespace {

constexpr int kMaxBacktracks = 60;

bool exit_test_holds(double lhs, double rhs) {
  return lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs));
}

}  // namespace

VIRun mirror_prox_solve(const VIModelOracle& model, const ProxSetup& setup,
                        const FeasibleSet& set, const MirrorProxConfig& cfg) {
  require(cfg.L0 > 0, "mirror prox: L0 > 0");
  require(cfg.eps > 0, "mirror prox: eps > 0");
  require(cfg.max_iter >= 1, "mirror prox: max_iter >= 1");
  if (cfg.V_max <= 0) throw InvalidArgument("mirror prox: V_max > 0 required");
  require(cfg.delta >= 0 && cfg.delta_tilde >= 0, "mirror prox: budgets >= 0");

  VIRun run;
  run.delta = cfg.delta;
  run.delta_tilde = cfg.delta_tilde;
  run.v_max = cfg.V_max;
  Vec z = setup.prox_center(set);
  run.z_seq.push_back(z);
  Vec w_acc = Vec::Zero(set.dim());
  double S = 0;
  double L_prev = cfg.L0;
  const double L_floor = cfg.L0 * std::pow(2.0, -60);
  const double S_target = cfg.V_max / cfg.eps;

  for (int k = 0; k < cfg.max_iter; ++k) {
    double L_cand = std::max(0.5 * L_prev, L_floor);
    int attempts = 0;
    Vec w, z_next;
    for (;;) {
      ++attempts;
      if (attempts > kMaxBacktracks + 1)
        throw LineSearchDiverged("mirror prox: exit test not satisfied after 60 doublings");
      w = model.prox_step(z, z, L_cand, setup, set, cfg.delta_tilde);
      z_next = model.prox_step(w, z, L_cand, setup, set, cfg.delta_tilde);
      run.subproblem_solves += 2;
      double lhs = model.psi(z_next, z);
      double rhs = model.psi(z_next, w) + model.psi(w, z) +
                   L_cand * (setup.bregman(z, w) + setup.bregman(w, z_next)) + cfg.delta;
      if (exit_test_holds(lhs, rhs)) break;
      L_cand *= 2.0;
    }

    S += 1.0 / L_cand;
    w_acc += w / L_cand;
    z = z_next;
    L_prev = L_cand;
    run.iters.push_back({k, L_cand, attempts, cfg.delta});
    run.w_seq.push_back(w);
    run.z_seq.push_back(z);
    run.total_attempts += attempts;
    if (S >= S_target) {
      run.stopped_by = "s_target";
      break;
    }
  }
  if (run.stopped_by.empty()) run.stopped_by = "max_iter";
  run.S_N = S;
  run.w_hat = w_acc / S;
  run.certificate = cfg.V_max / S + 2.0 * cfg.delta + 2.0 * cfg.delta_tilde;
  return run;
}

Vec vi_what_prefix(const VIRun& run, int N) {
  require(N >= 1 && N <= run.n_iters(), "vi_what_prefix: bad N");
  Vec acc = Vec::Zero(run.w_seq[0].size());
  double S = 0;
  for (int k = 0; k < N; ++k) {
    acc += run.w_seq[k] / run.iters[k].L;
    S += 1.0 / run.iters[k].L;
  }
  return acc / S;
}

VIRun mirror_prox_universal_solve(std::function<Vec(const Vec&)> g, double nu, double L_nu,
                                  const ProxSetup& setup, const FeasibleSet& set, double eps,
                                  double L0, int max_iter, double V_max, SimpleTerm h) {
  require(eps > 0, "universal mirror prox: eps > 0");
  auto model = make_vi_operator_model_holder(std::move(g), nu, L_nu, eps / 2.0, h);
  MirrorProxConfig cfg;
  cfg.eps = eps;
  cfg.delta = eps / 2.0;
  cfg.L0 = L0;
  cfg.max_iter = max_iter;
  cfg.V_max = V_max;
  VIRun run = mirror_prox_solve(*model, setup, set, cfg);
  run.predicted_iteration_bound =
      std::ceil(2.0 * std::pow(2.0 * L_nu / eps, 2.0 / (1.0 + nu)) * V_max);
  return run;
}

VIRun mirror_prox_restart_solve(const VIModelOracle& model, const ProxSetup& setup,
                                const FeasibleSet& set, const Vec& x0, double R0_sq,
                                double eps, int max_inner_iter) {
  if (eps <= 0) throw InvalidArgument("restarted mirror prox: eps > 0");
  if (!model.mu() || !setup.omega())
    throw InvalidArgument("restarted mirror prox needs mu and Omega");
  const double mu = *model.mu();
  const double omega = *setup.omega();
  const double L = model.declared_L_hint();

  VIRun out;
  Vec x = set.project(x0);
  double r2 = R0_sq;
  int p = 0;
  // stage p is needed while R0^2 2^{-p} > eps/2; eps >= 2 R0^2 runs zero stages
  const double p_limit = std::log2(std::max(2.0 * R0_sq / eps, 1e-300));
  while (p < p_limit) {
    double radius = std::sqrt(r2);
    ProxSetup stage_setup = setup.recentered(x, radius);
    MirrorProxConfig cfg;
    cfg.V_max = omega / 2.0;                 // V_p[x_p](x*) <= Omega/2
    cfg.eps = mu * r2 / 2.0;                 // S target Omega/(mu R_p^2)
    cfg.delta = model.declared_delta();
    cfg.L0 = L * r2;                         // constants scale with R_p^2
    cfg.max_iter = max_inner_iter;
    VIRun inner = mirror_prox_solve(model, stage_setup, set, cfg);
    x = inner.w_hat;
    out.total_inner_iterations += inner.n_iters();
    out.total_attempts += inner.total_attempts;
    out.subproblem_solves += inner.subproblem_solves;
    out.stage_radii_sq.push_back(r2);
    ++p;
    r2 = R0_sq * std::pow(2.0, -p) + (1.0 - std::pow(2.0, -(p - 1))) * eps / 2.0;
  }
  out.stages = p;
  out.x_final = x;
  out.w_hat = x;
  out.stopped_by = "stages_done";
  out.certificate = eps;
  return out;
}

namespace {

double best_response_v_value(const SaddleSpec& s, const Vec& u_hat) {
  if (s.best_response_v) return s.best_response_v(u_hat);
  if (s.bilinear_A.size() > 0) {
    Vec c = s.bilinear_A.transpose() * u_hat;
    return -simple_linmin(s.Q2, -c, s.phi);
  }
  throw GapOracleUnavailable("saddle gap: no best response for non-bilinear f");
}

double best_response_u_value(const SaddleSpec& s, const Vec& v_hat) {
  if (s.best_response_u) return s.best_response_u(v_hat);
  if (s.bilinear_A.size() > 0) {
    Vec c = s.bilinear_A * v_hat;
    return simple_linmin(s.Q1, c, s.h);
  }
  throw GapOracleUnavailable("saddle gap: no best response for non-bilinear f");
}

}  // namespace

double saddle_gap(const SaddleSpec& spec, const Vec& u, const Vec& v) {
  // gap = max_v f(u,.) - min_u f(.,v) with f = f~ + h(u) - phi(v)
  return spec.h.value(u) + best_response_v_value(spec, u) + spec.phi.value(v) -
         best_response_u_value(spec, v);
}

double saddle_prefix_gap(const SaddleSpec& spec, const VIRun& run, int N) {
  Vec w = vi_what_prefix(run, N);
  return saddle_gap(spec, w.head(spec.n1), w.tail(spec.n2));
}

SaddleResult saddle_solve(const SaddleSpec& spec, double eps, MirrorProxConfig cfg) {
  auto model = make_composite_saddle_vi_model(spec);
  FeasibleSet set = FeasibleSet::product(spec.Q1, spec.Q2);
  bool both_simplex = spec.Q1.kind() == FeasibleSet::Kind::Simplex &&
                      spec.Q2.kind() == FeasibleSet::Kind::Simplex;
  ProxSetup setup =
      both_simplex ? ProxSetup::entropy_product(spec.n1, spec.n2) : ProxSetup::euclidean();
  if (cfg.V_max <= 0) {
    if (both_simplex) {
      cfg.V_max = std::log(static_cast<double>(spec.n1)) +
                  std::log(static_cast<double>(spec.n2));
    } else {
      double d = set.diameter();
      cfg.V_max = 0.5 * d * d;
    }
  }
  cfg.eps = eps;
  cfg.delta = model->declared_delta();
  VIRun run = mirror_prox_solve(*model, setup, set, cfg);

  SaddleResult res;
  res.u_hat = run.w_hat.head(spec.n1);
  res.v_hat = run.w_hat.tail(spec.n2);
  res.gap = saddle_gap(spec, res.u_hat, res.v_hat);
  res.run = std::move(run);
  return res;
}

}  // namespace imopt
