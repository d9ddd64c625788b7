#include "imopt/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "imopt/bench.hpp"
#include "imopt/errors.hpp"
#include "imopt/fgm.hpp"
#include "imopt/gm.hpp"
#include "imopt/mirror_prox.hpp"
#include "imopt/sinkhorn.hpp"

namespace imopt {

namespace {

struct MinInstance {
  std::shared_ptr<ModelOracle> model;
  std::function<double(const Vec&)> f;
  FeasibleSet set = FeasibleSet::whole_space(1);
  Vec x0;
  double R2 = 1;
  double f_star = 0;
  double L_true = 1;
  double mu = 0;
};

MinInstance quadratic_instance(int n, double cond, Rng& rng, bool on_box) {
  MinInstance m;
  auto q = QuadraticProblem::random(n, 1.0 / cond, 1.0, rng);
  m.model = make_smooth_model(q);
  m.f = [q](const Vec& x) { return q.value(x); };
  m.set = on_box ? FeasibleSet::box_uniform(n, -2, 2) : FeasibleSet::whole_space(n);
  Vec xs = q.minimizer();
  m.f_star = q.min_value();
  m.L_true = q.L();
  m.mu = q.mu();
  m.x0 = m.set.project(rng.uniform_vector(n, -1.5, 1.5));
  m.R2 = 0.5 * (m.x0 - xs).squaredNorm() * 1.0000001 + 1e-12;
  return m;
}

MinInstance lasso_instance(int n, Rng& rng) {
  MinInstance m;
  Vec d = rng.uniform_vector(n, 0.1, 1.0);
  Vec b = rng.uniform_vector(n, -1.0, 1.0);
  double lam = 0.2;
  CompositeProblem p;
  p.g_value = [d, b](const Vec& x) { return 0.5 * x.cwiseProduct(d).dot(x) - b.dot(x); };
  p.g_grad = [d, b](const Vec& x) { return Vec(d.cwiseProduct(x) - b); };
  p.h = SimpleTerm::l1(lam);
  m.model = make_composite_model(p, d.maxCoeff());
  m.f = [p, lam](const Vec& x) { return p.g_value(x) + lam * x.lpNorm<1>(); };
  m.set = FeasibleSet::whole_space(n);
  Vec xs(n);
  for (int i = 0; i < n; ++i)
    xs[i] = std::abs(b[i]) <= lam ? 0.0 : (b[i] - (b[i] > 0 ? lam : -lam)) / d[i];
  m.f_star = m.f(xs);
  m.L_true = d.maxCoeff();
  m.mu = d.minCoeff();
  m.x0 = rng.uniform_vector(n, -1.0, 1.0);
  m.R2 = 0.5 * (m.x0 - xs).squaredNorm() * 1.0000001 + 1e-12;
  return m;
}

HolderProblem norm_problem(const Vec& a) {
  HolderProblem p;
  p.value = [a](const Vec& x) { return (x - a).norm(); };
  p.subgrad = [a](const Vec& x) {
    double n = (x - a).norm();
    return n < 1e-14 ? Vec(Vec::Zero(x.size())) : Vec((x - a) / n);
  };
  p.nu = 0.0;
  p.L_nu = 2.0;
  return p;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

// ---------------------------------------------------------------------------

CriterionResult c1_gm_certificate() {
  CriterionResult r{"C1 gm-certificate", true, "", 0};
  Rng rng(1001);
  const double budgets[4][2] = {{0, 0}, {1e-3, 0}, {0, 1e-3}, {1e-3, 1e-3}};
  double worst_slack = -1e300;
  for (int i = 0; i < 20; ++i) {
    int n = 5 + (i * 45) / 19;
    bool quad = i % 2 == 0;
    bool noisy = quad && budgets[i % 4][1] > 0;
    MinInstance inst = quad ? quadratic_instance(n, 10.0 + i, rng, noisy)
                            : lasso_instance(n, rng);
    GMConfig cfg;
    cfg.L0 = 0.5 * inst.L_true;
    cfg.max_iter = 100;
    cfg.budget.delta = budgets[i % 4][0];
    cfg.budget.delta_tilde = budgets[i % 4][1];
    auto model = inst.model;
    if (noisy) model = with_inexact_prox(model, cfg.budget.delta_tilde, 9000 + i);
    auto run = gm_solve(*model, ProxSetup::euclidean(), inst.set, inst.x0, inst.R2, cfg);
    for (int N = 1; N <= run.n_iters(); ++N) {
      double gap = inst.f(gm_xbar_prefix(run, N)) - inst.f_star;
      double cert = gm_certificate_prefix(run, N, inst.R2).bound_value();
      worst_slack = std::max(worst_slack, gap - cert);
      if (gap > cert + 1e-9) r.pass = false;
    }
    if (run.A_N() < run.n_iters() / (2.0 * inst.L_true) - 1e-12) r.pass = false;
    double att_bound = 2.0 * run.n_iters() + std::log2(inst.L_true / cfg.L0) + 1.0;
    if (run.total_attempts > att_bound + 1e-9) r.pass = false;
  }
  r.detail = fmt("worst gap-cert slack %.2e over 20 problems x 100 prefixes", worst_slack);
  return r;
}

CriterionResult c2_fgm_certificate() {
  CriterionResult r{"C2 fgm-certificate", true, "", 0};
  Rng rng(1002);
  const double budgets[4][2] = {{0, 0}, {1e-3, 0}, {0, 1e-3}, {1e-3, 1e-3}};
  double worst_slack = -1e300;
  for (int i = 0; i < 20; ++i) {
    int n = 5 + (i * 45) / 19;
    bool quad = i % 2 == 0;
    bool noisy = quad && budgets[i % 4][1] > 0;
    MinInstance inst = quad ? quadratic_instance(n, 10.0 + i, rng, noisy)
                            : lasso_instance(n, rng);
    FGMConfig cfg;
    cfg.L0 = 0.5 * inst.L_true;
    cfg.max_iter = 100;
    cfg.budget.delta = budgets[i % 4][0];
    cfg.budget.delta_tilde = budgets[i % 4][1];
    auto model = inst.model;
    if (noisy) model = with_inexact_prox(model, cfg.budget.delta_tilde, 9100 + i);
    auto run = fgm_solve(*model, ProxSetup::euclidean(), inst.set, inst.x0, inst.R2, cfg);
    for (int N = 1; N <= run.n_iters(); ++N) {
      double gap = inst.f(run.x_seq[N - 1]) - inst.f_star;
      Certificate cert = fgm_certificate_prefix(run, N, inst.R2);
      double error_terms = cert.delta_term + cert.delta_tilde_term;
      double hard = 8.0 * inst.L_true * inst.R2 / ((N + 1.0) * (N + 1.0)) + error_terms;
      worst_slack = std::max(worst_slack, gap - hard);
      if (gap > hard + 1e-9) r.pass = false;
      if (gap > cert.bound_value() + 1e-9) r.pass = false;
      if (run.iters[N - 1].A < (N + 1.0) * (N + 1.0) / (8.0 * inst.L_true) - 1e-12)
        r.pass = false;
    }
    double att_bound = 4.0 * run.n_iters() + std::log2(inst.L_true / cfg.L0) + 1.0;
    if (run.total_attempts > att_bound + 1e-9) r.pass = false;
  }
  r.detail = fmt("worst gap-bound slack %.2e over 20 problems x 100 prefixes", worst_slack);
  return r;
}

CriterionResult c3_rate_separation() {
  CriterionResult r{"C3 rate-separation", true, "", 0};
  Rng rng(1003);
  auto q = QuadraticProblem::random(50, 1e-4, 1.0, rng);  // condition number 1e4
  auto model = make_smooth_model(q);
  Vec x0 = rng.uniform_vector(50, -1, 1);
  double fs = q.min_value();
  double R2 = 0.5 * (x0 - q.minimizer()).squaredNorm() * 1.0001 + 1e-12;
  auto space = FeasibleSet::whole_space(50);
  auto reached = [&](const Vec& x, int) { return q.value(x) - fs <= 1e-6; };

  GMConfig gcfg;
  gcfg.L0 = 1.0;
  gcfg.max_iter = 4000000;
  gcfg.stop_predicate = reached;
  auto grun = gm_solve(*model, ProxSetup::euclidean(), space, x0, R2, gcfg);

  FGMConfig fcfg;
  fcfg.L0 = 1.0;
  fcfg.max_iter = 4000000;
  fcfg.stop_predicate = reached;
  auto frun = fgm_solve(*model, ProxSetup::euclidean(), space, x0, R2, fcfg);

  bool both = grun.stopped_by == "predicate" && frun.stopped_by == "predicate";
  r.pass = both && frun.n_iters() * 5 <= grun.n_iters();
  r.detail = fmt("gm iters %.0f, fgm iters %.0f (need fgm <= gm/5)",
                 double(grun.n_iters()), double(frun.n_iters()));
  return r;
}

CriterionResult c4_universal_fgm() {
  CriterionResult r{"C4 universal-fgm-exponent", true, "", 0};
  Rng rng(1004);
  std::ostringstream detail;
  // nu = 0: f(x) = ||x - a||, exponent 2/(1+3nu) = 2
  {
    Vec a = rng.uniform_vector(2, -0.1, 0.1);
    auto hp = norm_problem(a);
    Vec x0 = Vec::Constant(2, 0.3);
    double R2 = 0.5 * (x0 - a).squaredNorm() * 1.01;
    double prev = 0;
    std::vector<double> eps_grid = {1e-1, 1e-2, 1e-3};
    for (size_t t = 0; t < eps_grid.size(); ++t) {
      FGMConfig cfg;
      cfg.max_iter = 50000000;
      auto run = fgm_universal_solve(hp, ProxSetup::euclidean(), FeasibleSet::whole_space(2),
                                     x0, R2, eps_grid[t], cfg);
      double N = run.n_iters();
      if (t > 0) {
        double ratio = N / prev;  // expected 10^2 per decade
        if (ratio < 100.0 / 4.0 || ratio > 100.0 * 4.0) r.pass = false;
        detail << fmt("nu0 ratio %.1f ", ratio);
      }
      prev = N;
    }
  }
  // nu = 1: quadratic, exponent 2/(1+3) = 1/2
  {
    auto q = QuadraticProblem::random(4, 0.3, 1.0, rng);
    HolderProblem hp;
    hp.value = [q](const Vec& x) { return q.value(x); };
    hp.subgrad = [q](const Vec& x) { return q.gradient(x); };
    hp.nu = 1.0;
    hp.L_nu = q.L();
    Vec x0 = rng.uniform_vector(4, -1, 1);
    double R2 = 0.5 * (x0 - q.minimizer()).squaredNorm() * 1.01 + 1e-12;
    double prev = 0;
    std::vector<double> eps_grid = {1e-1, 1e-2, 1e-3};
    for (size_t t = 0; t < eps_grid.size(); ++t) {
      FGMConfig cfg;
      cfg.max_iter = 2000000;
      auto run = fgm_universal_solve(hp, ProxSetup::euclidean(), FeasibleSet::whole_space(4),
                                     x0, R2, eps_grid[t], cfg);
      double N = run.n_iters();
      if (t > 0) {
        double ratio = N / prev;  // expected sqrt(10) per decade
        double target = std::sqrt(10.0);
        if (ratio < target / 4.0 || ratio > target * 4.0) r.pass = false;
        detail << fmt("nu1 ratio %.2f ", ratio);
      }
      prev = N;
    }
  }
  r.detail = detail.str();
  return r;
}

CriterionResult c5_mirror_prox_games() {
  CriterionResult r{"C5 mirror-prox-games", true, "", 0};
  Rng rng(1005);
  double worst = -1e300;
  long worst_iters = 0;
  for (int g = 0; g < 4; ++g) {
    Mat A;
    if (g == 0) {
      A.resize(2, 2);
      A << 1, -1, -1, 1;  // matching pennies
    } else {
      A.resize(5, 5);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
    }
    auto spec = make_matrix_game_spec(A);
    double v_max = std::log(double(spec.n1)) + std::log(double(spec.n2));
    double L = spec.L;
    MirrorProxConfig cfg;
    cfg.eps = 1e-3;
    cfg.L0 = L;
    cfg.max_iter = 1000000;
    cfg.V_max = v_max;
    auto res = saddle_solve(spec, 1e-3, cfg);
    long bound = static_cast<long>(std::ceil(2.0 * L * v_max / 1e-3));
    if (res.run.stopped_by != "s_target" || res.run.n_iters() > bound) r.pass = false;
    if (res.gap > 1e-3 + 1e-9) r.pass = false;
    worst_iters = std::max(worst_iters, long(res.run.n_iters()));
    for (int N = 1; N <= res.run.n_iters(); ++N) {
      double gap = saddle_prefix_gap(spec, res.run, N);
      double bnd = 2.0 * L * v_max / N + 1e-9;
      worst = std::max(worst, gap - bnd);
      if (gap > bnd) r.pass = false;
    }
  }
  r.detail = fmt("worst gap-bound slack %.2e, max iters %.0f", worst, double(worst_iters));
  return r;
}

CriterionResult c6_universal_mirror_prox() {
  CriterionResult r{"C6 universal-mirror-prox", true, "", 0};
  Rng rng(1006);
  Vec a = 0.2 * rng.uniform_vector(2, -1, 1);
  auto ball = FeasibleSet::ball(Vec::Zero(2), 1.0);
  auto count = [&](double nu, double L_nu, const std::function<Vec(const Vec&)>& g,
                   double eps) {
    auto run = mirror_prox_universal_solve(g, nu, L_nu, ProxSetup::euclidean(), ball, eps,
                                           0.5, 100000000, 0.5);
    return double(run.n_iters());
  };
  auto g1 = [a](const Vec& x) { return Vec(x - a); };
  auto g0 = [a](const Vec& x) {
    double n = (x - a).norm();
    return n < 1e-14 ? Vec(Vec::Zero(x.size())) : Vec((x - a) / n);
  };
  double r1 = count(1.0, 1.0, g1, 1e-2) / count(1.0, 1.0, g1, 1e-1);
  double r0 = count(0.0, 2.0, g0, 1e-2) / count(0.0, 2.0, g0, 1e-1);
  if (r1 < 10.0 / 4.0 || r1 > 10.0 * 4.0) r.pass = false;
  if (r0 < 100.0 / 4.0 || r0 > 100.0 * 4.0) r.pass = false;
  r.detail = fmt("nu1 ratio %.1f (expect ~10), nu0 ratio %.1f (expect ~100)", r1, r0);
  return r;
}

CriterionResult c7_restarts() {
  CriterionResult r{"C7 restarts", true, "", 0};
  Rng rng(1007);
  std::ostringstream detail;
  // GM restarts: exact iteration count and final V
  {
    auto q = QuadraticProblem::random(6, 0.5, 4.0, rng);
    auto model = make_smooth_model(q);
    Vec xs = q.minimizer();
    Vec dir = rng.uniform_vector(6, -1, 1).normalized();
    Vec x0 = xs + dir * std::sqrt(2.0 * 0.9);
    double R2 = 1.0, eps = 1.0 / 64.0;
    auto run = gm_restart_solve(*model, StrongConvexityTag::left_relative(q.mu()),
                                ProxSetup::euclidean(), FeasibleSet::whole_space(6), x0, R2,
                                eps, q.L(), {});
    long expect = long(std::ceil(std::log2(R2 / eps))) * long(std::ceil(4.0 * q.L() / q.mu()));
    if (run.total_iterations != expect) r.pass = false;
    double V = 0.5 * (run.x_bar - xs).squaredNorm();
    if (V > eps + 1e-9) r.pass = false;
    detail << fmt("gm iters %.0f (expect %.0f) V %.1e; ", double(run.total_iterations),
                  double(expect), V);
  }
  // FGM restarts: gap <= eps within p * ceil(6 sqrt(L/mu))
  {
    auto q = QuadraticProblem::random(6, 1.0, 25.0, rng);
    auto model = make_smooth_model(q);
    Vec xs = q.minimizer();
    Vec x0 = xs + 0.4 * rng.uniform_vector(6, -1, 1);
    double R2 = 0.5 * (x0 - xs).squaredNorm() * 1.001 + 1e-12;
    double eps = 1e-6;
    auto run = fgm_restart_solve(*model, StrongConvexityTag::left_relative(q.mu()),
                                 ProxSetup::euclidean(), FeasibleSet::whole_space(6), x0, R2,
                                 eps, {});
    long per = long(std::ceil(6.0 * std::sqrt(q.L() / q.mu())));
    if (run.total_iterations != run.stages * per) r.pass = false;
    double gap = q.value(run.x_last) - q.min_value();
    if (gap > eps + 1e-12) r.pass = false;
    detail << fmt("fgm %.0f iters gap %.1e; ", double(run.total_iterations), gap);
  }
  // restarted mirror prox on an affine strongly monotone VI
  {
    Vec a(3);
    a << 0.2, -0.1, 0.25;
    auto model = make_vi_operator_model([a](const Vec& x) { return Vec(x - a); }, 1.0,
                                        SimpleTerm::none(), 1.0);
    auto eu = ProxSetup::euclidean();
    auto ball = FeasibleSet::ball(Vec::Zero(3), 1.0);
    double R0_sq = 1.0, eps = 1e-6;
    auto run = mirror_prox_restart_solve(*model, eu, ball, Vec::Zero(3), R0_sq, eps);
    double bound = std::ceil((2.0 * 1.0 * *eu.omega() / 1.0) * std::log2(2.0 * R0_sq / eps));
    if (double(run.total_inner_iterations) > bound) r.pass = false;
    double dist = (run.x_final - a).squaredNorm();
    if (dist > eps) r.pass = false;
    detail << fmt("mp inner %.0f <= %.0f dist^2 %.1e", double(run.total_inner_iterations),
                  bound, dist);
  }
  r.detail = detail.str();
  return r;
}

CriterionResult c8_model_validation() {
  CriterionResult r{"C8 model-validation", true, "", 0};
  Rng rng(1008);
  std::ostringstream detail;
  auto eu = ProxSetup::euclidean();
  auto box3 = FeasibleSet::box_uniform(3, -1, 1);
  auto expect_pass = [&](const char* name, const ValidationReport& rep) {
    if (!rep.passed) {
      r.pass = false;
      detail << name << ": " << rep.summary() << "; ";
    }
  };

  auto q = QuadraticProblem::random(3, 0.2, 1.5, rng);
  expect_pass("smooth", validate_min_model(*make_smooth_model(q), eu, box3, 1000, 42));

  CompositeProblem cp;
  cp.g_value = [q](const Vec& x) { return q.value(x); };
  cp.g_grad = [q](const Vec& x) { return q.gradient(x); };
  cp.h = SimpleTerm::l1(0.3);
  expect_pass("composite",
              validate_min_model(*make_composite_model(cp, q.L()), eu, box3, 1000, 43));

  SuperpositionProblem sp;
  sp.g_value = {[q](const Vec& x) { return q.value(x); },
                [](const Vec& x) { return x[0] + 0.25 * x.squaredNorm(); }};
  sp.g_grad = {[q](const Vec& x) { return q.gradient(x); },
               [](const Vec& x) {
                 Vec g = 0.5 * x;
                 g[0] += 1.0;
                 return g;
               }};
  sp.L = {q.L(), 0.5};
  expect_pass("superposition",
              validate_min_model(*make_superposition_model(sp), eu, box3, 1000, 44));

  Vec c3 = rng.uniform_vector(3, -1, 1);
  expect_pass("proximal",
              validate_min_model(*make_proximal_model_linear(c3, 1.0), eu, box3, 1000, 45));

  MinMinProblem mm;
  mm.F = [](const Vec& z, const Vec& x) { return 0.5 * (z - x).squaredNorm(); };
  mm.grad_z = [](const Vec& z, const Vec& x) { return Vec(z - x); };
  mm.grad_x = [](const Vec& z, const Vec& x) { return Vec(x - z); };
  mm.Qz = FeasibleSet::ball(Vec::Zero(3), 0.5);
  mm.L = 2.0;
  mm.z0 = Vec::Zero(3);
  expect_pass("min-min", validate_min_model(*make_inexact_linearization_model(mm, 1e-5), eu,
                                            box3, 1000, 46));

  double mu_phi = 2.0;
  SaddleMaxProblem sm;
  sm.A = Mat::Identity(3, 3);
  sm.b = rng.uniform_vector(3, -0.5, 0.5);
  sm.phi = [mu_phi](const Vec& z) { return 0.5 * mu_phi * z.squaredNorm(); };
  sm.grad_phi = [mu_phi](const Vec& z) { return Vec(mu_phi * z); };
  sm.Qz = FeasibleSet::whole_space(3);
  sm.L_f = 1.0 / mu_phi;
  sm.smoothness = mu_phi;
  sm.z0 = Vec::Zero(3);
  sm.exact_argmax = [mu_phi](const Vec& y) { return Vec(-y / mu_phi); };
  expect_pass("saddle-max", validate_min_model(*make_inexact_linearization_model(sm, 1e-6),
                                               eu, box3, 1000, 47));

  MoreauProblem mp;
  mp.f = [q](const Vec& x) { return q.value(x); };
  mp.L = q.L();
  mp.Qz = FeasibleSet::whole_space(3);
  mp.radius_hint = 4.0;
  mp.f_grad = [q](const Vec& x) { return q.gradient(x); };
  mp.L_f = q.L();
  expect_pass("moreau", validate_min_model(*make_inexact_linearization_model(mp, 1e-7), eu,
                                           box3, 1000, 48));

  HolderProblem hp = norm_problem(Vec::Zero(3));
  expect_pass("universal",
              validate_min_model(*make_universal_model(
                                     hp, [](int, double, double) { return 1e-2; }),
                                 eu, box3, 1000, 49));

  expect_pass("vi-lipschitz",
              validate_vi_model(*make_vi_operator_model(
                                    [q](const Vec& x) { return q.gradient(x); }, q.L()),
                                eu, box3, 1000, 50));

  expect_pass("vi-holder",
              validate_vi_model(*make_vi_operator_model_holder(hp.subgrad, 0.0, 2.0, 1e-2),
                                eu, box3, 1000, 51));

  Mat A(2, 3);
  A << 0.5, -0.3, 0.2, -0.1, 0.4, -0.6;
  auto spec = make_matrix_game_spec(A);
  expect_pass("saddle-vi", validate_vi_model(*make_composite_saddle_vi_model(spec),
                                             ProxSetup::entropy_product(2, 3),
                                             FeasibleSet::product_of_simplices(2, 3), 1000,
                                             52));

  // Holder interpolation inequality at delta in {1e-1, 1e-3}
  for (double delta : {1e-1, 1e-3}) {
    double Ld = hp.holder_L(delta);
    Rng rr(53);
    for (int t = 0; t < 1000; ++t) {
      Vec x = box3.sample(rr), y = box3.sample(rr), z = box3.sample(rr);
      double lhs = (hp.subgrad(z) - hp.subgrad(y)).dot(z - x);
      double rhs = 0.5 * Ld * (z - x).squaredNorm() + 0.5 * Ld * (z - y).squaredNorm() + delta;
      if (lhs > rhs + 1e-8) {
        r.pass = false;
        detail << "holder-interpolation violated; ";
        break;
      }
    }
  }
  r.detail = r.pass ? "all zoo constructors validate at declared constants" : detail.str();
  return r;
}

CriterionResult c9_prox_sinkhorn() {
  CriterionResult r{"C9 prox-sinkhorn", true, "", 0};
  Rng rng(1009);
  double worst_dev = 0;
  for (int i = 0; i < 50; ++i) {
    int n = 2 + i % 5;
    auto inst = random_ot_instance(n, 1 << 12, rng);
    auto res = proximal_sinkhorn(inst, inst.C.maxCoeff(), 2e-4);
    double opt = exact_ot_oracle(inst, 1 << 12);
    double dev = std::abs(res.final_cost - opt);
    worst_dev = std::max(worst_dev, dev);
    if (dev > 1e-3) r.pass = false;
    for (size_t k = 1; k < res.costs.size(); ++k)
      if (res.costs[k] > res.costs[k - 1] + 50.0 * res.residuals[k] + 1e-9) r.pass = false;
  }
  // Figure-1-style comparison table (recorded, not numerically asserted)
  auto inst = random_ot_instance(3, 1 << 10, rng);
  save_ot_instance(inst, "/tmp/imopt_selftest_ot.csv");
  std::ostringstream out, err;
  double mc = inst.C.maxCoeff();
  int rc = cli_compare_sinkhorn("/tmp/imopt_selftest_ot.csv", 1e-3,
                                {mc, mc / 4.0, mc / 16.0}, "/tmp/imopt_selftest_cmp.csv", out,
                                err);
  if (rc != 0) r.pass = false;
  r.detail = fmt("worst |cost - oracle| %.2e over 50 instances; compare-table rc %.0f",
                 worst_dev, double(rc));
  return r;
}

CriterionResult c10_catalyst_demo() {
  CriterionResult r{"C10 catalyst-demo", true, "", 0};
  Rng rng(1010);
  auto q = QuadraticProblem::random(8, 0.01, 1.0, rng);
  const double mu_f = q.mu(), L_f = q.L();
  Vec xs = q.minimizer();
  Vec x0 = xs + rng.uniform_vector(8, -0.5, 0.5);
  double R2 = 0.5 * (x0 - xs).squaredNorm() * 1.001 + 1e-12;
  double eps = 1e-6;

  // Moreau-envelope model with L = L_f, inner gradient-method solves
  MoreauProblem mp;
  mp.f = [q](const Vec& x) { return q.value(x); };
  mp.L = L_f;
  mp.Qz = FeasibleSet::whole_space(8);
  mp.radius_hint = 2.0 * std::sqrt(2.0 * R2);
  mp.f_grad = [q](const Vec& x) { return q.gradient(x); };
  mp.L_f = L_f;
  auto moreau = make_inexact_linearization_model(mp, 1e-10);
  double mu_env = mu_f * L_f / (mu_f + L_f);  // envelope strong convexity
  auto run = fgm_restart_solve(*moreau, StrongConvexityTag::left_relative(mu_env),
                               ProxSetup::euclidean(), FeasibleSet::whole_space(8), x0, R2,
                               eps * mu_env / L_f, {});
  double gap = q.value(run.x_last) - q.min_value();
  long catalyst_evals = inexact_model_inner_evaluations(*moreau);

  auto direct = fgm_restart_solve(*make_smooth_model(q),
                                  StrongConvexityTag::left_relative(mu_f),
                                  ProxSetup::euclidean(), FeasibleSet::whole_space(8), x0, R2,
                                  eps, {});
  long direct_evals = direct.total_iterations;  // one gradient per iteration
  double ratio = double(catalyst_evals) / std::max(1.0, double(direct_evals));
  if (gap > eps) r.pass = false;
  r.detail = fmt("gap %.1e; inner grads %.0f vs direct %.0f", gap, double(catalyst_evals),
                 double(direct_evals)) +
             fmt(" (ratio %.1f, reported not asserted)", ratio);
  return r;
}

CriterionResult c11_frank_wolfe() {
  CriterionResult r{"C11 frank-wolfe", true, "", 0};
  Rng rng(1011);
  auto q = QuadraticProblem::random(3, 0.3, 1.0, rng);
  auto model = make_smooth_model(q);
  auto simplex = FeasibleSet::simplex(3);
  FGMConfig cfg;
  cfg.R_Q = 1.0;
  cfg.max_iter = 200;
  Vec x0 = Vec::Constant(3, 1.0 / 3.0);
  auto run = fw_solve(*model, simplex, x0, 1e-4, cfg);

  double worst = 0;
  Vec u = x0, x = x0;
  double A = 0;
  for (int k = 0; k < run.n_iters(); ++k) {
    double L = run.iters[k].L;
    double alpha = (1.0 + std::sqrt(1.0 + 4.0 * L * A)) / (2.0 * L);
    double A_next = A + alpha;
    Vec y = (alpha * u + A * x) / A_next;
    Vec v = simplex.lmo(q.gradient(y));
    Vec x_next = (alpha * v + A * x) / A_next;
    worst = std::max(worst, (x_next - run.x_seq[k]).norm());
    if ((x_next - run.x_seq[k]).norm() > 1e-10) r.pass = false;
    if (std::abs(run.iters[k].delta_tilde - 2.0 * L * (*cfg.R_Q) * (*cfg.R_Q)) > 1e-12)
      r.pass = false;
    u = v;
    x = x_next;
    A = A_next;
  }
  r.detail = fmt("max trajectory deviation %.1e over %.0f iterations", worst,
                 double(run.n_iters()));
  return r;
}

CriterionResult x1_csv_roundtrip() {
  // bench invariant: every emitted certificate column dominates the true gap
  // when the optimum is known, re-checked from the file
  CriterionResult r{"X1 csv-certificate-roundtrip", true, "", 0};
  Rng rng(1100);
  auto q = QuadraticProblem::random(6, 0.05, 1.0, rng);
  auto model = make_smooth_model(q);
  Vec x0 = rng.uniform_vector(6, -1, 1);
  double R2 = 0.5 * (x0 - q.minimizer()).squaredNorm() * 1.0001 + 1e-12;
  GMConfig cfg;
  cfg.max_iter = 60;
  auto run = gm_solve(*model, ProxSetup::euclidean(), FeasibleSet::whole_space(6), x0, R2,
                      cfg);
  std::stringstream csv;
  write_trace_csv(csv, run, R2, false);
  std::string line;
  std::getline(csv, line);  // schema comment
  if (line != "# imopt-trace v1") r.pass = false;
  std::getline(csv, line);  // header
  int rows = 0;
  double worst = -1e300;
  while (std::getline(csv, line)) {
    std::stringstream ls(line);
    std::string tok;
    std::vector<double> cols;
    while (std::getline(ls, tok, ',')) cols.push_back(std::stod(tok));
    if (cols.size() != 8) {
      r.pass = false;
      break;
    }
    int N = static_cast<int>(cols[0]) + 1;
    double cert = cols[7];
    double gap = q.value(gm_xbar_prefix(run, N)) - q.min_value();
    worst = std::max(worst, gap - cert);
    if (gap > cert + 1e-9) r.pass = false;
    ++rows;
  }
  if (rows != run.n_iters()) r.pass = false;
  r.detail = fmt("%.0f rows re-checked, worst gap-cert %.2e", double(rows), worst);
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(std::ostream& log) {
  using clock = std::chrono::steady_clock;
  struct Entry {
    CriterionResult (*fn)();
    double budget_seconds;
  };
  std::vector<Entry> criteria = {
      {c1_gm_certificate, 5},   {c2_fgm_certificate, 5},    {c3_rate_separation, 10},
      {c4_universal_fgm, 30},   {c5_mirror_prox_games, 10}, {c6_universal_mirror_prox, 30},
      {c7_restarts, 10},        {c8_model_validation, 10},  {c9_prox_sinkhorn, 60},
      {c10_catalyst_demo, 60},  {c11_frank_wolfe, 5},       {x1_csv_roundtrip, 5}};
  std::vector<CriterionResult> results;
  for (const auto& entry : criteria) {
    auto t0 = clock::now();
    CriterionResult res;
    try {
      res = entry.fn();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
      if (res.id.empty()) res.id = "criterion";
    }
    res.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (res.seconds > entry.budget_seconds) {
      res.pass = false;
      res.detail += fmt(" [over %g s budget]", entry.budget_seconds);
    }
    char line[512];
    std::snprintf(line, sizeof(line), "%s %s (%.2f s) %s\n", res.pass ? "[PASS]" : "[FAIL]",
                  res.id.c_str(), res.seconds, res.detail.c_str());
    log << line;
    results.push_back(std::move(res));
  }
  return results;
}

int cli_selftest(std::ostream& out, std::ostream& err) {
  auto results = run_acceptance_suite(out);
  int failures = 0;
  for (const auto& r : results)
    if (!r.pass) ++failures;
  if (failures) err << failures << " acceptance criterion(s) failed\n";
  out << (failures == 0 ? "acceptance suite: all criteria passed\n"
                        : "acceptance suite: FAILURES present\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace imopt
