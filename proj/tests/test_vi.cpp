#include <doctest.h>

#include <cmath>

#include "imopt/errors.hpp"
#include "imopt/mirror_prox.hpp"

using namespace imopt;

TEST_CASE("mirror prox: matching pennies with entropy setup") {
  Mat A(2, 2);
  A << 1, -1, -1, 1;
  auto spec = make_matrix_game_spec(A);
  double v_max = 2.0 * std::log(2.0);
  MirrorProxConfig cfg;
  cfg.eps = 1e-4;
  cfg.L0 = 1.0;
  cfg.max_iter = 100000;
  cfg.V_max = v_max;
  auto res = saddle_solve(spec, 1e-4, cfg);
  // equilibrium of the symmetric game is uniform for both players
  CHECK((res.u_hat - Vec::Constant(2, 0.5)).norm() < 1e-3);
  CHECK((res.v_hat - Vec::Constant(2, 0.5)).norm() < 1e-3);
  CHECK(res.gap <= 1e-4 + 1e-9);
  // duality gap of every prefix average obeys 2 L V_max / N + 2d + 2dt
  for (int N = 1; N <= res.run.n_iters(); ++N) {
    double gap = saddle_prefix_gap(spec, res.run, N);
    CHECK(gap <= 2.0 * spec.L * v_max / N + 1e-9);
  }
}

TEST_CASE("mirror prox: zero operator is a fixed point") {
  auto model = make_vi_operator_model([](const Vec& x) { return Vec(Vec::Zero(x.size())); },
                                      1.0);
  auto simplex = FeasibleSet::simplex(3);
  MirrorProxConfig cfg;
  cfg.eps = 1e-3;
  cfg.V_max = std::log(3.0);
  cfg.max_iter = 50;
  auto run = mirror_prox_solve(*model, ProxSetup::entropy(3), simplex, cfg);
  Vec z0 = Vec::Constant(3, 1.0 / 3.0);
  for (const auto& w : run.w_seq) CHECK((w - z0).norm() < 1e-14);
  CHECK((run.w_hat - z0).norm() < 1e-14);
}

TEST_CASE("mirror prox: mixed VI reduces to composite prox iterations") {
  // g = 0, h = ||.||_1 over a box: the weak solution minimizes h
  auto model = make_vi_operator_model([](const Vec& x) { return Vec(Vec::Zero(x.size())); },
                                      1.0, SimpleTerm::l1(1.0));
  auto box = FeasibleSet::box_uniform(2, -1, 1);
  MirrorProxConfig cfg;
  cfg.eps = 1e-6;
  cfg.V_max = 2.0;  // max 0.5||x - z0||^2 over the box, z0 = 0
  cfg.max_iter = 20000;
  auto run = mirror_prox_solve(*model, ProxSetup::euclidean(), box, cfg);
  CHECK(run.w_hat.lpNorm<1>() <= 1e-5);
  // certificate controls max_u psi(w_hat, u) = h(w_hat) - min h = h(w_hat)
  CHECK(run.w_hat.lpNorm<1>() <= run.certificate + 1e-12);
}

TEST_CASE("mirror prox: per-iteration inequality at the solution") {
  Rng rng(61);
  Vec a(2);
  a << 0.2, -0.3;
  auto model = make_vi_operator_model([a](const Vec& x) { return Vec(x - a); }, 1.0,
                                      SimpleTerm::none(), 1.0);
  auto ball = FeasibleSet::ball(Vec::Zero(2), 1.0);
  auto eu = ProxSetup::euclidean();
  MirrorProxConfig cfg;
  cfg.eps = 1e-5;
  cfg.V_max = 0.5 * 1.0;
  cfg.max_iter = 100000;
  auto run = mirror_prox_solve(*model, eu, ball, cfg);
  Vec xs = a;  // interior solution
  for (int k = 0; k < run.n_iters(); ++k) {
    double L = run.iters[k].L;
    double lhs = -model->psi(xs, run.w_seq[k]);
    double rhs = L * eu.bregman(run.z_seq[k], xs) - L * eu.bregman(run.z_seq[k + 1], xs) +
                 cfg.delta + 2.0 * cfg.delta_tilde;
    CHECK(lhs <= rhs + 1e-10);
  }
  CHECK((run.w_hat - a).norm() < 1e-2);
  // trial accounting
  CHECK(run.total_attempts <= 4.0 * run.n_iters() + std::log2(1.0 / cfg.L0) + 1.0 + 1e-9);
  CHECK(run.subproblem_solves == 2 * run.total_attempts);
}

TEST_CASE("mirror prox: invalid V_max") {
  auto model = make_vi_operator_model([](const Vec& x) { return x; }, 1.0);
  MirrorProxConfig cfg;
  cfg.V_max = 0.0;
  CHECK_THROWS_AS(mirror_prox_solve(*model, ProxSetup::euclidean(),
                                    FeasibleSet::ball(Vec::Zero(2), 1.0), cfg),
                  InvalidArgument);
}

TEST_CASE("mirror prox universal: iteration scaling in eps") {
  Rng rng(62);
  Vec a = 0.2 * rng.uniform_vector(2, -1, 1);
  auto ball = FeasibleSet::ball(Vec::Zero(2), 1.0);
  // nu = 1: smooth monotone operator, iterations ~ 1/eps
  auto g1 = [a](const Vec& x) { return Vec(x - a); };
  auto count = [&](double nu, double L_nu, auto g, double eps) {
    auto run = mirror_prox_universal_solve(g, nu, L_nu, ProxSetup::euclidean(), ball, eps,
                                           0.5, 30000000, 0.5);
    REQUIRE(run.stopped_by == "s_target");
    return static_cast<double>(run.n_iters());
  };
  double r1 = count(1.0, 1.0, g1, 1e-2) / count(1.0, 1.0, g1, 1e-1);
  CHECK(r1 >= 10.0 / 4.0);
  CHECK(r1 <= 10.0 * 4.0);

  // nu = 0: bounded-variation operator (subgradient field of ||x - a||)
  auto g0 = [a](const Vec& x) {
    double n = (x - a).norm();
    return n < 1e-14 ? Vec(Vec::Zero(x.size())) : Vec((x - a) / n);
  };
  double r0 = count(0.0, 2.0, g0, 1e-2) / count(0.0, 2.0, g0, 1e-1);
  CHECK(r0 >= 100.0 / 4.0);
  CHECK(r0 <= 100.0 * 4.0);

  // large eps satisfies the S-criterion after a single iteration
  auto one = mirror_prox_universal_solve(g1, 1.0, 1.0, ProxSetup::euclidean(), ball, 100.0,
                                         0.5, 100, 0.5);
  CHECK(one.n_iters() == 1);
  CHECK(one.predicted_iteration_bound >= 1.0);
}

TEST_CASE("restarted mirror prox: strongly monotone affine operator") {
  Rng rng(63);
  Vec a(3);
  a << 0.2, -0.1, 0.3;
  auto model = make_vi_operator_model([a](const Vec& x) { return Vec(x - a); }, 1.0,
                                      SimpleTerm::none(), 1.0);
  auto ball = FeasibleSet::ball(Vec::Zero(3), 1.0);
  auto eu = ProxSetup::euclidean();
  double R0_sq = 1.0, eps = 1e-6;
  auto run = mirror_prox_restart_solve(*model, eu, ball, Vec::Zero(3), R0_sq, eps);
  CHECK((run.x_final - a).squaredNorm() <= eps + 1e-12);
  // stage radius recursion R_p^2 = R0^2 2^{-p} + (1 - 2^{-(p-1)}) eps / 2
  for (size_t p = 0; p < run.stage_radii_sq.size(); ++p) {
    double expect = p == 0 ? R0_sq
                           : R0_sq * std::pow(2.0, -(double)p) +
                                 (1.0 - std::pow(2.0, -(double)(p - 1))) * eps / 2.0;
    CHECK(run.stage_radii_sq[p] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(run.stage_radii_sq[p] <= R0_sq * std::pow(2.0, -(double)p) + eps / 2.0 + 1e-15);
  }
  // total inner iterations within the Omega-based bound
  double bound = std::ceil((2.0 * 1.0 * *eu.omega() / 1.0) * std::log2(2.0 * R0_sq / eps));
  CHECK(static_cast<double>(run.total_inner_iterations) <= bound);

  // eps >= 2 R0^2: zero stages
  auto zero = mirror_prox_restart_solve(*model, eu, ball, Vec::Zero(3), R0_sq, 2.5 * R0_sq);
  CHECK(zero.stages == 0);
  CHECK((zero.x_final - Vec::Zero(3)).norm() == 0.0);

  auto nomu = make_vi_operator_model([a](const Vec& x) { return Vec(x - a); }, 1.0);
  CHECK_THROWS_AS(mirror_prox_restart_solve(*nomu, eu, ball, Vec::Zero(3), R0_sq, eps),
                  InvalidArgument);
}

TEST_CASE("saddle: degenerate game with a singleton side") {
  // one player fixed: the gap equals the other side's linear residual
  Mat A(1, 3);
  A << 0.3, -0.2, 0.5;
  auto spec = make_matrix_game_spec(A);
  MirrorProxConfig cfg;
  cfg.eps = 1e-5;
  cfg.max_iter = 200000;
  auto res = saddle_solve(spec, 1e-5, cfg);
  CHECK(res.u_hat[0] == doctest::Approx(1.0));
  // value = max_j A_{1j} = 0.5; gap = 0.5 - min over u of (A v_hat) = residual of v_hat
  CHECK(res.gap == doctest::Approx(0.5 - (A * res.v_hat)(0)).epsilon(1e-12));
  CHECK(res.gap <= 1e-5 + 1e-9);
}

TEST_CASE("saddle: bilinear with l1 composite over box x simplex") {
  Mat A(2, 2);
  A << 0.8, -0.4, -0.3, 0.6;
  SaddleSpec spec;
  spec.n1 = 2;
  spec.n2 = 2;
  Mat Ac = A;
  spec.f_tilde = [Ac](const Vec& u, const Vec& v) { return u.dot(Ac * v); };
  spec.grad_u = [Ac](const Vec&, const Vec& v) { return Vec(Ac * v); };
  spec.grad_v = [Ac](const Vec& u, const Vec&) { return Vec(Ac.transpose() * u); };
  spec.h = SimpleTerm::l1(0.2);
  spec.phi = SimpleTerm::none();
  spec.Q1 = FeasibleSet::box_uniform(2, -1, 1);
  spec.Q2 = FeasibleSet::simplex(2);
  spec.bilinear_A = A;
  // operator norm for the euclidean product setup
  spec.L = std::sqrt(2.0) * A.cwiseAbs().maxCoeff() * 2.0;

  MirrorProxConfig cfg;
  cfg.eps = 1e-4;
  cfg.max_iter = 400000;
  double d1 = spec.Q1.diameter(), d2 = spec.Q2.diameter();
  cfg.V_max = 0.5 * (d1 * d1 + d2 * d2);
  auto res = saddle_solve(spec, 1e-4, cfg);
  CHECK(res.gap <= 1e-4 + 1e-9);
  for (int N = 1; N <= res.run.n_iters(); N += std::max(1, res.run.n_iters() / 50)) {
    double gap = saddle_prefix_gap(spec, res.run, N);
    CHECK(gap <= 2.0 * spec.L * cfg.V_max / N + 1e-9);  // Eq.-(37)-style bound
  }
}

TEST_CASE("saddle gap oracle unavailable for non-bilinear payoffs") {
  SaddleSpec spec;
  spec.n1 = 2;
  spec.n2 = 2;
  spec.f_tilde = [](const Vec& u, const Vec& v) { return u.squaredNorm() - v.squaredNorm(); };
  spec.grad_u = [](const Vec& u, const Vec&) { return Vec(2.0 * u); };
  spec.grad_v = [](const Vec&, const Vec& v) { return Vec(-2.0 * v); };
  spec.Q1 = FeasibleSet::simplex(2);
  spec.Q2 = FeasibleSet::simplex(2);
  spec.L = 2.0;
  CHECK_THROWS_AS(saddle_gap(spec, Vec::Constant(2, 0.5), Vec::Constant(2, 0.5)),
                  GapOracleUnavailable);
}
