#include <doctest.h>

#include <cmath>

#include "imopt/errors.hpp"
#include "imopt/gm.hpp"
#include "imopt/model_zoo.hpp"

using namespace imopt;

namespace {

std::shared_ptr<ModelOracle> shifted_quadratic(const Vec& a) {
  return make_smooth_model([a](const Vec& x) { return 0.5 * (x - a).squaredNorm(); },
                           [a](const Vec& x) { return Vec(x - a); }, 1.0);
}

}  // namespace

TEST_CASE("gm: hand-traced backtracking on a shifted quadratic") {
  Vec a = Vec::Constant(2, 1.0);
  auto model = shifted_quadratic(a);
  GMConfig cfg;
  cfg.L0 = 1.0;
  cfg.max_iter = 1;
  Vec x0 = Vec::Zero(2);
  auto run = gm_solve(*model, ProxSetup::euclidean(), FeasibleSet::whole_space(2), x0, 1.0,
                      cfg);
  // first trial L = 0.5 overshoots and fails the exit test; L = 1 lands at a
  REQUIRE(run.n_iters() == 1);
  CHECK(run.iters[0].attempts == 2);
  CHECK(run.iters[0].L == 1.0);
  CHECK((run.x_last - a).norm() < 1e-14);
}

TEST_CASE("gm: fixed point at the minimizer") {
  Vec a = Vec::Constant(3, -0.5);
  auto model = shifted_quadratic(a);
  GMConfig cfg;
  cfg.L0 = 2.0;
  cfg.max_iter = 10;
  auto run = gm_solve(*model, ProxSetup::euclidean(), FeasibleSet::whole_space(3), a, 0.1,
                      cfg);
  for (const auto& x : run.x_seq) CHECK((x - a).norm() < 1e-14);
  CHECK(run.certificate.bound_value() >= 0.0);
}

TEST_CASE("gm: averaged-iterate rate bound on a quadratic with L = 4") {
  Rng rng(21);
  auto q = QuadraticProblem::random(6, 0.4, 4.0, rng);
  auto model = make_smooth_model(q);
  Vec x0 = rng.uniform_vector(6, -1, 1);
  double R2 = 0.5 * (x0 - q.minimizer()).squaredNorm() + 1e-12;
  GMConfig cfg;
  cfg.L0 = 1.0;
  cfg.max_iter = 8;
  auto run = gm_solve(*model, ProxSetup::euclidean(), FeasibleSet::whole_space(6), x0, R2,
                      cfg);
  double gap = q.value(run.x_bar) - q.min_value();
  CHECK(gap <= 2.0 * 4.0 * R2 / 8.0 + 1e-9);  // 2 L R^2 / N
  CHECK(gap <= run.certificate.bound_value() + 1e-9);
}

TEST_CASE("gm: certificate components and A_N lower bound") {
  Rng rng(22);
  auto q = QuadraticProblem::random(4, 0.3, 1.0, rng);
  auto model = make_smooth_model(q);
  Vec x0 = rng.uniform_vector(4, -1, 1);
  double R2 = 0.5 * (x0 - q.minimizer()).squaredNorm() + 1e-12;

  GMConfig cfg;
  cfg.L0 = 1.0;
  cfg.max_iter = 10;
  auto run = gm_solve(*model, ProxSetup::euclidean(), FeasibleSet::whole_space(4), x0, R2,
                      cfg);
  auto cert = gm_certificate(run, R2, 1.0);  // asserts A_N >= N / (2 L)
  CHECK(cert.delta_term == 0.0);
  CHECK(cert.delta_tilde_term == 0.0);
  CHECK(cert.r2_over_A == doctest::Approx(R2 / run.A_N()));
  CHECK(run.A_N() >= 10.0 / 2.0 - 1e-12);

  // constant injected delta: the delta term telescopes to 2 delta
  cfg.budget.delta = 1e-3;
  auto run2 = gm_solve(*model, ProxSetup::euclidean(), FeasibleSet::whole_space(4), x0, R2,
                       cfg);
  auto cert2 = gm_certificate(run2, R2);
  CHECK(cert2.delta_term == doctest::Approx(2e-3).epsilon(1e-10));
}

TEST_CASE("gm: certificate validity across N, budgets, and models") {
  Rng rng(23);
  auto eu = ProxSetup::euclidean();
  auto space = FeasibleSet::whole_space(5);
  for (int rep = 0; rep < 3; ++rep) {
    auto q = QuadraticProblem::random(5, 0.2, 2.0, rng);
    auto model = make_smooth_model(q);
    Vec x0 = rng.uniform_vector(5, -1, 1);
    double R2 = 0.5 * (x0 - q.minimizer()).squaredNorm() + 1e-12;
    for (double delta : {0.0, 1e-3}) {
      GMConfig cfg;
      cfg.L0 = 0.25;
      cfg.max_iter = 50;
      cfg.budget.delta = delta;
      auto run = gm_solve(*model, eu, space, x0, R2, cfg);
      for (int N = 1; N <= run.n_iters(); ++N) {
        double gap = q.value(gm_xbar_prefix(run, N)) - q.min_value();
        CHECK(gap <= gm_certificate_prefix(run, N, R2).bound_value() + 1e-9);
      }
      // attempt accounting: <= 2N + log2(L_true / L0) + 1
      double bound = 2.0 * run.n_iters() + std::log2(q.L() / cfg.L0) + 1.0;
      CHECK(run.total_attempts <= bound + 1e-9);
      // alpha = 1/L exactly, A strictly increasing
      double prevA = 0;
      for (const auto& it : run.iters) {
        CHECK(it.alpha == 1.0 / it.L);
        CHECK(it.A > prevA);
        prevA = it.A;
      }
    }
  }
}

TEST_CASE("gm: non-adaptive run keeps a valid certificate") {
  Rng rng(29);
  auto q = QuadraticProblem::random(4, 0.3, 1.0, rng);
  auto model = make_smooth_model(q);
  Vec x0 = rng.uniform_vector(4, -1, 1);
  double R2 = 0.5 * (x0 - q.minimizer()).squaredNorm() + 1e-12;
  GMConfig cfg;
  cfg.L0 = q.L();  // fixed step 1/L
  cfg.adaptive = false;
  cfg.max_iter = 50;
  cfg.budget.delta = 1e-3;
  auto run = gm_solve(*model, ProxSetup::euclidean(), FeasibleSet::whole_space(4), x0, R2,
                      cfg);
  CHECK(run.total_attempts == 50);
  for (int N = 1; N <= run.n_iters(); ++N) {
    double gap = q.value(gm_xbar_prefix(run, N)) - q.min_value();
    CHECK(gap <= gm_certificate_prefix(run, N, R2).bound_value() + 1e-9);
  }
}

TEST_CASE("gm: per-iteration lemma at the known minimizer") {
  Rng rng(24);
  auto q = QuadraticProblem::random(4, 0.5, 3.0, rng);
  auto model = make_smooth_model(q);
  auto eu = ProxSetup::euclidean();
  auto box = FeasibleSet::box_uniform(4, -2, 2);
  Vec xs = box.project(q.minimizer());
  REQUIRE((xs - q.minimizer()).norm() < 1e-12);  // interior optimum
  Vec x0 = box.sample(rng);
  GMConfig cfg;
  cfg.L0 = 1.0;
  cfg.max_iter = 30;
  auto run = gm_solve(*model, eu, box, x0, 10.0, cfg);
  Vec prev = x0;
  for (int k = 0; k < run.n_iters(); ++k) {
    const auto& it = run.iters[k];
    const Vec& xk1 = run.x_seq[k];
    double lhs = it.alpha * (q.value(xk1) - q.value(xs));
    double rhs = eu.bregman(prev, xs) - eu.bregman(xk1, xs) +
                 it.alpha * it.delta_tilde + 2.0 * it.alpha * it.delta;
    CHECK(lhs <= rhs + 1e-10);
    prev = xk1;
  }
}

TEST_CASE("gm: genuinely inexact prox keeps the certificate valid") {
  Rng rng(25);
  auto q = QuadraticProblem::random(3, 0.4, 2.0, rng);
  Vec x0 = rng.uniform_vector(3, -0.5, 0.5);
  auto box = FeasibleSet::box_uniform(3, -2, 2);
  Vec xs = box.project(q.minimizer());
  REQUIRE((xs - q.minimizer()).norm() < 1e-12);
  double R2 = 0.5 * (x0 - xs).squaredNorm() + 1e-12;
  auto noisy = with_inexact_prox(make_smooth_model(q), 1e-3, 99);
  GMConfig cfg;
  cfg.L0 = 1.0;
  cfg.max_iter = 40;
  cfg.budget.delta_tilde = 1e-3;
  auto run = gm_solve(*noisy, ProxSetup::euclidean(), box, x0, R2, cfg);
  for (int N = 1; N <= run.n_iters(); ++N) {
    double gap = q.value(gm_xbar_prefix(run, N)) - q.value(xs);
    CHECK(gap <= gm_certificate_prefix(run, N, R2).bound_value() + 1e-9);
  }
  CHECK(gm_certificate(run, R2).delta_tilde_term == doctest::Approx(1e-3).epsilon(1e-9));
}

TEST_CASE("gm: line search diverges on a broken model") {
  // psi shifted by -1 misreports descent by a constant; no L closes the gap
  struct Liar final : ModelOracle {
    double f_value(const Vec& y) const override { return 0.5 * y.squaredNorm(); }
    double f_delta(const Vec& y) const override { return 0.5 * y.squaredNorm(); }
    double psi(const Vec& x, const Vec& y) const override { return y.dot(x - y) - 1.0; }
    Vec prox_step(const Vec& y, const Vec& z, double a, const ProxSetup&, const FeasibleSet& q,
                  double) const override {
      return q.project(z - a * y);
    }
    double declared_delta() const override { return 0.0; }
    double declared_L_hint() const override { return 1.0; }
  } liar;
  GMConfig cfg;
  cfg.L0 = 1.0;
  cfg.max_iter = 3;
  CHECK_THROWS_AS(gm_solve(liar, ProxSetup::euclidean(), FeasibleSet::whole_space(2),
                           Vec::Constant(2, 1.0), 1.0, cfg),
                  LineSearchDiverged);
}

TEST_CASE("gm strongly convex: one-step exact minimization when mu = L") {
  Vec a = Vec::Zero(2);
  auto model = shifted_quadratic(a);
  auto run = gm_strongly_convex_solve(*model, StrongConvexityTag::right_relative(1.0),
                                      ProxSetup::euclidean(), FeasibleSet::whole_space(2),
                                      Vec::Constant(2, 3.0), 1.0, 1, {});
  CHECK(run.x_last.norm() < 1e-14);
  CHECK(model->f_value(run.y_best) <= 1e-28);
}

TEST_CASE("gm strongly convex: geometric decay bound") {
  Rng rng(26);
  auto q = QuadraticProblem::random(4, 0.5, 1.0, rng);  // mu/L = 0.5
  auto model = make_smooth_model(q);
  Vec x0 = rng.uniform_vector(4, -1, 1);
  double V0 = 0.5 * (x0 - q.minimizer()).squaredNorm();
  int N = 20;
  auto run = gm_strongly_convex_solve(*model, StrongConvexityTag::right_relative(q.mu()),
                                      ProxSetup::euclidean(), FeasibleSet::whole_space(4), x0,
                                      q.L(), N, {});
  double gap = model->f_value(run.y_best) - q.min_value();
  CHECK(gap <= q.L() * V0 * std::exp(-0.5 * N) + 1e-12);
  CHECK_THROWS_AS(
      gm_strongly_convex_solve(*model, StrongConvexityTag::right_relative(2.0 * q.L()),
                               ProxSetup::euclidean(), FeasibleSet::whole_space(4), x0, q.L(),
                               N, {}),
      InvalidArgument);
}

TEST_CASE("gm strongly convex: inexactness plateau of the distance bound") {
  Rng rng(27);
  auto q = QuadraticProblem::random(3, 0.5, 1.0, rng);
  auto box = FeasibleSet::box_uniform(3, -3, 3);
  Vec xs = box.project(q.minimizer());
  REQUIRE((xs - q.minimizer()).norm() < 1e-12);
  auto noisy = with_inexact_prox(make_smooth_model(q), 1e-2, 31);
  Vec x0 = box.sample(rng);
  double V0 = 0.5 * (x0 - xs).squaredNorm();
  InexactnessBudget budget;
  budget.delta_tilde = 1e-2;
  int N = 60;
  auto run = gm_strongly_convex_solve(*noisy, StrongConvexityTag::right_relative(q.mu()),
                                      ProxSetup::euclidean(), box, x0, q.L(), N, budget);
  double VN = 0.5 * (run.x_last - xs).squaredNorm();
  double plateau = (budget.delta + budget.delta_tilde) / q.mu();
  CHECK(VN <= plateau + std::pow(1.0 - q.mu() / q.L(), N) * V0 + 1e-10);
}

TEST_CASE("gm restarts: iteration accounting and accuracy") {
  // L = 4, mu = 1, R^2 = 1, eps = 1/8: ceil(log2 8) * ceil(16) = 48
  Rng rng(28);
  auto q = QuadraticProblem::random(3, 1.0, 4.0, rng);
  auto model = make_smooth_model(q);
  Vec xs = q.minimizer();
  Vec x0 = xs + rng.uniform_vector(3, -0.3, 0.3).normalized() * std::sqrt(2.0 * 0.9);
  auto run = gm_restart_solve(*model, StrongConvexityTag::left_relative(1.0),
                              ProxSetup::euclidean(), FeasibleSet::whole_space(3), x0, 1.0,
                              1.0 / 8.0, 4.0, {});
  CHECK(run.stages == 3);
  CHECK(run.total_iterations == 48);
  // final V <= eps (+ zero inexactness terms)
  CHECK(0.5 * (run.x_bar - xs).squaredNorm() <= 1.0 / 8.0 + 1e-9);
  CHECK((run.x_bar - xs).squaredNorm() <= 2.0 * (1.0 / 8.0) + 1e-9);

  // eps >= R^2 clamps to a single stage
  auto run1 = gm_restart_solve(*model, StrongConvexityTag::left_relative(1.0),
                               ProxSetup::euclidean(), FeasibleSet::whole_space(3), x0, 1.0,
                               2.0, 4.0, {});
  CHECK(run1.stages == 1);
  CHECK_THROWS_AS(gm_restart_solve(*model, StrongConvexityTag::left_relative(1.0),
                                   ProxSetup::euclidean(), FeasibleSet::whole_space(3), x0,
                                   1.0, -1.0, 4.0, {}),
                  InvalidArgument);
}

TEST_CASE("gm with the proximal model is the Bregman proximal method") {
  // non-adaptive runs with psi(x,y) = f(x) - f(y) take exact proximal steps;
  // with entropy prox over the simplex this is the exponentiated-gradient
  // proximal scheme and converges to the linear program's vertex
  Vec c(3);
  c << 0.4, 0.1, 0.9;
  auto model = make_proximal_model_linear(c, 2.0);
  GMConfig cfg;
  cfg.L0 = 2.0;  // gamma: step alpha = 1/2
  cfg.adaptive = false;
  cfg.max_iter = 400;
  auto simplex = FeasibleSet::simplex(3);
  Vec x0 = Vec::Constant(3, 1.0 / 3.0);
  auto run = gm_solve(*model, ProxSetup::entropy(3), simplex, x0, std::log(3.0), cfg);
  CHECK(c.dot(run.x_last) - 0.1 <= 1e-6);
  CHECK(run.x_last[1] >= 1.0 - 1e-5);
  // proximal descent: f non-increasing along the iterates
  double prev = c.dot(x0);
  for (const auto& x : run.x_seq) {
    CHECK(c.dot(x) <= prev + 1e-12);
    prev = c.dot(x);
  }
  // the averaged-output certificate still bounds the gap
  double gap = c.dot(run.x_bar) - 0.1;
  CHECK(gap <= run.certificate.bound_value() + 1e-9);
}

TEST_CASE("gm: per-iteration delta schedule override") {
  Rng rng(30);
  auto q = QuadraticProblem::random(4, 0.3, 1.0, rng);
  auto model = make_smooth_model(q);
  Vec x0 = rng.uniform_vector(4, -1, 1);
  double R2 = 0.5 * (x0 - q.minimizer()).squaredNorm() + 1e-12;
  GMConfig cfg;
  cfg.max_iter = 40;
  cfg.budget.delta_schedule = [](int k, double, double) { return 1e-3 / (k + 1.0); };
  auto run = gm_solve(*model, ProxSetup::euclidean(), FeasibleSet::whole_space(4), x0, R2,
                      cfg);
  for (int k = 0; k < run.n_iters(); ++k)
    CHECK(run.iters[k].delta == doctest::Approx(1e-3 / (k + 1.0)));
  for (int N = 1; N <= run.n_iters(); ++N) {
    double gap = q.value(gm_xbar_prefix(run, N)) - q.min_value();
    CHECK(gap <= gm_certificate_prefix(run, N, R2).bound_value() + 1e-9);
    CHECK(run.x_seq[N - 1].allFinite());
  }
}
