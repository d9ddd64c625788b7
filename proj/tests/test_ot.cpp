#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "imopt/errors.hpp"
#include "imopt/sinkhorn.hpp"

using namespace imopt;

namespace {

OTInstance swap_instance() {
  OTInstance inst;
  inst.C.resize(2, 2);
  inst.C << 0, 1, 1, 0;
  inst.l = Vec::Constant(2, 0.5);
  inst.w = Vec::Constant(2, 0.5);
  return inst;
}

}  // namespace

TEST_CASE("sinkhorn: singleton instance") {
  OTInstance inst;
  inst.C.resize(1, 1);
  inst.C << 0.7;
  inst.l = Vec::Constant(1, 1.0);
  inst.w = Vec::Constant(1, 1.0);
  Mat prior = Mat::Constant(1, 1, 1.0);
  auto plan = sinkhorn(inst, 1.0, prior, 1e-12, 100);
  CHECK(plan.x(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(plan.cost(inst) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("sinkhorn: small gamma approaches the LP optimum") {
  auto inst = swap_instance();
  Mat prior = inst.l * inst.w.transpose();
  auto plan = sinkhorn(inst, 5e-3, prior, 1e-10, 100000);
  CHECK(plan.converged);
  CHECK(plan.cost(inst) <= 5e-2);
  CHECK(plan.x(0, 0) == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(plan.x(1, 1) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("sinkhorn: huge gamma returns the product prior") {
  auto inst = swap_instance();
  Mat prior = inst.l * inst.w.transpose();
  auto plan = sinkhorn(inst, 1e6, prior, 1e-12, 100000);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(plan.x(i, j) == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("sinkhorn: residual non-increasing across sweeps") {
  Rng rng(71);
  for (int rep = 0; rep < 10; ++rep) {
    auto inst = random_ot_instance(5, 1 << 12, rng);
    Mat prior = inst.l * inst.w.transpose();
    double gamma = rep % 2 == 0 ? 0.3 : 1e-3;  // plain and log-domain paths
    auto plan = sinkhorn(inst, gamma, prior, 1e-9, 20000);
    for (size_t t = 1; t < plan.residual_history.size(); ++t)
      CHECK(plan.residual_history[t] <= plan.residual_history[t - 1] + 1e-12);
  }
}

TEST_CASE("sinkhorn: sweep exhaustion flags the plan") {
  Rng rng(70);
  auto inst = random_ot_instance(4, 1 << 12, rng);
  Mat prior = inst.l * inst.w.transpose();
  auto plan = sinkhorn(inst, 1e-3, prior, 0.0, 2);  // unreachable tolerance
  CHECK_FALSE(plan.converged);
  CHECK(plan.marginal_residual > 0.0);
}

TEST_CASE("round_to_polytope") {
  auto inst = swap_instance();
  // already feasible: unchanged
  Mat feas = 0.5 * Mat::Identity(2, 2);
  auto r1 = round_to_polytope(feas, inst.l, inst.w);
  CHECK((r1.x - feas).cwiseAbs().maxCoeff() < 1e-15);

  // perturbed plan: output feasible, moved at most 2x the input residual
  Rng rng(72);
  for (int rep = 0; rep < 50; ++rep) {
    auto rand_inst = random_ot_instance(4, 1 << 12, rng);
    Mat base = rand_inst.l * rand_inst.w.transpose();
    Mat pert = base;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        pert(i, j) = std::max(0.0, pert(i, j) * (1.0 + 0.2 * (rng.uniform() - 0.5)));
    double rin = (pert.rowwise().sum() - rand_inst.l).lpNorm<1>() +
                 (pert.colwise().sum().transpose() - rand_inst.w).lpNorm<1>();
    auto rr = round_to_polytope(pert, rand_inst.l, rand_inst.w);
    CHECK(rr.residual_against(rand_inst.l, rand_inst.w) < 1e-12);
    CHECK((rr.x - pert).cwiseAbs().sum() <= 2.0 * rin + 1e-12);
  }

  // zero matrix: the rank-one correction returns l w'
  auto rz = round_to_polytope(Mat::Zero(2, 2), inst.l, inst.w);
  CHECK((rz.x - inst.l * inst.w.transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("exact_ot_oracle") {
  OTInstance one;
  one.C.resize(1, 1);
  one.C << 0.3;
  one.l = Vec::Constant(1, 1.0);
  one.w = Vec::Constant(1, 1.0);
  CHECK(exact_ot_oracle(one, 16) == doctest::Approx(0.3));

  auto inst = swap_instance();
  CHECK(exact_ot_oracle(inst, 2) == doctest::Approx(0.0));

  OTInstance forced = inst;
  forced.l << 1.0 / 3.0, 2.0 / 3.0;  // not representable over scale 2
  forced.w << 2.0 / 3.0, 1.0 / 3.0;
  CHECK_THROWS_AS(exact_ot_oracle(forced, 2), ScaleError);
  CHECK(exact_ot_oracle(forced, 3) == doctest::Approx(1.0 / 3.0));
  forced.l << 0.75, 0.25;
  forced.w << 0.25, 0.75;
  // move 0.5 mass off-diagonal at cost 1 each: 0.5
  CHECK(exact_ot_oracle(forced, 4) == doctest::Approx(0.5));
  CHECK_THROWS_AS(exact_ot_oracle(forced, 3), ScaleError);
}

TEST_CASE("exact oracle agrees with brute force on 2x2") {
  // closed form for 2x2: put t mass on (1,1), rest forced by marginals
  Rng rng(73);
  for (int rep = 0; rep < 30; ++rep) {
    auto inst = random_ot_instance(2, 1 << 10, rng);
    double lo = std::max(0.0, inst.l[0] + inst.w[0] - 1.0);
    double hi = std::min(inst.l[0], inst.w[0]);
    double best = 1e100;
    for (int i = 0; i <= 1000; ++i) {
      double t = lo + (hi - lo) * i / 1000.0;
      double c = inst.C(0, 0) * t + inst.C(0, 1) * (inst.l[0] - t) +
                 inst.C(1, 0) * (inst.w[0] - t) +
                 inst.C(1, 1) * (inst.w[1] - inst.l[0] + t);
      best = std::min(best, c);
    }
    CHECK(exact_ot_oracle(inst, 1 << 10) == doctest::Approx(best).epsilon(1e-5));
  }
}

TEST_CASE("proximal sinkhorn: zero-cost diagonal instance") {
  OTInstance inst;
  inst.C.resize(2, 2);
  inst.C << 0, 1, 1, 0;
  inst.l.resize(2);
  inst.l << 0.3, 0.7;
  inst.w = inst.l;
  auto res = proximal_sinkhorn(inst, 1.0, 1e-5);
  CHECK(res.final_cost <= 1e-5 + 1e-9);
  CHECK(res.plan.x(0, 0) == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(res.plan.x(1, 1) == doctest::Approx(0.7).epsilon(1e-3));
}

TEST_CASE("proximal sinkhorn: outer descent and oracle agreement") {
  Rng rng(74);
  for (int rep = 0; rep < 6; ++rep) {
    auto inst = random_ot_instance(2 + rep % 5, 1 << 12, rng);
    double gamma0 = inst.C.maxCoeff();
    auto res = proximal_sinkhorn(inst, gamma0, 1e-4);
    // proximal descent up to inner tolerance
    for (size_t k = 1; k < res.costs.size(); ++k)
      CHECK(res.costs[k] <= res.costs[k - 1] + 50.0 * res.residuals[k] + 1e-9);
    double opt = exact_ot_oracle(inst, 1 << 12);
    CHECK(std::abs(res.final_cost - opt) <= 1e-3);
    CHECK(res.final_cost >= opt - 1e-10);  // rounded plan is feasible
  }
}

TEST_CASE("proximal sinkhorn: proximal-point inequality with frozen gamma") {
  Rng rng(75);
  auto inst = random_ot_instance(4, 1 << 12, rng);
  ProxSinkhornOptions opts;
  opts.adaptive_gamma = false;
  opts.inner_tol_rule = [](int, double, double) { return 1e-11; };
  double gamma = 0.25 * inst.C.maxCoeff();
  auto res = proximal_sinkhorn(inst, gamma, 1e-5, opts);
  // <C, x_{k+1}> + gamma KL(x_{k+1} || x_k) <= <C, x_k> + inner-tolerance slack
  Mat prev = inst.l * inst.w.transpose();
  for (size_t k = 0; k < res.plan_seq.size(); ++k) {
    const Mat& next = res.plan_seq[k];
    double lhs = (inst.C.array() * next.array()).sum() + gamma * kl_matrix(next, prev);
    double fprev = (inst.C.array() * prev.array()).sum();
    CHECK(lhs <= fprev + 100.0 * res.residuals[k] + 1e-9);
    prev = next;
  }
}

TEST_CASE("proximal sinkhorn: outer cap raises MaxOuterExceeded") {
  Rng rng(79);
  auto inst = random_ot_instance(4, 1 << 12, rng);
  ProxSinkhornOptions opts;
  opts.max_outer = 1;
  opts.adaptive_gamma = false;
  CHECK_THROWS_AS(proximal_sinkhorn(inst, 8.0 * inst.C.maxCoeff(), 1e-8, opts),
                  MaxOuterExceeded);
}

TEST_CASE("proximal sinkhorn: adaptive gamma freezes after blow-up") {
  Rng rng(76);
  auto inst = random_ot_instance(4, 1 << 12, rng);
  auto res = proximal_sinkhorn(inst, 4.0 * inst.C.maxCoeff(), 1e-4);
  CHECK(res.gamma_frozen);
  CHECK(res.gamma_final < 4.0 * inst.C.maxCoeff());
  // gammas halve until the freeze, then stay constant
  bool frozen = false;
  for (size_t k = 1; k < res.gammas.size(); ++k) {
    if (res.gammas[k] == res.gammas[k - 1]) frozen = true;
    if (!frozen) CHECK(res.gammas[k] == doctest::Approx(res.gammas[k - 1] / 2.0));
    if (frozen) CHECK(res.gammas[k] == doctest::Approx(res.gamma_final));
  }
}

TEST_CASE("proximal sinkhorn doubling mode") {
  Rng rng(77);
  auto inst = random_ot_instance(3, 1 << 12, rng);
  auto res = proximal_sinkhorn_doubling(inst, inst.C.maxCoeff(), 1e-3, 4, 14);
  double opt = exact_ot_oracle(inst, 1 << 12);
  CHECK(std::abs(res.final_cost - opt) <= 5e-3);
}

TEST_CASE("ot instance file round trip") {
  Rng rng(78);
  auto inst = random_ot_instance(3, 1 << 12, rng);
  const char* path = "/tmp/imopt_test_ot.csv";
  save_ot_instance(inst, path);
  auto back = load_ot_instance(path);
  CHECK((back.C - inst.C).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.l - inst.l).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.w - inst.w).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path);
  CHECK_THROWS_AS(load_ot_instance("/nonexistent/imopt.csv"), ConfigError);
}
