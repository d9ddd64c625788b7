#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "imopt/model.hpp"

namespace imopt {

using Mat = Eigen::MatrixXd;

// Simple convex term appearing in composite models and prox subproblems.
struct SimpleTerm {
  enum class Kind { None, L1, Indicator, SqL2 };
  Kind kind = Kind::None;
  double lambda = 0.0;

  static SimpleTerm none() { return {}; }
  static SimpleTerm l1(double lambda);
  static SimpleTerm indicator() { return {Kind::Indicator, 0.0}; }
  static SimpleTerm sq_l2(double lambda);  // (lambda/2) ||x||_2^2

  double value(const Vec& x) const {
    if (kind == Kind::L1) return lambda * x.lpNorm<1>();
    if (kind == Kind::SqL2) return 0.5 * lambda * x.squaredNorm();
    return 0.0;
  }
  bool is_none() const { return kind == Kind::None; }
};

// argmin_{x in set} <g, x> + V[z](x)
// Euclidean: projected step; entropy: multiplicative-weights update on
// simplex-type sets.
Vec bregman_linear_prox(const ProxSetup& setup, const FeasibleSet& set, const Vec& z,
                        const Vec& g);

// argmin_{x in set} <g, x> + h(x) + V[z](x) for a SimpleTerm h.
// L1 requires the Euclidean setup over WholeSpace or Box (soft threshold +
// clamp); on simplex-type sets the L1 term is constant and drops out.
Vec bregman_composite_prox(const ProxSetup& setup, const FeasibleSet& set, const Vec& z,
                           const Vec& g, const SimpleTerm& h);

// min_{x in set} <c, x> + h(x) for a SimpleTerm h (best-response helper).
double simple_linmin(const FeasibleSet& set, const Vec& c, const SimpleTerm& h);

// ---------------------------------------------------------------------------
// problem types

struct QuadraticProblem {
  Mat A;
  Vec b;
  double c = 0.0;

  void check() const;  // symmetry to 1e-12, eigenvalues >= -1e-10
  double value(const Vec& x) const { return 0.5 * x.dot(A * x) - b.dot(x) + c; }
  Vec gradient(const Vec& x) const { return A * x - b; }
  double L() const;
  double mu() const;
  Vec minimizer() const;  // unconstrained
  double min_value() const;

  // random SPD instance with spectrum log-spaced in [mu, L]
  static QuadraticProblem random(int n, double mu, double L, Rng& rng);
};

struct CompositeProblem {
  std::function<double(const Vec&)> g_value;
  std::function<Vec(const Vec&)> g_grad;
  SimpleTerm h;

  double value(const Vec& x) const { return g_value(x) + h.value(x); }
};

struct SuperpositionProblem {
  // f(x) = max_k g_k(x); each g_k smooth with L_k-Lipschitz gradient.
  std::vector<std::function<double(const Vec&)>> g_value;
  std::vector<std::function<Vec(const Vec&)>> g_grad;
  std::vector<double> L;

  int m() const { return static_cast<int>(g_value.size()); }
  double value(const Vec& x) const;
  double L_total() const;
};

struct HolderProblem {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> subgrad;
  double nu = 1.0;
  double L_nu = 1.0;

  // L(delta) = L_nu [L_nu / (2 delta)]^{(1-nu)/(1+nu)}
  double holder_L(double delta) const;
};

// inner problems for the inexact-linearization models

struct MinMinProblem {
  // f(x) = min_{z in Qz} F(z, x); F jointly smooth with constant L.
  std::function<double(const Vec& z, const Vec& x)> F;
  std::function<Vec(const Vec& z, const Vec& x)> grad_z;
  std::function<Vec(const Vec& z, const Vec& x)> grad_x;
  FeasibleSet Qz = FeasibleSet::whole_space(1);
  double L = 1.0;
  Vec z0;
};

struct SaddleMaxProblem {
  // f(x) = max_{z in Qz} <x, b - A z> - phi(z); phi mu-strongly convex.
  // Augmented-Lagrangian duals fit this shape directly: replace phi(z) by
  // phi(z) + (mu/2)||A z - b||_2^2 (no separate constructor needed).
  Mat A;
  Vec b;
  std::function<double(const Vec&)> phi;
  std::function<Vec(const Vec&)> grad_phi;
  FeasibleSet Qz = FeasibleSet::whole_space(1);
  double L_f = 1.0;  // (1/mu) max_{||z||<=1} ||A z||_2^2
  double smoothness = 1.0;  // Lipschitz constant of grad_z of the inner objective
  Vec z0;
  std::function<Vec(const Vec& y)> exact_argmax;  // optional closed form
};

struct MoreauProblem {
  // f_L(x) = min_{z in Qz} f(z) + (L/2)||z - x||^2
  std::function<double(const Vec&)> f;
  double L = 1.0;
  FeasibleSet Qz = FeasibleSet::whole_space(1);
  double radius_hint = 1.0;  // bounds ||x - y|| over the working region
  // one of: closed-form prox, or smooth gradient + constant for inner descent
  std::function<Vec(const Vec& y)> exact_prox;
  std::function<Vec(const Vec&)> f_grad;
  double L_f = 0.0;
};

using InnerProblem = std::variant<MinMinProblem, SaddleMaxProblem, MoreauProblem>;

// ---------------------------------------------------------------------------
// model constructors

std::shared_ptr<ModelOracle> make_smooth_model(std::function<double(const Vec&)> value,
                                               std::function<Vec(const Vec&)> grad, double L);

std::shared_ptr<ModelOracle> make_smooth_model(const QuadraticProblem& p);

std::shared_ptr<ModelOracle> make_composite_model(CompositeProblem p, double L);

std::shared_ptr<ModelOracle> make_superposition_model(SuperpositionProblem p);

// prox subproblem min_{x} alpha f(x) + V[z](x) delegated to `inner`.
using ProxInnerSolver = std::function<Vec(const Vec& z, double alpha, const ProxSetup&,
                                          const FeasibleSet&, double delta_tilde)>;
std::shared_ptr<ModelOracle> make_proximal_model(std::function<double(const Vec&)> f,
                                                 double L_reg, ProxInnerSolver inner);
// canned variants used in tests and the OT pipeline
std::shared_ptr<ModelOracle> make_proximal_model_linear(Vec c, double L_reg);
std::shared_ptr<ModelOracle> make_proximal_model_l1(int n, double L_reg);

std::shared_ptr<ModelOracle> make_inexact_linearization_model(InnerProblem inner,
                                                              double delta_inner);

// gradient-call counter of an inexact-linearization model (0 for others)
long inexact_model_inner_evaluations(const ModelOracle& model);

std::shared_ptr<ModelOracle> make_universal_model(
    const HolderProblem& p, std::function<double(int, double, double)> delta_budget);

// VI models

std::shared_ptr<VIModelOracle> make_vi_operator_model(std::function<Vec(const Vec&)> g,
                                                      double L,
                                                      SimpleTerm h = SimpleTerm::none(),
                                                      std::optional<double> mu = {});

std::shared_ptr<VIModelOracle> make_vi_operator_model_holder(
    std::function<Vec(const Vec&)> g, double nu, double L_nu, double delta_ref,
    SimpleTerm h = SimpleTerm::none());

struct SaddleSpec {
  int n1 = 0, n2 = 0;
  std::function<double(const Vec& u, const Vec& v)> f_tilde;
  std::function<Vec(const Vec& u, const Vec& v)> grad_u;
  std::function<Vec(const Vec& u, const Vec& v)> grad_v;
  SimpleTerm h;    // composite term on u
  SimpleTerm phi;  // composite term on v
  FeasibleSet Q1 = FeasibleSet::simplex(1);
  FeasibleSet Q2 = FeasibleSet::simplex(1);
  double L = 1.0;  // operator constant w.r.t. the product norm
  // optional best responses; when absent the bilinear payoff is used
  std::function<double(const Vec& u_hat)> best_response_v;  // max_v f(u_hat, v)
  std::function<double(const Vec& v_hat)> best_response_u;  // min_u f(u, v_hat)
  Mat bilinear_A;  // set when f_tilde(u,v) = u' A v

  double f_full(const Vec& u, const Vec& v) const {
    return f_tilde(u, v) + h.value(u) - phi.value(v);
  }
};

SaddleSpec make_matrix_game_spec(const Mat& A);

std::shared_ptr<VIModelOracle> make_composite_saddle_vi_model(SaddleSpec spec);

// Wraps a model so that prox_step returns a genuinely perturbed point whose
// stationarity residual stays within delta_tilde (bounded sets, linear psi).
std::shared_ptr<ModelOracle> with_inexact_prox(std::shared_ptr<ModelOracle> base,
                                               double delta_tilde, std::uint64_t seed);

}  // namespace imopt
