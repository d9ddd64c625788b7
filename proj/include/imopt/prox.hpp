#pragma once

#include <functional>
#include <optional>

#include "imopt/errors.hpp"
#include "imopt/sets.hpp"

namespace imopt {

// Distance-generating function d, its gradient, and the Bregman divergence
// V[y](x) = d(x) - d(y) - <grad d(y), x - y>.
//
// Euclidean: d = (1/2)||x||_2^2, l2 norm, 1-strongly convex, Omega = 1.
// Entropy:   d = sum x_i ln x_i + ln n (shifted so min over the simplex is 0),
//            l1 norm, 1-strongly convex on the simplex (Pinsker),
//            Omega = 2 ln n.
class ProxSetup {
 public:
  enum class Kind { Euclidean, Entropy };
  enum class Norm { L2, L1 };

  static ProxSetup euclidean();
  static ProxSetup entropy(int n);
  static ProxSetup entropy_product(int n1, int n2);

  // d_p(x) = d((x - c)/R), the stage prox function of restarted Mirror Prox.
  // Euclidean only; V is scaled by 1/R^2 and the norm by 1/R.
  ProxSetup recentered(const Vec& c, double radius) const;

  double d_value(const Vec& x) const;
  Vec d_grad(const Vec& x) const;
  double bregman(const Vec& y, const Vec& x) const;

  double norm(const Vec& x) const;
  double dual_norm(const Vec& g) const;

  // argmin_{x in Q} d(x)
  Vec prox_center(const FeasibleSet& set) const;

  Kind kind() const { return kind_; }
  Norm norm_kind() const { return norm_kind_; }
  bool one_strongly_convex() const { return one_strongly_convex_; }
  std::optional<double> omega() const { return omega_; }
  double scale() const { return scale_; }

  // Entropy coordinates are clamped to >= kEntropyFloor before logs.
  static constexpr double kEntropyFloor = 1e-16;

 private:
  ProxSetup() = default;
  Kind kind_ = Kind::Euclidean;
  Norm norm_kind_ = Norm::L2;
  bool one_strongly_convex_ = true;
  std::optional<double> omega_;
  double shift_ = 0.0;      // additive constant in d (entropy)
  Vec center_;              // recentered Euclidean
  double scale_ = 1.0;      // R in d((x - c)/R); V scales by 1/R^2
};

double bregman(const ProxSetup& setup, const Vec& y, const Vec& x);

// Error budgets of a solver run: model error delta, subproblem error
// delta_tilde (stationarity-residual sense), and an optional per-iteration schedule
// delta_k(k, alpha_{k+1}, A_{k+1}) overriding the constant.
struct InexactnessBudget {
  double delta = 0.0;
  double delta_tilde = 0.0;
  std::function<double(int, double, double)> delta_schedule;

  double delta_for(int k, double alpha, double A) const {
    double d = delta_schedule ? delta_schedule(k, alpha, A) : delta;
    if (d < 0) throw InvalidArgument("delta schedule produced a negative budget");
    return d;
  }
  void check() const {
    require(delta >= 0 && delta_tilde >= 0, "budgets must be nonnegative");
  }
};

// Translates a functional accuracy eps_tilde on the auxiliary problem into
// the stationarity accuracy delta_tilde of the inexact-argmin contract:
//   delta_tilde <= (L R + ||grad Psi(x*)||_*) sqrt(2 eps_tilde / mu),
// improved to R sqrt(2 L eps_tilde) when grad Psi(x*) = 0.
double accuracy_translate(double eps_tilde, double mu, double L, double R,
                          double grad_norm_at_opt, bool grad_zero_at_opt);

// Test-time oracle for the inexact-argmin contract: with h = subgrad(x_tilde), checks
// min_{x in Q} <h, x - x_tilde> >= -delta_tilde - 1e-12 via the extreme
// points (polytopes) or the closed-form minimizer (ball).
bool verify_inexact_stationarity(const std::function<Vec(const Vec&)>& subgrad,
                                 const Vec& x_tilde, const FeasibleSet& set,
                                 double delta_tilde);

}  // namespace imopt
