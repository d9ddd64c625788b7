#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "imopt/errors.hpp"
#include "imopt/prox.hpp"

namespace imopt {

// Minimization model: a convex-in-x surrogate psi_delta(x, y) with
// psi_delta(x, x) = 0 such that
//   0 <= f(x) - f_delta(y) - psi_delta(x, y) <= L V[y](x) + delta
// for all x, y in Q, with f_delta(y) in [f(y) - delta, f(y)].
class ModelOracle {
 public:
  virtual ~ModelOracle() = default;

  // Exact f when available, else an upper proxy (traces/tests only).
  virtual double f_value(const Vec& y) const = 0;
  virtual double f_delta(const Vec& y) const = 0;
  virtual double psi(const Vec& x, const Vec& y) const = 0;

  // Inexact argmin of min_{x in set} alpha * psi(x, y) + V[z](x): some
  // subgradient h of the objective at the output satisfies
  // <h, x - out> >= -delta_tilde for all feasible x.
  virtual Vec prox_step(const Vec& y, const Vec& z, double alpha,
                        const ProxSetup& setup, const FeasibleSet& set,
                        double delta_tilde) const = 0;

  virtual double declared_delta() const = 0;
  virtual double declared_L_hint() const = 0;

  // Model error actually incurred by the most recent query at a given
  // linearization center (inner solvers may do better than budget).
  virtual double used_delta() const { return declared_delta(); }

  // True when psi(x, y) = <g(y), x - y>; enables Frank-Wolfe mode.
  virtual bool linear_psi() const { return false; }
  virtual Vec psi_gradient(const Vec& /*y*/) const {
    throw UnsupportedCombination("model does not expose a linear psi gradient");
  }
};

// Abstract VI model: convex in x, psi(x,x)=0, delta-monotone
//   psi(x,y) + psi(y,x) <= delta,
// and generalized relative smoothness
//   psi(x,y) <= psi(x,z) + psi(z,y) + L V[z](x) + L V[y](z) + delta.
class VIModelOracle {
 public:
  virtual ~VIModelOracle() = default;

  virtual double psi(const Vec& x, const Vec& y) const = 0;

  // Inexact argmin (same stationarity contract as ModelOracle::prox_step)
  // of min_{x in set} psi(x, y) + L * V[z](x).
  virtual Vec prox_step(const Vec& y, const Vec& z, double L,
                        const ProxSetup& setup, const FeasibleSet& set,
                        double delta_tilde) const = 0;

  virtual double declared_delta() const = 0;
  virtual double declared_L_hint() const = 0;

  // Strong monotonicity modulus when psi(x,y)+psi(y,x) <= -mu ||x-y||^2.
  virtual std::optional<double> mu() const { return std::nullopt; }
};

// Strong-convexity flavor of a model relative to the divergence.
struct StrongConvexityTag {
  enum class Kind { None, RightRelative, LeftRelative, NormStrong };
  Kind kind = Kind::None;
  double mu = 0.0;

  static StrongConvexityTag none() { return {}; }
  static StrongConvexityTag right_relative(double mu);
  static StrongConvexityTag left_relative(double mu);
  static StrongConvexityTag norm_strong(double mu);
};

struct ValidationReport {
  int samples = 0;
  double max_lower_violation = 0;       // f(x) - f_delta(y) - psi below 0
  double max_upper_violation = 0;       // above L V[y](x) + delta
  double max_psi_xx = 0;                // |psi(x, x)|
  double max_convexity_violation = 0;   // midpoint inequality
  double max_fdelta_violation = 0;      // f_delta outside [f - delta, f]
  double max_monotonicity_violation = 0;  // VI (iii)
  double max_smoothness_violation = 0;    // VI (iv)
  bool passed = false;
  std::string summary() const;
};

// Samples (x, y) pairs in the set and checks the two-sided model sandwich,
// psi(x,x)=0, convexity in x, and the f_delta bracket against the model's
// declared (delta, L). Deterministic given the seed.
ValidationReport validate_min_model(const ModelOracle& model, const ProxSetup& setup,
                                    const FeasibleSet& set, int n_samples,
                                    std::uint64_t rng_seed);

// Checks the four VI-model properties on sampled pairs/triples.
ValidationReport validate_vi_model(const VIModelOracle& model, const ProxSetup& setup,
                                   const FeasibleSet& set, int n_samples,
                                   std::uint64_t rng_seed);

// Numeric check that a (delta/5, L) minimization model is a
// (delta, L) VI model: wraps the min model and validates the VI properties with
// budget 5 * declared_delta.
bool check_min_model_is_vi_model(const ModelOracle& model, const ProxSetup& setup,
                                 const FeasibleSet& set, int n_samples,
                                 std::uint64_t rng_seed);

// Adapter used by check_min_model_is_vi_model and the saddle wrapper.
std::shared_ptr<VIModelOracle> vi_view_of_min_model(std::shared_ptr<const ModelOracle> model,
                                                    double delta_override);

}  // namespace imopt
