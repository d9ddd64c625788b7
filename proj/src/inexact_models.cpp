#include <cmath>

#include "imopt/errors.hpp"
#include "imopt/model_zoo.hpp"

namespace imopt {

namespace {

// stationarity residual of a min problem over a bounded set:
// max over Q of <grad, x_tilde - v> for the supplied (sub)gradient.
double stationarity_residual(const FeasibleSet& set, const Vec& grad, const Vec& x_tilde) {
  return grad.dot(x_tilde) - set.support_min(grad);
}

struct Linearization {
  Vec y;
  Vec g_tilde;        // inexact gradient surrogate
  double f_delta = 0;
  double f_upper = 0;  // primal inner value; upper proxy of f(y)
  double used_delta = 0;
  bool valid = false;
};

// psi(x,y) = <g_tilde(y), x - y> with g_tilde from an inexact inner solve.
// Warm starts are confined to a single solver run (not thread safe).
class InexactLinearizationModel final : public ModelOracle {
 public:
  InexactLinearizationModel(InnerProblem inner, double delta_inner)
      : inner_(std::move(inner)), delta_inner_(delta_inner) {
    require(delta_inner >= 0, "inexact linearization: delta_inner >= 0");
    if (auto* mm = std::get_if<MinMinProblem>(&inner_)) {
      declared_delta_ = 6.0 * delta_inner;
      declared_L_ = 2.0 * mm->L;
      warm_ = mm->z0;
    } else if (auto* sm = std::get_if<SaddleMaxProblem>(&inner_)) {
      declared_delta_ = delta_inner;
      declared_L_ = 2.0 * sm->L_f;
      warm_ = sm->z0;
    } else {
      const auto& mp = std::get<MoreauProblem>(inner_);
      declared_delta_ = delta_inner;
      declared_L_ = mp.L;
    }
  }

  double f_value(const Vec& y) const override {
    // tight inner solve; trace/test use only
    return linearize_at(y, std::min(delta_inner_, 1e-11)).f_upper;
  }

  double f_delta(const Vec& y) const override { return linearized(y).f_delta; }

  double psi(const Vec& x, const Vec& y) const override {
    return linearized(y).g_tilde.dot(x - y);
  }

  Vec prox_step(const Vec& y, const Vec& z, double alpha, const ProxSetup& setup,
                const FeasibleSet& set, double /*delta_tilde*/) const override {
    return bregman_linear_prox(setup, set, z, alpha * linearized(y).g_tilde);
  }

  double declared_delta() const override { return declared_delta_; }
  double declared_L_hint() const override { return declared_L_; }
  double used_delta() const override { return last_used_delta_; }
  bool linear_psi() const override { return true; }
  Vec psi_gradient(const Vec& y) const override { return linearized(y).g_tilde; }

  long inner_evaluations() const { return inner_evals_; }

 private:
  // Small LRU keeps the linearization at one center stable across the
  // f_delta/psi/prox queries of a single solver iteration.
  const Linearization& linearized(const Vec& y) const {
    for (auto& e : cache_) {
      if (e.valid && e.y.size() == y.size() && e.y == y) {
        last_used_delta_ = e.used_delta;
        return e;
      }
    }
    cache_[2] = cache_[1];
    cache_[1] = cache_[0];
    cache_[0] = linearize_at(y, delta_inner_);
    last_used_delta_ = cache_[0].used_delta;
    return cache_[0];
  }

  Linearization linearize_at(const Vec& y, double tol) const;
  Linearization solve_min_min(const MinMinProblem& p, const Vec& y, double tol) const;
  Linearization solve_saddle(const SaddleMaxProblem& p, const Vec& y, double tol) const;
  Linearization solve_moreau(const MoreauProblem& p, const Vec& y, double tol) const;

  InnerProblem inner_;
  double delta_inner_;
  double declared_delta_ = 0;
  double declared_L_ = 1;
  mutable Linearization cache_[3];
  mutable double last_used_delta_ = 0;
  mutable Vec warm_;
  mutable long inner_evals_ = 0;
};

Linearization InexactLinearizationModel::linearize_at(const Vec& y, double tol) const {
  if (auto* mm = std::get_if<MinMinProblem>(&inner_)) return solve_min_min(*mm, y, tol);
  if (auto* sm = std::get_if<SaddleMaxProblem>(&inner_)) return solve_saddle(*sm, y, tol);
  return solve_moreau(std::get<MoreauProblem>(inner_), y, tol);
}

// f(x) = min_z F(z, x): (6 delta, 2L)-model with
// f_delta(y) = F(z_tilde, y) - 2 delta, psi = <grad_x F(z_tilde, y), x - y>.
Linearization InexactLinearizationModel::solve_min_min(const MinMinProblem& p, const Vec& y,
                                                       double tol) const {
  if (!p.Qz.is_bounded()) throw UnsupportedSet("min-min inner set must be bounded");
  Vec z = warm_.size() == p.Qz.dim() ? warm_ : p.Qz.project(p.z0);
  double resid = 0;
  const long cap = 200000;
  const double floor_tol = std::max(tol, 1e-13);
  for (long t = 0;; ++t) {
    Vec gz = p.grad_z(z, y);
    ++inner_evals_;
    resid = stationarity_residual(p.Qz, gz, z);
    if (resid <= floor_tol) break;
    if (t >= cap) throw InnerSolveFailure("min-min inner solve exceeded iteration cap");
    z = p.Qz.project(z - (1.0 / p.L) * gz);
  }
  warm_ = z;
  Linearization lin;
  lin.y = y;
  lin.g_tilde = p.grad_x(z, y);
  lin.f_upper = p.F(z, y);
  lin.f_delta = lin.f_upper - 2.0 * resid;
  lin.used_delta = 6.0 * resid;
  lin.valid = true;
  return lin;
}

// f(x) = max_z <x, b - A z> - phi(z): (delta, 2L)-model with
// f_delta(y) = <y, b - A z_tilde> - phi(z_tilde), psi = <b - A z_tilde, x - y>.
Linearization InexactLinearizationModel::solve_saddle(const SaddleMaxProblem& p, const Vec& y,
                                                      double tol) const {
  Vec z;
  double resid = 0;
  if (p.exact_argmax) {
    z = p.exact_argmax(y);
  } else {
    if (!p.Qz.is_bounded()) throw UnsupportedSet("saddle inner set must be bounded");
    z = warm_.size() == p.Qz.dim() ? warm_ : p.Qz.project(p.z0);
    const long cap = 200000;
    const double floor_tol = std::max(tol, 1e-13);
    Vec Aty = p.A.transpose() * y;
    for (long t = 0;; ++t) {
      Vec gz = -Aty - p.grad_phi(z);  // gradient of the concave inner objective
      ++inner_evals_;
      // residual of the max problem: max_v <gz, v - z>
      resid = stationarity_residual(p.Qz, -gz, z);
      if (resid <= floor_tol) break;
      if (t >= cap) throw InnerSolveFailure("saddle inner solve exceeded iteration cap");
      z = p.Qz.project(z + (1.0 / p.smoothness) * gz);
    }
    warm_ = z;
  }
  Linearization lin;
  lin.y = y;
  lin.g_tilde = p.b - p.A * z;
  lin.f_upper = y.dot(lin.g_tilde) - p.phi(z);
  lin.f_delta = lin.f_upper;
  lin.used_delta = resid;
  lin.valid = true;
  return lin;
}

// f_L(x) = min_z f(z) + (L/2)||z - x||^2: (delta, L)-model with
// psi = <L(y - z_tilde), x - y>, f_delta(y) = Lambda(y, z_tilde) - delta.
Linearization InexactLinearizationModel::solve_moreau(const MoreauProblem& p, const Vec& y,
                                                      double tol) const {
  Vec z;
  double used = 0;
  if (p.exact_prox) {
    z = p.exact_prox(y);
  } else {
    require(static_cast<bool>(p.f_grad) && p.L_f > 0,
            "moreau: need exact_prox or smooth gradient data");
    z = warm_.size() == y.size() ? warm_ : y;
    const long cap = 200000;
    const double step = 1.0 / (p.L_f + p.L);
    const double floor_tol = std::max(tol, 1e-13);
    for (long t = 0;; ++t) {
      Vec g = p.f_grad(z) + p.L * (z - y);
      ++inner_evals_;
      if (p.Qz.is_bounded()) {
        used = stationarity_residual(p.Qz, g, z);
      } else {
        // unconstrained: certify the model error via the gradient norm,
        // delta = ||g|| * 2 * radius_hint + ||g||^2 / (2L)
        double gn = g.norm();
        used = gn * 2.0 * p.radius_hint + gn * gn / (2.0 * p.L);
      }
      if (used <= floor_tol) break;
      if (t >= cap) throw InnerSolveFailure("moreau inner solve exceeded iteration cap");
      z = p.Qz.dim() == y.size() && p.Qz.is_bounded() ? p.Qz.project(z - step * g)
                                                      : Vec(z - step * g);
    }
    warm_ = z;
  }
  Linearization lin;
  lin.y = y;
  lin.g_tilde = p.L * (y - z);
  lin.f_upper = p.f(z) + 0.5 * p.L * (z - y).squaredNorm();
  lin.f_delta = lin.f_upper - used;
  lin.used_delta = used;
  lin.valid = true;
  return lin;
}

}  // namespace

std::shared_ptr<ModelOracle> make_inexact_linearization_model(InnerProblem inner,
                                                              double delta_inner) {
  return std::make_shared<InexactLinearizationModel>(std::move(inner), delta_inner);
}

long inexact_model_inner_evaluations(const ModelOracle& model) {
  auto* m = dynamic_cast<const InexactLinearizationModel*>(&model);
  return m ? m->inner_evaluations() : 0;
}

}  // namespace imopt
