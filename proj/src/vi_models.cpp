#include <cmath>

#include "imopt/errors.hpp"
#include "imopt/model_zoo.hpp"

namespace imopt {

namespace {

// psi(x,y) = <g(y), x - y> + h(x) - h(y); the mixed-VI model.
class VIOperatorModel final : public VIModelOracle {
 public:
  VIOperatorModel(std::function<Vec(const Vec&)> g, double L, double delta, SimpleTerm h,
                  std::optional<double> mu)
      : g_(std::move(g)), L_(L), delta_(delta), h_(h), mu_(mu) {
    require(L > 0, "vi operator model: L > 0");
  }

  double psi(const Vec& x, const Vec& y) const override {
    return g_(y).dot(x - y) + h_.value(x) - h_.value(y);
  }

  Vec prox_step(const Vec& y, const Vec& z, double L, const ProxSetup& setup,
                const FeasibleSet& set, double /*delta_tilde*/) const override {
    SimpleTerm scaled = h_;
    if (scaled.kind == SimpleTerm::Kind::L1) scaled.lambda /= L;
    return bregman_composite_prox(setup, set, z, g_(y) / L, scaled);
  }

  double declared_delta() const override { return delta_; }
  double declared_L_hint() const override { return L_; }
  std::optional<double> mu() const override { return mu_; }

 private:
  std::function<Vec(const Vec&)> g_;
  double L_;
  double delta_;
  SimpleTerm h_;
  std::optional<double> mu_;
};

// Composite saddle model: psi(x,y) = <g~(y), x-y> + h(u_x) + phi(v_x)
//                                     - h(u_y) - phi(v_y)
// with g~ = (grad_u f~, -grad_v f~).
class CompositeSaddleViModel final : public VIModelOracle {
 public:
  explicit CompositeSaddleViModel(SaddleSpec spec) : s_(std::move(spec)) {
    require(s_.n1 >= 1 && s_.n2 >= 1, "saddle spec: block dims");
    if (s_.Q1.dim() != s_.n1 || s_.Q2.dim() != s_.n2)
      throw DimensionMismatch("saddle spec: Q1 x Q2 dimensions inconsistent");
    require(s_.L > 0, "saddle spec: L > 0");
  }

  Vec stacked_operator(const Vec& x) const {
    Vec u = x.head(s_.n1), v = x.tail(s_.n2);
    Vec g(s_.n1 + s_.n2);
    g.head(s_.n1) = s_.grad_u(u, v);
    g.tail(s_.n2) = -s_.grad_v(u, v);
    return g;
  }

  double composite(const Vec& x) const {
    return s_.h.value(x.head(s_.n1)) + s_.phi.value(x.tail(s_.n2));
  }

  double psi(const Vec& x, const Vec& y) const override {
    return stacked_operator(y).dot(x - y) + composite(x) - composite(y);
  }

  Vec prox_step(const Vec& y, const Vec& z, double L, const ProxSetup& setup,
                const FeasibleSet& set, double /*delta_tilde*/) const override {
    // blockwise composite prox of <g~/L, x> + (h + phi)/L + V[z](x)
    Vec g = stacked_operator(y) / L;
    if (set.kind() != FeasibleSet::Kind::Product &&
        set.kind() != FeasibleSet::Kind::ProductOfSimplices)
      throw UnsupportedSet("saddle prox expects a product set");
    const FeasibleSet* q1 = nullptr;
    const FeasibleSet* q2 = nullptr;
    FeasibleSet s1 = FeasibleSet::simplex(1), s2 = FeasibleSet::simplex(1);
    if (set.kind() == FeasibleSet::Kind::Product) {
      q1 = &set.block1();
      q2 = &set.block2();
    } else {
      s1 = FeasibleSet::simplex(set.n1());
      s2 = FeasibleSet::simplex(set.n2());
      q1 = &s1;
      q2 = &s2;
    }
    SimpleTerm h = s_.h, phi = s_.phi;
    if (h.kind == SimpleTerm::Kind::L1) h.lambda /= L;
    if (phi.kind == SimpleTerm::Kind::L1) phi.lambda /= L;
    Vec out(set.dim());
    out.head(s_.n1) = bregman_composite_prox(setup, *q1, z.head(s_.n1), g.head(s_.n1), h);
    out.tail(s_.n2) = bregman_composite_prox(setup, *q2, z.tail(s_.n2), g.tail(s_.n2), phi);
    return out;
  }

  double declared_delta() const override { return 0.0; }
  double declared_L_hint() const override { return s_.L; }
  const SaddleSpec& spec() const { return s_; }

 private:
  SaddleSpec s_;
};

}  // namespace

std::shared_ptr<VIModelOracle> make_vi_operator_model(std::function<Vec(const Vec&)> g,
                                                      double L, SimpleTerm h,
                                                      std::optional<double> mu) {
  return std::make_shared<VIOperatorModel>(std::move(g), L, 0.0, h, mu);
}

std::shared_ptr<VIModelOracle> make_vi_operator_model_holder(std::function<Vec(const Vec&)> g,
                                                             double nu, double L_nu,
                                                             double delta_ref, SimpleTerm h) {
  require(nu >= 0 && nu <= 1 && L_nu > 0, "holder operator: nu in [0,1], L_nu > 0");
  require(delta_ref > 0, "holder operator: delta_ref > 0");
  // L(delta) = (1/(2 delta))^{(1-nu)/(1+nu)} L_nu^{2/(1+nu)}
  double L = std::pow(1.0 / (2.0 * delta_ref), (1.0 - nu) / (1.0 + nu)) *
             std::pow(L_nu, 2.0 / (1.0 + nu));
  return std::make_shared<VIOperatorModel>(std::move(g), L, delta_ref, h, std::nullopt);
}

SaddleSpec make_matrix_game_spec(const Mat& A) {
  SaddleSpec s;
  s.n1 = static_cast<int>(A.rows());
  s.n2 = static_cast<int>(A.cols());
  Mat Acopy = A;
  s.f_tilde = [Acopy](const Vec& u, const Vec& v) { return u.dot(Acopy * v); };
  s.grad_u = [Acopy](const Vec&, const Vec& v) { return Vec(Acopy * v); };
  s.grad_v = [Acopy](const Vec& u, const Vec&) { return Vec(Acopy.transpose() * u); };
  s.h = SimpleTerm::none();
  s.phi = SimpleTerm::none();
  s.Q1 = FeasibleSet::simplex(s.n1);
  s.Q2 = FeasibleSet::simplex(s.n2);
  // ||g(x)-g(y)||_* <= max|A_ij| ||x-y|| for the (l1,l1) product norm
  s.L = Acopy.cwiseAbs().maxCoeff();
  s.bilinear_A = Acopy;
  s.best_response_v = [Acopy](const Vec& u) { return (Acopy.transpose() * u).maxCoeff(); };
  s.best_response_u = [Acopy](const Vec& v) { return (Acopy * v).minCoeff(); };
  return s;
}

std::shared_ptr<VIModelOracle> make_composite_saddle_vi_model(SaddleSpec spec) {
  return std::make_shared<CompositeSaddleViModel>(std::move(spec));
}

namespace {

// Wraps prox_step with a genuine perturbation kept inside the requested
// stationarity budget; the residual is recomputed exactly after projection.
class InexactProxWrapper final : public ModelOracle {
 public:
  InexactProxWrapper(std::shared_ptr<ModelOracle> base, double delta_tilde,
                     std::uint64_t seed)
      : base_(std::move(base)), cap_(delta_tilde), rng_(seed) {
    require(cap_ >= 0, "inexact prox wrapper: delta_tilde >= 0");
    require(base_->linear_psi(), "inexact prox wrapper needs a linear-psi model");
  }

  double f_value(const Vec& y) const override { return base_->f_value(y); }
  double f_delta(const Vec& y) const override { return base_->f_delta(y); }
  double psi(const Vec& x, const Vec& y) const override { return base_->psi(x, y); }
  double declared_delta() const override { return base_->declared_delta(); }
  double declared_L_hint() const override { return base_->declared_L_hint(); }
  double used_delta() const override { return base_->used_delta(); }
  bool linear_psi() const override { return true; }
  Vec psi_gradient(const Vec& y) const override { return base_->psi_gradient(y); }

  Vec prox_step(const Vec& y, const Vec& z, double alpha, const ProxSetup& setup,
                const FeasibleSet& set, double delta_tilde) const override {
    Vec exact = base_->prox_step(y, z, alpha, setup, set, 0.0);
    double budget = std::min(cap_, delta_tilde);
    if (budget <= 0 || !set.is_bounded()) return exact;
    Vec g = alpha * base_->psi_gradient(y);
    auto residual = [&](const Vec& x) {
      Vec h = g + setup.d_grad(x) - setup.d_grad(z);
      return h.dot(x) - set.support_min(h);
    };
    Vec dir = rng_.gaussian_vector(static_cast<int>(exact.size()));
    double dn = dir.norm();
    if (dn < 1e-300) return exact;
    dir /= dn;
    double t = budget;  // shrink until the exact residual fits the budget
    for (int it = 0; it < 60; ++it) {
      Vec cand = set.project(exact + t * dir);
      if (residual(cand) <= 0.9 * budget) return cand;
      t *= 0.5;
    }
    return exact;
  }

 private:
  std::shared_ptr<ModelOracle> base_;
  double cap_;
  mutable Rng rng_;
};

}  // namespace

std::shared_ptr<ModelOracle> with_inexact_prox(std::shared_ptr<ModelOracle> base,
                                               double delta_tilde, std::uint64_t seed) {
  return std::make_shared<InexactProxWrapper>(std::move(base), delta_tilde, seed);
}

}  // namespace imopt
