#include "imopt/model_zoo.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "imopt/errors.hpp"

namespace imopt {

SimpleTerm SimpleTerm::l1(double lambda) {
  require(lambda >= 0, "l1 term: lambda >= 0");
  return {Kind::L1, lambda};
}

SimpleTerm SimpleTerm::sq_l2(double lambda) {
  require(lambda >= 0, "sq_l2 term: lambda >= 0");
  return {Kind::SqL2, lambda};
}

// ---------------------------------------------------------------------------
// Bregman prox machinery

namespace {

Vec entropy_multiplicative_step(const FeasibleSet& set, const Vec& z, const Vec& g) {
  // argmin over a simplex of <g, x> + KL(x||z): softmax of (ln z - g), blockwise
  auto block_update = [](const Eigen::Ref<const Vec>& zb, const Eigen::Ref<const Vec>& gb) {
    Vec logits(zb.size());
    for (int i = 0; i < zb.size(); ++i)
      logits[i] = std::log(std::max(zb[i], ProxSetup::kEntropyFloor)) - gb[i];
    double m = logits.maxCoeff();
    Vec w = (logits.array() - m).exp();
    return Vec(w / w.sum());
  };
  switch (set.kind()) {
    case FeasibleSet::Kind::Simplex:
      return block_update(z, g);
    case FeasibleSet::Kind::ProductOfSimplices: {
      Vec x(set.dim());
      x.head(set.n1()) = block_update(z.head(set.n1()), g.head(set.n1()));
      x.tail(set.n2()) = block_update(z.tail(set.n2()), g.tail(set.n2()));
      return x;
    }
    case FeasibleSet::Kind::Product: {
      Vec x(set.dim());
      x.head(set.n1()) =
          entropy_multiplicative_step(set.block1(), z.head(set.n1()), g.head(set.n1()));
      x.tail(set.n2()) =
          entropy_multiplicative_step(set.block2(), z.tail(set.n2()), g.tail(set.n2()));
      return x;
    }
    default:
      throw UnsupportedCombination("entropy prox step requires a simplex-type set");
  }
}

double soft(double v, double t) { return v > t ? v - t : (v < -t ? v + t : 0.0); }

}  // namespace

Vec bregman_linear_prox(const ProxSetup& setup, const FeasibleSet& set, const Vec& z,
                        const Vec& g) {
  if (z.size() != g.size() || z.size() != set.dim())
    throw DimensionMismatch("bregman_linear_prox: dimension mismatch");
  if (setup.kind() == ProxSetup::Kind::Euclidean) {
    // V is scaled by 1/R^2 for recentered setups; the step scales by R^2.
    double s2 = setup.scale() * setup.scale();
    return set.project(z - s2 * g);
  }
  return entropy_multiplicative_step(set, z, g);
}

Vec bregman_composite_prox(const ProxSetup& setup, const FeasibleSet& set, const Vec& z,
                           const Vec& g, const SimpleTerm& h) {
  if (h.is_none() || h.kind == SimpleTerm::Kind::Indicator)
    return bregman_linear_prox(setup, set, z, g);
  if (h.kind == SimpleTerm::Kind::SqL2) {
    if (setup.kind() != ProxSetup::Kind::Euclidean ||
        set.kind() != FeasibleSet::Kind::WholeSpace)
      throw UnsupportedCombination("sq_l2 composite prox: Euclidean whole space only");
    double s2 = setup.scale() * setup.scale();
    return Vec((z - s2 * g) / (1.0 + s2 * h.lambda));
  }
  // L1 is constant on simplex-type sets and drops out of the argmin.
  if (set.kind() == FeasibleSet::Kind::Simplex ||
      set.kind() == FeasibleSet::Kind::ProductOfSimplices)
    return bregman_linear_prox(setup, set, z, g);
  if (setup.kind() != ProxSetup::Kind::Euclidean)
    throw UnsupportedCombination("L1 composite prox requires the Euclidean setup");
  double s2 = setup.scale() * setup.scale();
  Vec v = z - s2 * g;
  double t = s2 * h.lambda;
  Vec x(v.size());
  for (int i = 0; i < v.size(); ++i) x[i] = soft(v[i], t);
  switch (set.kind()) {
    case FeasibleSet::Kind::WholeSpace:
      return x;
    case FeasibleSet::Kind::Box:
      // 1-D convex pieces: clamping the unconstrained minimizer is exact
      return x.cwiseMax(set.lower()).cwiseMin(set.upper());
    default:
      throw UnsupportedCombination("L1 composite prox supports WholeSpace/Box sets");
  }
}

double simple_linmin(const FeasibleSet& set, const Vec& c, const SimpleTerm& h) {
  if (h.is_none() || h.kind == SimpleTerm::Kind::Indicator) return set.support_min(c);
  switch (set.kind()) {
    case FeasibleSet::Kind::Simplex:
      return set.support_min(c) + h.lambda;  // ||x||_1 = 1 on the simplex
    case FeasibleSet::Kind::Box: {
      double acc = 0;
      for (int i = 0; i < set.dim(); ++i) {
        double lo = set.lower()[i], hi = set.upper()[i];
        double best = c[i] * lo + h.lambda * std::abs(lo);
        best = std::min(best, c[i] * hi + h.lambda * std::abs(hi));
        if (lo <= 0 && 0 <= hi) best = std::min(best, 0.0);
        acc += best;
      }
      return acc;
    }
    default:
      throw UnsupportedSet("simple_linmin: unsupported set for composite term");
  }
}

// ---------------------------------------------------------------------------
// problem types

void QuadraticProblem::check() const {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw DimensionMismatch("quadratic: A/b dimensions");
  double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) throw InvalidArgument("quadratic: A not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw InvalidArgument("quadratic: A not positive semidefinite");
}

double QuadraticProblem::L() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double QuadraticProblem::mu() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Vec QuadraticProblem::minimizer() const { return A.ldlt().solve(b); }

double QuadraticProblem::min_value() const { return value(minimizer()); }

QuadraticProblem QuadraticProblem::random(int n, double mu, double L, Rng& rng) {
  require(n >= 1 && mu > 0 && L >= mu, "quadratic: need 0 < mu <= L");
  Mat G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ();
  Vec eigs(n);
  for (int i = 0; i < n; ++i) {
    double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    eigs[i] = mu * std::pow(L / mu, t);
  }
  QuadraticProblem p;
  p.A = Q * eigs.asDiagonal() * Q.transpose();
  p.A = 0.5 * (p.A + p.A.transpose());
  Vec x_star = rng.uniform_vector(n, -1.0, 1.0);
  p.b = p.A * x_star;
  p.c = 0.0;
  return p;
}

double SuperpositionProblem::value(const Vec& x) const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& g : g_value) v = std::max(v, g(x));
  return v;
}

double SuperpositionProblem::L_total() const {
  double acc = 0;
  for (double l : L) acc += l;
  return acc;
}

double HolderProblem::holder_L(double delta) const {
  require(delta > 0, "holder_L: delta > 0");
  if (nu >= 1.0) return L_nu;
  return L_nu * std::pow(L_nu / (2.0 * delta), (1.0 - nu) / (1.0 + nu));
}

// ---------------------------------------------------------------------------
// smooth / composite / universal models (linear psi)

namespace {

class SmoothModel final : public ModelOracle {
 public:
  SmoothModel(std::function<double(const Vec&)> value, std::function<Vec(const Vec&)> grad,
              double L)
      : value_(std::move(value)), grad_(std::move(grad)), L_(L) {
    require(L > 0, "smooth model: L > 0");
  }

  double f_value(const Vec& y) const override { return value_(y); }
  double f_delta(const Vec& y) const override { return value_(y); }
  double psi(const Vec& x, const Vec& y) const override { return grad_(y).dot(x - y); }

  Vec prox_step(const Vec& y, const Vec& z, double alpha, const ProxSetup& setup,
                const FeasibleSet& set, double /*delta_tilde*/) const override {
    return bregman_linear_prox(setup, set, z, alpha * grad_(y));
  }

  double declared_delta() const override { return 0.0; }
  double declared_L_hint() const override { return L_; }
  bool linear_psi() const override { return true; }
  Vec psi_gradient(const Vec& y) const override { return grad_(y); }

 private:
  std::function<double(const Vec&)> value_;
  std::function<Vec(const Vec&)> grad_;
  double L_;
};

class CompositeModel final : public ModelOracle {
 public:
  CompositeModel(CompositeProblem p, double L) : p_(std::move(p)), L_(L) {
    require(L > 0, "composite model: L > 0");
  }

  double f_value(const Vec& y) const override { return p_.value(y); }
  double f_delta(const Vec& y) const override { return p_.value(y); }

  double psi(const Vec& x, const Vec& y) const override {
    return p_.g_grad(y).dot(x - y) + p_.h.value(x) - p_.h.value(y);
  }

  Vec prox_step(const Vec& y, const Vec& z, double alpha, const ProxSetup& setup,
                const FeasibleSet& set, double /*delta_tilde*/) const override {
    SimpleTerm scaled = p_.h;
    if (scaled.kind == SimpleTerm::Kind::L1) scaled.lambda *= alpha;
    return bregman_composite_prox(setup, set, z, alpha * p_.g_grad(y), scaled);
  }

  double declared_delta() const override { return 0.0; }
  double declared_L_hint() const override { return L_; }
  bool linear_psi() const override { return p_.h.is_none(); }
  Vec psi_gradient(const Vec& y) const override {
    if (!p_.h.is_none()) throw UnsupportedCombination("composite psi is not linear");
    return p_.g_grad(y);
  }

 private:
  CompositeProblem p_;
  double L_;
};

class UniversalModel final : public ModelOracle {
 public:
  UniversalModel(HolderProblem p, std::function<double(int, double, double)> budget)
      : p_(std::move(p)), budget_(std::move(budget)) {
    double d0 = budget_ ? budget_(0, 1.0, 1.0) : 1e-6;
    require(d0 > 0, "universal model: budget must yield positive delta");
    delta0_ = d0;
  }

  double f_value(const Vec& y) const override { return p_.value(y); }
  double f_delta(const Vec& y) const override { return p_.value(y); }
  double psi(const Vec& x, const Vec& y) const override { return p_.subgrad(y).dot(x - y); }

  Vec prox_step(const Vec& y, const Vec& z, double alpha, const ProxSetup& setup,
                const FeasibleSet& set, double /*delta_tilde*/) const override {
    return bregman_linear_prox(setup, set, z, alpha * p_.subgrad(y));
  }

  double declared_delta() const override { return delta0_; }
  double declared_L_hint() const override { return p_.holder_L(delta0_); }
  // the Holder model is a (delta, L(delta))-model for every delta > 0; the
  // solver's schedule owns delta_k, the oracle itself incurs no error
  double used_delta() const override { return 0.0; }
  bool linear_psi() const override { return true; }
  Vec psi_gradient(const Vec& y) const override { return p_.subgrad(y); }

 private:
  HolderProblem p_;
  std::function<double(int, double, double)> budget_;
  double delta0_;
};

// ---------------------------------------------------------------------------
// superposition model: psi(x,y) = max_k [g_k(y) + <grad g_k(y), x-y>] - f(y)

class SuperpositionModel final : public ModelOracle {
 public:
  explicit SuperpositionModel(SuperpositionProblem p) : p_(std::move(p)) {
    require(p_.m() >= 1, "superposition: m >= 1");
    require(p_.L.size() == p_.g_value.size(), "superposition: L per piece");
  }

  double f_value(const Vec& y) const override { return p_.value(y); }
  double f_delta(const Vec& y) const override { return p_.value(y); }

  double psi(const Vec& x, const Vec& y) const override {
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < p_.m(); ++k)
      best = std::max(best, p_.g_value[k](y) + p_.g_grad[k](y).dot(x - y));
    return best - p_.value(y);
  }

  Vec prox_step(const Vec& y, const Vec& z, double alpha, const ProxSetup& setup,
                const FeasibleSet& set, double delta_tilde) const override;

  double declared_delta() const override { return 0.0; }
  double declared_L_hint() const override { return p_.L_total(); }

 private:
  SuperpositionProblem p_;
};

Vec SuperpositionModel::prox_step(const Vec& y, const Vec& z, double alpha,
                                  const ProxSetup& setup, const FeasibleSet& set,
                                  double delta_tilde) const {
  if (!set.is_bounded())
    throw UnsupportedSet("superposition prox needs a bounded set (residual oracle)");
  const int m = p_.m();
  const int n = set.dim();
  // affine pieces a_k(x) = <G_k, x> + c_k of alpha * psi(., y) + const
  std::vector<Vec> G(m);
  Vec c(m);
  for (int k = 0; k < m; ++k) {
    G[k] = p_.g_grad[k](y);
    c[k] = p_.g_value[k](y) - G[k].dot(y);
  }
  const double dtl = std::max(delta_tilde, 1e-11);
  const long cap = static_cast<long>(std::min(1e7, std::ceil(10.0 * n / dtl)));

  auto phi = [&](const Vec& x) {
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < m; ++k) best = std::max(best, G[k].dot(x) + c[k]);
    return alpha * best + setup.bregman(z, x);
  };
  // Combined inexactness certificate for weights lam on the pieces:
  //   alpha * (max_k a_k(x) - sum lam_k a_k(x))      (eps-subgradient slack)
  // + max(0, <h, x> - min_{v in Q} <h, v>)           (stationarity residual)
  // with h = alpha * sum lam_k G_k + grad d(x) - grad d(z).
  auto certificate = [&](const Vec& x, const Vec& lam) {
    Vec h = setup.d_grad(x) - setup.d_grad(z);
    double wavg = 0, maxval = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < m; ++k) {
      double ak = G[k].dot(x) + c[k];
      maxval = std::max(maxval, ak);
      wavg += lam[k] * ak;
      h += alpha * lam[k] * G[k];
    }
    double slack = alpha * (maxval - wavg);
    double resid = std::max(0.0, h.dot(x) - set.support_min(h));
    return slack + resid;
  };

  Vec x = set.project(z);
  Vec x_avg = x;
  Vec lam_avg = Vec::Constant(m, 1.0 / m);
  double weight_sum = 0;
  double best_cert = std::numeric_limits<double>::infinity();
  Vec best_x = x;
  double best_lb = -std::numeric_limits<double>::infinity();

  for (long t = 0; t < cap; ++t) {
    // subgradient of the max piece
    int kmax = 0;
    double maxval = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < m; ++k) {
      double ak = G[k].dot(x) + c[k];
      if (ak > maxval) {
        maxval = ak;
        kmax = k;
      }
    }
    Vec h = alpha * G[kmax] + setup.d_grad(x) - setup.d_grad(z);
    double lb = phi(x) + set.support_min(h) - h.dot(x);
    best_lb = std::max(best_lb, lb);

    Vec lam_t = Vec::Zero(m);
    lam_t[kmax] = 1.0;
    for (const Vec* cand_x : {&x, &x_avg}) {
      for (const Vec* cand_l : {&lam_t, &lam_avg}) {
        double cert = certificate(*cand_x, *cand_l);
        if (cert < best_cert) {
          best_cert = cert;
          best_x = *cand_x;
        }
      }
    }
    if (best_cert <= dtl) return best_x;

    double hn = setup.dual_norm(h);
    double gap_est = std::max(phi(x) - best_lb, 0.1 * dtl);
    double step = std::min(1e6, gap_est / std::max(hn * hn, 1e-14));
    if (setup.kind() == ProxSetup::Kind::Euclidean)
      x = set.project(x - step * h);
    else
      x = entropy_multiplicative_step(set, x, step * h);

    weight_sum += step;
    double w = step / weight_sum;
    x_avg = (1 - w) * x_avg + w * x;
    lam_avg = (1 - w) * lam_avg + w * lam_t;
  }
  throw InnerSolveFailure("superposition prox: residual target not reached");
}

// ---------------------------------------------------------------------------
// proximal model: psi(x,y) = f(x) - f(y)

class ProximalModel final : public ModelOracle {
 public:
  ProximalModel(std::function<double(const Vec&)> f, double L_reg, ProxInnerSolver inner)
      : f_(std::move(f)), L_(L_reg), inner_(std::move(inner)) {
    require(L_reg > 0, "proximal model: L_reg > 0");
    require(static_cast<bool>(inner_), "proximal model: inner solver required");
  }

  double f_value(const Vec& y) const override { return f_(y); }
  double f_delta(const Vec& y) const override { return f_(y); }
  double psi(const Vec& x, const Vec& y) const override { return f_(x) - f_(y); }

  Vec prox_step(const Vec& /*y*/, const Vec& z, double alpha, const ProxSetup& setup,
                const FeasibleSet& set, double delta_tilde) const override {
    return inner_(z, alpha, setup, set, delta_tilde);
  }

  double declared_delta() const override { return 0.0; }
  double declared_L_hint() const override { return L_; }

 private:
  std::function<double(const Vec&)> f_;
  double L_;
  ProxInnerSolver inner_;
};

}  // namespace

std::shared_ptr<ModelOracle> make_smooth_model(std::function<double(const Vec&)> value,
                                               std::function<Vec(const Vec&)> grad, double L) {
  return std::make_shared<SmoothModel>(std::move(value), std::move(grad), L);
}

std::shared_ptr<ModelOracle> make_smooth_model(const QuadraticProblem& p) {
  QuadraticProblem q = p;
  return make_smooth_model([q](const Vec& x) { return q.value(x); },
                           [q](const Vec& x) { return q.gradient(x); }, p.L());
}

std::shared_ptr<ModelOracle> make_composite_model(CompositeProblem p, double L) {
  return std::make_shared<CompositeModel>(std::move(p), L);
}

std::shared_ptr<ModelOracle> make_superposition_model(SuperpositionProblem p) {
  return std::make_shared<SuperpositionModel>(std::move(p));
}

std::shared_ptr<ModelOracle> make_proximal_model(std::function<double(const Vec&)> f,
                                                 double L_reg, ProxInnerSolver inner) {
  return std::make_shared<ProximalModel>(std::move(f), L_reg, std::move(inner));
}

std::shared_ptr<ModelOracle> make_proximal_model_linear(Vec c, double L_reg) {
  Vec cost = std::move(c);
  auto inner = [cost](const Vec& z, double alpha, const ProxSetup& setup,
                      const FeasibleSet& set, double) {
    return bregman_linear_prox(setup, set, z, alpha * cost);
  };
  return make_proximal_model([cost](const Vec& x) { return cost.dot(x); }, L_reg, inner);
}

std::shared_ptr<ModelOracle> make_proximal_model_l1(int /*n*/, double L_reg) {
  auto inner = [](const Vec& z, double alpha, const ProxSetup& setup, const FeasibleSet& set,
                  double) {
    return bregman_composite_prox(setup, set, z, Vec::Zero(z.size()), SimpleTerm::l1(alpha));
  };
  return make_proximal_model([](const Vec& x) { return x.lpNorm<1>(); }, L_reg, inner);
}

std::shared_ptr<ModelOracle> make_universal_model(
    const HolderProblem& p, std::function<double(int, double, double)> delta_budget) {
  return std::make_shared<UniversalModel>(p, std::move(delta_budget));
}

}  // namespace imopt
