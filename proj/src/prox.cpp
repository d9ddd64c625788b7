#include "imopt/prox.hpp"

#include <cmath>

#include "imopt/errors.hpp"

namespace imopt {

ProxSetup ProxSetup::euclidean() {
  ProxSetup s;
  s.kind_ = Kind::Euclidean;
  s.norm_kind_ = Norm::L2;
  s.one_strongly_convex_ = true;
  s.omega_ = 1.0;
  return s;
}

ProxSetup ProxSetup::entropy(int n) {
  require(n >= 1, "entropy setup: n >= 1");
  ProxSetup s;
  s.kind_ = Kind::Entropy;
  s.norm_kind_ = Norm::L1;
  s.one_strongly_convex_ = true;
  s.omega_ = 2.0 * std::log(std::max(2, n));
  s.shift_ = std::log(static_cast<double>(n));
  return s;
}

ProxSetup ProxSetup::entropy_product(int n1, int n2) {
  require(n1 >= 1 && n2 >= 1, "entropy setup: n1, n2 >= 1");
  ProxSetup s;
  s.kind_ = Kind::Entropy;
  s.norm_kind_ = Norm::L1;
  s.one_strongly_convex_ = true;
  s.omega_ = 2.0 * (std::log(std::max(2, n1)) + std::log(std::max(2, n2)));
  s.shift_ = std::log(static_cast<double>(n1)) + std::log(static_cast<double>(n2));
  return s;
}

ProxSetup ProxSetup::recentered(const Vec& c, double radius) const {
  if (kind_ != Kind::Euclidean)
    throw UnsupportedCombination("recentered prox is defined for the Euclidean setup only");
  require(radius > 0, "recentered: radius > 0");
  ProxSetup s = *this;
  s.center_ = c;
  s.scale_ = radius;
  s.omega_ = 1.0;
  return s;
}

namespace {

double entropy_value(const Vec& x) {
  double acc = 0;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] < -1e-9) throw DomainError("entropy: negative coordinate");
    double xi = std::max(x[i], ProxSetup::kEntropyFloor);
    acc += xi * std::log(xi);
  }
  return acc;
}

}  // namespace

double ProxSetup::d_value(const Vec& x) const {
  if (kind_ == Kind::Euclidean) {
    if (center_.size() == 0) return 0.5 * x.squaredNorm() / (scale_ * scale_);
    return 0.5 * (x - center_).squaredNorm() / (scale_ * scale_);
  }
  return entropy_value(x) + shift_;
}

Vec ProxSetup::d_grad(const Vec& x) const {
  if (kind_ == Kind::Euclidean) {
    if (center_.size() == 0) return x / (scale_ * scale_);
    return (x - center_) / (scale_ * scale_);
  }
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] < -1e-9) throw DomainError("entropy: negative coordinate");
    g[i] = 1.0 + std::log(std::max(x[i], kEntropyFloor));
  }
  return g;
}

double ProxSetup::bregman(const Vec& y, const Vec& x) const {
  if (x.size() != y.size()) throw DimensionMismatch("bregman: dimension mismatch");
  if (kind_ == Kind::Euclidean) return 0.5 * (x - y).squaredNorm() / (scale_ * scale_);
  // generalized KL: sum x ln(x/y) - sum x + sum y
  double acc = 0;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] < -1e-9 || y[i] < -1e-9) throw DomainError("entropy: negative coordinate");
    double xi = std::max(x[i], kEntropyFloor);
    double yi = std::max(y[i], kEntropyFloor);
    acc += xi * std::log(xi / yi) - xi + yi;
  }
  return acc;
}

double ProxSetup::norm(const Vec& x) const {
  double n = norm_kind_ == Norm::L2 ? x.norm() : x.lpNorm<1>();
  return n / scale_;
}

double ProxSetup::dual_norm(const Vec& g) const {
  double n = norm_kind_ == Norm::L2 ? g.norm() : g.lpNorm<Eigen::Infinity>();
  return n * scale_;
}

Vec ProxSetup::prox_center(const FeasibleSet& set) const {
  if (kind_ == Kind::Euclidean) {
    Vec c = center_.size() == 0 ? Vec(Vec::Zero(set.dim())) : center_;
    return set.project(c);
  }
  switch (set.kind()) {
    case FeasibleSet::Kind::Simplex:
      return Vec::Constant(set.dim(), 1.0 / set.dim());
    case FeasibleSet::Kind::ProductOfSimplices: {
      Vec z(set.dim());
      z.head(set.n1()).setConstant(1.0 / set.n1());
      z.tail(set.n2()).setConstant(1.0 / set.n2());
      return z;
    }
    case FeasibleSet::Kind::Product: {
      Vec z(set.dim());
      z.head(set.n1()) = prox_center(set.block1());
      z.tail(set.n2()) = prox_center(set.block2());
      return z;
    }
    default:
      throw UnsupportedCombination("entropy setup requires a simplex-type set");
  }
}

double bregman(const ProxSetup& setup, const Vec& y, const Vec& x) {
  return setup.bregman(y, x);
}

double accuracy_translate(double eps_tilde, double mu, double L, double R,
                          double grad_norm_at_opt, bool grad_zero_at_opt) {
  require(eps_tilde >= 0, "accuracy_translate: eps_tilde >= 0");
  require(mu > 0 && L > 0 && R > 0, "accuracy_translate: mu, L, R > 0");
  require(grad_norm_at_opt >= 0, "accuracy_translate: grad norm >= 0");
  if (eps_tilde == 0) return 0.0;
  if (grad_zero_at_opt) return R * std::sqrt(2.0 * L * eps_tilde);
  return (L * R + grad_norm_at_opt) * std::sqrt(2.0 * eps_tilde / mu);
}

bool verify_inexact_stationarity(const std::function<Vec(const Vec&)>& subgrad,
                                 const Vec& x_tilde, const FeasibleSet& set,
                                 double delta_tilde) {
  if (set.kind() == FeasibleSet::Kind::WholeSpace)
    throw UnsupportedSet("verify_inexact_stationarity: unbounded set");
  Vec h = subgrad(x_tilde);
  double worst = set.support_min(h) - h.dot(x_tilde);
  return worst >= -delta_tilde - 1e-12;
}

}  // namespace imopt
