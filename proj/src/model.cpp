#include "imopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "imopt/errors.hpp"
#include "imopt/rng.hpp"

namespace imopt {

StrongConvexityTag StrongConvexityTag::right_relative(double mu) {
  require(mu > 0, "strong convexity: mu > 0");
  return {Kind::RightRelative, mu};
}
StrongConvexityTag StrongConvexityTag::left_relative(double mu) {
  require(mu > 0, "strong convexity: mu > 0");
  return {Kind::LeftRelative, mu};
}
StrongConvexityTag StrongConvexityTag::norm_strong(double mu) {
  require(mu > 0, "strong convexity: mu > 0");
  return {Kind::NormStrong, mu};
}

std::string ValidationReport::summary() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%s (samples=%d lower=%.3e upper=%.3e psi_xx=%.3e conv=%.3e "
                "fdelta=%.3e mono=%.3e smooth=%.3e)",
                passed ? "pass" : "FAIL", samples, max_lower_violation,
                max_upper_violation, max_psi_xx, max_convexity_violation,
                max_fdelta_violation, max_monotonicity_violation,
                max_smoothness_violation);
  return buf;
}

namespace {

constexpr double kSandwichTol = 1e-10;
constexpr double kPsiXxTol = 1e-12;
constexpr double kConvexityTol = 1e-10;

}  // namespace

ValidationReport validate_min_model(const ModelOracle& model, const ProxSetup& setup,
                                    const FeasibleSet& set, int n_samples,
                                    std::uint64_t rng_seed) {
  require(n_samples >= 1, "validate: n_samples >= 1");
  Rng rng(rng_seed);
  ValidationReport rep;
  rep.samples = n_samples;
  const double L = model.declared_L_hint();
  const double delta = model.declared_delta();

  for (int s = 0; s < n_samples; ++s) {
    Vec x = set.sample(rng);
    Vec y = set.sample(rng);
    double fx = model.f_value(x);
    double fy = model.f_value(y);
    double fdy = model.f_delta(y);
    double psi = model.psi(x, y);
    double gap = fx - fdy - psi;
    rep.max_lower_violation = std::max(rep.max_lower_violation, -gap);
    rep.max_upper_violation =
        std::max(rep.max_upper_violation, gap - (L * setup.bregman(y, x) + delta));
    rep.max_fdelta_violation = std::max({rep.max_fdelta_violation, fdy - fy, (fy - delta) - fdy});
    rep.max_psi_xx = std::max(rep.max_psi_xx, std::abs(model.psi(x, x)));

    Vec x2 = set.sample(rng);
    Vec mid = 0.5 * (x + x2);
    double viol = model.psi(mid, y) - 0.5 * (model.psi(x, y) + model.psi(x2, y));
    rep.max_convexity_violation = std::max(rep.max_convexity_violation, viol);
  }
  rep.passed = rep.max_lower_violation <= kSandwichTol &&
               rep.max_upper_violation <= kSandwichTol && rep.max_psi_xx <= kPsiXxTol &&
               rep.max_convexity_violation <= kConvexityTol &&
               rep.max_fdelta_violation <= kSandwichTol;
  return rep;
}

ValidationReport validate_vi_model(const VIModelOracle& model, const ProxSetup& setup,
                                   const FeasibleSet& set, int n_samples,
                                   std::uint64_t rng_seed) {
  require(n_samples >= 1, "validate: n_samples >= 1");
  Rng rng(rng_seed);
  ValidationReport rep;
  rep.samples = n_samples;
  const double L = model.declared_L_hint();
  const double delta = model.declared_delta();

  for (int s = 0; s < n_samples; ++s) {
    Vec x = set.sample(rng);
    Vec y = set.sample(rng);
    Vec z = set.sample(rng);

    rep.max_psi_xx = std::max(rep.max_psi_xx, std::abs(model.psi(x, x)));
    rep.max_monotonicity_violation =
        std::max(rep.max_monotonicity_violation, model.psi(x, y) + model.psi(y, x) - delta);
    double lhs = model.psi(x, y);
    double rhs = model.psi(x, z) + model.psi(z, y) + L * setup.bregman(z, x) +
                 L * setup.bregman(y, z) + delta;
    rep.max_smoothness_violation = std::max(rep.max_smoothness_violation, lhs - rhs);

    Vec x2 = set.sample(rng);
    Vec mid = 0.5 * (x + x2);
    double viol = model.psi(mid, y) - 0.5 * (model.psi(x, y) + model.psi(x2, y));
    rep.max_convexity_violation = std::max(rep.max_convexity_violation, viol);
  }
  rep.passed = rep.max_psi_xx <= kPsiXxTol &&
               rep.max_monotonicity_violation <= 1e-12 &&
               rep.max_smoothness_violation <= kSandwichTol &&
               rep.max_convexity_violation <= kConvexityTol;
  return rep;
}

namespace {

class MinModelViAdapter final : public VIModelOracle {
 public:
  MinModelViAdapter(std::shared_ptr<const ModelOracle> m, double delta)
      : model_(std::move(m)), delta_(delta) {}

  double psi(const Vec& x, const Vec& y) const override { return model_->psi(x, y); }

  Vec prox_step(const Vec& y, const Vec& z, double L, const ProxSetup& setup,
                const FeasibleSet& set, double delta_tilde) const override {
    // min psi(x,y) + L V[z](x)  ==  min (1/L) psi(x,y) + V[z](x), rescaled
    // stationarity residuals scale linearly: pass delta_tilde / L through
    return model_->prox_step(y, z, 1.0 / L, setup, set, delta_tilde / L);
  }

  double declared_delta() const override { return delta_; }
  double declared_L_hint() const override { return model_->declared_L_hint(); }

 private:
  std::shared_ptr<const ModelOracle> model_;
  double delta_;
};

}  // namespace

std::shared_ptr<VIModelOracle> vi_view_of_min_model(std::shared_ptr<const ModelOracle> model,
                                                    double delta_override) {
  return std::make_shared<MinModelViAdapter>(std::move(model), delta_override);
}

bool check_min_model_is_vi_model(const ModelOracle& model, const ProxSetup& setup,
                                 const FeasibleSet& set, int n_samples,
                                 std::uint64_t rng_seed) {
  // Non-owning view; the adapter only lives for this call.
  std::shared_ptr<const ModelOracle> alias(&model, [](const ModelOracle*) {});
  auto vi = vi_view_of_min_model(alias, 5.0 * model.declared_delta());
  return validate_vi_model(*vi, setup, set, n_samples, rng_seed).passed;
}

}  // namespace imopt
