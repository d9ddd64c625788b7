#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <string_view>

#include "imopt/rng.hpp"

namespace imopt {

using Vec = Eigen::VectorXd;

// Feasible set Q. All operations are exact up to floating point; linear
// minimization (lmo/support_min) evaluates the vertex minimizer in closed
// form for the polytope variants and the radial minimizer for the ball.
class FeasibleSet {
 public:
  enum class Kind { WholeSpace, Box, Simplex, Ball, ProductOfSimplices, Product };

  static FeasibleSet whole_space(int n);
  static FeasibleSet box(Vec lo, Vec hi);
  static FeasibleSet box_uniform(int n, double lo, double hi);
  static FeasibleSet simplex(int n);
  static FeasibleSet ball(Vec center, double radius);
  static FeasibleSet product_of_simplices(int n1, int n2);
  static FeasibleSet product(FeasibleSet a, FeasibleSet b);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_polytope() const {
    if (kind_ == Kind::Product) return block1_->is_polytope() && block2_->is_polytope();
    return kind_ == Kind::Box || kind_ == Kind::Simplex || kind_ == Kind::ProductOfSimplices;
  }
  bool has_lmo() const {
    if (kind_ == Kind::Product) return block1_->has_lmo() && block2_->has_lmo();
    return kind_ != Kind::WholeSpace;
  }
  bool is_bounded() const { return has_lmo(); }

  bool contains(const Vec& x, double tol = 1e-12) const;

  // Euclidean projection onto the set.
  Vec project(const Vec& x) const;

  // argmin_{x in Q} <g, x>; throws UnsupportedSet for WholeSpace.
  Vec lmo(const Vec& g) const;
  double support_min(const Vec& g) const;

  // sup_{x,y in Q} ||x - y||_2; throws UnsupportedSet for WholeSpace.
  double diameter() const;

  // Uniform-ish sample used by validators; deterministic given the rng state.
  Vec sample(Rng& rng) const;

  // Canonical textual form, e.g. "simplex:5", "box:[-1,1]^10", "ball:0,1^3".
  std::string to_text() const;
  static FeasibleSet parse(std::string_view text, int fallback_dim = -1);

  const Vec& lower() const { return lo_; }
  const Vec& upper() const { return hi_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  const FeasibleSet& block1() const { return *block1_; }
  const FeasibleSet& block2() const { return *block2_; }

 private:
  FeasibleSet() = default;
  Kind kind_ = Kind::WholeSpace;
  int dim_ = 0;
  Vec lo_, hi_;      // Box
  Vec center_;       // Ball
  double radius_ = 0;
  int n1_ = 0, n2_ = 0;  // ProductOfSimplices / Product block sizes
  std::shared_ptr<const FeasibleSet> block1_, block2_;  // Product
};

// Euclidean projection onto the standard simplex (Held/Michelot).
Vec project_to_simplex(const Vec& x);

}  // namespace imopt
