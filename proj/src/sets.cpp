#include "imopt/sets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "imopt/errors.hpp"

namespace imopt {

FeasibleSet FeasibleSet::whole_space(int n) {
  require(n >= 1, "whole_space: n >= 1");
  FeasibleSet s;
  s.kind_ = Kind::WholeSpace;
  s.dim_ = n;
  return s;
}

FeasibleSet FeasibleSet::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw DimensionMismatch("box: lower/upper size mismatch");
  require(lo.size() >= 1, "box: n >= 1");
  for (int i = 0; i < lo.size(); ++i) require(lo[i] <= hi[i], "box: lower <= upper");
  FeasibleSet s;
  s.kind_ = Kind::Box;
  s.dim_ = static_cast<int>(lo.size());
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

FeasibleSet FeasibleSet::box_uniform(int n, double lo, double hi) {
  return box(Vec::Constant(n, lo), Vec::Constant(n, hi));
}

FeasibleSet FeasibleSet::simplex(int n) {
  require(n >= 1, "simplex: n >= 1");
  FeasibleSet s;
  s.kind_ = Kind::Simplex;
  s.dim_ = n;
  return s;
}

FeasibleSet FeasibleSet::ball(Vec center, double radius) {
  require(radius > 0, "ball: radius > 0");
  require(center.size() >= 1, "ball: n >= 1");
  FeasibleSet s;
  s.kind_ = Kind::Ball;
  s.dim_ = static_cast<int>(center.size());
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

FeasibleSet FeasibleSet::product_of_simplices(int n1, int n2) {
  require(n1 >= 1 && n2 >= 1, "product_of_simplices: n1, n2 >= 1");
  FeasibleSet s;
  s.kind_ = Kind::ProductOfSimplices;
  s.dim_ = n1 + n2;
  s.n1_ = n1;
  s.n2_ = n2;
  return s;
}

FeasibleSet FeasibleSet::product(FeasibleSet a, FeasibleSet b) {
  FeasibleSet s;
  s.kind_ = Kind::Product;
  s.n1_ = a.dim();
  s.n2_ = b.dim();
  s.dim_ = a.dim() + b.dim();
  s.block1_ = std::make_shared<FeasibleSet>(std::move(a));
  s.block2_ = std::make_shared<FeasibleSet>(std::move(b));
  return s;
}

bool FeasibleSet::contains(const Vec& x, double tol) const {
  if (x.size() != dim_) throw DimensionMismatch("contains: wrong dimension");
  switch (kind_) {
    case Kind::WholeSpace:
      return x.allFinite();
    case Kind::Box:
      for (int i = 0; i < dim_; ++i)
        if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
      return true;
    case Kind::Simplex: {
      if (x.minCoeff() < -tol) return false;
      return std::abs(x.sum() - 1.0) <= tol * dim_ + tol;
    }
    case Kind::Ball:
      return (x - center_).norm() <= radius_ + tol;
    case Kind::ProductOfSimplices: {
      if (x.minCoeff() < -tol) return false;
      return std::abs(x.head(n1_).sum() - 1.0) <= tol * n1_ + tol &&
             std::abs(x.tail(n2_).sum() - 1.0) <= tol * n2_ + tol;
    }
    case Kind::Product:
      return block1_->contains(x.head(n1_), tol) && block2_->contains(x.tail(n2_), tol);
  }
  return false;
}

Vec project_to_simplex(const Vec& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> u(x.data(), x.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0, theta = 0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    css += u[i];
    double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  Vec p(n);
  for (int i = 0; i < n; ++i) p[i] = std::max(0.0, x[i] - theta);
  return p;
}

Vec FeasibleSet::project(const Vec& x) const {
  if (x.size() != dim_) throw DimensionMismatch("project: wrong dimension");
  switch (kind_) {
    case Kind::WholeSpace:
      return x;
    case Kind::Box:
      return x.cwiseMax(lo_).cwiseMin(hi_);
    case Kind::Simplex:
      return project_to_simplex(x);
    case Kind::Ball: {
      Vec d = x - center_;
      double nr = d.norm();
      if (nr <= radius_) return x;
      return center_ + (radius_ / nr) * d;
    }
    case Kind::ProductOfSimplices: {
      Vec p(dim_);
      p.head(n1_) = project_to_simplex(x.head(n1_));
      p.tail(n2_) = project_to_simplex(x.tail(n2_));
      return p;
    }
    case Kind::Product: {
      Vec p(dim_);
      p.head(n1_) = block1_->project(x.head(n1_));
      p.tail(n2_) = block2_->project(x.tail(n2_));
      return p;
    }
  }
  throw Error("project: unreachable");
}

Vec FeasibleSet::lmo(const Vec& g) const {
  if (g.size() != dim_) throw DimensionMismatch("lmo: wrong dimension");
  switch (kind_) {
    case Kind::WholeSpace:
      throw UnsupportedSet("lmo: whole space has no linear minimizer");
    case Kind::Box: {
      Vec v(dim_);
      for (int i = 0; i < dim_; ++i) v[i] = g[i] >= 0 ? lo_[i] : hi_[i];
      return v;
    }
    case Kind::Simplex: {
      int idx = 0;
      g.minCoeff(&idx);
      Vec v = Vec::Zero(dim_);
      v[idx] = 1.0;
      return v;
    }
    case Kind::Ball: {
      double nr = g.norm();
      if (nr == 0) return center_;
      return center_ - (radius_ / nr) * g;
    }
    case Kind::ProductOfSimplices: {
      int i1 = 0, i2 = 0;
      g.head(n1_).minCoeff(&i1);
      g.tail(n2_).minCoeff(&i2);
      Vec v = Vec::Zero(dim_);
      v[i1] = 1.0;
      v[n1_ + i2] = 1.0;
      return v;
    }
    case Kind::Product: {
      Vec v(dim_);
      v.head(n1_) = block1_->lmo(g.head(n1_));
      v.tail(n2_) = block2_->lmo(g.tail(n2_));
      return v;
    }
  }
  throw Error("lmo: unreachable");
}

double FeasibleSet::support_min(const Vec& g) const { return g.dot(lmo(g)); }

double FeasibleSet::diameter() const {
  switch (kind_) {
    case Kind::WholeSpace:
      throw UnsupportedSet("diameter: whole space is unbounded");
    case Kind::Box:
      return (hi_ - lo_).norm();
    case Kind::Simplex:
      return dim_ > 1 ? std::sqrt(2.0) : 0.0;
    case Kind::Ball:
      return 2.0 * radius_;
    case Kind::ProductOfSimplices:
      return std::sqrt((n1_ > 1 ? 2.0 : 0.0) + (n2_ > 1 ? 2.0 : 0.0));
    case Kind::Product: {
      double d1 = block1_->diameter(), d2 = block2_->diameter();
      return std::sqrt(d1 * d1 + d2 * d2);
    }
  }
  throw Error("diameter: unreachable");
}

Vec FeasibleSet::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::WholeSpace:
      return rng.gaussian_vector(dim_);
    case Kind::Box: {
      Vec v(dim_);
      for (int i = 0; i < dim_; ++i) v[i] = rng.uniform(lo_[i], hi_[i]);
      return v;
    }
    case Kind::Simplex:
      return rng.simplex_point(dim_);
    case Kind::Ball: {
      Vec dir = rng.gaussian_vector(dim_);
      double nr = dir.norm();
      if (nr < 1e-300) return center_;
      double r = radius_ * std::pow(rng.uniform(), 1.0 / dim_);
      return center_ + (r / nr) * dir;
    }
    case Kind::ProductOfSimplices: {
      Vec v(dim_);
      v.head(n1_) = rng.simplex_point(n1_);
      v.tail(n2_) = rng.simplex_point(n2_);
      return v;
    }
    case Kind::Product: {
      Vec v(dim_);
      v.head(n1_) = block1_->sample(rng);
      v.tail(n2_) = block2_->sample(rng);
      return v;
    }
  }
  throw Error("sample: unreachable");
}

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

double parse_num(std::string_view s) {
  try {
    return std::stod(std::string(s));
  } catch (const std::exception&) {
    throw InvalidArgument("feasible set: bad number in descriptor");
  }
}

int parse_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value < 1)
    throw InvalidArgument("feasible set: bad dimension in descriptor");
  return value;
}

}  // namespace

std::string FeasibleSet::to_text() const {
  switch (kind_) {
    case Kind::WholeSpace:
      return "space:" + std::to_string(dim_);
    case Kind::Box: {
      // canonical form only for uniform boxes; general boxes list bounds
      bool uniform = true;
      for (int i = 1; i < dim_; ++i)
        if (lo_[i] != lo_[0] || hi_[i] != hi_[0]) uniform = false;
      if (uniform)
        return "box:[" + fmt_num(lo_[0]) + "," + fmt_num(hi_[0]) + "]^" + std::to_string(dim_);
      std::string out = "box:";
      for (int i = 0; i < dim_; ++i)
        out += "[" + fmt_num(lo_[i]) + "," + fmt_num(hi_[i]) + "]" + (i + 1 < dim_ ? "x" : "");
      return out;
    }
    case Kind::Simplex:
      return "simplex:" + std::to_string(dim_);
    case Kind::Ball:
      return "ball:" + fmt_num(center_[0]) + "," + fmt_num(radius_) + "^" + std::to_string(dim_);
    case Kind::ProductOfSimplices:
      return "simplex2:" + std::to_string(n1_) + "," + std::to_string(n2_);
    case Kind::Product:
      return "prod:(" + block1_->to_text() + ")x(" + block2_->to_text() + ")";
  }
  throw Error("to_text: unreachable");
}

FeasibleSet FeasibleSet::parse(std::string_view text, int fallback_dim) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw InvalidArgument("feasible set: expected '<kind>:<payload>'");
  std::string_view kind = text.substr(0, colon);
  std::string_view body = text.substr(colon + 1);

  if (kind == "space") return whole_space(parse_int(body));
  if (kind == "simplex") return simplex(parse_int(body));
  if (kind == "simplex2") {
    auto comma = body.find(',');
    if (comma == std::string_view::npos)
      throw InvalidArgument("simplex2: expected 'simplex2:n1,n2'");
    return product_of_simplices(parse_int(body.substr(0, comma)), parse_int(body.substr(comma + 1)));
  }
  if (kind == "box") {
    // box:[lo,hi]^n (the ^n suffix optional when fallback_dim is given)
    auto lb = body.find('[');
    auto comma = body.find(',');
    auto rb = body.find(']');
    if (lb != 0 || comma == std::string_view::npos || rb == std::string_view::npos || comma > rb)
      throw InvalidArgument("box: expected 'box:[lo,hi]^n'");
    double lo = parse_num(body.substr(1, comma - 1));
    double hi = parse_num(body.substr(comma + 1, rb - comma - 1));
    int n = fallback_dim;
    auto caret = body.find('^', rb);
    if (caret != std::string_view::npos) n = parse_int(body.substr(caret + 1));
    if (n < 1) throw InvalidArgument("box: dimension missing (add ^n or dim=)");
    return box_uniform(n, lo, hi);
  }
  if (kind == "ball") {
    // ball:c,r or ball:c,r^n; center is c*ones(n)
    auto comma = body.find(',');
    if (comma == std::string_view::npos) throw InvalidArgument("ball: expected 'ball:c,r'");
    double c = parse_num(body.substr(0, comma));
    std::string_view rest = body.substr(comma + 1);
    int n = fallback_dim;
    auto caret = rest.find('^');
    if (caret != std::string_view::npos) {
      n = parse_int(rest.substr(caret + 1));
      rest = rest.substr(0, caret);
    }
    double r = parse_num(rest);
    if (n < 1) throw InvalidArgument("ball: dimension missing (add ^n or dim=)");
    return ball(Vec::Constant(n, c), r);
  }
  throw InvalidArgument("feasible set: unknown kind '" + std::string(kind) + "'");
}

}  // namespace imopt
