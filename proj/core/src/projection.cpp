#include "ttsa/projection.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ttsa {

Projection Projection::all() {
  Projection p;
  p.kind_ = Kind::all;
  return p;
}

Projection Projection::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) {
    throw std::invalid_argument("Projection::box: lo/hi size mismatch");
  }
  if ((lo.array() > hi.array()).any()) {
    throw std::invalid_argument("Projection::box: requires lo <= hi");
  }
  Projection p;
  p.kind_ = Kind::box;
  p.dim_ = lo.size();
  p.lo_ = std::move(lo);
  p.hi_ = std::move(hi);
  return p;
}

Projection Projection::box_uniform(Index dim, double lo, double hi) {
  return box(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
}

Projection Projection::ball(Vec center, double radius) {
  if (radius < 0) {
    throw std::invalid_argument("Projection::ball: radius must be >= 0");
  }
  Projection p;
  p.kind_ = Kind::ball;
  p.dim_ = center.size();
  p.center_ = std::move(center);
  p.radius_ = radius;
  return p;
}

Projection Projection::simplex(Index dim) {
  if (dim < 1) {
    throw std::invalid_argument("Projection::simplex: dim must be >= 1");
  }
  Projection p;
  p.kind_ = Kind::simplex;
  p.dim_ = dim;
  return p;
}

Vec Projection::operator()(const Vec& x) const {
  switch (kind_) {
    case Kind::all:
      return x;
    case Kind::box: {
      require_size(x, dim_, "Projection(box)");
      return x.cwiseMax(lo_).cwiseMin(hi_);
    }
    case Kind::ball: {
      require_size(x, dim_, "Projection(ball)");
      const Vec diff = x - center_;
      const double n = diff.norm();
      if (n <= radius_) return x;
      if (n == 0.0) return center_;
      return center_ + (radius_ / n) * diff;
    }
    case Kind::simplex: {
      require_size(x, dim_, "Projection(simplex)");
      // Sort-based exact simplex projection: find the largest k such that
      // v_(k) - tau_k > 0 with tau_k the running-mean threshold.
      std::vector<double> u(x.data(), x.data() + x.size());
      std::sort(u.begin(), u.end(), std::greater<double>());
      double cumsum = 0.0;
      double tau = 0.0;
      Index k = 0;
      for (Index i = 0; i < dim_; ++i) {
        cumsum += u[static_cast<std::size_t>(i)];
        const double t = (cumsum - 1.0) / static_cast<double>(i + 1);
        if (u[static_cast<std::size_t>(i)] - t > 0) {
          tau = t;
          k = i + 1;
        }
      }
      (void)k;
      return (x.array() - tau).max(0.0).matrix();
    }
  }
  throw std::logic_error("Projection: unknown kind");
}

bool Projection::contains(const Vec& x, double tol) const {
  switch (kind_) {
    case Kind::all:
      return true;
    case Kind::box:
      if (x.size() != dim_) return false;
      return ((x.array() >= lo_.array() - tol) &&
              (x.array() <= hi_.array() + tol))
          .all();
    case Kind::ball:
      if (x.size() != dim_) return false;
      return (x - center_).norm() <= radius_ + tol;
    case Kind::simplex:
      if (x.size() != dim_) return false;
      return (x.array() >= -tol).all() && std::abs(x.sum() - 1.0) <= tol;
  }
  return false;
}

double Projection::sup_norm_bound() const {
  switch (kind_) {
    case Kind::all:
      return std::numeric_limits<double>::infinity();
    case Kind::box:
      return lo_.cwiseAbs().cwiseMax(hi_.cwiseAbs()).norm();
    case Kind::ball:
      return center_.norm() + radius_;
    case Kind::simplex:
      return 1.0;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace ttsa
