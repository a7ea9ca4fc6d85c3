#pragma once

#include "ttsa/linalg.hpp"

namespace ttsa {

// Euclidean projection onto a closed convex constraint set.  Supported sets:
// the whole space (identity), axis-aligned boxes, Euclidean balls, and the
// probability simplex.  All projections are exact (no iterative solves).
class Projection {
 public:
  // Whole space: projection is the identity.
  static Projection all();
  // Box { x : lo <= x <= hi } (componentwise).
  static Projection box(Vec lo, Vec hi);
  static Projection box_uniform(Index dim, double lo, double hi);
  // Ball { x : ||x - center|| <= radius }.
  static Projection ball(Vec center, double radius);
  // Probability simplex { x >= 0 : sum x = 1 }.
  static Projection simplex(Index dim);

  Vec operator()(const Vec& x) const;
  bool contains(const Vec& x, double tol = 1e-12) const;
  bool is_identity() const { return kind_ == Kind::all; }

  // Dimension the set lives in; -1 for the identity (any dimension).
  Index dim() const { return dim_; }

  // sup_{x in set} ||x||; +inf for the identity.  Used for conservative
  // bounds on gradient norms over the feasible set.
  double sup_norm_bound() const;

 private:
  enum class Kind { all, box, ball, simplex };
  Kind kind_ = Kind::all;
  Vec lo_, hi_, center_;
  double radius_ = 0.0;
  Index dim_ = -1;
};

}  // namespace ttsa
