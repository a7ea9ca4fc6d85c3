#pragma once

#include <stdexcept>
#include <utility>

#include "ttsa/constants.hpp"
#include "ttsa/linalg.hpp"
#include "ttsa/projection.hpp"
#include "ttsa/rng.hpp"

namespace ttsa {

// Sampling interface for stochastic bilevel problems.  Each call returns an
// unbiased draw of the corresponding derivative at (x, y); independence
// across calls is the caller's responsibility (pass distinct stream states).
//
// Noise contracts assumed by the solvers and certificates built on top:
//   * inner gradient:   E||h - grad_y g||^2 <= sigma_g^2 (1 + ||grad_y g||^2)
//     (multiplicative; additive-noise oracles satisfy it trivially),
//   * outer gradients:  E||.-grad_x f||^2 <= sigma_fx^2,
//                       E||.-grad_y f||^2 <= sigma_fy^2,
//   * cross/inner second derivatives: centered with Schatten-2 second moment
//     at most sigma_gxy^2 (cross), and the inner-Hessian draws must keep the
//     spectrum inside [mu_g, L_g] in expectation-square sense used by the
//     inverse-series contraction.
class StochasticBilevelOracle {
 public:
  virtual ~StochasticBilevelOracle() = default;

  virtual Index dim_x() const = 0;
  virtual Index dim_y() const = 0;

  // One draw of grad_y g(x, y; xi).
  virtual Vec sample_inner_grad(const Vec& x, const Vec& y,
                                RngStream& rng) const = 0;

  // One draw of (grad_x f, grad_y f)(x, y; xi) with a SHARED sample xi: the
  // pair must come from the same realization, as the hypergradient estimator
  // reuses one outer sample for both blocks.
  virtual std::pair<Vec, Vec> sample_outer_grads(const Vec& x, const Vec& y,
                                                 RngStream& rng) const = 0;

  // One draw of the cross second derivative of g applied to v:
  // returns (d^2 g / dx dy)(x, y; xi) * v, a dim_x vector.
  virtual Vec sample_jacobian_apply(const Vec& x, const Vec& y, const Vec& v,
                                    RngStream& rng) const = 0;

  // One draw of the inner Hessian of g applied to v:
  // returns (d^2 g / dy dy)(x, y; xi) * v, a dim_y vector.
  virtual Vec sample_hessian_apply(const Vec& x, const Vec& y, const Vec& v,
                                   RngStream& rng) const = 0;

  virtual const Projection& projection() const = 0;
  virtual const ProblemConstants& constants() const = 0;
};

// Deterministic full-derivative access (population quantities).  Used by the
// exact gradient surrogate, the estimator certificates, and the
// finite-difference checks; not by the stochastic solvers.
class DenseBilevelDerivatives {
 public:
  virtual ~DenseBilevelDerivatives() = default;
  virtual Vec grad_fx(const Vec& x, const Vec& y) const = 0;
  virtual Vec grad_fy(const Vec& x, const Vec& y) const = 0;
  virtual Vec grad_gy(const Vec& x, const Vec& y) const = 0;
  // dim_x x dim_y matrix of cross second derivatives of g.
  virtual Mat jac_gxy(const Vec& x, const Vec& y) const = 0;
  // dim_y x dim_y inner Hessian of g.
  virtual Mat hess_gyy(const Vec& x, const Vec& y) const = 0;
};

// Ground-truth access for verification problems where the inner solution
// and the outer objective are computable to high accuracy.
class ExactOracle {
 public:
  virtual ~ExactOracle() = default;
  virtual Vec y_star(const Vec& x) const = 0;
  virtual double ell(const Vec& x) const = 0;
  virtual Vec grad_ell(const Vec& x) const = 0;
  virtual bool has_x_star() const { return false; }
  // Throws std::logic_error when has_x_star() is false.
  virtual Vec x_star() const {
    throw std::logic_error("ExactOracle::x_star: not available for this problem");
  }
};

}  // namespace ttsa
