#pragma once

#include <string>

namespace ttsa {

// Regularity moduli of a stochastic bilevel problem
//
//     min_{x in X}  l(x) = f(x, y*(x))   s.t.   y*(x) = argmin_y g(x, y),
//
// with g strongly convex in y.  Any field may be a conservative (larger)
// upper bound of the true modulus; downstream step-size recipes and
// bias/variance certificates remain valid under over-reporting, only looser.
struct ProblemConstants {
  // Outer function f.
  double L_fx = 0.0;     // Lipschitz modulus of grad_x f in (x, y)
  double L_fy = 0.0;     // Lipschitz modulus of grad_y f in x
  double Lbar_fy = 0.0;  // Lipschitz modulus of grad_y f in y
  double C_fy = 0.0;     // sup ||grad_y f||

  // Inner function g.
  double mu_g = 1.0;     // strong-convexity modulus in y (> 0)
  double L_g = 1.0;      // Lipschitz modulus of grad_y g (>= max(mu_g, 1))
  double L_gxy = 0.0;    // Lipschitz modulus of the cross second derivative in x
  double Lbar_gxy = 0.0; // ... in y
  double L_gyy = 0.0;    // Lipschitz modulus of the y,y second derivative in x
  double Lbar_gyy = 0.0; // ... in y
  double C_gxy = 0.0;    // sup ||cross second derivative|| (operator norm)

  // Outer objective curvature: mu_ell > 0 strongly convex, = 0 convex,
  // < 0 weakly convex (then |mu_ell| is the weak-convexity modulus).
  double mu_ell = 0.0;

  // Noise second moments of the sampling oracles.  sigma_g enters the inner
  // gradient through the multiplicative contract
  //   E||h_g - grad_y g||^2 <= sigma_g^2 (1 + ||grad_y g||^2);
  // the rest are plain second-moment bounds.
  double sigma_g = 0.0;
  double sigma_f = 0.0;    // second moment bound for the assembled outer estimator
  double sigma_fx = 0.0;   // grad_x f sample noise
  double sigma_fy = 0.0;   // grad_y f sample noise
  double sigma_gxy = 0.0;  // cross-derivative sample noise (Schatten-2)

  // Norm bounds used by the variance certificate.
  double C_y = 0.0;  // sup ||grad_y f|| along sampled paths (defaults to C_fy)
  double C_g = 0.0;  // second-moment bound on sampled cross-derivative norm

  // Estimator bias at the initial truncation level (diagnostic; convention:
  // the series-tail bound evaluated at one inverse-series term).
  double b0 = 0.0;

  // Throws std::invalid_argument naming the violated condition.  Checked
  // invariants: mu_g > 0; L_g >= max(mu_g, 1); all moduli and noise levels
  // finite and non-negative (mu_ell may be negative); C_y/C_fy consistent.
  void validate() const;

  // Returns a copy with C_y defaulted to C_fy when unset.
  ProblemConstants with_defaults() const;
};

// Quantities derived from ProblemConstants that drive step-size recipes and
// convergence certificates.
struct DerivedConstants {
  double L = 0.0;        // Lipschitz modulus of the gradient surrogate in y
  double L_f = 0.0;      // smoothness modulus of l
  double L_y = 0.0;      // Lipschitz modulus of x -> y*(x)
  double sigma_f_tilde_sq = 0.0;  // effective outer noise: sigma_f^2 + 3 sup||grad l||^2
};

// sup_grad_ell_sq is a bound on sup_{x in X} ||grad l(x)||^2 (a conservative
// surrogate is fine; see the problem constructors for the conventions used).
DerivedConstants derive_constants(const ProblemConstants& pc,
                                  double sup_grad_ell_sq);

}  // namespace ttsa
