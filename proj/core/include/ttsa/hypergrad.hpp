#pragma once

#include "ttsa/constants.hpp"
#include "ttsa/linalg.hpp"
#include "ttsa/oracle.hpp"
#include "ttsa/rng.hpp"

namespace ttsa {

struct HypergradSample {
  Vec value;      // estimator output, dim_x
  int p = 0;      // drawn series length (number of product factors)
  int draws = 0;  // oracle sample realizations consumed (2 + p)
};

// Truncated inverse-series hypergradient estimator, matrix-free.
//
// With one shared outer draw xi giving (hx, hy) = (grad_x f, grad_y f)(xi),
// a cross-derivative draw J0, fresh inner-Hessian draws H_1..H_p, a damping
// weight c_h and truncation level tmax >= 1, the estimator with drawn
// p ~ Uniform{0, ..., tmax-1} is
//
//   h = hx - J0 * [ (tmax c_h / L_g) * prod_{i=1..p} (I - (c_h/L_g) H_i) ] * hy,
//
// evaluated right-to-left so only Hessian-vector products are needed.  The
// empty product (p = 0) is the identity.  Draw order per call: p, outer pair,
// then for i = p..1 one Hessian draw each (right-to-left), then the
// cross-derivative draw.  Expected oracle cost is 2 + (tmax-1)/2 samples.
HypergradSample neumann_hypergradient(const StochasticBilevelOracle& oracle,
                                      const Vec& x, const Vec& y, int tmax,
                                      double c_h, RngStream& rng);

// Same estimator with the series length p fixed by the caller (0 <= p <
// tmax).  Exposed so tests can enumerate the mixture components.
HypergradSample neumann_hypergradient_at_p(const StochasticBilevelOracle& oracle,
                                           const Vec& x, const Vec& y, int tmax,
                                           double c_h, int p, RngStream& rng);

// Population gradient surrogate grad_x f - Jxy * Hyy^{-1} * grad_y f at
// (x, y), via a dense solve.  Throws std::invalid_argument if the inner
// Hessian is singular to working precision.
Vec surrogate_gradient_exact(const DenseBilevelDerivatives& d, const Vec& x,
                             const Vec& y);

// Closed-form certificate bounds for the estimator at truncation tmax.
// Bias: C_gxy C_fy / mu_g * (1 - mu_g^2 / (L_g (mu_g^2 + sigma_gxy^2)))^tmax.
double hypergrad_bias_bound(const ProblemConstants& pc, int tmax);

// Second-moment (variance) bound.  The closed form scales with one of the
// two problem dimensions; both readings are reported (`as_printed` uses the
// outer dimension d1, `dim_swapped` the inner dimension d2) and certification
// checks against `as_printed`.
struct VarianceBound {
  double as_printed = 0.0;
  double dim_swapped = 0.0;
};
VarianceBound hypergrad_variance_bound(const ProblemConstants& pc, Index d1,
                                       Index d2);

// Monte-Carlo certification of the estimator against its closed-form bias
// and variance bounds at one anchor point (x, y).  Requires n_samples >= 100.
struct BiasVarianceReport {
  double empirical_bias = 0.0;       // || mean(h) - surrogate ||
  double bias_bound = 0.0;           // closed-form bound
  double bias_ci = 0.0;              // 4-sigma halfwidth on ||mean - target||
  double empirical_variance = 0.0;   // mean ||h - mean(h)||^2
  double variance_bound = 0.0;       // closed-form bound (as printed)
  double variance_bound_alt = 0.0;   // dimension-swapped variant
  double variance_ci = 0.0;          // 4-sigma halfwidth on the variance mean
  long n_samples = 0;
  bool bias_ok = false;              // empirical_bias <= bias_bound + bias_ci
  bool variance_ok = false;          // empirical_variance <= variance_bound + variance_ci
};
BiasVarianceReport certify_bias_variance(const StochasticBilevelOracle& oracle,
                                         const DenseBilevelDerivatives& dense,
                                         const Vec& x, const Vec& y, int tmax,
                                         double c_h, long n_samples,
                                         RngStream& rng);

// Monte-Carlo check of the random-matrix-product contraction: for symmetric
// noise draws H_i = mu I + sigma W_i (E W = 0, E||W||_2^2 <= 1, scaled so the
// squared Schatten-2 norm of the product contracts), verifies
//   E || prod_{i=1..t} (I - H_i) ||_2^2 <= d ((1-mu)^2 + sigma^2)^t.
// Requires 0 < mu <= 1 and (1-mu)^2 + sigma^2 < 1.
struct MatrixProductReport {
  double empirical = 0.0;
  double bound = 0.0;
  double ci = 0.0;  // 4-sigma halfwidth
  long n_trials = 0;
  bool ok = false;
};
MatrixProductReport matrix_product_norm_check(double mu, double sigma, Index d,
                                              int t, long n_trials,
                                              RngStream& rng);

}  // namespace ttsa
