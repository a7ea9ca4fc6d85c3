#pragma once

#include <vector>

#include "ttsa/linalg.hpp"
#include "ttsa/oracle.hpp"
#include "ttsa/projection.hpp"
#include "ttsa/ttsa_loop.hpp"

namespace ttsa {

struct MoreauResult {
  Vec x_hat;          // proximal point argmin_{x in X} l(x) + (rho/2)||x-z||^2
  double envelope;    // objective value at x_hat
  long iters = 0;
};

// Proximal map / envelope of the outer objective at z, solved by projected
// gradient with step 1/(L_f + rho) until the unit-step gradient-mapping
// residual ||x - P_X(x - grad)|| drops below tol.
//
// Requires rho + mu_ell > 0 (the subproblem is then strongly convex).  Throws
// std::runtime_error on non-convergence within max_iters.  This is a
// measurement tool: it is deterministic and uses exact gradients only.
MoreauResult moreau_prox(const ExactOracle& exact, const Projection& X,
                         const Vec& z, double rho, double mu_ell, double L_f,
                         double tol = 1e-10, long max_iters = 1000000);

// Squared proximal-point displacement ||x_hat(x^k) - x^k||^2 for every stored
// x iterate of the trace (requires store_x_iterates to have been set).
// rho <= 0 selects the default 2|mu_ell|.
std::vector<double> near_stationarity_series(const RunTrace& trace,
                                             const ExactOracle& exact,
                                             const Projection& X, double rho,
                                             double mu_ell, double L_f,
                                             double tol = 1e-10);

}  // namespace ttsa
