#include "ttsa/moreau.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ttsa {

MoreauResult moreau_prox(const ExactOracle& exact, const Projection& X,
                         const Vec& z, double rho, double mu_ell, double L_f,
                         double tol, long max_iters) {
  if (!(rho + mu_ell > 0.0)) {
    throw std::invalid_argument(
        "moreau_prox: requires rho > -mu_ell (strongly convex subproblem)");
  }
  if (tol <= 0.0) throw std::invalid_argument("moreau_prox: tol must be > 0");
  const double step = 1.0 / (L_f + rho);

  Vec x = X(z);
  for (long it = 0; it < max_iters; ++it) {
    const Vec grad = exact.grad_ell(x) + rho * (x - z);
    // Unit-step gradient mapping as the stationarity residual.
    const double residual = (x - X(x - grad)).norm();
    if (residual <= tol) {
      MoreauResult r;
      r.x_hat = std::move(x);
      r.envelope = exact.ell(r.x_hat) + 0.5 * rho * (r.x_hat - z).squaredNorm();
      r.iters = it;
      return r;
    }
    x = X(x - step * grad);
  }
  std::ostringstream os;
  os << "moreau_prox: no convergence within " << max_iters
     << " iterations (tol=" << tol << ")";
  throw std::runtime_error(os.str());
}

std::vector<double> near_stationarity_series(const RunTrace& trace,
                                             const ExactOracle& exact,
                                             const Projection& X, double rho,
                                             double mu_ell, double L_f,
                                             double tol) {
  if (trace.x_iterates.empty()) {
    throw std::invalid_argument(
        "near_stationarity_series: trace lacks stored x iterates "
        "(set store_x_iterates)");
  }
  const double rho_eff = rho > 0.0 ? rho : 2.0 * std::abs(mu_ell);
  std::vector<double> out;
  out.reserve(trace.x_iterates.size());
  for (const Vec& x : trace.x_iterates) {
    const MoreauResult r = moreau_prox(exact, X, x, rho_eff, mu_ell, L_f, tol);
    out.push_back((r.x_hat - x).squaredNorm());
  }
  return out;
}

}  // namespace ttsa
