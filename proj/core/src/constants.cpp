#include "ttsa/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace ttsa {

namespace {

void require_nonneg_finite(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw std::invalid_argument(std::string("ProblemConstants: ") + name +
                                " must be finite and >= 0");
  }
}

}  // namespace

void ProblemConstants::validate() const {
  if (!std::isfinite(mu_g) || mu_g <= 0.0) {
    throw std::invalid_argument("ProblemConstants: mu_g must be > 0");
  }
  if (!std::isfinite(L_g) || L_g < mu_g || L_g < 1.0) {
    throw std::invalid_argument(
        "ProblemConstants: L_g must satisfy L_g >= max(mu_g, 1)");
  }
  require_nonneg_finite(L_fx, "L_fx");
  require_nonneg_finite(L_fy, "L_fy");
  require_nonneg_finite(Lbar_fy, "Lbar_fy");
  require_nonneg_finite(C_fy, "C_fy");
  require_nonneg_finite(L_gxy, "L_gxy");
  require_nonneg_finite(Lbar_gxy, "Lbar_gxy");
  require_nonneg_finite(L_gyy, "L_gyy");
  require_nonneg_finite(Lbar_gyy, "Lbar_gyy");
  require_nonneg_finite(C_gxy, "C_gxy");
  require_nonneg_finite(sigma_g, "sigma_g");
  require_nonneg_finite(sigma_f, "sigma_f");
  require_nonneg_finite(sigma_fx, "sigma_fx");
  require_nonneg_finite(sigma_fy, "sigma_fy");
  require_nonneg_finite(sigma_gxy, "sigma_gxy");
  require_nonneg_finite(C_y, "C_y");
  require_nonneg_finite(C_g, "C_g");
  require_nonneg_finite(b0, "b0");
  if (!std::isfinite(mu_ell)) {
    throw std::invalid_argument("ProblemConstants: mu_ell must be finite");
  }
}

ProblemConstants ProblemConstants::with_defaults() const {
  ProblemConstants pc = *this;
  if (pc.C_y == 0.0) pc.C_y = pc.C_fy;
  return pc;
}

DerivedConstants derive_constants(const ProblemConstants& pc,
                                  double sup_grad_ell_sq) {
  pc.validate();
  if (!std::isfinite(sup_grad_ell_sq) || sup_grad_ell_sq < 0.0) {
    throw std::invalid_argument(
        "derive_constants: sup_grad_ell_sq must be finite and >= 0");
  }
  DerivedConstants dc;
  const double mu = pc.mu_g;
  dc.L = pc.L_fx + pc.L_fy * pc.C_gxy / mu +
         pc.C_fy * (pc.L_gxy / mu + pc.L_gyy * pc.C_gxy / (mu * mu));
  dc.L_f = pc.L_fx + (pc.Lbar_fy + dc.L) * pc.C_gxy / mu +
           pc.C_fy * (pc.Lbar_gxy / mu + pc.Lbar_gyy * pc.C_gxy / (mu * mu));
  dc.L_y = pc.C_gxy / mu;
  dc.sigma_f_tilde_sq = pc.sigma_f * pc.sigma_f + 3.0 * sup_grad_ell_sq;
  return dc;
}

}  // namespace ttsa
