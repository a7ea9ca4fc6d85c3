#pragma once

#include <cstdint>
#include <string>

#include "ttsa/constants.hpp"
#include "ttsa/linalg.hpp"
#include "ttsa/oracle.hpp"
#include "ttsa/projection.hpp"

namespace ttsa {

// Synthetic bilevel family with full analytic ground truth:
//
//   g(x, y) = (1/2) y'Ay - y'(Bx + c),   A symmetric positive definite,
//   f(x, y) = (1/2) x'Rx + d'y,          R symmetric.
//
// Then y*(x) = A^{-1}(Bx + c), l(x) = (1/2) x'Rx + q'x + const with
// q = B'A^{-1}d, and grad l(x) = Rx + q.  Every regularity modulus is
// closed-form: mu_g = lambda_min(A), L_g = lambda_max(A), C_gxy = ||B||,
// C_fy = ||d||, L_fx = ||R||, mu_ell = lambda_min(R); all higher-order
// Lipschitz moduli vanish.
struct QuadraticBilevel {
  Mat A, B, R;
  Vec c, d;
  double noise_level = 0.0;
  Projection X = Projection::all();
  std::string id;

  // Cached analytic quantities.
  Vec q;                  // B'A^{-1} d
  double ell_const = 0.0; // d'A^{-1} c
  Eigen::LLT<Mat> lltA;
  bool has_x_star = false;
  Vec x_star;             // empty when has_x_star is false
  double ell_star = 0.0;  // l(x_star) when available

  ProblemConstants constants;
  DerivedConstants derived;

  Index dim_x() const { return R.rows(); }
  Index dim_y() const { return A.rows(); }

  // Assembles an instance from explicit matrices.  A and R are symmetrized;
  // A must be positive definite with lambda_max(A) >= 1 (the estimator and
  // schedule contracts assume L_g >= 1).  x_star is derived when R allows a
  // feasible minimizer (positive definite, or singular-PSD with the linear
  // term orthogonal to the null space).
  static QuadraticBilevel from_matrices(Mat A, Mat B, Vec c, Mat R, Vec d,
                                        Projection X, double noise);
};

enum class QuadRegime { sc, cvx, wc };
const char* quad_regime_name(QuadRegime r);
QuadRegime quad_regime_from_name(const std::string& name);

// Random instance generator.
//   sc : R spectrum log-spaced in [1, kappa]; X = R^{d1}.
//   cvx: R has one zero eigenvalue, the rest in [1/kappa, 1]; the outer
//        linear term is built orthogonal to the null direction so the
//        pseudo-inverse point -R^+ q is the exact minimizer; X = [-10,10]^{d1}.
//   wc : R has smallest eigenvalue -1, the rest in [1/kappa, 1];
//        X = [-10,10]^{d1}; no x_star (near-stationarity metrics apply).
// A's spectrum is log-spaced in [1, condition_number].  b_norm sets ||B||
// (negative = regime default: 0.15 for sc, 1.0 otherwise; the sc default
// keeps the recipe's burn-in horizon governed by the inner conditioning).
// cvx/wc require d1 >= 2, and cvx additionally d1 <= d2.
QuadraticBilevel make_quadratic(QuadRegime regime, Index d1, Index d2,
                                double condition_number, double noise,
                                std::uint64_t seed, double b_norm = -1.0);

// Additive-Gaussian sampling oracle for a QuadraticBilevel.
//
// Per-call draw order (fixed; replays bit-identically for a given stream):
//   inner gradient : base + sigma * N(0, I_{d2})
//   outer gradients: x-block noise (d1 draws) then y-block noise (d2 draws)
//   Jacobian-apply : sign, then u ~ N(0, I_{d1}), then w ~ N(0, I_{d2});
//                    noise = sigma * s * u (w'v) / sqrt(d1 d2)
//   Hessian-apply  : sign, then w ~ N(0, I_{d2});
//                    noise = sigma * s * w (w'v) / sqrt(d2 (d2+2))
// The matrix perturbations are rank-one with unit Schatten-2 second moment,
// so the configured sigma is exactly the sigma_gxy / Hessian noise modulus
// while each apply stays O(d).
class QuadraticOracle final : public StochasticBilevelOracle {
 public:
  explicit QuadraticOracle(const QuadraticBilevel& p);
  QuadraticOracle(const QuadraticBilevel& p, double noise);

  Index dim_x() const override { return p_->dim_x(); }
  Index dim_y() const override { return p_->dim_y(); }
  Vec sample_inner_grad(const Vec& x, const Vec& y,
                        RngStream& rng) const override;
  std::pair<Vec, Vec> sample_outer_grads(const Vec& x, const Vec& y,
                                         RngStream& rng) const override;
  Vec sample_jacobian_apply(const Vec& x, const Vec& y, const Vec& v,
                            RngStream& rng) const override;
  Vec sample_hessian_apply(const Vec& x, const Vec& y, const Vec& v,
                           RngStream& rng) const override;
  const Projection& projection() const override { return p_->X; }
  const ProblemConstants& constants() const override { return pc_; }

 private:
  const QuadraticBilevel* p_;
  double noise_;
  ProblemConstants pc_;
};

// Population derivatives (noise-free closed forms).
class QuadraticDense final : public DenseBilevelDerivatives {
 public:
  explicit QuadraticDense(const QuadraticBilevel& p) : p_(&p) {}
  Vec grad_fx(const Vec& x, const Vec& y) const override;
  Vec grad_fy(const Vec& x, const Vec& y) const override;
  Vec grad_gy(const Vec& x, const Vec& y) const override;
  Mat jac_gxy(const Vec& x, const Vec& y) const override;
  Mat hess_gyy(const Vec& x, const Vec& y) const override;

 private:
  const QuadraticBilevel* p_;
};

// Analytic ground truth.
class QuadraticExact final : public ExactOracle {
 public:
  explicit QuadraticExact(const QuadraticBilevel& p) : p_(&p) {}
  Vec y_star(const Vec& x) const override;
  double ell(const Vec& x) const override;
  Vec grad_ell(const Vec& x) const override;
  bool has_x_star() const override { return p_->has_x_star; }
  Vec x_star() const override;

 private:
  const QuadraticBilevel* p_;
};

// Oracle bound to the problem's own recorded noise level.
inline QuadraticOracle quadratic_oracles(const QuadraticBilevel& p) {
  return QuadraticOracle(p);
}
// Oracle with an explicit noise level; its constants() reflect that level.
inline QuadraticOracle quadratic_oracles(const QuadraticBilevel& p,
                                         double noise) {
  return QuadraticOracle(p, noise);
}

}  // namespace ttsa
