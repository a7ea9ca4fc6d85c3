#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "ttsa/oracle.hpp"

namespace ttsa {

// Data hyper-cleaning: learn per-sample weights x on a label-corrupted
// training set so that the inner ridge-regularized, weighted logistic
// regression generalizes to a clean validation set,
//
//   min_x  l(x) = sum_{i in val} L(a_i' y*(x), b_i)
//   s.t.   y*(x) = argmin_y  lambda ||y||^2
//                            + sum_{i in tr} sigmoid(x_i) L(a_i' y, b_i),
//
// with L the logistic (cross-entropy) loss and one weight per training
// sample, so dim_x = n_train.  Objectives are raw sums (not means).
struct HyperCleanProblem {
  Mat A_tr;        // n_train x d2, one feature row per training sample
  Vec b_tr;        // training labels in {0,1}, after corruption
  Vec b_tr_clean;  // labels before corruption (diagnostics only)
  Mat A_val;       // n_val x d2
  Vec b_val;       // validation labels in {0,1}
  double lambda = 1e-3;
  double corruption_p = 0.0;
  std::uint64_t seed = 0;
  std::string id;

  Index n_train() const { return A_tr.rows(); }
  Index n_val() const { return A_val.rows(); }
  Index dim_x() const { return A_tr.rows(); }
  Index dim_y() const { return A_tr.cols(); }

  // Full-batch (population) values and derivatives.
  double inner_value(const Vec& x, const Vec& y) const;
  Vec inner_grad_y(const Vec& x, const Vec& y) const;
  Mat inner_hessian_yy(const Vec& x, const Vec& y) const;
  // d^2 g / dx dy as an n_train x d2 matrix; row i is
  // sigmoid'(x_i) L'(a_i' y, b_i) a_i'.
  Mat cross_jacobian(const Vec& x, const Vec& y) const;
  double outer_value(const Vec& y) const;  // validation loss sum
  Vec outer_grad_y(const Vec& y) const;

  // Inner minimizer by damped Newton (the inner problem is smooth and
  // 2*lambda-strongly convex, so this converges globally).  Throws
  // std::runtime_error if the gradient-norm tolerance is not reached.
  Vec y_star(const Vec& x, double tol = 1e-11, int max_iters = 200) const;
  double ell(const Vec& x) const;  // outer_value(y_star(x))
  // Dense implicit gradient at y*(x): since grad_x f = 0 this is
  // -J(x, y*) [H(x, y*)]^{-1} grad_y f(y*).
  Vec grad_ell(const Vec& x) const;

  // Fraction of validation samples misclassified by the thresholded
  // classifier sign(a_i' y).
  double validation_error(const Vec& y) const;

  // Conservative regularity/noise moduli for with-replacement minibatch
  // oracles of the given sizes: mu_g = 2*lambda exactly; the rest are upper
  // bounds from |L'| <= 1, L'' <= 1/4, sigmoid' <= 1/4 and raw-sum scaling.
  // Outer curvature is not certified for this problem; mu_ell is reported
  // as 0 and downstream near-stationarity is qualitative only.
  ProblemConstants constants(Index inner_batch, Index outer_batch) const;
};

// Synthetic two-class Gaussian-blob dataset with a planted separator; each
// training label is flipped independently with probability corruption_p.
// Requires n_train, n_val >= 10, d2 >= 1, 0 <= corruption_p < 1, lambda > 0.
// Throws std::invalid_argument on violations or if either split ends up with
// all samples in one class.
HyperCleanProblem make_hyperclean(Index n_train, Index n_val, Index d2,
                                  double corruption_p, double lambda,
                                  std::uint64_t seed);

// Loads a CSV dataset (header "label,f0,f1,..."; labels in {0,1}), shuffles
// it with the seed, holds out n_val rows for validation, and corrupts the
// remaining training labels with probability corruption_p.  Same
// admissibility checks as the generator.
HyperCleanProblem make_hyperclean_csv(const std::string& path, Index n_val,
                                      double corruption_p, double lambda,
                                      std::uint64_t seed);

// With-replacement minibatch sampling oracle.  Every estimate rescales the
// batch sum by n/batch so it is unbiased for the population sum; the outer
// pair shares one validation batch (grad_x f is identically zero).
class HypercleanOracle final : public StochasticBilevelOracle {
 public:
  HypercleanOracle(const HyperCleanProblem& problem, Index inner_batch,
                   Index outer_batch);

  Index dim_x() const override { return problem_.dim_x(); }
  Index dim_y() const override { return problem_.dim_y(); }
  Vec sample_inner_grad(const Vec& x, const Vec& y,
                        RngStream& rng) const override;
  std::pair<Vec, Vec> sample_outer_grads(const Vec& x, const Vec& y,
                                         RngStream& rng) const override;
  Vec sample_jacobian_apply(const Vec& x, const Vec& y, const Vec& v,
                            RngStream& rng) const override;
  Vec sample_hessian_apply(const Vec& x, const Vec& y, const Vec& v,
                           RngStream& rng) const override;
  const Projection& projection() const override { return projection_; }
  const ProblemConstants& constants() const override { return pc_; }

 private:
  HyperCleanProblem problem_;
  Index inner_batch_;
  Index outer_batch_;
  Projection projection_;
  ProblemConstants pc_;
};

// Full-batch dense derivatives (for finite-difference verification).
class HypercleanDense final : public DenseBilevelDerivatives {
 public:
  explicit HypercleanDense(const HyperCleanProblem& problem)
      : problem_(problem) {}
  Vec grad_fx(const Vec& x, const Vec& y) const override;
  Vec grad_fy(const Vec& x, const Vec& y) const override;
  Vec grad_gy(const Vec& x, const Vec& y) const override;
  Mat jac_gxy(const Vec& x, const Vec& y) const override;
  Mat hess_gyy(const Vec& x, const Vec& y) const override;

 private:
  HyperCleanProblem problem_;
};

// Newton-based ground truth: y*(x) to solver tolerance, l and its implicit
// gradient.  No optimal x is available for this problem.
class HypercleanExact final : public ExactOracle {
 public:
  explicit HypercleanExact(const HyperCleanProblem& problem)
      : problem_(problem) {}
  Vec y_star(const Vec& x) const override { return problem_.y_star(x); }
  double ell(const Vec& x) const override { return problem_.ell(x); }
  Vec grad_ell(const Vec& x) const override { return problem_.grad_ell(x); }

 private:
  HyperCleanProblem problem_;
};

inline std::unique_ptr<StochasticBilevelOracle> hyperclean_oracles(
    const HyperCleanProblem& problem, Index inner_batch, Index outer_batch) {
  return std::make_unique<HypercleanOracle>(problem, inner_batch, outer_batch);
}

}  // namespace ttsa
