#include "ttsa/hypergrad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ttsa {

HypergradSample neumann_hypergradient_at_p(const StochasticBilevelOracle& oracle,
                                           const Vec& x, const Vec& y, int tmax,
                                           double c_h, int p, RngStream& rng) {
  if (tmax < 1) {
    throw std::invalid_argument("neumann_hypergradient: tmax must be >= 1");
  }
  if (p < 0 || p >= tmax) {
    throw std::invalid_argument("neumann_hypergradient: requires 0 <= p < tmax");
  }
  if (!(c_h > 0.0 && c_h <= 1.0)) {
    throw std::invalid_argument(
        "neumann_hypergradient: c_h must lie in (0, 1]");
  }
  require_size(x, oracle.dim_x(), "neumann_hypergradient: x");
  require_size(y, oracle.dim_y(), "neumann_hypergradient: y");

  const double L_g = oracle.constants().L_g;
  const double scale = c_h / L_g;

  auto [hx, hy] = oracle.sample_outer_grads(x, y, rng);

  // Right-to-left application: v <- (I - scale * H_i) v, so each series term
  // costs one Hessian-vector draw and no matrix is ever materialized.
  Vec v = std::move(hy);
  for (int i = 0; i < p; ++i) {
    v -= scale * oracle.sample_hessian_apply(x, y, v, rng);
  }
  v *= static_cast<double>(tmax) * scale;

  HypergradSample s;
  s.value = hx - oracle.sample_jacobian_apply(x, y, v, rng);
  require_finite(s.value, "neumann_hypergradient: estimate");
  s.p = p;
  s.draws = 2 + p;
  return s;
}

HypergradSample neumann_hypergradient(const StochasticBilevelOracle& oracle,
                                      const Vec& x, const Vec& y, int tmax,
                                      double c_h, RngStream& rng) {
  if (tmax < 1) {
    throw std::invalid_argument("neumann_hypergradient: tmax must be >= 1");
  }
  const int p = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(tmax)));
  return neumann_hypergradient_at_p(oracle, x, y, tmax, c_h, p, rng);
}

Vec surrogate_gradient_exact(const DenseBilevelDerivatives& d, const Vec& x,
                             const Vec& y) {
  const Mat H = d.hess_gyy(x, y);
  Eigen::FullPivLU<Mat> lu(H);
  if (!lu.isInvertible()) {
    throw std::invalid_argument(
        "surrogate_gradient_exact: inner Hessian is singular");
  }
  return d.grad_fx(x, y) - d.jac_gxy(x, y) * lu.solve(d.grad_fy(x, y));
}

double hypergrad_bias_bound(const ProblemConstants& pc_in, int tmax) {
  if (tmax < 1) {
    throw std::invalid_argument("hypergrad_bias_bound: tmax must be >= 1");
  }
  const ProblemConstants pc = pc_in.with_defaults();
  pc.validate();
  const double mu2 = pc.mu_g * pc.mu_g;
  const double contraction =
      1.0 - mu2 / (pc.L_g * (mu2 + pc.sigma_gxy * pc.sigma_gxy));
  return pc.C_gxy * pc.C_fy / pc.mu_g * std::pow(contraction, tmax);
}

VarianceBound hypergrad_variance_bound(const ProblemConstants& pc_in, Index d1,
                                       Index d2) {
  if (d1 < 1 || d2 < 1) {
    throw std::invalid_argument("hypergrad_variance_bound: dims must be >= 1");
  }
  const ProblemConstants pc = pc_in.with_defaults();
  pc.validate();
  const double mu2 = pc.mu_g * pc.mu_g;
  const double denom = pc.L_g * (mu2 + pc.sigma_gxy * pc.sigma_gxy);
  const double couple =
      (pc.sigma_fy * pc.sigma_fy + pc.C_y * pc.C_y) *
          (pc.sigma_gxy * pc.sigma_gxy + 2.0 * pc.C_gxy * pc.C_gxy) +
      pc.sigma_fy * pc.sigma_fy * pc.C_gxy * pc.C_gxy;
  VarianceBound b;
  b.as_printed = pc.sigma_fx * pc.sigma_fx +
                 couple * std::max(3.0 / mu2,
                                   3.0 * static_cast<double>(d1) / denom);
  b.dim_swapped = pc.sigma_fx * pc.sigma_fx +
                  couple * std::max(3.0 / mu2,
                                    3.0 * static_cast<double>(d2) / denom);
  return b;
}

BiasVarianceReport certify_bias_variance(const StochasticBilevelOracle& oracle,
                                         const DenseBilevelDerivatives& dense,
                                         const Vec& x, const Vec& y, int tmax,
                                         double c_h, long n_samples,
                                         RngStream& rng) {
  if (n_samples < 100) {
    throw std::invalid_argument(
        "certify_bias_variance: n_samples must be >= 100");
  }
  const Vec target = surrogate_gradient_exact(dense, x, y);
  const Index d = oracle.dim_x();

  Mat samples(d, n_samples);
  for (long i = 0; i < n_samples; ++i) {
    samples.col(i) =
        neumann_hypergradient(oracle, x, y, tmax, c_h, rng).value;
  }
  const Vec mean = samples.rowwise().mean();

  double var_sum = 0.0, var_sq_sum = 0.0;
  for (long i = 0; i < n_samples; ++i) {
    const double s = (samples.col(i) - mean).squaredNorm();
    var_sum += s;
    var_sq_sum += s * s;
  }
  const double n = static_cast<double>(n_samples);
  const double var_mean = var_sum / n;
  const double var_std =
      std::sqrt(std::max(0.0, var_sq_sum / n - var_mean * var_mean));

  BiasVarianceReport r;
  r.n_samples = n_samples;
  r.empirical_bias = (mean - target).norm();
  r.bias_bound = hypergrad_bias_bound(oracle.constants(), tmax);
  r.bias_ci = 4.0 * std::sqrt(var_mean / n);
  r.empirical_variance = var_mean;
  const VarianceBound vb =
      hypergrad_variance_bound(oracle.constants(), oracle.dim_x(), oracle.dim_y());
  r.variance_bound = vb.as_printed;
  r.variance_bound_alt = vb.dim_swapped;
  r.variance_ci = 4.0 * var_std / std::sqrt(n);
  r.bias_ok = r.empirical_bias <= r.bias_bound + r.bias_ci;
  r.variance_ok = r.empirical_variance <= r.variance_bound + r.variance_ci;
  return r;
}

MatrixProductReport matrix_product_norm_check(double mu, double sigma, Index d,
                                              int t, long n_trials,
                                              RngStream& rng) {
  if (!(mu > 0.0 && mu <= 1.0)) {
    throw std::invalid_argument(
        "matrix_product_norm_check: requires 0 < mu <= 1");
  }
  const double rate = (1.0 - mu) * (1.0 - mu) + sigma * sigma;
  if (!(rate < 1.0)) {
    throw std::invalid_argument(
        "matrix_product_norm_check: requires (1-mu)^2 + sigma^2 < 1");
  }
  if (d < 1 || t < 1 || n_trials < 2) {
    throw std::invalid_argument(
        "matrix_product_norm_check: d >= 1, t >= 1, n_trials >= 2");
  }
  // Symmetric gaussian noise normalized to unit squared Schatten-2 second
  // moment: E||(G + G^T)/2||_2^2 = d(d+1)/2 for G with iid N(0,1) entries.
  const double wscale = 1.0 / std::sqrt(static_cast<double>(d) *
                                        (static_cast<double>(d) + 1.0) / 2.0);
  double sum = 0.0, sq_sum = 0.0;
  Mat G(d, d), Z(d, d);
  for (long trial = 0; trial < n_trials; ++trial) {
    Z.setIdentity();
    for (int i = 0; i < t; ++i) {
      for (Index r = 0; r < d; ++r)
        for (Index c = 0; c < d; ++c) G(r, c) = rng.next_gaussian();
      const Mat W = 0.5 * (G + G.transpose()) * wscale;
      Z = ((1.0 - mu) * Mat::Identity(d, d) - sigma * W) * Z;
    }
    const double s = Z.squaredNorm();
    sum += s;
    sq_sum += s * s;
  }
  const double n = static_cast<double>(n_trials);
  const double mean = sum / n;
  const double sd = std::sqrt(std::max(0.0, sq_sum / n - mean * mean));
  MatrixProductReport r;
  r.empirical = mean;
  r.bound = static_cast<double>(d) * std::pow(rate, t);
  r.ci = 4.0 * sd / std::sqrt(n);
  r.n_trials = n_trials;
  r.ok = r.empirical <= r.bound + r.ci;
  return r;
}

}  // namespace ttsa
