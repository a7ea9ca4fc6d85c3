#include "ttsa/quadratic.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "ttsa/hypergrad.hpp"

namespace ttsa {

namespace {

Mat random_orthogonal(Index d, RngStream& rng) {
  Mat G(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) G(i, j) = rng.next_gaussian();
  Eigen::HouseholderQR<Mat> qr(G);
  return qr.householderQ() * Mat::Identity(d, d);
}

Vec log_spaced(Index n, double lo, double hi) {
  Vec v(n);
  if (n == 1) {
    v(0) = lo;
    return v;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (Index i = 0; i < n; ++i) {
    v(i) = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                              static_cast<double>(n - 1));
  }
  return v;
}

Vec lin_spaced(Index n, double lo, double hi) {
  Vec v(n);
  if (n == 1) {
    v(0) = hi;
    return v;
  }
  for (Index i = 0; i < n; ++i) {
    v(i) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

// Fills the noise-dependent constant fields for additive level `noise`.
void apply_noise_levels(ProblemConstants& pc, double noise, Index d1, Index d2) {
  pc.sigma_g = noise * std::sqrt(static_cast<double>(d2));
  pc.sigma_fx = noise * std::sqrt(static_cast<double>(d1));
  pc.sigma_fy = noise * std::sqrt(static_cast<double>(d2));
  pc.sigma_gxy = noise;
  pc.b0 = hypergrad_bias_bound(pc, 1);
  pc.sigma_f = std::sqrt(hypergrad_variance_bound(pc, d1, d2).as_printed);
}

}  // namespace

const char* quad_regime_name(QuadRegime r) {
  switch (r) {
    case QuadRegime::sc: return "sc";
    case QuadRegime::cvx: return "cvx";
    case QuadRegime::wc: return "wc";
  }
  return "unknown";
}

QuadRegime quad_regime_from_name(const std::string& name) {
  if (name == "sc") return QuadRegime::sc;
  if (name == "cvx" || name == "convex") return QuadRegime::cvx;
  if (name == "wc" || name == "weakly-convex") return QuadRegime::wc;
  throw std::invalid_argument("quad_regime_from_name: unknown regime '" + name +
                              "'");
}

QuadraticBilevel QuadraticBilevel::from_matrices(Mat A, Mat B, Vec c, Mat R,
                                                 Vec d, Projection X,
                                                 double noise) {
  const Index d2 = A.rows();
  const Index d1 = R.rows();
  if (A.cols() != d2 || R.cols() != d1) {
    throw std::invalid_argument("QuadraticBilevel: A and R must be square");
  }
  if (B.rows() != d2 || B.cols() != d1) {
    throw std::invalid_argument("QuadraticBilevel: B must be dim_y x dim_x");
  }
  require_size(c, d2, "QuadraticBilevel: c");
  require_size(d, d2, "QuadraticBilevel: d");
  if (!X.is_identity() && X.dim() != d1) {
    throw std::invalid_argument("QuadraticBilevel: X dimension mismatch");
  }
  if (noise < 0.0 || !std::isfinite(noise)) {
    throw std::invalid_argument("QuadraticBilevel: noise must be finite, >= 0");
  }

  QuadraticBilevel p;
  p.A = 0.5 * (A + A.transpose());
  p.R = 0.5 * (R + R.transpose());
  p.B = std::move(B);
  p.c = std::move(c);
  p.d = std::move(d);
  p.noise_level = noise;
  p.X = std::move(X);

  Eigen::SelfAdjointEigenSolver<Mat> esA(p.A);
  const double mu_g = esA.eigenvalues().minCoeff();
  const double L_g = esA.eigenvalues().maxCoeff();
  if (mu_g <= 0.0) {
    throw std::invalid_argument(
        "QuadraticBilevel: inner Hessian A must be positive definite");
  }
  if (L_g < 1.0) {
    throw std::invalid_argument(
        "QuadraticBilevel: requires lambda_max(A) >= 1 (L_g >= 1 contract)");
  }
  p.lltA.compute(p.A);

  p.q = p.B.transpose() * p.lltA.solve(p.d);
  p.ell_const = p.d.dot(p.lltA.solve(p.c));

  // Minimizer of l over X, when the closed form applies.
  Eigen::SelfAdjointEigenSolver<Mat> esR(p.R);
  const Vec lam = esR.eigenvalues();
  const Mat V = esR.eigenvectors();
  const double lam_max = lam.maxCoeff();
  const double zero_tol = 1e-12 * std::max(1.0, std::abs(lam_max));
  if (lam.minCoeff() >= -zero_tol) {
    bool solvable = true;
    Vec xs = Vec::Zero(d1);
    for (Index i = 0; i < d1; ++i) {
      const double proj = V.col(i).dot(p.q);
      if (lam(i) > zero_tol) {
        xs -= V.col(i) * (proj / lam(i));
      } else if (std::abs(proj) > 1e-10 * std::max(1.0, p.q.norm())) {
        solvable = false;  // objective decreases linearly along a flat direction
        break;
      }
    }
    if (solvable && p.X.contains(xs, 1e-9)) {
      p.has_x_star = true;
      p.x_star = xs;
    }
  }

  ProblemConstants pc;
  pc.mu_g = mu_g;
  pc.L_g = L_g;
  pc.C_gxy = spectral_norm(p.B);
  pc.C_fy = p.d.norm();
  pc.C_y = p.d.norm();
  pc.L_fx = std::max(std::abs(lam.maxCoeff()), std::abs(lam.minCoeff()));
  pc.mu_ell = lam.minCoeff();
  pc.C_g = std::sqrt(p.B.squaredNorm() + noise * noise);
  apply_noise_levels(pc, noise, d1, d2);
  pc.validate();
  p.constants = pc;

  // Reference bound on sup ||grad l||: over X when bounded, otherwise over a
  // ball around the minimizer (radius max(1, 2||x*||)) or the unit ball at
  // the origin as a fallback.
  const double Rn = pc.L_fx;
  double sup_grad;
  const double sup_x = p.X.sup_norm_bound();
  if (std::isfinite(sup_x)) {
    sup_grad = Rn * sup_x + p.q.norm();
  } else if (p.has_x_star) {
    sup_grad = Rn * std::max(1.0, 2.0 * p.x_star.norm()) + p.q.norm();
  } else {
    sup_grad = Rn + p.q.norm();
  }
  p.derived = derive_constants(pc, sup_grad * sup_grad);

  if (p.has_x_star) {
    p.ell_star = 0.5 * p.x_star.dot(p.R * p.x_star) + p.q.dot(p.x_star) +
                 p.ell_const;
  }
  p.id = "quad-custom";
  return p;
}

QuadraticBilevel make_quadratic(QuadRegime regime, Index d1, Index d2,
                                double condition_number, double noise,
                                std::uint64_t seed, double b_norm) {
  if (d1 < 1 || d2 < 1) {
    throw std::invalid_argument("make_quadratic: dimensions must be >= 1");
  }
  if (condition_number < 1.0) {
    throw std::invalid_argument(
        "make_quadratic: condition_number must be >= 1");
  }
  if (noise < 0.0) {
    throw std::invalid_argument("make_quadratic: noise must be >= 0");
  }
  if ((regime == QuadRegime::cvx || regime == QuadRegime::wc) && d1 < 2) {
    throw std::invalid_argument(
        "make_quadratic: cvx/wc regimes require d1 >= 2");
  }
  if (regime == QuadRegime::cvx && d1 > d2) {
    throw std::invalid_argument(
        "make_quadratic: cvx regime requires d1 <= d2 (full-rank coupling "
        "pins the minimizer)");
  }
  if (b_norm <= 0.0) b_norm = (regime == QuadRegime::sc) ? 0.15 : 1.0;

  RngStream rng(seed);

  // Inner Hessian with log-spaced spectrum in [1, kappa].
  const Mat VA = random_orthogonal(d2, rng);
  const Vec lamA = log_spaced(d2, 1.0, condition_number);
  const Mat A = VA * lamA.asDiagonal() * VA.transpose();

  Mat B(d2, d1);
  for (Index i = 0; i < d2; ++i)
    for (Index j = 0; j < d1; ++j) B(i, j) = rng.next_gaussian();
  B *= b_norm / spectral_norm(B);

  Vec c = rng.gaussian_vec(d2);
  c /= c.norm();

  // Outer curvature per regime; the first eigen-direction carries the
  // regime's distinguished eigenvalue.
  const Mat VR = random_orthogonal(d1, rng);
  Vec lamR(d1);
  switch (regime) {
    case QuadRegime::sc:
      lamR = log_spaced(d1, 1.0, condition_number);
      break;
    case QuadRegime::cvx:
      lamR(0) = 0.0;
      lamR.tail(d1 - 1) = lin_spaced(d1 - 1, 1.0 / condition_number, 1.0);
      break;
    case QuadRegime::wc:
      lamR(0) = -1.0;
      lamR.tail(d1 - 1) = lin_spaced(d1 - 1, 1.0 / condition_number, 1.0);
      break;
  }
  const Mat R = VR * lamR.asDiagonal() * VR.transpose();

  Vec d(d2);
  if (regime == QuadRegime::cvx) {
    // Build the outer linear term so q = B'A^{-1}d is orthogonal to the flat
    // direction of R: the pseudo-inverse point is then the exact minimizer.
    Vec g = rng.gaussian_vec(d1);
    Vec qt = g - VR.col(0) * VR.col(0).dot(g);
    if (qt.norm() < 1e-8) qt = VR.col(1);
    qt /= qt.norm();
    Vec xs = Vec::Zero(d1);
    for (Index i = 1; i < d1; ++i) {
      xs -= VR.col(i) * (VR.col(i).dot(qt) / lamR(i));
    }
    const double reach = xs.lpNorm<Eigen::Infinity>();
    if (reach > 8.0) qt *= 8.0 / reach;  // keep the minimizer inside the box
    const Mat BtB = B.transpose() * B;
    d = A * (B * BtB.ldlt().solve(qt));
  } else {
    d = rng.gaussian_vec(d2);
    d /= d.norm();
  }

  Projection X = (regime == QuadRegime::sc)
                     ? Projection::all()
                     : Projection::box_uniform(d1, -10.0, 10.0);

  QuadraticBilevel p = QuadraticBilevel::from_matrices(A, B, c, R, d,
                                                       std::move(X), noise);
  p.id = std::string("quad-") + quad_regime_name(regime) + "-" +
         std::to_string(d1) + "x" + std::to_string(d2) + "-s" +
         std::to_string(seed);
  return p;
}

QuadraticOracle::QuadraticOracle(const QuadraticBilevel& p)
    : QuadraticOracle(p, p.noise_level) {}

QuadraticOracle::QuadraticOracle(const QuadraticBilevel& p, double noise)
    : p_(&p), noise_(noise) {
  if (noise < 0.0 || !std::isfinite(noise)) {
    throw std::invalid_argument("QuadraticOracle: noise must be finite, >= 0");
  }
  pc_ = p.constants;
  pc_.C_g = std::sqrt(p.B.squaredNorm() + noise * noise);
  apply_noise_levels(pc_, noise, p.dim_x(), p.dim_y());
}

Vec QuadraticOracle::sample_inner_grad(const Vec& x, const Vec& y,
                                       RngStream& rng) const {
  require_size(x, dim_x(), "QuadraticOracle: x");
  require_size(y, dim_y(), "QuadraticOracle: y");
  Vec g = p_->A * y - p_->B * x - p_->c;
  if (noise_ > 0.0) g += noise_ * rng.gaussian_vec(dim_y());
  return g;
}

std::pair<Vec, Vec> QuadraticOracle::sample_outer_grads(const Vec& x,
                                                        const Vec& y,
                                                        RngStream& rng) const {
  require_size(x, dim_x(), "QuadraticOracle: x");
  require_size(y, dim_y(), "QuadraticOracle: y");
  Vec gx = p_->R * x;
  Vec gy = p_->d;
  if (noise_ > 0.0) {
    gx += noise_ * rng.gaussian_vec(dim_x());
    gy += noise_ * rng.gaussian_vec(dim_y());
  }
  return {std::move(gx), std::move(gy)};
}

Vec QuadraticOracle::sample_jacobian_apply(const Vec& x, const Vec& y,
                                           const Vec& v, RngStream& rng) const {
  (void)x;
  (void)y;
  require_size(v, dim_y(), "QuadraticOracle: jacobian apply v");
  Vec out = -(p_->B.transpose() * v);
  if (noise_ > 0.0) {
    const double s = rng.next_sign();
    const Vec u = rng.gaussian_vec(dim_x());
    const Vec w = rng.gaussian_vec(dim_y());
    const double scale =
        noise_ * s /
        std::sqrt(static_cast<double>(dim_x()) * static_cast<double>(dim_y()));
    out += scale * w.dot(v) * u;
  }
  return out;
}

Vec QuadraticOracle::sample_hessian_apply(const Vec& x, const Vec& y,
                                          const Vec& v, RngStream& rng) const {
  (void)x;
  (void)y;
  require_size(v, dim_y(), "QuadraticOracle: hessian apply v");
  Vec out = p_->A * v;
  if (noise_ > 0.0) {
    const double s = rng.next_sign();
    const Vec w = rng.gaussian_vec(dim_y());
    const double d2 = static_cast<double>(dim_y());
    const double scale = noise_ * s / std::sqrt(d2 * (d2 + 2.0));
    out += scale * w.dot(v) * w;
  }
  return out;
}

Vec QuadraticDense::grad_fx(const Vec& x, const Vec& y) const {
  (void)y;
  return p_->R * x;
}

Vec QuadraticDense::grad_fy(const Vec& x, const Vec& y) const {
  (void)x;
  (void)y;
  return p_->d;
}

Vec QuadraticDense::grad_gy(const Vec& x, const Vec& y) const {
  return p_->A * y - p_->B * x - p_->c;
}

Mat QuadraticDense::jac_gxy(const Vec& x, const Vec& y) const {
  (void)x;
  (void)y;
  return -p_->B.transpose();
}

Mat QuadraticDense::hess_gyy(const Vec& x, const Vec& y) const {
  (void)x;
  (void)y;
  return p_->A;
}

Vec QuadraticExact::y_star(const Vec& x) const {
  require_size(x, p_->dim_x(), "QuadraticExact: x");
  return p_->lltA.solve(p_->B * x + p_->c);
}

double QuadraticExact::ell(const Vec& x) const {
  require_size(x, p_->dim_x(), "QuadraticExact: x");
  return 0.5 * x.dot(p_->R * x) + p_->q.dot(x) + p_->ell_const;
}

Vec QuadraticExact::grad_ell(const Vec& x) const {
  require_size(x, p_->dim_x(), "QuadraticExact: x");
  return p_->R * x + p_->q;
}

Vec QuadraticExact::x_star() const {
  if (!p_->has_x_star) {
    throw std::logic_error("QuadraticExact: x_star not available");
  }
  return p_->x_star;
}

}  // namespace ttsa
