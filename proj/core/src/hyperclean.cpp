#include "ttsa/hyperclean.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ttsa/hypergrad.hpp"

namespace ttsa {

namespace {

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double sigmoid_deriv(double t) {
  const double s = sigmoid(t);
  return s * (1.0 - s);
}

// Logistic (cross-entropy) loss of logit z against label b in {0,1}:
// log(1 + e^z) - b z, evaluated in the overflow-safe branch.
double logistic_loss(double z, double b) {
  const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z))
                                  : std::log1p(std::exp(z));
  return softplus - b * z;
}

double logistic_loss_deriv(double z, double b) { return sigmoid(z) - b; }

double logistic_loss_curv(double z) { return sigmoid_deriv(z); }

// max |sigmoid''| over the real line.
const double kSigmoidCurvBound = 1.0 / (6.0 * std::sqrt(3.0));

void check_classes(const Vec& labels, const char* split) {
  const double lo = labels.minCoeff();
  const double hi = labels.maxCoeff();
  if (lo == hi) {
    throw std::invalid_argument(std::string("hyperclean: degenerate class (all ") +
                                split + " labels identical)");
  }
}

void corrupt_labels(Vec& labels, double p, RngStream& rng) {
  for (Index i = 0; i < labels.size(); ++i) {
    if (rng.next_double() < p) labels(i) = 1.0 - labels(i);
  }
}

}  // namespace

double HyperCleanProblem::inner_value(const Vec& x, const Vec& y) const {
  double v = lambda * y.squaredNorm();
  const Vec z = A_tr * y;
  for (Index i = 0; i < n_train(); ++i) {
    v += sigmoid(x(i)) * logistic_loss(z(i), b_tr(i));
  }
  return v;
}

Vec HyperCleanProblem::inner_grad_y(const Vec& x, const Vec& y) const {
  Vec g = 2.0 * lambda * y;
  const Vec z = A_tr * y;
  for (Index i = 0; i < n_train(); ++i) {
    g += sigmoid(x(i)) * logistic_loss_deriv(z(i), b_tr(i)) *
         A_tr.row(i).transpose();
  }
  return g;
}

Mat HyperCleanProblem::inner_hessian_yy(const Vec& x, const Vec& y) const {
  Mat H = 2.0 * lambda * Mat::Identity(dim_y(), dim_y());
  const Vec z = A_tr * y;
  for (Index i = 0; i < n_train(); ++i) {
    H += sigmoid(x(i)) * logistic_loss_curv(z(i)) * A_tr.row(i).transpose() *
         A_tr.row(i);
  }
  return H;
}

Mat HyperCleanProblem::cross_jacobian(const Vec& x, const Vec& y) const {
  Mat J = Mat::Zero(dim_x(), dim_y());
  const Vec z = A_tr * y;
  for (Index i = 0; i < n_train(); ++i) {
    J.row(i) =
        sigmoid_deriv(x(i)) * logistic_loss_deriv(z(i), b_tr(i)) * A_tr.row(i);
  }
  return J;
}

double HyperCleanProblem::outer_value(const Vec& y) const {
  double v = 0.0;
  const Vec z = A_val * y;
  for (Index i = 0; i < n_val(); ++i) v += logistic_loss(z(i), b_val(i));
  return v;
}

Vec HyperCleanProblem::outer_grad_y(const Vec& y) const {
  Vec g = Vec::Zero(dim_y());
  const Vec z = A_val * y;
  for (Index i = 0; i < n_val(); ++i) {
    g += logistic_loss_deriv(z(i), b_val(i)) * A_val.row(i).transpose();
  }
  return g;
}

Vec HyperCleanProblem::y_star(const Vec& x, double tol, int max_iters) const {
  require_size(x.size(), dim_x(), "hyperclean y_star: x");
  Vec y = Vec::Zero(dim_y());
  double value = inner_value(x, y);
  for (int it = 0; it < max_iters; ++it) {
    const Vec g = inner_grad_y(x, y);
    if (g.norm() <= tol * std::max(1.0, y.norm())) return y;
    const Mat H = inner_hessian_yy(x, y);
    const Vec step = H.ldlt().solve(g);
    const double decrement = g.dot(step);
    double t = 1.0;
    Vec y_next = y - step;
    double next_value = inner_value(x, y_next);
    while (next_value > value - 0.25 * t * decrement && t > 1e-10) {
      t *= 0.5;
      y_next = y - t * step;
      next_value = inner_value(x, y_next);
    }
    y = y_next;
    value = next_value;
  }
  const Vec g = inner_grad_y(x, y);
  if (g.norm() <= 1e3 * tol * std::max(1.0, y.norm())) return y;
  throw std::runtime_error("hyperclean y_star: Newton failed to converge");
}

double HyperCleanProblem::ell(const Vec& x) const {
  return outer_value(y_star(x));
}

Vec HyperCleanProblem::grad_ell(const Vec& x) const {
  const Vec ys = y_star(x);
  const Mat H = inner_hessian_yy(x, ys);
  const Mat J = cross_jacobian(x, ys);
  const Vec gfy = outer_grad_y(ys);
  return -J * H.ldlt().solve(gfy);
}

double HyperCleanProblem::validation_error(const Vec& y) const {
  const Vec z = A_val * y;
  Index wrong = 0;
  for (Index i = 0; i < n_val(); ++i) {
    const double pred = z(i) > 0.0 ? 1.0 : 0.0;
    if (pred != b_val(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(n_val());
}

ProblemConstants HyperCleanProblem::constants(Index inner_batch,
                                              Index outer_batch) const {
  if (inner_batch < 1 || outer_batch < 1) {
    throw std::invalid_argument("hyperclean constants: batch sizes >= 1");
  }
  const Index n = n_train();
  const Index nv = n_val();
  double s2 = 0.0, s3 = 0.0, s4 = 0.0, max_tr = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double r = A_tr.row(i).norm();
    s2 += r * r;
    s3 += r * r * r;
    s4 += r * r * r * r;
    max_tr = std::max(max_tr, r);
  }
  double sv1 = 0.0, sv2 = 0.0, max_val = 0.0;
  for (Index i = 0; i < nv; ++i) {
    const double r = A_val.row(i).norm();
    sv1 += r;
    sv2 += r * r;
    max_val = std::max(max_val, r);
  }

  ProblemConstants pc;
  pc.mu_g = 2.0 * lambda;
  // The minibatch Hessian estimate rescales the batch sum by n/batch, so its
  // spectrum can reach 2*lambda + (n/4) max_i ||a_i||^2 — use that (not the
  // smaller full-batch sum bound) so sampled draws stay within [mu_g, L_g].
  pc.L_g = std::max(1.0, 2.0 * lambda +
                             0.25 * static_cast<double>(n) * max_tr * max_tr);
  pc.C_gxy = 0.25 * std::sqrt(s2);
  pc.C_fy = sv1;
  pc.C_y = sv1;
  pc.L_fx = 0.0;  // grad_x f is identically zero
  pc.L_fy = 0.0;
  pc.Lbar_fy = 0.25 * sv2;
  pc.L_gxy = kSigmoidCurvBound * max_tr;
  pc.Lbar_gxy = std::sqrt(s4) / 16.0;
  pc.L_gyy = std::sqrt(s4) / 16.0;
  pc.Lbar_gyy = 0.25 * s3;
  pc.mu_ell = 0.0;  // outer curvature not certified for this problem

  const double n_d = static_cast<double>(n);
  const double nv_d = static_cast<double>(nv);
  pc.sigma_g = n_d * max_tr / std::sqrt(static_cast<double>(inner_batch));
  pc.sigma_fx = 0.0;
  pc.sigma_fy = nv_d * max_val / std::sqrt(static_cast<double>(outer_batch));
  pc.sigma_gxy =
      0.25 * n_d * max_tr / std::sqrt(static_cast<double>(inner_batch));
  pc.C_g = std::sqrt(pc.C_gxy * pc.C_gxy + pc.sigma_gxy * pc.sigma_gxy);
  pc.sigma_f = 0.0;  // assembled-estimator bound is derived downstream
  pc.b0 = hypergrad_bias_bound(pc, 1);
  return pc;
}

HyperCleanProblem make_hyperclean(Index n_train, Index n_val, Index d2,
                                  double corruption_p, double lambda,
                                  std::uint64_t seed) {
  if (n_train < 10 || n_val < 10) {
    throw std::invalid_argument("make_hyperclean: n_train, n_val >= 10");
  }
  if (d2 < 1) throw std::invalid_argument("make_hyperclean: d2 >= 1");
  if (!(corruption_p >= 0.0 && corruption_p < 1.0)) {
    throw std::invalid_argument("make_hyperclean: 0 <= corruption_p < 1");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("make_hyperclean: lambda > 0");

  RngStream rng(seed);
  // Planted unit separator; classes are balanced by construction and blobs
  // sit at +/- the separator with per-coordinate noise of total variance 1.
  Vec u = rng.gaussian_vec(d2);
  const double un = u.norm();
  u = un > 0.0 ? Vec(u / un) : Vec(Vec::Unit(d2, 0));
  const double coord_sd = 1.0 / std::sqrt(static_cast<double>(d2));

  HyperCleanProblem p;
  p.lambda = lambda;
  p.corruption_p = corruption_p;
  p.seed = seed;
  p.A_tr.resize(n_train, d2);
  p.b_tr_clean.resize(n_train);
  for (Index i = 0; i < n_train; ++i) {
    const double label = static_cast<double>(i % 2);
    p.b_tr_clean(i) = label;
    p.A_tr.row(i) =
        ((2.0 * label - 1.0) * u + coord_sd * rng.gaussian_vec(d2)).transpose();
  }
  p.A_val.resize(n_val, d2);
  p.b_val.resize(n_val);
  for (Index i = 0; i < n_val; ++i) {
    const double label = static_cast<double>(i % 2);
    p.b_val(i) = label;
    p.A_val.row(i) =
        ((2.0 * label - 1.0) * u + coord_sd * rng.gaussian_vec(d2)).transpose();
  }
  p.b_tr = p.b_tr_clean;
  corrupt_labels(p.b_tr, corruption_p, rng);
  check_classes(p.b_tr, "training");
  check_classes(p.b_val, "validation");

  char buf[128];
  std::snprintf(buf, sizeof(buf), "hyperclean-%ldx%ld-d%ld-p%g-s%llu",
                static_cast<long>(n_train), static_cast<long>(n_val),
                static_cast<long>(d2), corruption_p,
                static_cast<unsigned long long>(seed));
  p.id = buf;
  return p;
}

HyperCleanProblem make_hyperclean_csv(const std::string& path, Index n_val,
                                      double corruption_p, double lambda,
                                      std::uint64_t seed) {
  if (!(corruption_p >= 0.0 && corruption_p < 1.0)) {
    throw std::invalid_argument("make_hyperclean: 0 <= corruption_p < 1");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("make_hyperclean: lambda > 0");

  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("hyperclean: cannot open dataset file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("hyperclean: empty dataset file: " + path);
  }
  if (line.rfind("label", 0) != 0) {
    throw std::invalid_argument(
        "hyperclean: dataset header must start with 'label': " + path);
  }
  const Index d2 =
      static_cast<Index>(std::count(line.begin(), line.end(), ','));
  if (d2 < 1) {
    throw std::invalid_argument("hyperclean: dataset has no feature columns");
  }

  std::vector<double> labels;
  std::vector<Vec> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    Vec row(d2);
    double label = 0.0;
    for (Index c = 0; c <= d2; ++c) {
      if (!std::getline(ss, cell, ',')) {
        throw std::invalid_argument("hyperclean: short row at line " +
                                    std::to_string(line_no));
      }
      double value = 0.0;
      try {
        std::size_t pos = 0;
        value = std::stod(cell, &pos);
        while (pos < cell.size() &&
               std::isspace(static_cast<unsigned char>(cell[pos]))) {
          ++pos;
        }
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::invalid_argument("hyperclean: bad number '" + cell +
                                    "' at line " + std::to_string(line_no));
      }
      if (c == 0) {
        if (value != 0.0 && value != 1.0) {
          throw std::invalid_argument("hyperclean: label must be 0 or 1 at line " +
                                      std::to_string(line_no));
        }
        label = value;
      } else {
        row(c - 1) = value;
      }
    }
    std::string extra;
    if (std::getline(ss, extra, ',')) {
      throw std::invalid_argument("hyperclean: extra columns at line " +
                                  std::to_string(line_no));
    }
    labels.push_back(label);
    rows.push_back(std::move(row));
  }

  const Index total = static_cast<Index>(rows.size());
  if (n_val < 10 || total - n_val < 10) {
    throw std::invalid_argument(
        "hyperclean: dataset must leave n_train, n_val >= 10 after the split");
  }

  RngStream rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(total));
  for (Index i = 0; i < total; ++i) order[static_cast<std::size_t>(i)] = i;
  for (Index i = total - 1; i > 0; --i) {
    const Index j = static_cast<Index>(
        rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }

  HyperCleanProblem p;
  p.lambda = lambda;
  p.corruption_p = corruption_p;
  p.seed = seed;
  const Index n_train = total - n_val;
  p.A_val.resize(n_val, d2);
  p.b_val.resize(n_val);
  for (Index i = 0; i < n_val; ++i) {
    const Index src = order[static_cast<std::size_t>(i)];
    p.A_val.row(i) = rows[static_cast<std::size_t>(src)].transpose();
    p.b_val(i) = labels[static_cast<std::size_t>(src)];
  }
  p.A_tr.resize(n_train, d2);
  p.b_tr_clean.resize(n_train);
  for (Index i = 0; i < n_train; ++i) {
    const Index src = order[static_cast<std::size_t>(n_val + i)];
    p.A_tr.row(i) = rows[static_cast<std::size_t>(src)].transpose();
    p.b_tr_clean(i) = labels[static_cast<std::size_t>(src)];
  }
  p.b_tr = p.b_tr_clean;
  corrupt_labels(p.b_tr, corruption_p, rng);
  check_classes(p.b_tr, "training");
  check_classes(p.b_val, "validation");
  p.id = "hyperclean-csv";
  return p;
}

HypercleanOracle::HypercleanOracle(const HyperCleanProblem& problem,
                                   Index inner_batch, Index outer_batch)
    : problem_(problem),
      inner_batch_(inner_batch),
      outer_batch_(outer_batch),
      projection_(Projection::all()),
      pc_(problem.constants(inner_batch, outer_batch)) {}

Vec HypercleanOracle::sample_inner_grad(const Vec& x, const Vec& y,
                                        RngStream& rng) const {
  const Index n = problem_.n_train();
  const double scale =
      static_cast<double>(n) / static_cast<double>(inner_batch_);
  Vec h = 2.0 * problem_.lambda * y;
  for (Index k = 0; k < inner_batch_; ++k) {
    const Index i =
        static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n)));
    const double z = problem_.A_tr.row(i).dot(y);
    h += scale * sigmoid(x(i)) * logistic_loss_deriv(z, problem_.b_tr(i)) *
         problem_.A_tr.row(i).transpose();
  }
  return h;
}

std::pair<Vec, Vec> HypercleanOracle::sample_outer_grads(const Vec& /*x*/,
                                                         const Vec& y,
                                                         RngStream& rng) const {
  const Index nv = problem_.n_val();
  const double scale =
      static_cast<double>(nv) / static_cast<double>(outer_batch_);
  Vec hx = Vec::Zero(problem_.dim_x());
  Vec hy = Vec::Zero(problem_.dim_y());
  for (Index k = 0; k < outer_batch_; ++k) {
    const Index i =
        static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(nv)));
    const double z = problem_.A_val.row(i).dot(y);
    hy += scale * logistic_loss_deriv(z, problem_.b_val(i)) *
          problem_.A_val.row(i).transpose();
  }
  return {std::move(hx), std::move(hy)};
}

Vec HypercleanOracle::sample_jacobian_apply(const Vec& x, const Vec& y,
                                            const Vec& v,
                                            RngStream& rng) const {
  const Index n = problem_.n_train();
  const double scale =
      static_cast<double>(n) / static_cast<double>(inner_batch_);
  Vec out = Vec::Zero(problem_.dim_x());
  for (Index k = 0; k < inner_batch_; ++k) {
    const Index i =
        static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n)));
    const double z = problem_.A_tr.row(i).dot(y);
    out(i) += scale * sigmoid_deriv(x(i)) *
              logistic_loss_deriv(z, problem_.b_tr(i)) *
              problem_.A_tr.row(i).dot(v);
  }
  return out;
}

Vec HypercleanOracle::sample_hessian_apply(const Vec& x, const Vec& y,
                                           const Vec& v,
                                           RngStream& rng) const {
  const Index n = problem_.n_train();
  const double scale =
      static_cast<double>(n) / static_cast<double>(inner_batch_);
  Vec out = 2.0 * problem_.lambda * v;
  for (Index k = 0; k < inner_batch_; ++k) {
    const Index i =
        static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n)));
    const double z = problem_.A_tr.row(i).dot(y);
    out += scale * sigmoid(x(i)) * logistic_loss_curv(z) *
           problem_.A_tr.row(i).dot(v) * problem_.A_tr.row(i).transpose();
  }
  return out;
}

Vec HypercleanDense::grad_fx(const Vec& x, const Vec& /*y*/) const {
  return Vec::Zero(x.size());
}

Vec HypercleanDense::grad_fy(const Vec& /*x*/, const Vec& y) const {
  return problem_.outer_grad_y(y);
}

Vec HypercleanDense::grad_gy(const Vec& x, const Vec& y) const {
  return problem_.inner_grad_y(x, y);
}

Mat HypercleanDense::jac_gxy(const Vec& x, const Vec& y) const {
  return problem_.cross_jacobian(x, y);
}

Mat HypercleanDense::hess_gyy(const Vec& x, const Vec& y) const {
  return problem_.inner_hessian_yy(x, y);
}

}  // namespace ttsa
