#include "ttsa/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ttsa {

namespace {

constexpr double kBoundRelTol = 1e-9;

bool finite_nonneg(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) return false;
  }
  return true;
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) return false;
  }
  return true;
}

}  // namespace

CoupledCheckReport check_coupled_inequality(const CoupledSeqWitness& w,
                                            double recursion_tol) {
  CoupledCheckReport r;
  const std::size_t n = w.Omega.size();
  if (n < 2 || w.Upsilon.size() != n || w.Theta.size() != n) {
    r.precondition_failure =
        "coupled-sequence preconditions unmet: Omega/Upsilon/Theta must share "
        "a common length K+1 >= 2";
    return r;
  }
  if (!finite_nonneg(w.Omega) || !finite_nonneg(w.Upsilon) ||
      !finite_nonneg(w.Theta)) {
    r.precondition_failure =
        "coupled-sequence preconditions unmet: sequences must be finite and "
        "non-negative";
    return r;
  }
  const bool consts_ok = w.c0 > 0.0 && w.c1 >= 0.0 && w.c2 >= 0.0 &&
                         w.d0 > 0.0 && w.d0 < 1.0 && w.d1 >= 0.0 &&
                         w.d2 >= 0.0 && std::isfinite(w.c0 + w.c1 + w.c2) &&
                         std::isfinite(w.d0 + w.d1 + w.d2);
  if (!consts_ok) {
    r.precondition_failure =
        "coupled-sequence preconditions unmet: need c0 > 0, d0 in (0, 1), "
        "and c1, c2, d1, d2 >= 0, all finite";
    return r;
  }
  const double theta_gap = w.c0 - w.c1 * w.d1 / w.d0;
  const double upsilon_gap = w.d0 - w.d1 * w.c1 / w.c0;
  if (!(theta_gap > 0.0) || !(upsilon_gap > 0.0)) {
    r.precondition_failure =
        "coupled-sequence preconditions unmet: need c0 - c1*d1/d0 > 0 and "
        "d0 - d1*c1/c0 > 0";
    return r;
  }
  r.preconditions_ok = true;

  // Termwise recursion.
  r.recursion_ok = true;
  r.recursion_worst_slack = std::numeric_limits<double>::infinity();
  const long K = static_cast<long>(n) - 1;
  for (long k = 0; k < K; ++k) {
    const double rhs_omega = w.Omega[k] - w.c0 * w.Theta[k + 1] +
                             w.c1 * w.Upsilon[k + 1] + w.c2;
    const double scale_omega =
        std::max({1.0, std::abs(w.Omega[k]), w.c0 * w.Theta[k + 1],
                  w.c1 * w.Upsilon[k + 1]});
    const double slack_omega = rhs_omega - w.Omega[k + 1];

    const double rhs_upsilon =
        (1.0 - w.d0) * w.Upsilon[k] + w.d1 * w.Theta[k] + w.d2;
    const double scale_upsilon =
        std::max({1.0, w.Upsilon[k], w.d1 * w.Theta[k]});
    const double slack_upsilon = rhs_upsilon - w.Upsilon[k + 1];

    const double slack =
        std::min(slack_omega / scale_omega, slack_upsilon / scale_upsilon);
    if (slack < r.recursion_worst_slack) {
      r.recursion_worst_slack = slack;
      if (slack < -recursion_tol && r.recursion_violation_k < 0) {
        r.recursion_violation_k = k;
      }
    }
  }
  if (r.recursion_worst_slack < -recursion_tol) r.recursion_ok = false;

  // Averaged conclusions over k = 1..K.
  double theta_sum = 0.0, upsilon_sum = 0.0;
  for (long k = 1; k <= K; ++k) {
    theta_sum += w.Theta[k];
    upsilon_sum += w.Upsilon[k];
  }
  r.theta_avg = theta_sum / static_cast<double>(K);
  r.upsilon_avg = upsilon_sum / static_cast<double>(K);

  const double head_common = w.Upsilon[0] + w.d1 * w.Theta[0] + w.d2;
  r.theta_bound =
      (w.Omega[0] + (w.c1 / w.d0) * head_common) /
          (theta_gap * static_cast<double>(K)) +
      (w.c2 + w.c1 * w.d2 / w.d0) / theta_gap;
  r.upsilon_bound =
      (head_common + (w.d1 / w.c0) * w.Omega[0]) /
          (upsilon_gap * static_cast<double>(K)) +
      (w.d2 + w.d1 * w.c2 / w.c0) / upsilon_gap;

  r.theta_bound_ok =
      r.theta_avg <= r.theta_bound + kBoundRelTol * std::max(1.0, r.theta_bound);
  r.upsilon_bound_ok = r.upsilon_avg <=
                       r.upsilon_bound + kBoundRelTol * std::max(1.0, r.upsilon_bound);
  r.pass = r.preconditions_ok && r.recursion_ok && r.theta_bound_ok &&
           r.upsilon_bound_ok;
  return r;
}

CoupledSeqWitness random_coupled_witness(long K, RngStream& rng) {
  if (K < 1) throw std::invalid_argument("random_coupled_witness: K >= 1");
  CoupledSeqWitness w;
  w.d0 = 0.05 + 0.90 * rng.next_double();
  w.c1 = 0.1 + 1.9 * rng.next_double();
  w.d1 = 0.1 + 1.9 * rng.next_double();
  w.c2 = 0.5 * rng.next_double();
  w.d2 = 0.5 * rng.next_double();
  // c0 strictly above the coupling threshold c1*d1/d0 makes both
  // preconditions hold simultaneously.
  const double margin = 0.1 + 1.4 * rng.next_double();
  w.c0 = (w.c1 * w.d1 / w.d0) * (1.0 + margin);

  const std::size_t n = static_cast<std::size_t>(K) + 1;
  w.Theta.resize(n);
  w.Upsilon.resize(n);
  w.Omega.resize(n);
  for (std::size_t k = 0; k < n; ++k) w.Theta[k] = 2.0 * rng.next_double();
  w.Upsilon[0] = 2.0 * rng.next_double();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    w.Upsilon[k + 1] =
        (1.0 - w.d0) * w.Upsilon[k] + w.d1 * w.Theta[k] + w.d2;
  }
  // Drive Omega by equality, then shift it non-negative; the recursion is
  // invariant under a common shift of Omega.
  w.Omega[0] = 0.0;
  double lo = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    w.Omega[k + 1] = w.Omega[k] - w.c0 * w.Theta[k + 1] +
                     w.c1 * w.Upsilon[k + 1] + w.c2;
    lo = std::min(lo, w.Omega[k + 1]);
  }
  const double shift = -lo + rng.next_double();
  for (double& v : w.Omega) v += shift;
  return w;
}

CoupledSeqWitness coupled_constants_for_run(double alpha, double beta,
                                            const ProblemConstants& pc,
                                            const DerivedConstants& dc,
                                            double b0) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument(
        "coupled_constants_for_run: requires alpha > 0 and beta > 0");
  }
  CoupledSeqWitness w;
  w.c0 = 1.0 / (2.0 * alpha) - dc.L_f / 2.0;
  w.c1 = 2.0 * alpha * dc.L * dc.L;
  w.c2 = alpha * (2.0 * b0 * b0 + pc.sigma_f * pc.sigma_f);
  w.d0 = pc.mu_g * beta / 2.0;
  w.d1 = (2.0 / (pc.mu_g * beta) - 1.0) * dc.L_y * dc.L_y;
  w.d2 = beta * beta * pc.sigma_g * pc.sigma_g;
  return w;
}

// ---------------------------------------------------------------------------
// Auxiliary step-size summation lemmas.

AuxLemmaReport check_aux_sum_bound(const std::vector<double>& gamma,
                                   double a) {
  AuxLemmaReport r;
  if (!(a > 0.0) || !std::isfinite(a)) {
    r.detail = "requires a > 0";
    return r;
  }
  if (gamma.empty() || !finite_nonneg(gamma)) {
    r.detail = "requires a non-empty, non-negative step sequence";
    return r;
  }
  if (!non_increasing(gamma)) {
    r.detail = "requires a non-increasing step sequence";
    return r;
  }
  if (!(gamma[0] < 1.0 / a)) {
    r.detail = "requires gamma[0] < 1/a";
    return r;
  }
  const double bound = 1.0 / a;
  double S = 0.0;
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    S = (1.0 - gamma[k] * a) * S + gamma[k];
    const double margin = bound - S;
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.worst_k = static_cast<long>(k);
    }
  }
  r.status = r.worst_margin >= -kBoundRelTol * bound
                 ? AuxLemmaReport::Status::pass
                 : AuxLemmaReport::Status::bound_violated;
  if (r.status == AuxLemmaReport::Status::bound_violated) {
    r.detail = "weighted sum exceeds 1/a at k = " + std::to_string(r.worst_k);
  }
  return r;
}

AuxLemmaReport check_aux_power_sum_bound(const std::vector<double>& gamma,
                                         double a, double q) {
  AuxLemmaReport r;
  if (!(a > 0.0) || !std::isfinite(a)) {
    r.detail = "requires a > 0";
    return r;
  }
  if (!(q > 1.0) || !(q <= 2.0)) {
    r.detail = "requires 1 < q <= 2";
    return r;
  }
  if (gamma.empty() || !finite_nonneg(gamma)) {
    r.detail = "requires a non-empty, non-negative step sequence";
    return r;
  }
  if (!non_increasing(gamma)) {
    r.detail = "requires a non-increasing step sequence";
    return r;
  }
  if (!(gamma[0] < 1.0 / (2.0 * a))) {
    r.detail = "requires gamma[0] < 1/(2a)";
    return r;
  }
  for (std::size_t l = 1; l < gamma.size(); ++l) {
    if (gamma[l] == 0.0) {
      if (gamma[l - 1] == 0.0) continue;
      r.detail = "step-ratio condition fails at l = " + std::to_string(l) +
                 " (sequence hits zero)";
      return r;
    }
    if (gamma[l - 1] / gamma[l] >
        1.0 + a * gamma[l] / (2.0 * (q - 1.0)) + 1e-15) {
      r.detail =
          "step-ratio condition gamma[l-1]/gamma[l] <= 1 + a*gamma[l]/(2(q-1)) "
          "fails at l = " +
          std::to_string(l);
      return r;
    }
  }
  double T = 0.0;
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    T = (1.0 - gamma[k] * a) * T + std::pow(gamma[k], q);
    const double bound = (2.0 / a) * std::pow(gamma[k], q - 1.0);
    const double margin = (bound - T) / std::max(bound, 1e-300);
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.worst_k = static_cast<long>(k);
    }
  }
  r.status = r.worst_margin >= -kBoundRelTol
                 ? AuxLemmaReport::Status::pass
                 : AuxLemmaReport::Status::bound_violated;
  if (r.status == AuxLemmaReport::Status::bound_violated) {
    r.detail = "weighted power sum exceeds (2/a)*gamma[k]^(q-1) at k = " +
               std::to_string(r.worst_k);
  }
  return r;
}

AuxLemmaReport check_aux_product_sum_bound(const std::vector<double>& gamma,
                                           const std::vector<double>& rho,
                                           double a, double b) {
  AuxLemmaReport r;
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    r.detail = "requires a > 0 and b > 0";
    return r;
  }
  if (gamma.empty() || gamma.size() != rho.size()) {
    r.detail = "requires matching non-empty gamma/rho sequences";
    return r;
  }
  if (!finite_nonneg(gamma) || !finite_nonneg(rho) ||
      !non_increasing(gamma) || !non_increasing(rho)) {
    r.detail = "requires non-increasing, non-negative gamma/rho sequences";
    return r;
  }
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    if (2.0 * a * gamma[j] > b * rho[j] * (1.0 + 1e-15)) {
      r.detail = "requires 2*a*gamma[j] <= b*rho[j]; fails at j = " +
                 std::to_string(j);
      return r;
    }
  }
  if (!(rho[0] < 1.0 / b)) {
    r.detail = "requires rho[0] < 1/b";
    return r;
  }
  double U = 0.0;  // weighted sum with decay products
  double P = 1.0;  // prod_{i=0..k} (1 - rho_i b)
  double Q = 1.0;  // prod_{l=0..k} (1 - gamma_l a)
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    P *= (1.0 - rho[k] * b);
    Q *= (1.0 - gamma[k] * a);
    U = (1.0 - gamma[k] * a) * U + gamma[k] * P;
    const double bound = Q / a;
    const double margin = (bound - U) / std::max(bound, 1e-300);
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.worst_k = static_cast<long>(k);
    }
  }
  r.status = r.worst_margin >= -kBoundRelTol
                 ? AuxLemmaReport::Status::pass
                 : AuxLemmaReport::Status::bound_violated;
  if (r.status == AuxLemmaReport::Status::bound_violated) {
    r.detail = "weighted product sum exceeds (1/a)*prod(1 - gamma*a) at k = " +
               std::to_string(r.worst_k);
  }
  return r;
}

bool AuxLemmasReport::all_pass() const {
  const auto bad = AuxLemmaReport::Status::bound_violated;
  return sum_bound.status != bad && power_sum_bound.status != bad &&
         product_sum_bound.status != bad;
}

AuxLemmasReport check_aux_lemmas(const std::vector<double>& gamma, double a,
                                 double b, double q, long k_max) {
  std::vector<double> g = gamma;
  if (k_max >= 0 && g.size() > static_cast<std::size_t>(k_max) + 1) {
    g.resize(static_cast<std::size_t>(k_max) + 1);
  }
  AuxLemmasReport out;
  out.sum_bound = check_aux_sum_bound(g, a);
  out.power_sum_bound = check_aux_power_sum_bound(g, a, q);
  std::vector<double> rho(g.size());
  if (b > 0.0) {
    for (std::size_t j = 0; j < g.size(); ++j) rho[j] = 2.0 * a * g[j] / b;
  }
  out.product_sum_bound = check_aux_product_sum_bound(g, rho, a, b);
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form error-bound series.

std::vector<double> tracking_error_bound_series(const StepSchedule& s,
                                                const ProblemConstants& pc,
                                                const DerivedConstants& dc,
                                                double c0, double b0_sq,
                                                double delta_y0, long k_max) {
  if (k_max < 1) {
    throw std::invalid_argument("tracking_error_bound_series: k_max >= 1");
  }
  const double noise =
      (8.0 / pc.mu_g) *
      (pc.sigma_g * pc.sigma_g +
       (4.0 * c0 * c0 * dc.L_y * dc.L_y / pc.mu_g) *
           (dc.sigma_f_tilde_sq + 3.0 * b0_sq));
  std::vector<double> out(static_cast<std::size_t>(k_max));
  double prod = 1.0;
  for (long k = 0; k < k_max; ++k) {
    prod *= (1.0 - s.beta(k) * pc.mu_g / 2.0);
    out[static_cast<std::size_t>(k)] = prod * delta_y0 + noise * s.beta(k);
  }
  return out;
}

std::vector<double> outer_error_bound_series(
    const StepSchedule& s, const ProblemConstants& pc,
    const DerivedConstants& dc, double cb, double b0_sq, double delta_x0,
    const std::vector<double>& delta_y_next, long k_max) {
  if (k_max < 1) {
    throw std::invalid_argument("outer_error_bound_series: k_max >= 1");
  }
  if (!(pc.mu_ell > 0.0)) {
    throw std::invalid_argument(
        "outer_error_bound_series: requires mu_ell > 0");
  }
  if (delta_y_next.size() < static_cast<std::size_t>(k_max)) {
    throw std::invalid_argument(
        "outer_error_bound_series: delta_y_next must cover k_max entries");
  }
  const double mu = pc.mu_ell;
  const double step_coef =
      4.0 * cb / (mu * mu) + (2.0 * dc.sigma_f_tilde_sq + 6.0 * b0_sq) / mu;
  const double mix_coef =
      2.0 * dc.L * dc.L / mu + 3.0 * s.alpha(0) * dc.L * dc.L;
  std::vector<double> out(static_cast<std::size_t>(k_max));
  double prod = 1.0;
  double M = 0.0;
  for (long k = 0; k < k_max; ++k) {
    const double a_k = s.alpha(k);
    prod *= (1.0 - a_k * mu);
    M = (1.0 - a_k * mu) * M + a_k * delta_y_next[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] =
        prod * delta_x0 + step_coef * a_k + mix_coef * M;
  }
  return out;
}

}  // namespace ttsa
