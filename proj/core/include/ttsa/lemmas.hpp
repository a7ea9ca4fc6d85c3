#pragma once

#include <string>
#include <vector>

#include "ttsa/constants.hpp"
#include "ttsa/rng.hpp"
#include "ttsa/schedule.hpp"

namespace ttsa {

// Witness for the coupled-sequence averaging lemma: non-negative sequences
// Omega, Upsilon, Theta of equal length K+1 and positive constants expected
// to satisfy, for all k >= 0,
//   Omega^{k+1} <= Omega^k - c0 Theta^{k+1} + c1 Upsilon^{k+1} + c2,
//   Upsilon^{k+1} <= (1 - d0) Upsilon^k + d1 Theta^k + d2.
struct CoupledSeqWitness {
  double c0 = 0, c1 = 0, c2 = 0;
  double d0 = 0, d1 = 0, d2 = 0;
  std::vector<double> Omega, Upsilon, Theta;
};

struct CoupledCheckReport {
  bool preconditions_ok = false;
  std::string precondition_failure;  // empty when ok
  bool recursion_ok = false;
  long recursion_violation_k = -1;
  double recursion_worst_slack = 0.0;  // min over k of (rhs - lhs)
  // Averaged conclusions: (1/K) sum_{k=1..K} Theta^k (resp. Upsilon^k)
  // against their closed-form bounds.
  double theta_avg = 0.0, theta_bound = 0.0;
  double upsilon_avg = 0.0, upsilon_bound = 0.0;
  bool theta_bound_ok = false, upsilon_bound_ok = false;
  bool pass = false;  // preconditions && recursion && both bounds
};

// Verifies the witness: preconditions c0 - c1 d1/d0 > 0 and
// d0 - d1 c1/c0 > 0 (reported as "coupled-sequence preconditions unmet" when
// violated), the termwise recursion within recursion_tol (relative to the
// right-hand side's scale), and the two averaged bounds.
CoupledCheckReport check_coupled_inequality(const CoupledSeqWitness& w,
                                            double recursion_tol = 1e-12);

// Random witness built to satisfy the recursion with equality at every step
// (Upsilon driven forward from random Theta; Omega driven forward and then
// shifted up so it stays non-negative).  Constants are drawn so both
// preconditions hold strictly.
CoupledSeqWitness random_coupled_witness(long K, RngStream& rng);

// Constants of the two-timescale descent recursion at fixed steps
// (alpha, beta):  c0 = 1/(2 alpha) - L_f/2, c1 = 2 alpha L^2,
// c2 = alpha (2 b0^2 + sigma_f^2), d0 = mu_g beta / 2,
// d1 = (2/(mu_g beta) - 1) L_y^2, d2 = beta^2 sigma_g^2.
// Requires alpha < 1/L_f and mu_g beta < 2 so that c0, 1-d0 stay admissible.
CoupledSeqWitness coupled_constants_for_run(double alpha, double beta,
                                            const ProblemConstants& pc,
                                            const DerivedConstants& dc,
                                            double b0);

// ---------------------------------------------------------------------------
// Auxiliary step-size summation lemmas.

struct AuxLemmaReport {
  enum class Status { pass, bound_violated, not_applicable };
  Status status = Status::not_applicable;
  std::string detail;         // failed hypothesis or violation location
  double worst_margin = 0.0;  // min over k of (bound - value)
  long worst_k = -1;
};

// Sum bound: for a > 0 and gamma non-increasing, non-negative with
// gamma_0 < 1/a:  sum_{j<=k} gamma_j prod_{l=j+1..k}(1 - gamma_l a) <= 1/a.
AuxLemmaReport check_aux_sum_bound(const std::vector<double>& gamma, double a);

// Power-sum bound: for 1 < q <= 2, gamma_0 < 1/(2a) and the ratio condition
// gamma_{l-1}/gamma_l <= 1 + a gamma_l / (2(q-1)):
//   sum_{j<=k} gamma_j^q prod_{l=j+1..k}(1 - gamma_l a) <= (2/a) gamma_k^{q-1}.
AuxLemmaReport check_aux_power_sum_bound(const std::vector<double>& gamma,
                                         double a, double q);

// Product-sum bound: for a, b > 0, gamma/rho non-increasing non-negative,
// 2 a gamma_j <= b rho_j for all j, and rho_0 < 1/b:
//   sum_{j<=k} gamma_j prod_{l=j+1..k}(1-gamma_l a) prod_{i=0..j}(1-rho_i b)
//     <= (1/a) prod_{l=0..k}(1 - gamma_l a).
AuxLemmaReport check_aux_product_sum_bound(const std::vector<double>& gamma,
                                           const std::vector<double>& rho,
                                           double a, double b);

struct AuxLemmasReport {
  AuxLemmaReport sum_bound;
  AuxLemmaReport power_sum_bound;
  AuxLemmaReport product_sum_bound;
  bool all_pass() const;  // true iff no lemma reports bound_violated
};

// Bundled run over one gamma sequence; rho defaults to the boundary ratio
// rho_j = 2 a gamma_j / b of the product-sum lemma.
AuxLemmasReport check_aux_lemmas(const std::vector<double>& gamma, double a,
                                 double b, double q, long k_max);

// ---------------------------------------------------------------------------
// Closed-form error-bound series for instrumented runs.

// Inner tracking-error bound under the strongly convex recipe: entry k is
//   prod_{l=0..k}(1 - beta_l mu_g / 2) * delta_y0
//     + (8/mu_g) { sigma_g^2 + (4 c0^2 L_y^2 / mu_g) (sigma_f_tilde^2
//                  + 3 b0_sq) } * beta_k,
// for k = 0..k_max-1, bounding Delta_y^{k+1}.  c0 is the realized
// alpha/beta^{3/2} ratio constant of the schedule.
std::vector<double> tracking_error_bound_series(const StepSchedule& s,
                                                const ProblemConstants& pc,
                                                const DerivedConstants& dc,
                                                double c0, double b0_sq,
                                                double delta_y0, long k_max);

// Outer distance bound fed by measured inner errors: entry k is
//   prod_{l=0..k}(1 - alpha_l mu_ell) * delta_x0
//     + [4 cb / mu_ell^2 + (2 sigma_f_tilde^2 + 6 b0_sq)/mu_ell] * alpha_k
//     + [2 L^2/mu_ell + 3 alpha_0 L^2]
//         * sum_{j<=k} alpha_j prod_{l=j+1..k}(1 - alpha_l mu_ell)
//           * delta_y_next[j],
// for k = 0..k_max-1, bounding Delta_x^{k+1}; delta_y_next[j] bounds
// Delta_y^{j+1}.  cb is the bias-target prefactor (b_k^2 <= cb alpha_{k+1}).
std::vector<double> outer_error_bound_series(
    const StepSchedule& s, const ProblemConstants& pc,
    const DerivedConstants& dc, double cb, double b0_sq, double delta_x0,
    const std::vector<double>& delta_y_next, long k_max);

}  // namespace ttsa
