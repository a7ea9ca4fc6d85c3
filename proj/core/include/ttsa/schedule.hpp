#pragma once

#include <string>
#include <vector>

#include "ttsa/constants.hpp"

namespace ttsa {

enum class Regime {
  sc_diminishing,  // strongly convex outer, diminishing steps
  sc_constant,     // strongly convex outer, constant steps
  convex,          // convex outer, horizon-tuned constant steps
  weakly_convex,   // weakly convex outer, horizon-tuned constant steps
  nac_convex,      // natural actor-critic constant steps (built in nac.hpp)
  custom,          // user-supplied power-law steps
};

const char* regime_name(Regime r);
Regime regime_from_name(const std::string& name);

// Smallest truncation level t >= 1 with (bias_base * contraction^t)^2 <=
// target_sq, clamped to t_cap.  contraction must lie in [0, 1).
int tmax_for_target(double bias_base, double contraction, double target_sq,
                    int t_cap = 10000);

// Damping weight for the truncated inverse-series estimator.
double default_c_h(const ProblemConstants& pc);

// Step-size and truncation policy for the two-timescale loop.
//
// alpha drives the outer (slow) variable, beta the inner (fast) one.  The
// truncation level tmax(k) is chosen so the estimator's bias-squared stays
// below a target tied to alpha; see tmax() for the exact rule.
struct StepSchedule {
  Regime regime = Regime::custom;

  // sc_diminishing: alpha_k = c_alpha / (k + k_alpha),
  //                 beta_k  = c_beta  / (k + k_beta)^(2/3).
  double c_alpha = 0.0, k_alpha = 0.0;
  double c_beta = 0.0, k_beta = 0.0;

  // Constant regimes (sc_constant / convex / weakly_convex).
  double alpha_const = 0.0, beta_const = 0.0;

  // custom: alpha_k = c_alpha (1+k)^(-alpha_exp), beta_k = c_beta (1+k)^(-beta_exp).
  double alpha_exp = 0.0, beta_exp = 0.0;

  // Inverse-series estimator policy.
  double c_h = 0.0;                      // damping weight
  double bias_base = 0.0;                // series-tail bias prefactor
  double contraction = 0.0;              // per-term contraction, in [0, 1)
  double bias_target_prefactor = 1.0;    // b_k^2 target = prefactor * alpha(k+1)
  double bias_target_const_sq = -1.0;    // >= 0: fixed b^2 target instead
  int tmax_cap = 10000;
  int tmax_override = 0;                 // > 0: fixed truncation level

  double alpha(long k) const;
  double beta(long k) const;
  int tmax(long k) const;

  // Per-inequality outcome of validate().
  struct CheckLine {
    std::string name;
    bool ok = false;
    long last_bad_k = -1;      // largest probed k violating; -1 if none
    long first_ok_k = 0;       // smallest probed k from which it always holds
    double worst_margin = 0.0; // min over k of (rhs - lhs)/max(1, |rhs|)
  };

  struct Validation {
    bool ok = false;
    std::string first_violation;  // name of the earliest failing check
    long violation_k = -1;
    // Realized timescale-ratio constants over the probe grid:
    // c0 = sup alpha_k / beta_k^{3/2}, c1 = sup beta_k / alpha_k^{2/3}.
    double c0_realized = 0.0;
    double c1_realized = 0.0;
    long grace_k = 0;  // sc_diminishing: violations confined to k < grace_k pass
    std::vector<CheckLine> lines;
    std::string summary() const;
  };

  // Checks the step-size conditions required by the convergence guarantees
  // for this regime, on a log-spaced probe grid up to probe_horizon.
  //
  // The two free ratio constants are instantiated at their realized suprema
  // (reported as c0_realized / c1_realized); the remaining inequalities are
  // then checked pointwise.  For the diminishing recipe a violation is
  // tolerated if it is confined to the recipe's burn-in (k < grace_k =
  // k_alpha) and never recurs afterwards; constant schedules get no grace.
  Validation validate(const ProblemConstants& pc, const DerivedConstants& dc,
                      long probe_horizon = 2000000) const;
};

// Recipe for strongly convex outer objectives (requires pc.mu_ell > 0):
//   k_alpha = max{ 35 (L_g/mu_g)^3 (1+sigma_g^2)^{3/2},
//                  512^{3/2} L^2 L_y^2 / mu_ell^2 },
//   c_alpha = 8/(3 mu_ell),   k_beta = k_alpha/4,   c_beta = 32/(3 mu_g),
// with diminishing steps as documented on StepSchedule, or the constant
// variant alpha = c_alpha/k_alpha, beta = c_beta/k_beta^{2/3}.
StepSchedule schedule_sc(const ProblemConstants& pc, const DerivedConstants& dc,
                         bool diminishing, double bias_target_prefactor = 1.0);

// Horizon-K constant steps for weakly convex outer objectives:
//   alpha = min{ mu_g^2 / (8 L_y L L_g^2 (1+sigma_g^2)),  K^{-3/5}/(4 L_y L) },
//   beta  = min{ mu_g   / (L_g^2 (1+sigma_g^2)),          (2/mu_g) K^{-2/5} },
// and bias target b_k^2 <= alpha.  Requires L * L_y > 0.
StepSchedule schedule_wc(const ProblemConstants& pc, const DerivedConstants& dc,
                         long K);

// Horizon-K constant steps for convex outer objectives: the same caps with
// K^{-3/4} / K^{-1/2} horizon arms and bias target b_k <= c_b K^{-1/4}.
StepSchedule schedule_cvx(const ProblemConstants& pc,
                          const DerivedConstants& dc, long K,
                          double c_b = 1.0);

// Free-form power-law steps; validate() only checks positivity and
// monotonicity for this regime.  tmax_override = 0 keeps the bias-targeted
// truncation rule with target alpha(k+1).
StepSchedule schedule_custom(double c_alpha, double alpha_exp, double c_beta,
                             double beta_exp, double c_h, double bias_base,
                             double contraction, int tmax_override = 0);

}  // namespace ttsa
