#pragma once

#include <limits>
#include <vector>

#include "ttsa/mdp.hpp"
#include "ttsa/rng.hpp"

namespace ttsa {

// Critic parameters use the tabular feature packing Q_theta(s, a) =
// theta(s * n_actions + a), the canonical-basis feature map under which the
// linear parameterization is exact and theta*(pi) is the packed Q^pi.
Vec pack_q(const TabularMdp& mdp, const Mat& Q);

// One TD(0) critic step.  Draws (s, a, s', a') with s from the exact
// stationary distribution mu_pi of the induced chain (passed in so callers
// can cache it across steps), a ~ pi(.|s), s' ~ P(.|s,a), a' ~ pi(.|s'), in
// that order (4 draws), and returns
//   theta - beta [theta(s,a) - r(s,a) - gamma theta(s',a')] e_(s,a).
Vec td_critic_step(const TabularMdp& mdp, const Policy& pi, const Vec& mu_pi,
                   const Vec& theta, double beta, RngStream& rng);

// Convenience overload that computes mu_pi on the fly.
Vec td_critic_step(const TabularMdp& mdp, const Policy& pi, const Vec& theta,
                   double beta, RngStream& rng);

// Exponentiated-gradient actor step — the per-state closed form of the
// KL-regularized mirror-descent update:
//   pi'(.|s)  proportional to  pi(.|s) exp[alpha (1-gamma)^{-1} Q_theta(s,.)],
// with the per-state maximum subtracted before exponentiation so the update
// cannot overflow.  Requires alpha > 0.
Policy nac_actor_step(const Policy& pi, const Vec& theta, double alpha,
                      double gamma);

struct NacRow {
  long k = 0;
  double opt = 0.0;      // l(pi^k) - l(pi*), exact
  double delta_q = 0.0;  // ||theta^k - pack_q(Q^{pi^{k-1}})||^2, pi^{-1} := pi^0
  double tv_step = 0.0;  // sum_s rho*(s) ||pi^{k+1}(.|s) - pi^k(.|s)||_1^2
};

struct NacTrace {
  double alpha = 0.0;
  double beta = 0.0;
  long k_max = 0;
  long total_draws = 0;  // 4 state/action draws per iteration
  std::vector<NacRow> rows;
  // Uniform-random-iterate expectations: mean OPT over k = 0..K-1 and mean
  // Delta_Q over k = 1..K.
  double mean_opt = 0.0;
  double mean_delta_q = 0.0;
  double opt0 = 0.0;
  double best_opt = std::numeric_limits<double>::infinity();
  Policy pi_final;
  Vec theta_final;
  NacAssumptionConstants constants;  // the constants the recipe used
};

struct NacOptions {
  // Direct step sizes; when > 0 they win over the recipe below.
  double alpha_override = 0.0;
  double beta_override = 0.0;
  // Otherwise, with mu2 = mu_phi_sq and g = gamma:
  //   alpha = (1-g)^3 sqrt(mu2) / sqrt(r_bar c_rho^2)
  //             * min{ (1-g)^2 mu2 / 128, k_max^{-3/4} } * alpha_scale,
  //   beta  = min{ (1-g) mu2 / 8, 16 / ((1-g) mu2) * k_max^{-1/2} } * beta_scale.
  // The scale knobs keep the K-dependence while adjusting the prefactor.
  double alpha_scale = 1.0;
  double beta_scale = 1.0;
  // Zero constants are estimated from the initial policy plus
  // n_probe_policies random full-support policies (one extra draw from the
  // run's stream seeds the probe generator).
  NacAssumptionConstants constants;
  int n_probe_policies = 16;
  long record_stride = 1;  // row thinning; the means always use every k
  double divergence_cap = 1e9;
  Policy pi0;   // empty: uniform
  Vec theta0;   // empty: zero
};

// Interleaved critic/actor loop with constant steps; records the exact
// optimality gap, critic tracking error, and policy movement per iteration.
// Throws std::runtime_error if theta exceeds the divergence cap.
NacTrace ttnac_run(const TabularMdp& mdp, long k_max,
                   const NacOptions& options, RngStream& rng);

}  // namespace ttsa
