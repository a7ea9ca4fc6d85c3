#include "ttsa/nac.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace ttsa {

namespace {

// Inverse-CDF draw from a probability row; the trailing guard absorbs
// floating-point shortfall in the cumulative sum.
template <typename Row>
Index sample_categorical(const Row& probs, RngStream& rng) {
  const double u = rng.next_double();
  double acc = 0.0;
  Index last_positive = 0;
  for (Index i = 0; i < probs.size(); ++i) {
    if (probs(i) > 0.0) last_positive = i;
    acc += probs(i);
    if (u < acc) return i;
  }
  return last_positive;
}

Policy random_full_support_policy(Index n_states, Index n_actions,
                                  RngStream& rng) {
  Policy pi(n_states, n_actions);
  for (Index s = 0; s < n_states; ++s) {
    Vec row(n_actions);
    for (Index a = 0; a < n_actions; ++a) {
      row(a) = 0.05 - std::log(1.0 - rng.next_double());
    }
    pi.row(s) = row.transpose() / row.sum();
  }
  return pi;
}

}  // namespace

Vec pack_q(const TabularMdp& mdp, const Mat& Q) {
  Vec theta(mdp.n_states * mdp.n_actions);
  for (Index s = 0; s < mdp.n_states; ++s) {
    for (Index a = 0; a < mdp.n_actions; ++a) {
      theta(mdp.sa_index(s, a)) = Q(s, a);
    }
  }
  return theta;
}

Vec td_critic_step(const TabularMdp& mdp, const Policy& pi, const Vec& mu_pi,
                   const Vec& theta, double beta, RngStream& rng) {
  const Index s = sample_categorical(mu_pi, rng);
  const Index a = sample_categorical(pi.row(s), rng);
  const Index sp = sample_categorical(mdp.P.row(mdp.sa_index(s, a)), rng);
  const Index ap = sample_categorical(pi.row(sp), rng);
  const double td_error = theta(mdp.sa_index(s, a)) - mdp.r(s, a) -
                          mdp.gamma * theta(mdp.sa_index(sp, ap));
  Vec out = theta;
  out(mdp.sa_index(s, a)) -= beta * td_error;
  return out;
}

Vec td_critic_step(const TabularMdp& mdp, const Policy& pi, const Vec& theta,
                   double beta, RngStream& rng) {
  const Vec mu_pi = stationary_and_visitation(mdp, pi).mu_pi;
  return td_critic_step(mdp, pi, mu_pi, theta, beta, rng);
}

Policy nac_actor_step(const Policy& pi, const Vec& theta, double alpha,
                      double gamma) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("nac_actor_step: requires alpha > 0");
  }
  const Index S = pi.rows();
  const Index A = pi.cols();
  const double scale = alpha / (1.0 - gamma);
  Policy out(S, A);
  for (Index s = 0; s < S; ++s) {
    Vec tilt(A);
    for (Index a = 0; a < A; ++a) tilt(a) = scale * theta(s * A + a);
    const double m = tilt.maxCoeff();
    Vec row(A);
    for (Index a = 0; a < A; ++a) row(a) = pi(s, a) * std::exp(tilt(a) - m);
    const double total = row.sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw std::runtime_error(
          "nac_actor_step: policy row degenerated under the critic tilt");
    }
    out.row(s) = row.transpose() / total;
  }
  return out;
}

NacTrace ttnac_run(const TabularMdp& mdp, long k_max,
                   const NacOptions& options, RngStream& rng) {
  mdp.validate();
  if (k_max < 1) throw std::invalid_argument("ttnac_run: k_max >= 1");

  Policy pi = options.pi0.size() ? options.pi0 : uniform_policy(mdp);
  require_policy(mdp, pi);
  Vec theta = options.theta0.size()
                  ? options.theta0
                  : Vec(Vec::Zero(mdp.n_states * mdp.n_actions));
  if (theta.size() != mdp.n_states * mdp.n_actions) {
    throw std::invalid_argument("ttnac_run: theta0 must have S*A entries");
  }

  NacTrace trace;
  trace.k_max = k_max;

  // Assumption constants: caller-supplied when complete, estimated from the
  // initial policy plus random probes otherwise.
  NacAssumptionConstants consts = options.constants;
  const bool need_recipe =
      options.alpha_override <= 0.0 || options.beta_override <= 0.0;
  if (need_recipe &&
      (consts.mu_phi_sq <= 0.0 || consts.c_rho <= 0.0 || consts.r_bar <= 0.0)) {
    RngStream probe = rng.split();
    std::vector<Policy> policies{pi};
    for (int i = 0; i < options.n_probe_policies; ++i) {
      policies.push_back(
          random_full_support_policy(mdp.n_states, mdp.n_actions, probe));
    }
    consts = estimate_assumption_constants(mdp, policies);
  }
  trace.constants = consts;

  const double g1 = 1.0 - mdp.gamma;
  if (options.alpha_override > 0.0) {
    trace.alpha = options.alpha_override;
  } else {
    if (!(consts.mu_phi_sq > 0.0) || !(consts.c_rho > 0.0) ||
        !(consts.r_bar > 0.0) || !std::isfinite(consts.c_rho)) {
      throw std::invalid_argument(
          "ttnac_run: step-size recipe needs positive, finite assumption "
          "constants; supply overrides");
    }
    const double lead = g1 * g1 * g1 * std::sqrt(consts.mu_phi_sq) /
                        std::sqrt(consts.r_bar * consts.c_rho * consts.c_rho);
    trace.alpha = options.alpha_scale * lead *
                  std::min(g1 * g1 * consts.mu_phi_sq / 128.0,
                           std::pow(static_cast<double>(k_max), -0.75));
  }
  if (options.beta_override > 0.0) {
    trace.beta = options.beta_override;
  } else {
    if (!(consts.mu_phi_sq > 0.0)) {
      throw std::invalid_argument(
          "ttnac_run: step-size recipe needs positive, finite assumption "
          "constants; supply overrides");
    }
    trace.beta =
        options.beta_scale *
        std::min(g1 * consts.mu_phi_sq / 8.0,
                 16.0 / (g1 * consts.mu_phi_sq) *
                     std::pow(static_cast<double>(k_max), -0.5));
  }

  const OptimalPolicy star = optimal_policy(mdp);
  const double ell_star = -mdp.rho0.dot(star.V);
  const Vec rho_star = discounted_visitation(mdp, star.pi);

  const long stride = std::max<long>(1, options.record_stride);
  Mat q_prev;  // Q^{pi^{k-1}}, initialized below with pi^{-1} := pi^0
  double opt_sum = 0.0;
  double delta_q_sum = 0.0;
  PolicyValues values = exact_q(mdp, pi);
  q_prev = values.Q;
  for (long k = 0; k < k_max; ++k) {
    const double opt = -mdp.rho0.dot(values.V) - ell_star;
    const double delta_q = (theta - pack_q(mdp, q_prev)).squaredNorm();
    opt_sum += opt;
    if (k >= 1) delta_q_sum += delta_q;
    if (k == 0) trace.opt0 = opt;
    trace.best_opt = std::min(trace.best_opt, opt);

    const Vec mu_pi = stationary_and_visitation(mdp, pi).mu_pi;
    const Vec theta_next =
        td_critic_step(mdp, pi, mu_pi, theta, trace.beta, rng);
    if (!theta_next.allFinite() ||
        theta_next.cwiseAbs().maxCoeff() > options.divergence_cap) {
      throw std::runtime_error("ttnac_run: critic diverged at iteration " +
                               std::to_string(k));
    }
    const Policy pi_next =
        nac_actor_step(pi, theta_next, trace.alpha, mdp.gamma);

    if (k % stride == 0 || k == k_max - 1) {
      double tv = 0.0;
      for (Index s = 0; s < mdp.n_states; ++s) {
        const double l1 = (pi_next.row(s) - pi.row(s)).cwiseAbs().sum();
        tv += rho_star(s) * l1 * l1;
      }
      trace.rows.push_back({k, opt, delta_q, tv});
    }

    q_prev = values.Q;
    theta = theta_next;
    pi = pi_next;
    trace.total_draws += 4;
    if (k + 1 < k_max) values = exact_q(mdp, pi);
  }
  // Tail tracking error Delta_Q^K against the last in-loop policy.
  delta_q_sum += (theta - pack_q(mdp, q_prev)).squaredNorm();

  trace.mean_opt = opt_sum / static_cast<double>(k_max);
  trace.mean_delta_q = delta_q_sum / static_cast<double>(k_max);
  trace.pi_final = pi;
  trace.theta_final = theta;
  return trace;
}

}  // namespace ttsa
