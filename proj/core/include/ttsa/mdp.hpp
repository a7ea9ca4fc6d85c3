#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttsa/linalg.hpp"
#include "ttsa/rng.hpp"

namespace ttsa {

// Policies are row-stochastic n_states x n_actions matrices: pi(s, a) is the
// probability of playing action a in state s.
using Policy = Mat;

// Finite Markov decision process with discounted reward.  Transition
// probabilities are stored as an (S*A) x S matrix whose row index packs
// (s, a) as s * n_actions + a.
struct TabularMdp {
  Index n_states = 0;
  Index n_actions = 0;
  Mat P;        // (S*A) x S, row (s,a) is P(. | s, a)
  Mat r;        // S x A, rewards in [0, r_bar]
  double gamma = 0.9;
  Vec rho0;     // initial state distribution

  Index sa_index(Index s, Index a) const { return s * n_actions + a; }

  // Throws std::invalid_argument naming the violated condition: positive
  // sizes, gamma in [0,1), rows of P summing to 1 within 1e-12, non-negative
  // finite rewards, rho0 a probability vector.
  void validate() const;

  // Markov matrix on states induced by a policy:
  // P_pi(s, s') = sum_a pi(a|s) P(s'|s,a).
  Mat induced_chain(const Policy& pi) const;

  double max_reward() const { return r.size() ? r.maxCoeff() : 0.0; }
};

// Uniform-over-actions policy.
Policy uniform_policy(const TabularMdp& mdp);

// Validates row-stochasticity of a policy within tol.
void require_policy(const TabularMdp& mdp, const Policy& pi,
                    double tol = 1e-9);

// Action-value and state-value functions of a policy, by solving the linear
// Bellman system (I - gamma P Pi) q = r exactly; the solve residual is
// checked against 1e-10 * max(1, ||r||).
struct PolicyValues {
  Mat Q;  // S x A
  Vec V;  // S
};
PolicyValues exact_q(const TabularMdp& mdp, const Policy& pi);

// rho0-weighted objective minimized by the policy-optimization outer
// problem: ell(pi) = -sum_s rho0(s) V^pi(s).
double policy_objective(const TabularMdp& mdp, const Policy& pi);

// Normalized discounted state visitation from the initial distribution:
// d_pi(s) = (1-gamma) rho0' (I - gamma P_pi)^{-1}.  Defined for every
// policy (gamma < 1), irreducible chain or not.
Vec discounted_visitation(const TabularMdp& mdp, const Policy& pi);

// Stationary distribution mu_pi of the induced chain and the normalized
// discounted visitation d_pi(s) = (1-gamma) rho0' (I - gamma P_pi)^{-1}.
// Computing mu_pi requires the induced chain to be irreducible; a reducible
// chain throws std::invalid_argument (the unique-stationary-distribution
// assumption fails).
struct StateDistributions {
  Vec mu_pi;  // stationary distribution of the induced chain
  Vec d_pi;   // normalized discounted visitation from rho0
};
StateDistributions stationary_and_visitation(const TabularMdp& mdp,
                                             const Policy& pi);

// Normalized discounted visitation over states when starting from the fixed
// pair (s, a) and following pi afterwards:
// (1-gamma) [ e_s + gamma P(.|s,a)' (I - gamma P_pi)^{-1} ].
Vec visitation_from_pair(const TabularMdp& mdp, const Policy& pi, Index s,
                         Index a);

// Exact optimal policy by Howard policy iteration: greedy improvement
// against exactly evaluated Q functions terminates finitely at an optimal
// deterministic policy, so Q and V are optimal to linear-solver precision.
struct OptimalPolicy {
  Policy pi;
  Mat Q;
  Vec V;
  long iterations = 0;
};
OptimalPolicy optimal_policy(const TabularMdp& mdp, long max_iters = 10000);

// Performance-difference residual: evaluates both sides of
//   ell(pi) - ell(pi_ref) = (1-gamma)^{-1} <Q^pi, pi_ref - pi>_{d^{pi_ref}}
// with the NORMALIZED visitation d^{pi_ref} and returns |LHS - RHS|.
// The identity holds for any policy pair.
double check_pdl(const TabularMdp& mdp, const Policy& pi,
                 const Policy& pi_ref);

// Constants used by the actor-critic step-size recipe, with tabular closed
// forms: mu_phi_sq is the smallest entry of diag(mu_pi(s) pi(a|s)) over the
// sampled policies; c_rho bounds the second moment of the density ratio
// between pair-visitation measures and the optimal policy's visitation; and
// r_bar is the largest reward.
struct NacAssumptionConstants {
  double mu_phi_sq = 0.0;
  double c_rho = 0.0;
  double r_bar = 0.0;
  std::string warning;  // non-empty when some sampled policy degenerates
};
NacAssumptionConstants estimate_assumption_constants(
    const TabularMdp& mdp, const std::vector<Policy>& policies);

// Random dense MDP: transition rows are floored exponential weights,
// normalized (strictly positive, so the induced chain is irreducible under
// any full-support policy); rewards uniform in [0, 1]; rho0 uniform.
TabularMdp make_random_mdp(Index n_states, Index n_actions, double gamma,
                           std::uint64_t seed);

// JSON serialization with fields n_states, n_actions, P (nested [s][a][s']),
// r ([s][a]), gamma, rho0.
std::string mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const std::string& text);
void save_mdp(const TabularMdp& mdp, const std::string& path);
TabularMdp load_mdp(const std::string& path);

}  // namespace ttsa
