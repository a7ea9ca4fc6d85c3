#include "ttsa/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace ttsa {

namespace {

constexpr double kStochasticTol = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// Strong connectivity of the directed graph with edges where chain(s,s') > 0.
bool strongly_connected(const Mat& chain) {
  const Index n = chain.rows();
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Index> stack{0};
    seen[0] = 1;
    Index count = 1;
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (Index v = 0; v < n; ++v) {
        const double w = transpose ? chain(v, u) : chain(u, v);
        if (w > 1e-15 && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

}  // namespace

void TabularMdp::validate() const {
  require(n_states >= 1 && n_actions >= 1,
          "TabularMdp: n_states and n_actions must be >= 1");
  require(gamma >= 0.0 && gamma < 1.0, "TabularMdp: gamma must be in [0, 1)");
  require(P.rows() == n_states * n_actions && P.cols() == n_states,
          "TabularMdp: P must be (n_states*n_actions) x n_states");
  require(r.rows() == n_states && r.cols() == n_actions,
          "TabularMdp: r must be n_states x n_actions");
  require(rho0.size() == n_states, "TabularMdp: rho0 must have n_states entries");
  for (Index i = 0; i < P.rows(); ++i) {
    require(P.row(i).minCoeff() >= 0.0,
            "TabularMdp: transition probabilities must be non-negative");
    require(std::abs(P.row(i).sum() - 1.0) <= kStochasticTol,
            "TabularMdp: transition rows must sum to 1");
  }
  require(r.allFinite() && r.minCoeff() >= 0.0,
          "TabularMdp: rewards must be finite and non-negative");
  require(rho0.minCoeff() >= 0.0 &&
              std::abs(rho0.sum() - 1.0) <= kStochasticTol,
          "TabularMdp: rho0 must be a probability vector");
}

Mat TabularMdp::induced_chain(const Policy& pi) const {
  Mat chain = Mat::Zero(n_states, n_states);
  for (Index s = 0; s < n_states; ++s) {
    for (Index a = 0; a < n_actions; ++a) {
      chain.row(s) += pi(s, a) * P.row(sa_index(s, a));
    }
  }
  return chain;
}

Policy uniform_policy(const TabularMdp& mdp) {
  return Mat::Constant(mdp.n_states, mdp.n_actions,
                       1.0 / static_cast<double>(mdp.n_actions));
}

void require_policy(const TabularMdp& mdp, const Policy& pi, double tol) {
  require(pi.rows() == mdp.n_states && pi.cols() == mdp.n_actions,
          "policy: must be n_states x n_actions");
  for (Index s = 0; s < mdp.n_states; ++s) {
    require(pi.row(s).minCoeff() >= -tol,
            "policy: action probabilities must be non-negative");
    require(std::abs(pi.row(s).sum() - 1.0) <= tol,
            "policy: rows must sum to 1");
  }
}

PolicyValues exact_q(const TabularMdp& mdp, const Policy& pi) {
  require_policy(mdp, pi);
  const Index S = mdp.n_states;
  const Index A = mdp.n_actions;
  const Index n = S * A;
  // Pi lifts state values back to pairs: Pi(s', (s',a')) = pi(a'|s').
  Mat Pi = Mat::Zero(S, n);
  for (Index s = 0; s < S; ++s) {
    for (Index a = 0; a < A; ++a) Pi(s, mdp.sa_index(s, a)) = pi(s, a);
  }
  const Mat M = Mat::Identity(n, n) - mdp.gamma * mdp.P * Pi;
  Vec r_vec(n);
  for (Index s = 0; s < S; ++s) {
    for (Index a = 0; a < A; ++a) r_vec(mdp.sa_index(s, a)) = mdp.r(s, a);
  }
  const Vec q = M.partialPivLu().solve(r_vec);
  const double residual = (M * q - r_vec).norm();
  if (!(residual <= 1e-10 * std::max(1.0, r_vec.norm()))) {
    throw std::runtime_error("exact_q: Bellman solve residual too large");
  }
  PolicyValues out;
  out.Q.resize(S, A);
  out.V.resize(S);
  for (Index s = 0; s < S; ++s) {
    for (Index a = 0; a < A; ++a) out.Q(s, a) = q(mdp.sa_index(s, a));
    out.V(s) = pi.row(s).dot(out.Q.row(s));
  }
  return out;
}

double policy_objective(const TabularMdp& mdp, const Policy& pi) {
  return -mdp.rho0.dot(exact_q(mdp, pi).V);
}

Vec discounted_visitation(const TabularMdp& mdp, const Policy& pi) {
  const Mat chain = mdp.induced_chain(pi);
  const Mat M =
      Mat::Identity(mdp.n_states, mdp.n_states) - mdp.gamma * chain;
  // d' = (1-gamma) rho0' M^{-1}  <=>  M' d = (1-gamma) rho0.
  Vec d = M.transpose().partialPivLu().solve(
      Vec((1.0 - mdp.gamma) * mdp.rho0));
  d = d.cwiseMax(0.0);
  return d / d.sum();
}

StateDistributions stationary_and_visitation(const TabularMdp& mdp,
                                             const Policy& pi) {
  require_policy(mdp, pi);
  const Mat chain = mdp.induced_chain(pi);
  if (!strongly_connected(chain)) {
    throw std::invalid_argument(
        "stationary_and_visitation: induced chain is reducible; the "
        "unique-stationary-distribution assumption fails");
  }
  const Index S = mdp.n_states;
  // Solve (chain' - I) mu = 0 with the normalization row sum(mu) = 1.
  Mat M = chain.transpose() - Mat::Identity(S, S);
  M.row(S - 1).setOnes();
  Vec rhs = Vec::Zero(S);
  rhs(S - 1) = 1.0;
  Vec mu = M.partialPivLu().solve(rhs);
  if (!mu.allFinite() || mu.minCoeff() < -1e-10) {
    throw std::runtime_error(
        "stationary_and_visitation: stationary solve failed");
  }
  mu = mu.cwiseMax(0.0);
  mu /= mu.sum();

  StateDistributions out;
  out.mu_pi = std::move(mu);
  out.d_pi = discounted_visitation(mdp, pi);
  return out;
}

Vec visitation_from_pair(const TabularMdp& mdp, const Policy& pi, Index s,
                         Index a) {
  const Mat chain = mdp.induced_chain(pi);
  const Mat M =
      Mat::Identity(mdp.n_states, mdp.n_states) - mdp.gamma * chain;
  // w' = P(.|s,a)' M^{-1}  <=>  M' w = P(.|s,a).
  const Vec w = M.transpose().partialPivLu().solve(
      Vec(mdp.P.row(mdp.sa_index(s, a)).transpose()));
  Vec out = mdp.gamma * w;
  out(s) += 1.0;
  out *= (1.0 - mdp.gamma);
  out = out.cwiseMax(0.0);
  return out / out.sum();
}

OptimalPolicy optimal_policy(const TabularMdp& mdp, long max_iters) {
  mdp.validate();
  const Index S = mdp.n_states;
  const Index A = mdp.n_actions;
  auto greedy = [&](const Mat& Q) {
    Policy pi = Mat::Zero(S, A);
    for (Index s = 0; s < S; ++s) {
      Index best = 0;
      Q.row(s).maxCoeff(&best);
      pi(s, best) = 1.0;
    }
    return pi;
  };

  OptimalPolicy out;
  out.pi = uniform_policy(mdp);
  for (long it = 0; it < max_iters; ++it) {
    const PolicyValues values = exact_q(mdp, out.pi);
    const Policy next = greedy(values.Q);
    ++out.iterations;
    if (next == out.pi) {
      out.Q = values.Q;
      out.V = values.V;
      return out;
    }
    out.pi = next;
  }
  throw std::runtime_error("optimal_policy: policy iteration did not settle");
}

double check_pdl(const TabularMdp& mdp, const Policy& pi,
                 const Policy& pi_ref) {
  const PolicyValues v_pi = exact_q(mdp, pi);
  const PolicyValues v_ref = exact_q(mdp, pi_ref);
  const double lhs = -mdp.rho0.dot(v_pi.V) + mdp.rho0.dot(v_ref.V);
  const Vec d_ref = discounted_visitation(mdp, pi_ref);
  double rhs = 0.0;
  for (Index s = 0; s < mdp.n_states; ++s) {
    rhs += d_ref(s) * v_pi.Q.row(s).dot(pi_ref.row(s) - pi.row(s));
  }
  rhs /= (1.0 - mdp.gamma);
  return std::abs(lhs - rhs);
}

NacAssumptionConstants estimate_assumption_constants(
    const TabularMdp& mdp, const std::vector<Policy>& policies) {
  if (policies.empty()) {
    throw std::invalid_argument(
        "estimate_assumption_constants: need at least one sampled policy");
  }
  NacAssumptionConstants out;
  out.r_bar = mdp.max_reward();

  out.mu_phi_sq = std::numeric_limits<double>::infinity();
  for (const Policy& pi : policies) {
    double candidate = 0.0;
    try {
      const Vec mu = stationary_and_visitation(mdp, pi).mu_pi;
      candidate = std::numeric_limits<double>::infinity();
      for (Index s = 0; s < mdp.n_states; ++s) {
        for (Index a = 0; a < mdp.n_actions; ++a) {
          candidate = std::min(candidate, mu(s) * pi(s, a));
        }
      }
    } catch (const std::invalid_argument&) {
      candidate = 0.0;
      out.warning =
          "a sampled policy induces a reducible chain; feature-covariance "
          "floor reported as 0";
    }
    out.mu_phi_sq = std::min(out.mu_phi_sq, candidate);
  }
  if (out.mu_phi_sq == 0.0 && out.warning.empty()) {
    out.warning =
        "a sampled policy puts zero mass on some state-action pair; "
        "feature-covariance floor reported as 0";
  }

  const Vec rho_star = discounted_visitation(mdp, optimal_policy(mdp).pi);
  double worst_ratio_sq = 0.0;
  for (const Policy& pi : policies) {
    for (Index s = 0; s < mdp.n_states; ++s) {
      for (Index a = 0; a < mdp.n_actions; ++a) {
        const Vec rho_sa = visitation_from_pair(mdp, pi, s, a);
        double ratio_sq = 0.0;
        for (Index sp = 0; sp < mdp.n_states; ++sp) {
          if (rho_star(sp) > 0.0) {
            ratio_sq += rho_sa(sp) * rho_sa(sp) / rho_star(sp);
          } else if (rho_sa(sp) > 0.0) {
            ratio_sq = std::numeric_limits<double>::infinity();
            break;
          }
        }
        worst_ratio_sq = std::max(worst_ratio_sq, ratio_sq);
      }
    }
  }
  out.c_rho = std::sqrt(worst_ratio_sq);
  return out;
}

TabularMdp make_random_mdp(Index n_states, Index n_actions, double gamma,
                           std::uint64_t seed) {
  require(n_states >= 1 && n_actions >= 1,
          "make_random_mdp: n_states and n_actions must be >= 1");
  require(gamma >= 0.0 && gamma < 1.0, "make_random_mdp: gamma in [0, 1)");
  RngStream rng(seed);
  TabularMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.gamma = gamma;
  mdp.P.resize(n_states * n_actions, n_states);
  for (Index i = 0; i < mdp.P.rows(); ++i) {
    Vec row(n_states);
    for (Index s = 0; s < n_states; ++s) {
      // Floored exponential weight keeps every entry strictly positive.
      row(s) = 0.05 - std::log(1.0 - rng.next_double());
    }
    mdp.P.row(i) = row.transpose() / row.sum();
  }
  mdp.r.resize(n_states, n_actions);
  for (Index s = 0; s < n_states; ++s) {
    for (Index a = 0; a < n_actions; ++a) mdp.r(s, a) = rng.next_double();
  }
  mdp.rho0 =
      Vec::Constant(n_states, 1.0 / static_cast<double>(n_states));
  mdp.validate();
  return mdp;
}

std::string mdp_to_json(const TabularMdp& mdp) {
  nlohmann::json j;
  j["n_states"] = mdp.n_states;
  j["n_actions"] = mdp.n_actions;
  j["gamma"] = mdp.gamma;
  j["rho0"] = std::vector<double>(mdp.rho0.data(),
                                  mdp.rho0.data() + mdp.rho0.size());
  nlohmann::json P = nlohmann::json::array();
  for (Index s = 0; s < mdp.n_states; ++s) {
    nlohmann::json per_state = nlohmann::json::array();
    for (Index a = 0; a < mdp.n_actions; ++a) {
      const auto row = mdp.P.row(mdp.sa_index(s, a));
      std::vector<double> probs(row.data(), row.data() + row.size());
      per_state.push_back(probs);
    }
    P.push_back(per_state);
  }
  j["P"] = P;
  nlohmann::json r = nlohmann::json::array();
  for (Index s = 0; s < mdp.n_states; ++s) {
    std::vector<double> row(static_cast<std::size_t>(mdp.n_actions));
    for (Index a = 0; a < mdp.n_actions; ++a) {
      row[static_cast<std::size_t>(a)] = mdp.r(s, a);
    }
    r.push_back(row);
  }
  j["r"] = r;
  return j.dump(2);
}

TabularMdp mdp_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    TabularMdp mdp;
    mdp.n_states = j.at("n_states").get<Index>();
    mdp.n_actions = j.at("n_actions").get<Index>();
    mdp.gamma = j.at("gamma").get<double>();
    const auto rho0 = j.at("rho0").get<std::vector<double>>();
    mdp.rho0 = Eigen::Map<const Vec>(rho0.data(),
                                     static_cast<Index>(rho0.size()));
    mdp.P.resize(mdp.n_states * mdp.n_actions, mdp.n_states);
    const auto& P = j.at("P");
    for (Index s = 0; s < mdp.n_states; ++s) {
      for (Index a = 0; a < mdp.n_actions; ++a) {
        const auto probs =
            P.at(static_cast<std::size_t>(s)).at(static_cast<std::size_t>(a));
        for (Index sp = 0; sp < mdp.n_states; ++sp) {
          mdp.P(mdp.sa_index(s, a), sp) =
              probs.at(static_cast<std::size_t>(sp)).get<double>();
        }
      }
    }
    mdp.r.resize(mdp.n_states, mdp.n_actions);
    const auto& r = j.at("r");
    for (Index s = 0; s < mdp.n_states; ++s) {
      for (Index a = 0; a < mdp.n_actions; ++a) {
        mdp.r(s, a) = r.at(static_cast<std::size_t>(s))
                          .at(static_cast<std::size_t>(a))
                          .get<double>();
      }
    }
    mdp.validate();
    return mdp;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("mdp_from_json: ") + e.what());
  }
}

void save_mdp(const TabularMdp& mdp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mdp: cannot open " + path);
  out << mdp_to_json(mdp) << "\n";
  if (!out) throw std::runtime_error("save_mdp: write failed for " + path);
}

TabularMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mdp: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return mdp_from_json(buffer.str());
}

}  // namespace ttsa
