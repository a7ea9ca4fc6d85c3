#include "ttsa/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ttsa {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::sc_diminishing: return "sc-diminishing";
    case Regime::sc_constant: return "sc-constant";
    case Regime::convex: return "convex";
    case Regime::weakly_convex: return "weakly-convex";
    case Regime::nac_convex: return "nac-convex";
    case Regime::custom: return "custom";
  }
  return "unknown";
}

Regime regime_from_name(const std::string& name) {
  if (name == "sc-diminishing" || name == "StronglyConvex-Diminishing")
    return Regime::sc_diminishing;
  if (name == "sc-constant" || name == "StronglyConvex-Constant")
    return Regime::sc_constant;
  if (name == "convex" || name == "Convex") return Regime::convex;
  if (name == "weakly-convex" || name == "WeaklyConvex")
    return Regime::weakly_convex;
  if (name == "nac-convex" || name == "NacConvex") return Regime::nac_convex;
  if (name == "custom" || name == "Custom") return Regime::custom;
  throw std::invalid_argument("regime_from_name: unknown regime '" + name + "'");
}

int tmax_for_target(double bias_base, double contraction, double target_sq,
                    int t_cap) {
  if (!(contraction >= 0.0 && contraction < 1.0)) {
    throw std::invalid_argument(
        "tmax_for_target: contraction must lie in [0, 1)");
  }
  if (t_cap < 1) {
    throw std::invalid_argument("tmax_for_target: t_cap must be >= 1");
  }
  if (!(target_sq >= 0.0)) {
    throw std::invalid_argument("tmax_for_target: target_sq must be >= 0");
  }
  if (bias_base <= 0.0 || contraction == 0.0) return 1;
  double bias = bias_base * contraction;  // tail bound after one term
  int t = 1;
  while (bias * bias > target_sq && t < t_cap) {
    bias *= contraction;
    ++t;
  }
  return t;
}

double default_c_h(const ProblemConstants& pc) {
  // Clamped into (0, 1] so every series factor keeps a spectrum in [0, 1);
  // the unclamped ratio already lies below 1 whenever mu_g^2 + sigma_gxy^2
  // >= mu_g, which holds for all problem families shipped here.
  return std::min(1.0, pc.mu_g / (pc.mu_g * pc.mu_g + pc.sigma_gxy * pc.sigma_gxy));
}

double StepSchedule::alpha(long k) const {
  switch (regime) {
    case Regime::sc_diminishing:
      return c_alpha / (static_cast<double>(k) + k_alpha);
    case Regime::sc_constant:
    case Regime::convex:
    case Regime::weakly_convex:
    case Regime::nac_convex:
      return alpha_const;
    case Regime::custom:
      return c_alpha * std::pow(1.0 + static_cast<double>(k), -alpha_exp);
  }
  return 0.0;
}

double StepSchedule::beta(long k) const {
  switch (regime) {
    case Regime::sc_diminishing:
      return c_beta / std::pow(static_cast<double>(k) + k_beta, 2.0 / 3.0);
    case Regime::sc_constant:
    case Regime::convex:
    case Regime::weakly_convex:
    case Regime::nac_convex:
      return beta_const;
    case Regime::custom:
      return c_beta * std::pow(1.0 + static_cast<double>(k), -beta_exp);
  }
  return 0.0;
}

int StepSchedule::tmax(long k) const {
  if (tmax_override > 0) return tmax_override;
  const double target_sq = bias_target_const_sq >= 0.0
                               ? bias_target_const_sq
                               : bias_target_prefactor * alpha(k + 1);
  return tmax_for_target(bias_base, contraction, target_sq, tmax_cap);
}

namespace {

// Probe grid: dense over the first 64 iterations, then log-spaced.
std::vector<long> probe_grid(long horizon) {
  std::vector<long> ks;
  for (long k = 0; k <= std::min<long>(63, horizon); ++k) ks.push_back(k);
  double k = 64.0;
  while (static_cast<long>(k) <= horizon) {
    ks.push_back(static_cast<long>(k));
    k = std::max(k + 1.0, k * 1.12);
  }
  if (ks.empty() || ks.back() != horizon) ks.push_back(horizon);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

// Evaluates lhs(k) <= rhs(k) over the grid and summarizes.
StepSchedule::CheckLine eval_line(
    const std::string& name, const std::vector<long>& ks,
    const std::function<bool(long)>& applicable,
    const std::function<double(long)>& lhs,
    const std::function<double(long)>& rhs) {
  constexpr double kRelTol = 1e-12;
  StepSchedule::CheckLine line;
  line.name = name;
  line.worst_margin = std::numeric_limits<double>::infinity();
  long first_ok = -1;
  for (long k : ks) {
    if (!applicable(k)) continue;
    const double l = lhs(k);
    const double r = rhs(k);
    const double margin = (r - l) / std::max(1.0, std::abs(r));
    line.worst_margin = std::min(line.worst_margin, margin);
    if (margin < -kRelTol) {
      line.last_bad_k = k;
      first_ok = -1;
    } else if (first_ok < 0) {
      first_ok = k;
    }
  }
  if (!std::isfinite(line.worst_margin)) line.worst_margin = 0.0;  // never applicable
  line.first_ok_k = first_ok;
  line.ok = (line.last_bad_k < 0);
  return line;
}

}  // namespace

std::string StepSchedule::Validation::summary() const {
  std::ostringstream os;
  os << (ok ? "OK" : "FAIL");
  if (!ok) os << " (" << first_violation << " at k=" << violation_k << ")";
  os << "; realized c0=" << c0_realized << ", c1=" << c1_realized;
  if (grace_k > 0) os << ", burn-in grace up to k=" << grace_k;
  return os.str();
}

StepSchedule::Validation StepSchedule::validate(const ProblemConstants& pc_in,
                                                const DerivedConstants& dc,
                                                long probe_horizon) const {
  const ProblemConstants pc = pc_in.with_defaults();
  pc.validate();
  Validation v;

  const bool sc = (regime == Regime::sc_diminishing || regime == Regime::sc_constant);
  const bool constant_steps = (regime != Regime::sc_diminishing && regime != Regime::custom);
  const std::vector<long> ks =
      constant_steps ? std::vector<long>{0, 1} : probe_grid(probe_horizon);

  auto a = [this](long k) { return alpha(k); };
  auto b = [this](long k) { return beta(k); };
  auto always = [](long) { return true; };
  auto from_one = [](long k) { return k >= 1; };

  // Realized timescale-ratio constants over the grid.
  for (long k : ks) {
    const double ak = a(k), bk = b(k);
    if (ak > 0 && bk > 0) {
      v.c0_realized = std::max(v.c0_realized, ak / std::pow(bk, 1.5));
      v.c1_realized = std::max(v.c1_realized, bk / std::pow(ak, 2.0 / 3.0));
    }
  }
  v.grace_k = (regime == Regime::sc_diminishing)
                  ? static_cast<long>(std::ceil(k_alpha))
                  : 0;

  const double mu_g = pc.mu_g, mu_ell = pc.mu_ell;
  const double noise_cap = mu_g / (pc.L_g * pc.L_g * (1.0 + pc.sigma_g * pc.sigma_g));
  const double coupling = dc.L * dc.L_y;

  if (sc) {
    {
      CheckLine line;
      line.name = "mu_ell_positive";
      line.ok = (mu_ell > 0.0);
      line.last_bad_k = line.ok ? -1 : 0;
      line.worst_margin = mu_ell;
      v.lines.push_back(line);
    }
    v.lines.push_back(eval_line(
        "beta_step_ratio", ks, from_one,
        [&](long k) { return b(k - 1) / b(k); },
        [&](long k) { return 1.0 + (mu_g / 8.0) * b(k); }));
    if (mu_ell > 0.0) {
      v.lines.push_back(eval_line(
          "alpha_step_ratio", ks, from_one,
          [&](long k) { return a(k - 1) / a(k); },
          [&](long k) { return 1.0 + 0.75 * mu_ell * a(k); }));
      v.lines.push_back(eval_line(
          "alpha_cap", ks, always, a, [&](long) { return 1.0 / mu_ell; }));
    }
    v.lines.push_back(eval_line(
        "beta_cap_basic", ks, always, b, [&](long) { return 1.0 / mu_g; }));
    v.lines.push_back(eval_line(
        "beta_cap_noise", ks, always, b, [&](long) { return noise_cap; }));
    if (coupling > 0 && v.c0_realized > 0) {
      const double cap = mu_g * mu_g /
                         (48.0 * v.c0_realized * v.c0_realized * coupling * coupling);
      v.lines.push_back(eval_line(
          "beta_cap_coupling", ks, always, b, [&](long) { return cap; }));
    }
    if (mu_ell > 0.0) {
      v.lines.push_back(eval_line(
          "timescale_separation", ks, always,
          [&](long k) { return 8.0 * mu_ell * a(k); },
          [&](long k) { return mu_g * b(k); }));
    }
  } else if (regime == Regime::convex || regime == Regime::weakly_convex ||
             regime == Regime::nac_convex) {
    v.lines.push_back(eval_line(
        "alpha_positive", {0}, always, [&](long) { return 0.0; },
        [&](long) { return alpha_const; }));
    v.lines.push_back(eval_line(
        "beta_positive", {0}, always, [&](long) { return 0.0; },
        [&](long) { return beta_const; }));
    if (regime != Regime::nac_convex) {
      v.lines.push_back(eval_line(
          "beta_cap_noise", {0}, always, [&](long) { return beta_const; },
          [&](long) { return noise_cap; }));
      if (coupling > 0) {
        v.lines.push_back(eval_line(
            "alpha_beta_ratio", {0}, always, [&](long) { return alpha_const; },
            [&](long) { return mu_g * beta_const / (8.0 * coupling); }));
      }
    }
  } else {  // custom
    v.lines.push_back(eval_line(
        "alpha_positive", ks, always, [&](long) { return 0.0; }, a));
    v.lines.push_back(eval_line(
        "beta_positive", ks, always, [&](long) { return 0.0; }, b));
    v.lines.push_back(eval_line(
        "alpha_nonincreasing", ks, from_one, a, [&](long k) { return a(k - 1); }));
    v.lines.push_back(eval_line(
        "beta_nonincreasing", ks, from_one, b, [&](long k) { return b(k - 1); }));
  }

  // Apply the burn-in grace rule and collect the verdict.
  v.ok = true;
  for (auto& line : v.lines) {
    if (!line.ok && regime == Regime::sc_diminishing &&
        line.last_bad_k >= 0 && line.last_bad_k < v.grace_k &&
        line.first_ok_k >= 0) {
      line.ok = true;  // violation confined to the recipe's burn-in window
    }
    if (!line.ok && v.first_violation.empty()) {
      v.first_violation = line.name;
      v.violation_k = line.last_bad_k;
    }
    v.ok = v.ok && line.ok;
  }
  return v;
}

StepSchedule schedule_sc(const ProblemConstants& pc_in,
                         const DerivedConstants& dc, bool diminishing,
                         double bias_target_prefactor) {
  const ProblemConstants pc = pc_in.with_defaults();
  pc.validate();
  if (pc.mu_ell <= 0.0) {
    throw std::invalid_argument("schedule_sc: requires mu_ell > 0");
  }
  StepSchedule s;
  s.regime = diminishing ? Regime::sc_diminishing : Regime::sc_constant;
  const double cond = pc.L_g / pc.mu_g;
  const double noise = 1.0 + pc.sigma_g * pc.sigma_g;
  const double arm1 = 35.0 * cond * cond * cond * std::pow(noise, 1.5);
  const double coupling = dc.L * dc.L_y;
  const double arm2 =
      std::pow(512.0, 1.5) * coupling * coupling / (pc.mu_ell * pc.mu_ell);
  s.k_alpha = std::max(arm1, arm2);
  s.c_alpha = 8.0 / (3.0 * pc.mu_ell);
  s.k_beta = s.k_alpha / 4.0;
  s.c_beta = 32.0 / (3.0 * pc.mu_g);
  if (!diminishing) {
    s.alpha_const = s.c_alpha / s.k_alpha;
    s.beta_const = s.c_beta / std::pow(s.k_beta, 2.0 / 3.0);
  }
  s.c_h = default_c_h(pc);
  s.bias_base = pc.C_gxy * pc.C_fy / pc.mu_g;
  s.contraction = 1.0 - pc.mu_g * pc.mu_g /
                            (pc.L_g * (pc.mu_g * pc.mu_g +
                                       pc.sigma_gxy * pc.sigma_gxy));
  s.bias_target_prefactor = bias_target_prefactor;
  return s;
}

namespace {

StepSchedule horizon_schedule(const ProblemConstants& pc,
                              const DerivedConstants& dc, long K,
                              double alpha_horizon_exp, double beta_horizon_exp,
                              Regime regime) {
  pc.validate();
  if (K < 1) throw std::invalid_argument("horizon schedule: K must be >= 1");
  const double coupling = dc.L * dc.L_y;
  if (coupling <= 0.0) {
    throw std::invalid_argument(
        std::string(regime_name(regime)) +
        " schedule: requires a positive coupling scale L * L_y");
  }
  const double noise = 1.0 + pc.sigma_g * pc.sigma_g;
  StepSchedule s;
  s.regime = regime;
  const double Kd = static_cast<double>(K);
  s.alpha_const =
      std::min(pc.mu_g * pc.mu_g / (8.0 * coupling * pc.L_g * pc.L_g * noise),
               std::pow(Kd, -alpha_horizon_exp) / (4.0 * coupling));
  s.beta_const = std::min(pc.mu_g / (pc.L_g * pc.L_g * noise),
                          (2.0 / pc.mu_g) * std::pow(Kd, -beta_horizon_exp));
  s.c_h = default_c_h(pc);
  s.bias_base = pc.C_gxy * pc.C_fy / pc.mu_g;
  s.contraction = 1.0 - pc.mu_g * pc.mu_g /
                            (pc.L_g * (pc.mu_g * pc.mu_g +
                                       pc.sigma_gxy * pc.sigma_gxy));
  return s;
}

}  // namespace

StepSchedule schedule_wc(const ProblemConstants& pc_in,
                         const DerivedConstants& dc, long K) {
  const ProblemConstants pc = pc_in.with_defaults();
  StepSchedule s =
      horizon_schedule(pc, dc, K, 3.0 / 5.0, 2.0 / 5.0, Regime::weakly_convex);
  // Bias target b_k^2 <= alpha for the whole run.
  s.bias_target_const_sq = s.alpha_const;
  return s;
}

StepSchedule schedule_cvx(const ProblemConstants& pc_in,
                          const DerivedConstants& dc, long K, double c_b) {
  const ProblemConstants pc = pc_in.with_defaults();
  StepSchedule s =
      horizon_schedule(pc, dc, K, 3.0 / 4.0, 1.0 / 2.0, Regime::convex);
  const double b_target = c_b * std::pow(static_cast<double>(K), -0.25);
  s.bias_target_const_sq = b_target * b_target;
  return s;
}

StepSchedule schedule_custom(double c_alpha, double alpha_exp, double c_beta,
                             double beta_exp, double c_h, double bias_base,
                             double contraction, int tmax_override) {
  if (c_alpha <= 0 || c_beta <= 0) {
    throw std::invalid_argument("schedule_custom: step prefactors must be > 0");
  }
  if (alpha_exp < 0 || beta_exp < 0) {
    throw std::invalid_argument("schedule_custom: exponents must be >= 0");
  }
  if (c_h <= 0) {
    throw std::invalid_argument("schedule_custom: c_h must be > 0");
  }
  if (!(contraction >= 0.0 && contraction < 1.0)) {
    throw std::invalid_argument("schedule_custom: contraction must lie in [0, 1)");
  }
  if (tmax_override < 0) {
    throw std::invalid_argument("schedule_custom: tmax_override must be >= 0");
  }
  StepSchedule s;
  s.regime = Regime::custom;
  s.c_alpha = c_alpha;
  s.alpha_exp = alpha_exp;
  s.c_beta = c_beta;
  s.beta_exp = beta_exp;
  s.c_h = c_h;
  s.bias_base = bias_base;
  s.contraction = contraction;
  s.tmax_override = tmax_override;
  return s;
}

}  // namespace ttsa
