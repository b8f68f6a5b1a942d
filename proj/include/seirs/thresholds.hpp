#pragma once

// Extinction / persistence functionals along a solution z(t) of z' = Λ − μz:
//
//   b(p,t)   = β(t)·L(z(t))·p − μ(t) − ε(t)
//   g(p,t)   = β(t)·L(z(t))·p + γ(t) − (1 + 1/p)·ε(t)
//   h(p,t)   = γ(t) − (1 + 1/p)·ε(t)
//   R_e, R_p = exp(limsup / liminf ∫_t^{t+λ} b(p,s) ds)
//   R_e*, R_p* = exp(limsup / liminf ∫_t^{t+λ} ε(s)/p − μ(s) − γ(s) ds)
//   G(p) = limsup g(p,t),   H(p) = liminf h(p,t)
//
// where L(z) = lim_{δ→0⁺} φ(z,z,δ)/δ.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "seirs/dynamics.hpp"
#include "seirs/incidence.hpp"
#include "seirs/timefunc.hpp"

namespace seirs {

struct ThresholdConfig {
  double lambda = 1.0;  // window length λ
  double p = 1.0;
  double burn_in = 100.0;
  std::optional<double> scan_length;  // default max(10λ, 100)
  std::optional<double> step;         // scan grid spacing, default λ/100
  double z0 = 1.0;
  double integration_step = 1e-3;

  WindowPolicy window_policy() const { return {burn_in, scan_length, step}; }
  double scan_length_value() const { return scan_length.value_or(std::max(10.0 * lambda, 100.0)); }
  double step_value() const { return step.value_or(lambda / 100.0); }
};

struct ThresholdReport {
  double R_e = 0.0, R_p = 0.0, R_e_star = 0.0, R_p_star = 0.0;
  double log_R_e = 0.0, log_R_p = 0.0, log_R_e_star = 0.0, log_R_p_star = 0.0;
  double G = 0.0;
  double H = 0.0;
  ThresholdConfig config;
};

inline double b_limit(const ModelSpec& m, double p, double t, double z) {
  return m.beta(t) * m.incidence.slope(z, z) * p - m.mu(t) - m.epsilon(t);
}

inline double g_limit(const ModelSpec& m, double p, double t, double z) {
  return m.beta(t) * m.incidence.slope(z, z) * p + m.gamma(t) - (1.0 + 1.0 / p) * m.epsilon(t);
}

inline double h_func(const ModelSpec& m, double p, double t) {
  return m.gamma(t) - (1.0 + 1.0 / p) * m.epsilon(t);
}

/// Everything about a report that does not depend on p: one auxiliary
/// integration, and per scan window the integrals of β·L(z), μ+ε, ε and μ+γ.
/// Reports for any p are then a cheap max/min over the scan windows.
class ThresholdProfile {
 public:
  ThresholdProfile(const ModelSpec& m, const ThresholdConfig& cfg) : cfg_(cfg) {
    if (!(cfg.lambda > 0.0)) throw std::invalid_argument("threshold config: lambda must be > 0");
    if (!(cfg.z0 > 0.0)) throw std::invalid_argument("threshold config: z0 must be > 0");
    if (!(cfg.integration_step > 0.0)) {
      throw std::invalid_argument("threshold config: integration_step must be > 0");
    }
    if (!(cfg.burn_in >= 0.0)) throw std::invalid_argument("threshold config: burn_in must be >= 0");

    // Snap the integration grid so that λ spans an even number of nodes and
    // every scan-window start is an even node: composite Simpson then
    // applies to each window exactly through a cumulative table.
    const auto window_nodes =
        2 * static_cast<std::size_t>(std::ceil(cfg.lambda / (2.0 * cfg.integration_step) - 1e-9));
    h_ = cfg.lambda / static_cast<double>(window_nodes);
    window_nodes_ = window_nodes;
    stride_ = std::max<std::size_t>(
        2, 2 * static_cast<std::size_t>(std::llround(cfg.step_value() / (2.0 * h_))));
    const double scan = cfg.scan_length_value();
    if (scan < 0.0) throw std::invalid_argument("threshold config: scan_length must be >= 0");
    windows_ = static_cast<std::size_t>(std::floor(scan / (stride_ * h_) + 1e-9)) + 1;

    const auto burn_node = static_cast<std::size_t>(std::llround(cfg.burn_in / h_));
    const std::size_t span = (windows_ - 1) * stride_ + window_nodes_;
    const std::size_t last_node = burn_node + span;
    start_time_ = static_cast<double>(burn_node) * h_;

    // z on nodes burn_node .. last_node.
    std::vector<double> z(span + 1);
    {
      double zc = cfg.z0;
      const auto rhs = [&](double t, double v) { return m.Lambda(t) - m.mu(t) * v; };
      for (std::size_t k = 0; k < last_node; ++k) {
        if (k >= burn_node) z[k - burn_node] = zc;
        const double t = static_cast<double>(k) * h_;
        const double k1 = rhs(t, zc);
        const double k2 = rhs(t + h_ / 2, zc + h_ / 2 * k1);
        const double k3 = rhs(t + h_ / 2, zc + h_ / 2 * k2);
        const double k4 = rhs(t + h_, zc + h_ * k3);
        zc += h_ / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (!std::isfinite(zc) || zc <= 0.0) {
          throw IntegrationError("threshold profile: auxiliary solution left (0, inf)");
        }
      }
      z[span] = zc;
    }

    std::vector<double> force(span + 1), mu_eps(span + 1), eps(span + 1), mu_gam(span + 1),
        gam(span + 1);
    slope_sup_ = 0.0;
    for (std::size_t j = 0; j <= span; ++j) {
      const double t = start_time_ + static_cast<double>(j) * h_;
      const double slope = m.incidence.slope(z[j], z[j]);
      slope_sup_ = std::max(slope_sup_, slope);
      const double mu = m.mu(t);
      force[j] = m.beta(t) * slope;
      eps[j] = m.epsilon(t);
      gam[j] = m.gamma(t);
      mu_eps[j] = mu + eps[j];
      mu_gam[j] = mu + gam[j];
    }

    const auto force_int = window_integrals(force);
    const auto mu_eps_int = window_integrals(mu_eps);
    const auto eps_int = window_integrals(eps);
    const auto mu_gam_int = window_integrals(mu_gam);

    rows_.resize(windows_);
    for (std::size_t k = 0; k < windows_; ++k) {
      const std::size_t j = k * stride_;
      rows_[k] = {force_int[k], mu_eps_int[k], eps_int[k], mu_gam_int[k], force[j], eps[j], gam[j]};
    }
  }

  ThresholdReport report(double p) const {
    if (!(p > 0.0)) throw std::invalid_argument("threshold report: p must be > 0");
    constexpr double inf = std::numeric_limits<double>::infinity();
    ThresholdReport r;
    r.config = cfg_;
    r.config.p = p;
    double re = -inf, rp = inf, res = -inf, rps = inf, G = -inf, H = inf;
    for (const auto& w : rows_) {
      const double b_int = p * w.force - w.mu_eps;
      const double s_int = w.eps / p - w.mu_gam;
      re = std::max(re, b_int);
      rp = std::min(rp, b_int);
      res = std::max(res, s_int);
      rps = std::min(rps, s_int);
      const double h = w.gam_at - (1.0 + 1.0 / p) * w.eps_at;
      G = std::max(G, w.force_at * p + h);
      H = std::min(H, h);
    }
    r.log_R_e = re;
    r.log_R_p = rp;
    r.log_R_e_star = res;
    r.log_R_p_star = rps;
    r.R_e = std::exp(re);
    r.R_p = std::exp(rp);
    r.R_e_star = std::exp(res);
    r.R_p_star = std::exp(rps);
    r.G = G;
    r.H = H;
    return r;
  }

  const ThresholdConfig& config() const noexcept { return cfg_; }
  /// max of L(z(t)) over the scanned horizon
  double slope_sup() const noexcept { return slope_sup_; }
  double grid_step() const noexcept { return h_; }
  std::size_t window_count() const noexcept { return windows_; }

 private:
  struct WindowRow {
    double force, mu_eps, eps, mu_gam;  // window integrals
    double force_at, eps_at, gam_at;    // pointwise values at the window start
  };

  std::vector<double> window_integrals(const std::vector<double>& f) const {
    // Cumulative Simpson at even nodes.
    const std::size_t pairs = (f.size() - 1) / 2;
    std::vector<double> cum(pairs + 1, 0.0);
    for (std::size_t j = 0; j < pairs; ++j) {
      const std::size_t a = 2 * j;
      cum[j + 1] = cum[j] + h_ / 3.0 * (f[a] + 4.0 * f[a + 1] + f[a + 2]);
    }
    std::vector<double> out(windows_);
    for (std::size_t k = 0; k < windows_; ++k) {
      const std::size_t a = k * stride_ / 2;
      out[k] = cum[a + window_nodes_ / 2] - cum[a];
    }
    return out;
  }

  ThresholdConfig cfg_;
  double h_ = 0.0;
  std::size_t window_nodes_ = 0;
  std::size_t stride_ = 0;
  std::size_t windows_ = 0;
  double start_time_ = 0.0;
  double slope_sup_ = 0.0;
  std::vector<WindowRow> rows_;
};

inline ThresholdReport compute_report(const ModelSpec& m, const ThresholdConfig& cfg) {
  return ThresholdProfile(m, cfg).report(cfg.p);
}

namespace detail {

inline void require_constant(const TimeFunction& f, const char* who, const char* name) {
  if (!f.is_constant()) {
    throw std::invalid_argument(std::string(who) + ": " + name + " must be constant");
  }
}

}  // namespace detail

/// R^A = ε·β·L / ((μ + ε)(μ + γ)) with L = L(Λ/μ), for constant coefficients.
inline double autonomous_RA(const ModelSpec& m) {
  for (const auto* f : {&m.Lambda, &m.mu, &m.beta, &m.eta, &m.epsilon, &m.gamma}) {
    detail::require_constant(*f, "autonomous_RA", f->name().empty() ? "coefficient" : f->name().c_str());
  }
  const double Lambda = m.Lambda(0.0), mu = m.mu(0.0), beta = m.beta(0.0);
  const double eps = m.epsilon(0.0), gam = m.gamma(0.0);
  const double n = Lambda / mu;
  return eps * beta * m.incidence.slope(n, n) / ((mu + eps) * (mu + gam));
}

/// R^per = ε̄·β̄·L / ((μ + ε̄)(μ + γ̄)) with period averages taken after burn-in.
inline double periodic_Rper(const ModelSpec& m, double period, double burn_in = 100.0) {
  detail::require_constant(m.Lambda, "periodic_Rper", "Lambda");
  detail::require_constant(m.mu, "periodic_Rper", "mu");
  if (!(period > 0.0)) throw std::invalid_argument("periodic_Rper: period must be > 0");
  const double Lambda = m.Lambda(0.0), mu = m.mu(0.0);
  const double n = Lambda / mu;
  const double beta_bar = window_average(m.beta, burn_in, period);
  const double eps_bar = window_average(m.epsilon, burn_in, period);
  const double gam_bar = window_average(m.gamma, burn_in, period);
  return eps_bar * beta_bar * m.incidence.slope(n, n) / ((mu + eps_bar) * (mu + gam_bar));
}

/// Contact rate of a Michaelis–Menten-type incidence (mass action is C(n) = n,
/// standard incidence C(n) = 1); nullopt for any other kind.
inline std::optional<ContactRate> contact_rate_of(const IncidenceFunction& f) {
  if (std::holds_alternative<incidence_kind::MassAction>(f.kind())) return ContactRate::identity();
  if (std::holds_alternative<incidence_kind::Standard>(f.kind())) return ContactRate::one();
  if (const auto* mm = std::get_if<incidence_kind::MichaelisMenten>(&f.kind())) return mm->C;
  return std::nullopt;
}

struct MichaelisMentenBounds {
  double R_e_M = 0.0;
  double R_p_M = 0.0;
  double C_value = 0.0;  // C(Λ/μ)
  WindowStats beta, epsilon, gamma;
  double mu = 0.0;
};

/// R_e^M(λ) = ε⁺β⁺C(Λ/μ)/((μ+ε⁻)(μ+γ⁻)),  R_p^M(λ) = ε⁻β⁻C(Λ/μ)/((μ+ε⁺)(μ+γ⁺)).
inline MichaelisMentenBounds mm_bounds(const ModelSpec& m, double lambda,
                                       const WindowPolicy& policy = {}) {
  const auto C = contact_rate_of(m.incidence);
  if (!C) throw std::invalid_argument("mm_bounds: incidence is not of Michaelis-Menten type");
  detail::require_constant(m.Lambda, "mm_bounds", "Lambda");
  detail::require_constant(m.mu, "mm_bounds", "mu");

  // C(n)/n must be non-increasing.
  const double n_star = m.Lambda(0.0) / m.mu(0.0);
  const double n_max = std::max(10.0, 4.0 * n_star);
  double prev = C->over_n(n_max / 1000.0);
  for (int i = 2; i <= 1000; ++i) {
    const double cur = C->over_n(n_max * i / 1000.0);
    if (cur > prev * (1.0 + 1e-12) + 1e-15) {
      throw std::invalid_argument("mm_bounds: C(n)/n is not non-increasing");
    }
    prev = cur;
  }

  MichaelisMentenBounds out;
  out.mu = m.mu(0.0);
  out.C_value = (*C)(n_star);
  out.beta = window_bounds(m.beta, lambda, policy);
  out.epsilon = window_bounds(m.epsilon, lambda, policy);
  out.gamma = window_bounds(m.gamma, lambda, policy);
  const double mu = out.mu;
  out.R_e_M = out.epsilon.upper * out.beta.upper * out.C_value /
              ((mu + out.epsilon.lower) * (mu + out.gamma.lower));
  out.R_p_M = out.epsilon.lower * out.beta.lower * out.C_value /
              ((mu + out.epsilon.upper) * (mu + out.gamma.upper));
  return out;
}

enum class SearchMode { Extinction, Persistence };

/// Which extinction or persistence clause a report satisfies, if any.
enum class Clause { ReStar_G, ReStar_H, RpStar_G, RpStar_H, None };

inline Clause satisfied_clause(const ThresholdReport& r, SearchMode mode) {
  if (mode == SearchMode::Extinction) {
    if (r.log_R_e < 0.0 && r.log_R_e_star < 0.0) {
      if (r.G < 0.0) return Clause::ReStar_G;
      if (r.H > 0.0) return Clause::ReStar_H;
    }
  } else {
    if (r.log_R_p > 0.0 && r.log_R_p_star > 0.0) {
      if (r.G < 0.0) return Clause::RpStar_G;
      if (r.H > 0.0) return Clause::RpStar_H;
    }
  }
  return Clause::None;
}

struct PSearchResult {
  double p = 0.0;
  ThresholdReport report;
  Clause clause = Clause::None;
};

/// Bracket [ε⁺/(μ̄ + γ⁻), (μ̄ + ε⁻)/(β⁺·L̂)] (ordered), where L̂ is the largest
/// slope seen along z(t).
struct PBracket {
  double lower = 0.0;
  double upper = 0.0;
};

inline PBracket p_bracket(const ModelSpec& m, const ThresholdProfile& prof) {
  const ThresholdConfig& cfg = prof.config();
  const WindowPolicy policy{cfg.burn_in, cfg.scan_length, std::nullopt};
  const auto eps = window_bounds(m.epsilon, cfg.lambda, policy);
  const auto gam = window_bounds(m.gamma, cfg.lambda, policy);
  const auto beta = window_bounds(m.beta, cfg.lambda, policy);
  const auto mu = window_bounds(m.mu, cfg.lambda, policy);
  const double mu_bar = 0.5 * (mu.lower + mu.upper);
  double a = eps.upper / (mu_bar + gam.lower);
  const double transmission = beta.upper * prof.slope_sup();
  double b = transmission > 0.0 ? (mu_bar + eps.lower) / transmission : 10.0 * std::max(a, 1.0);
  if (!(a > 0.0)) a = 1e-3 * b;
  return {std::min(a, b), std::max(a, b)};
}

/// Candidate p values: 202 evenly spaced points over the bracket widened by
/// 20% on each side, plus the bracket endpoints nudged by ±1e-7 relative.
inline std::vector<double> p_candidates(const PBracket& br) {
  const double lo = 0.8 * br.lower;
  const double hi = 1.2 * br.upper;
  std::vector<double> ps;
  ps.reserve(206);
  constexpr int points = 202;
  for (int i = 0; i < points; ++i) ps.push_back(lo + (hi - lo) * i / (points - 1));
  for (const double e : {br.lower, br.upper}) {
    ps.push_back(e * (1.0 - 1e-7));
    ps.push_back(e * (1.0 + 1e-7));
  }
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  ps.erase(std::remove_if(ps.begin(), ps.end(), [](double p) { return !(p > 0.0); }), ps.end());
  return ps;
}

inline std::optional<PSearchResult> search_p(const ModelSpec& m, const ThresholdProfile& prof,
                                             SearchMode mode) {
  for (const double p : p_candidates(p_bracket(m, prof))) {
    auto rep = prof.report(p);
    const Clause c = satisfied_clause(rep, mode);
    if (c != Clause::None) return PSearchResult{p, std::move(rep), c};
  }
  return std::nullopt;
}

inline std::optional<PSearchResult> search_p(const ModelSpec& m, const ThresholdConfig& cfg,
                                             SearchMode mode) {
  return search_p(m, ThresholdProfile(m, cfg), mode);
}

inline const char* to_string(Clause c) {
  switch (c) {
    case Clause::ReStar_G: return "ReStar_G";
    case Clause::ReStar_H: return "ReStar_H";
    case Clause::RpStar_G: return "RpStar_G";
    case Clause::RpStar_H: return "RpStar_H";
    case Clause::None: return "None";
  }
  return "None";
}

}  // namespace seirs
