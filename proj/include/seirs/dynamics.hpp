#pragma once

// The SEIRS system
//
//   S' = Λ(t) − β(t)φ(S,N,I) − μ(t)S + η(t)R
//   E' = β(t)φ(S,N,I) − (μ(t) + ε(t))E
//   I' = ε(t)E − (μ(t) + γ(t))I
//   R' = γ(t)I − (μ(t) + η(t))R,      N = S + E + I + R,
//
// its total-population companion z' = Λ(t) − μ(t)z, and a fixed-step
// fourth-order Runge–Kutta integrator for both.

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "seirs/errors.hpp"
#include "seirs/incidence.hpp"
#include "seirs/timefunc.hpp"

namespace seirs {

/// Window lengths ω_μ, ω_Λ, ω_β for which the positive-average condition is checked.
struct ForcingWindows {
  double mu = 1.0;
  double Lambda = 1.0;
  double beta = 1.0;
};

struct ModelSpec {
  TimeFunction Lambda = TimeFunction::constant(1.0, "Lambda");
  TimeFunction mu = TimeFunction::constant(1.0, "mu");
  TimeFunction beta = TimeFunction::constant(0.0, "beta");
  TimeFunction eta = TimeFunction::constant(0.0, "eta");
  TimeFunction epsilon = TimeFunction::constant(0.0, "epsilon");
  TimeFunction gamma = TimeFunction::constant(0.0, "gamma");
  IncidenceFunction incidence = IncidenceFunction::mass_action();
  ForcingWindows omega;
};

struct State {
  double t = 0.0;
  double S = 0.0;
  double E = 0.0;
  double I = 0.0;
  double R = 0.0;

  double N() const { return S + E + I + R; }
};

struct Derivative {
  double dS = 0.0;
  double dE = 0.0;
  double dI = 0.0;
  double dR = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::optional<double> p_diag;    // p used for W(p,t) = p·E − I
  std::vector<double> w_values;    // empty unless p_diag is set
};

struct AuxSolution {
  std::vector<double> times;
  std::vector<double> values;
  double z0 = 1.0;
};

/// D = Λ_S·e^{μ₂}/μ₁ with μ₁ = μ_{ω_μ}^-/2 and μ₂ = μ₁·ω_μ.
inline double population_bound(const ModelSpec& m, const WindowPolicy& policy = {}) {
  const WindowStats mu_stats = window_bounds(m.mu, m.omega.mu, policy);
  if (!(mu_stats.lower > 0.0)) {
    throw DomainError("population_bound: mu has non-positive window average lower bound");
  }
  const double mu1 = mu_stats.lower / 2.0;
  const double mu2 = mu1 * m.omega.mu;
  const double lambda_sup = window_bounds(m.Lambda, m.omega.Lambda, policy).sup;
  return lambda_sup * std::exp(mu2) / mu1;
}

/// Sets the incidence domain cap to K = 1.5·D when none was configured.
inline ModelSpec with_default_cap(ModelSpec m, const WindowPolicy& policy = {}) {
  if (!m.incidence.has_cap()) m.incidence = m.incidence.with_cap(1.5 * population_bound(m, policy));
  return m;
}

/// Checks nonnegativity of the six coefficients on a sample grid and the
/// positive-average conditions on μ and Λ. Returns a list of problems; an
/// empty list means the model is admissible. A zero transmission window
/// average is reported separately because it is a legitimate degenerate case.
struct ModelDiagnostics {
  std::vector<std::string> errors;
  bool beta_average_positive = true;
};

inline ModelDiagnostics check_model(const ModelSpec& m, const WindowPolicy& policy = {}) {
  ModelDiagnostics d;
  const std::pair<const char*, const TimeFunction*> coeffs[] = {
      {"Lambda", &m.Lambda}, {"mu", &m.mu},           {"beta", &m.beta},
      {"eta", &m.eta},       {"epsilon", &m.epsilon}, {"gamma", &m.gamma}};
  const double horizon = policy.burn_in + policy.scan_length_for(1.0) + 1.0;
  for (const auto& [name, f] : coeffs) {
    for (double t = 0.0; t <= horizon; t += 0.01) {
      const double v = (*f)(t);
      if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream msg;
        msg << name << " is negative or non-finite at t=" << t << " (value " << v << ")";
        d.errors.push_back(msg.str());
        break;
      }
    }
  }
  if (!(window_bounds(m.mu, m.omega.mu, policy).lower > 0.0)) {
    d.errors.emplace_back("mu: window average lower bound must be > 0");
  }
  if (!(window_bounds(m.Lambda, m.omega.Lambda, policy).lower > 0.0)) {
    d.errors.emplace_back("Lambda: window average lower bound must be > 0");
  }
  d.beta_average_positive = window_bounds(m.beta, m.omega.beta, policy).lower > 0.0;
  return d;
}

namespace detail {

struct Vec4 {
  double s, e, i, r;
};

inline Vec4 axpy(const Vec4& y, double a, const Vec4& k) {
  return {y.s + a * k.s, y.e + a * k.e, y.i + a * k.i, y.r + a * k.r};
}

/// Right-hand side with incidence arguments projected into Δ_{0,∞}; used
/// for the inner Runge–Kutta stages where tiny excursions are expected.
inline Vec4 rhs(const ModelSpec& m, double t, const Vec4& y) {
  const double n = y.s + y.e + y.i + y.r;
  const double np = std::max(n, 0.0);
  const double x = std::clamp(y.s, 0.0, np);
  const double z = std::clamp(y.i, 0.0, np);
  const double Lambda = m.Lambda(t);
  const double mu = m.mu(t);
  const double beta = m.beta(t);
  const double eta = m.eta(t);
  const double eps = m.epsilon(t);
  const double gam = m.gamma(t);
  const double force = beta * m.incidence(x, np, z);
  return {Lambda - force - mu * y.s + eta * y.r, force - (mu + eps) * y.e,
          eps * y.e - (mu + gam) * y.i, gam * y.i - (mu + eta) * y.r};
}

}  // namespace detail

/// Right-hand side at state `s` (coefficients evaluated at s.t). The
/// incidence argument (S, N, I) must lie in Δ_{0,K} with K inflated tenfold.
inline Derivative vector_field(const ModelSpec& m, const State& s) {
  constexpr double neg_tol = 1e-9;
  const double n = s.N();
  bool ok = s.S >= -neg_tol && s.E >= -neg_tol && s.I >= -neg_tol && s.R >= -neg_tol &&
            s.S <= n + neg_tol && s.I <= n + neg_tol;
  if (ok && m.incidence.has_cap()) ok = n <= 10.0 * m.incidence.cap();
  if (!ok) {
    std::ostringstream msg;
    msg << "vector_field: state (S=" << s.S << ", E=" << s.E << ", I=" << s.I << ", R=" << s.R
        << ") outside the admissible domain";
    throw DomainError(msg.str());
  }
  const auto d = detail::rhs(m, s.t, {s.S, s.E, s.I, s.R});
  return {d.s, d.e, d.i, d.r};
}

struct IntegrationOptions {
  double step = 1e-3;
  std::size_t record_every = 1;      // thinning factor for the stored trajectory
  std::optional<double> w_p;         // record W(p,t) = p·E − I when set
};

/// Classic RK4 with fixed step. Components in (−1e-12, 0) are clamped to 0;
/// anything below −1e-9 or above 10·K aborts with IntegrationError.
inline Trajectory integrate(const ModelSpec& model, const State& s0, double t_end,
                            const IntegrationOptions& opt = {}) {
  if (!(opt.step > 0.0)) throw std::invalid_argument("integrate: step must be > 0");
  if (!(t_end > s0.t)) throw std::invalid_argument("integrate: t_end must exceed s0.t");
  if (s0.S < 0.0 || s0.E < 0.0 || s0.I < 0.0 || s0.R < 0.0) {
    throw std::invalid_argument("integrate: initial state must be nonnegative");
  }
  const ModelSpec m = with_default_cap(model);
  const double blowup = 10.0 * std::max(m.incidence.cap(), s0.N());
  const std::size_t every = std::max<std::size_t>(opt.record_every, 1);

  const auto steps = static_cast<std::size_t>(std::ceil((t_end - s0.t) / opt.step - 1e-9));
  const double h = (t_end - s0.t) / static_cast<double>(steps);

  Trajectory traj;
  traj.p_diag = opt.w_p;
  traj.times.reserve(steps / every + 2);
  traj.states.reserve(steps / every + 2);
  const auto push = [&](const State& s) {
    traj.times.push_back(s.t);
    traj.states.push_back(s);
    if (opt.w_p) traj.w_values.push_back(*opt.w_p * s.E - s.I);
  };

  detail::Vec4 y{s0.S, s0.E, s0.I, s0.R};
  push(s0);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = s0.t + static_cast<double>(k - 1) * h;
    const auto k1 = detail::rhs(m, t, y);
    const auto k2 = detail::rhs(m, t + h / 2, detail::axpy(y, h / 2, k1));
    const auto k3 = detail::rhs(m, t + h / 2, detail::axpy(y, h / 2, k2));
    const auto k4 = detail::rhs(m, t + h, detail::axpy(y, h, k3));
    y.s += h / 6 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s);
    y.e += h / 6 * (k1.e + 2 * k2.e + 2 * k3.e + k4.e);
    y.i += h / 6 * (k1.i + 2 * k2.i + 2 * k3.i + k4.i);
    y.r += h / 6 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r);

    const double t_next = s0.t + static_cast<double>(k) * h;
    for (double* c : {&y.s, &y.e, &y.i, &y.r}) {
      if (*c < -1e-9 || !std::isfinite(*c)) {
        std::ostringstream msg;
        msg << "integrate: component fell to " << *c << " at t=" << t_next;
        throw IntegrationError(msg.str());
      }
      if (*c < 0.0 && *c > -1e-12) *c = 0.0;
    }
    if (y.s + y.e + y.i + y.r > blowup) {
      std::ostringstream msg;
      msg << "integrate: population exceeded " << blowup << " at t=" << t_next;
      throw IntegrationError(msg.str());
    }
    if (k % every == 0 || k == steps) push({t_next, y.s, y.e, y.i, y.r});
  }
  return traj;
}

/// Solves z' = Λ(t) − μ(t)z + f(t) from z(t0) = z0 (f defaults to zero).
inline AuxSolution integrate_aux(const ModelSpec& m, double z0, double t_end, double step,
                                 std::size_t record_every = 1,
                                 const std::function<double(double)>& forcing = {},
                                 double t0 = 0.0) {
  if (!(z0 > 0.0)) throw std::invalid_argument("integrate_aux: z0 must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("integrate_aux: step must be > 0");
  if (!(t_end > t0)) throw std::invalid_argument("integrate_aux: t_end must exceed t0");
  const auto rhs = [&](double t, double z) {
    return m.Lambda(t) - m.mu(t) * z + (forcing ? forcing(t) : 0.0);
  };
  const auto steps = static_cast<std::size_t>(std::ceil((t_end - t0) / step - 1e-9));
  const double h = (t_end - t0) / static_cast<double>(steps);
  const std::size_t every = std::max<std::size_t>(record_every, 1);

  AuxSolution sol;
  sol.z0 = z0;
  sol.times.push_back(t0);
  sol.values.push_back(z0);
  double z = z0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = t0 + static_cast<double>(k - 1) * h;
    const double k1 = rhs(t, z);
    const double k2 = rhs(t + h / 2, z + h / 2 * k1);
    const double k3 = rhs(t + h / 2, z + h / 2 * k2);
    const double k4 = rhs(t + h, z + h * k3);
    z += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!std::isfinite(z) || z < -1e-9) {
      throw IntegrationError("integrate_aux: solution left the admissible range");
    }
    if (k % every == 0 || k == steps) {
      sol.times.push_back(t0 + static_cast<double>(k) * h);
      sol.values.push_back(z);
    }
  }
  return sol;
}

}  // namespace seirs
