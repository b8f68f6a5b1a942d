#pragma once

// Verdicts from threshold reports, parameter-plane sweeps over the periodic
// and asymptotically periodic model families, simulation confirmations and
// robustness experiments under perturbation of the coefficients.

#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "seirs/dynamics.hpp"
#include "seirs/thresholds.hpp"

namespace seirs {

enum class Outcome { Extinction, Persistence, Inconclusive };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Extinction: return "Extinction";
    case Outcome::Persistence: return "Persistence";
    case Outcome::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

struct Witness {
  double lambda = 1.0;
  double p = 1.0;
};

struct Verdict {
  Outcome outcome = Outcome::Inconclusive;
  Clause clause = Clause::None;
  std::optional<Witness> witness;
  ThresholdReport report;
};

inline Outcome outcome_of(Clause c) {
  switch (c) {
    case Clause::ReStar_G:
    case Clause::ReStar_H: return Outcome::Extinction;
    case Clause::RpStar_G:
    case Clause::RpStar_H: return Outcome::Persistence;
    case Clause::None: return Outcome::Inconclusive;
  }
  return Outcome::Inconclusive;
}

/// Searches each λ for a p satisfying an extinction clause, then a
/// persistence clause. The two cannot both hold at one (λ, p) since
/// log R_e ≥ log R_p; trying extinction first only fixes the order.
inline Verdict classify(const ModelSpec& m, std::span<const double> lambdas,
                        const ThresholdConfig& base = {}) {
  Verdict v;
  bool have_report = false;
  for (const double lambda : lambdas) {
    ThresholdConfig cfg = base;
    cfg.lambda = lambda;
    const ThresholdProfile prof(m, cfg);
    for (const SearchMode mode : {SearchMode::Extinction, SearchMode::Persistence}) {
      if (auto hit = search_p(m, prof, mode)) {
        v.outcome = outcome_of(hit->clause);
        v.clause = hit->clause;
        v.witness = Witness{lambda, hit->p};
        v.report = std::move(hit->report);
        return v;
      }
    }
    if (!have_report) {
      v.report = prof.report(p_bracket(m, prof).lower);
      have_report = true;
    }
  }
  return v;
}

inline Verdict classify(const ModelSpec& m, std::initializer_list<double> lambdas = {1.0},
                        const ThresholdConfig& base = {}) {
  return classify(m, std::span<const double>(lambdas.begin(), lambdas.size()), base);
}

/// (0.7, 0.1, 0.1, 0.1)·N₀ with N₀ = mean Λ / mean μ.
inline State canonical_initial_state(const ModelSpec& m) {
  const auto L = window_bounds(m.Lambda, m.omega.Lambda);
  const auto mu = window_bounds(m.mu, m.omega.mu);
  const double n0 = (L.lower + L.upper) / (mu.lower + mu.upper);
  return {0.0, 0.7 * n0, 0.1 * n0, 0.1 * n0, 0.1 * n0};
}

struct SimulationCheck {
  bool pass = false;
  double tail_extreme = 0.0;  // max I (extinction) or min I (persistence) over the tail
};

/// Extinction passes when max I over [0.9·t_end, t_end] < floor; persistence
/// when min I over the same tail > ceiling.
inline SimulationCheck confirm_by_simulation(const ModelSpec& m, const Verdict& v, double t_end,
                                             double floor, double ceiling, double step = 1e-3) {
  if (v.outcome == Outcome::Inconclusive) {
    throw std::invalid_argument("confirm_by_simulation: verdict is inconclusive");
  }
  IntegrationOptions opt;
  opt.step = step;
  const Trajectory traj = integrate(m, canonical_initial_state(m), t_end, opt);
  const double tail_start = 0.9 * t_end;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] < tail_start) continue;
    lo = std::min(lo, traj.states[i].I);
    hi = std::max(hi, traj.states[i].I);
  }
  if (v.outcome == Outcome::Extinction) return {hi < floor, hi};
  return {lo > ceiling, lo};
}

/// Sign changes of W(p,t) = p·E − I over the last `tail_fraction` of a trajectory.
inline int tail_sign_changes(const Trajectory& traj, double tail_fraction) {
  if (traj.w_values.empty()) throw std::invalid_argument("trajectory has no W diagnostic");
  const double t0 = traj.times.front();
  const double t1 = traj.times.back();
  const double start = t1 - tail_fraction * (t1 - t0);
  int changes = 0;
  int last = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] < start) continue;
    const int sign = traj.w_values[i] > 0.0 ? 1 : -1;  // W ≤ 0 and W > 0 are the two regimes
    if (last != 0 && sign != last) ++changes;
    last = sign;
  }
  return changes;
}

// ---------------------------------------------------------------------------
// Model families used for parameter-plane sweeps.

enum class BetaForm { Periodic, AsymptoticPeriodic };

/// S' = Λ − β(t)φ − μS + ηR, with
///   β(t) = β(1 + b·c(t))  [Periodic]   or  β(1 + b(1 + e^{-t})c(t))  [AsymptoticPeriodic],
///   ε(t) = ε(1 + d·c(t)), γ(t) = γ(1 + k·c(t)),  c(t) = cos(2πt/period).
struct FamilyTemplate {
  double Lambda = 2.0;
  double mu = 2.0;
  double beta = 6.06;
  double b = 0.0;
  double epsilon = 1.0;
  double d = 0.0;
  double gamma = 0.02;
  double k = 0.0;
  double eta = 0.1;
  double period = 1.0;
  BetaForm beta_form = BetaForm::Periodic;
  IncidenceFunction incidence = IncidenceFunction::mass_action();

  static constexpr std::string_view knobs[] = {"Lambda", "mu", "beta", "b", "epsilon",
                                               "d", "gamma", "k", "eta"};

  static bool is_knob(std::string_view name) {
    for (const auto k : knobs) {
      if (k == name) return true;
    }
    return false;
  }

  double& knob(std::string_view name) {
    if (name == "Lambda") return Lambda;
    if (name == "mu") return mu;
    if (name == "beta") return beta;
    if (name == "b") return b;
    if (name == "epsilon") return epsilon;
    if (name == "d") return d;
    if (name == "gamma") return gamma;
    if (name == "k") return k;
    if (name == "eta") return eta;
    throw std::invalid_argument("unknown template knob: " + std::string(name));
  }

  double knob(std::string_view name) const { return const_cast<FamilyTemplate*>(this)->knob(name); }

  ModelSpec instantiate() const {
    ModelSpec m;
    m.Lambda = TimeFunction::constant(Lambda, "Lambda");
    m.mu = TimeFunction::constant(mu, "mu");
    m.beta = beta_form == BetaForm::Periodic
                 ? TimeFunction::periodic_cosine(beta, b, period, "beta")
                 : TimeFunction::asymptotic_periodic(beta, b, 1.0, period, "beta");
    m.epsilon = TimeFunction::periodic_cosine(epsilon, d, period, "epsilon");
    m.gamma = TimeFunction::periodic_cosine(gamma, k, period, "gamma");
    m.eta = TimeFunction::constant(eta, "eta");
    m.incidence = incidence;
    m.omega = {period, period, period};
    return m;
  }
};

struct RegionCell {
  Outcome outcome = Outcome::Inconclusive;
  Clause clause = Clause::None;
  std::optional<Witness> witness;
  std::string note;
};

namespace detail {

inline double safe_inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

/// `coef·p` treating a zero coefficient times an infinite p as zero.
inline double safe_mul(double coef, double p) { return coef == 0.0 ? 0.0 : coef * p; }

}  // namespace detail

/// Closed-form evaluation for the periodic family (constant Λ, μ). All
/// coefficients share the phase of cos(2πt/period), so the max/min over t
/// of g and h are exact: (mean part) ± |cosine part|.
inline RegionCell classify_periodic_closed_form(const FamilyTemplate& f, double lambda = 1.0) {
  const double n = f.Lambda / f.mu;
  const double L = f.incidence.slope(n, n);
  const double mu = f.mu, eps = f.epsilon, gam = f.gamma, beta = f.beta;
  const auto G = [&](double p) {
    const double a = (1.0 + detail::safe_inv(p)) * eps;
    return detail::safe_mul(beta * L, p) + gam - a +
           std::abs(detail::safe_mul(beta * f.b * L, p) + gam * f.k - (1.0 + detail::safe_inv(p)) * eps * f.d);
  };
  const auto H = [&](double p) {
    return gam - (1.0 + detail::safe_inv(p)) * eps -
           std::abs(gam * f.k - (1.0 + detail::safe_inv(p)) * eps * f.d);
  };
  const double R = eps * beta * L / ((mu + eps) * (mu + gam));
  const double p_lo = eps / (mu + gam);
  const double p_hi = beta * L > 0.0 ? (mu + eps) / (beta * L)
                                     : std::numeric_limits<double>::infinity();

  RegionCell cell;
  if (R < 1.0) {
    if (p_lo > 0.0 && G(p_lo) < 0.0) {
      cell = {Outcome::Extinction, Clause::ReStar_G, Witness{lambda, p_lo}, {}};
    } else if (H(p_hi) > 0.0) {
      cell = {Outcome::Extinction, Clause::ReStar_H, Witness{lambda, p_hi}, {}};
    }
  } else if (R > 1.0) {
    if (G(p_hi) < 0.0) {
      cell = {Outcome::Persistence, Clause::RpStar_G, Witness{lambda, p_hi}, {}};
    } else if (p_lo > 0.0 && H(p_lo) > 0.0) {
      cell = {Outcome::Persistence, Clause::RpStar_H, Witness{lambda, p_lo}, {}};
    }
  }
  return cell;
}

/// Closed-form evaluation for Michaelis–Menten-type incidence with constant Λ, μ
/// and any coefficient shapes: window bounds give R_e^M, R_p^M and the
/// candidate p; G and H are scanned along z ≡ Λ/μ.
inline RegionCell classify_mm_closed_form(const ModelSpec& m, double lambda = 1.0,
                                          const WindowPolicy& policy = {}) {
  const auto mm = mm_bounds(m, lambda, policy);
  const double mu = mm.mu;
  const double C = mm.C_value;
  const double burn = policy.burn_in;
  const double scan = policy.scan_length_for(lambda);
  const double step = policy.step_for(lambda);
  const auto count = static_cast<long>(std::floor(scan / step + 1e-9)) + 1;
  const auto G = [&](double p) {
    double best = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < count; ++i) {
      const double t = burn + static_cast<double>(i) * step;
      best = std::max(best, detail::safe_mul(m.beta(t) * C, p) + m.gamma(t) -
                                (1.0 + detail::safe_inv(p)) * m.epsilon(t));
    }
    return best;
  };
  const auto H = [&](double p) {
    double worst = std::numeric_limits<double>::infinity();
    for (long i = 0; i < count; ++i) {
      const double t = burn + static_cast<double>(i) * step;
      worst = std::min(worst, m.gamma(t) - (1.0 + detail::safe_inv(p)) * m.epsilon(t));
    }
    return worst;
  };
  const auto ratio = [](double num, double den) {
    return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
  };
  const double pe_lo = mm.epsilon.upper / (mu + mm.gamma.lower);
  const double pe_hi = ratio(mu + mm.epsilon.lower, C * mm.beta.upper);
  const double pp_lo = mm.epsilon.lower / (mu + mm.gamma.upper);
  const double pp_hi = ratio(mu + mm.epsilon.upper, C * mm.beta.lower);

  RegionCell cell;
  if (mm.R_e_M < 1.0) {
    if (pe_lo > 0.0 && G(pe_lo) < 0.0) {
      return {Outcome::Extinction, Clause::ReStar_G, Witness{lambda, pe_lo}, {}};
    }
    if (H(pe_hi) > 0.0) return {Outcome::Extinction, Clause::ReStar_H, Witness{lambda, pe_hi}, {}};
  }
  if (mm.R_p_M > 1.0) {
    if (G(pp_hi) < 0.0) return {Outcome::Persistence, Clause::RpStar_G, Witness{lambda, pp_hi}, {}};
    if (pp_lo > 0.0 && H(pp_lo) > 0.0) {
      return {Outcome::Persistence, Clause::RpStar_H, Witness{lambda, pp_lo}, {}};
    }
  }
  return cell;
}

struct Axis {
  std::string name;
  std::vector<double> values;
};

struct SweepOptions {
  std::vector<double> lambdas{1.0};
  bool force_general_path = false;
  unsigned threads = 1;
  ThresholdConfig threshold;  // λ and p are overridden per cell
};

struct RegionGrid {
  Axis axis1;
  Axis axis2;
  std::vector<RegionCell> cells;  // row-major: index = i1·|axis2| + i2
  FamilyTemplate base;

  const RegionCell& at(std::size_t i1, std::size_t i2) const {
    return cells.at(i1 * axis2.values.size() + i2);
  }
};

/// Classifies one family member, by closed forms when the
/// family is a recognized special case and by the general threshold
/// search otherwise (or when forced).
inline RegionCell classify_cell(const FamilyTemplate& f, const SweepOptions& opt) {
  try {
    const ModelSpec m = f.instantiate();
    if (!opt.force_general_path) {
      if (f.beta_form == BetaForm::Periodic && opt.lambdas.size() == 1 &&
          std::abs(opt.lambdas.front() - f.period) < 1e-12) {
        return classify_periodic_closed_form(f, opt.lambdas.front());
      }
      if (contact_rate_of(f.incidence)) {
        for (const double lambda : opt.lambdas) {
          auto cell = classify_mm_closed_form(m, lambda, opt.threshold.window_policy());
          if (cell.outcome != Outcome::Inconclusive) return cell;
        }
        return {};
      }
    }
    const Verdict v = classify(m, opt.lambdas, opt.threshold);
    return {v.outcome, v.clause, v.witness, {}};
  } catch (const std::exception& e) {
    RegionCell cell;
    cell.note = e.what();
    return cell;
  }
}

inline RegionGrid sweep(const FamilyTemplate& base, const Axis& axis1, const Axis& axis2,
                        const SweepOptions& opt = {}) {
  for (const auto* axis : {&axis1, &axis2}) {
    if (!FamilyTemplate::is_knob(axis->name)) {
      throw std::invalid_argument("sweep: unknown axis '" + axis->name + "'");
    }
  }
  RegionGrid grid{axis1, axis2, {}, base};
  const std::size_t n1 = axis1.values.size(), n2 = axis2.values.size();
  grid.cells.resize(n1 * n2);

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t idx = next++; idx < grid.cells.size(); idx = next++) {
      FamilyTemplate f = base;
      f.knob(axis1.name) = axis1.values[idx / n2];
      f.knob(axis2.name) = axis2.values[idx % n2];
      grid.cells[idx] = classify_cell(f, opt);
    }
  };
  const unsigned threads = std::max(1u, opt.threads);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  return grid;
}

inline std::vector<double> linspace_step(double from, double to, double step) {
  std::vector<double> v;
  const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(from + static_cast<double>(i) * step);
  return v;
}

// ---------------------------------------------------------------------------
// Reference region predicates for three parameter planes of the periodic family
// (μ = 2, η = 0.1, Λ = μ, mass action). Used to cross-check sweeps.

enum class PlotPanel { BBeta, KGamma, DEpsilon };

/// Amplitude entering the H-conditions of the (d, ε) plane: `D` uses |d|,
/// `B` the template's |b| (zero in that plane).
enum class AmplitudeReading { D, B };

struct ReferencePrediction {
  bool extinction = false;
  bool persistence = false;
};

inline ReferencePrediction reference_region(PlotPanel panel, const FamilyTemplate& f,
                                        AmplitudeReading reading = AmplitudeReading::D) {
  ReferencePrediction out;
  switch (panel) {
    case PlotPanel::BBeta: {
      const double b = std::abs(f.b), beta = f.beta;
      out.extinction = beta < 6.06 && beta * (1.0 + b) < 6.06;
      out.persistence = beta > 6.06 && beta > 9.0 * b + 6.06;
      break;
    }
    case PlotPanel::KGamma: {
      const double k = std::abs(f.k), g = f.gamma;
      out.extinction = g > 0.02 && ((2.0 + g) * (3.0 - g * k) > 6.06 || g * (1.0 - k) > 3.02);
      out.persistence = g < 0.02 && g * (1.0 + k) < 0.02;
      break;
    }
    case PlotPanel::DEpsilon: {
      const double d = std::abs(f.d), e = f.epsilon;
      const double amp = reading == AmplitudeReading::D ? d : std::abs(f.b);
      const bool g_lo = 2.0 * (e - 1.0) + (2.02 + e) * d < 0.0;
      const bool h_hi = 0.02 * (2.0 + e) - (8.06 + e) * e * (1.0 + amp) > 0.0;
      const bool g_hi = e > 0.0 && d < 1.0 - (2.02 + e) * (2.0 + e) / (e * (8.06 + e));
      const bool h_lo = 2.01 * e * (1.0 + amp) < 0.02;
      out.extinction = e < 1.0 && (g_lo || h_hi);
      out.persistence = e > 1.0 && (g_hi || h_lo);
      break;
    }
  }
  return out;
}

/// Number of grid cells whose outcome disagrees with the reference predicates.
inline std::size_t reference_mismatches(const RegionGrid& grid, PlotPanel panel,
                                      AmplitudeReading reading = AmplitudeReading::D) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < grid.axis1.values.size(); ++i) {
    for (std::size_t j = 0; j < grid.axis2.values.size(); ++j) {
      FamilyTemplate f = grid.base;
      f.knob(grid.axis1.name) = grid.axis1.values[i];
      f.knob(grid.axis2.name) = grid.axis2.values[j];
      const auto pred = reference_region(panel, f, reading);
      const Outcome expected = pred.extinction    ? Outcome::Extinction
                               : pred.persistence ? Outcome::Persistence
                                                  : Outcome::Inconclusive;
      if (grid.at(i, j).outcome != expected) ++bad;
    }
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Robustness under perturbation.

/// Additive shapes: coefficient_τ = coefficient + τ·shape, φ_τ = φ + τ·shape_φ.
/// Λ and μ shapes go beyond the setting covered by the robustness result and
/// flag the scan as experimental.
struct Perturbation {
  std::optional<TimeFunction> beta, eta, epsilon, gamma;
  std::optional<IncidenceFunction> phi;  // must vanish at z = 0
  std::optional<TimeFunction> Lambda, mu;

  bool experimental() const { return Lambda.has_value() || mu.has_value(); }
};

struct RobustnessRow {
  double tau = 0.0;
  double dG = 0.0, dH = 0.0;
  double dRe = 0.0, dRp = 0.0, dRe_star = 0.0, dRp_star = 0.0;
  double dlogRe = 0.0, dlogRp = 0.0, dlogRe_star = 0.0, dlogRp_star = 0.0;
  double theta = 0.0;
  std::string error;

  double max_delta() const { return std::max({dG, dH, dRe, dRp, dRe_star, dRp_star}); }
};

struct RobustnessResult {
  std::vector<RobustnessRow> rows;
  bool experimental = false;
};

/// sup_{t ∈ [0, horizon]} |f(t)| on a 1e-3 grid (exact for constants).
inline double sup_norm(const TimeFunction& f, double horizon) {
  if (const auto* c = std::get_if<coeff::Constant>(&f.kind())) return std::abs(c->value);
  double best = 0.0;
  const auto n = static_cast<long>(std::ceil(horizon / 1e-3));
  for (long i = 0; i <= n; ++i) best = std::max(best, std::abs(f(static_cast<double>(i) * 1e-3)));
  return best;
}

/// max|f| + max‖∇f‖ over a grid of Δ_{0,K}, gradients by central differences.
inline double c1_norm(const IncidenceFunction& f, double K) {
  constexpr int grid = 40;
  const double h = K * 1e-5;
  double vmax = 0.0, gmax = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double n = K * i / grid;
    for (int j = 0; j <= grid; ++j) {
      const double x = n * j / grid;
      for (int l = 0; l <= grid; ++l) {
        const double z = n * l / grid;
        vmax = std::max(vmax, std::abs(f(x, n, z)));
        const double gx = (f(x + h, n, z) - f(x - h, n, z)) / (2 * h);
        const double gn = (f(x, n + h, z) - f(x, n - h, z)) / (2 * h);
        const double gz = (f(x, n, z + h) - f(x, n, z - h)) / (2 * h);
        gmax = std::max(gmax, std::sqrt(gx * gx + gn * gn + gz * gz));
      }
    }
  }
  return vmax + gmax;
}

inline ModelSpec perturbed_model(const ModelSpec& m, const Perturbation& pert, double tau) {
  if (tau == 0.0) return m;
  ModelSpec out = m;
  if (pert.beta) out.beta = m.beta.plus(tau, *pert.beta);
  if (pert.eta) out.eta = m.eta.plus(tau, *pert.eta);
  if (pert.epsilon) out.epsilon = m.epsilon.plus(tau, *pert.epsilon);
  if (pert.gamma) out.gamma = m.gamma.plus(tau, *pert.gamma);
  if (pert.Lambda) out.Lambda = m.Lambda.plus(tau, *pert.Lambda);
  if (pert.mu) out.mu = m.mu.plus(tau, *pert.mu);
  if (pert.phi) {
    const IncidenceFunction base = m.incidence;
    const IncidenceFunction shape = *pert.phi;
    incidence_kind::Custom c;
    c.label = base.label() + "+perturbation";
    c.phi = [base, shape, tau](double x, double n, double z) {
      return base(x, n, z) + tau * shape(x, n, z);
    };
    c.zslope = [base, shape, tau](double x, double n) {
      return base.slope(x, n) + tau * shape.slope(x, n);
    };
    out.incidence = IncidenceFunction(std::move(c), base.has_cap() ? std::optional(base.cap())
                                                                   : std::nullopt);
  }
  return out;
}

/// For each τ: recompute the report of the perturbed model at cfg's (λ, p),
/// record absolute deltas of all six functionals and the bound
///   Θ(τ) = λ·B·p·‖φ_τ − φ‖_{C¹} + M·p·λ·‖β_τ − β‖_∞ + λ·‖ε_τ − ε‖_∞,
/// with B = sup β + ‖β_τ − β‖_∞ and M the slope bound of φ on Δ_{0,K}.
inline RobustnessResult robustness_scan(const ModelSpec& model, const Perturbation& pert,
                                        std::span<const double> taus, const ThresholdConfig& cfg) {
  const ModelSpec m = with_default_cap(model, cfg.window_policy());
  const ThresholdReport ref = compute_report(m, cfg);
  const double horizon = cfg.burn_in + cfg.scan_length_value() + cfg.lambda;
  const double M = slope_bound(m.incidence);
  const double beta_sup = sup_norm(m.beta, horizon);
  const double beta_shape = pert.beta ? sup_norm(*pert.beta, horizon) : 0.0;
  const double eps_shape = pert.epsilon ? sup_norm(*pert.epsilon, horizon) : 0.0;
  const double phi_shape = pert.phi ? c1_norm(*pert.phi, m.incidence.cap()) : 0.0;

  RobustnessResult out;
  out.experimental = pert.experimental();
  for (const double tau : taus) {
    RobustnessRow row;
    row.tau = tau;
    const double a = std::abs(tau);
    const double B = beta_sup + a * beta_shape;
    row.theta = cfg.lambda * B * cfg.p * a * phi_shape + M * cfg.p * cfg.lambda * a * beta_shape +
                cfg.lambda * a * eps_shape;
    try {
      const ThresholdReport r = tau == 0.0 ? ref : compute_report(perturbed_model(m, pert, tau), cfg);
      row.dG = std::abs(r.G - ref.G);
      row.dH = std::abs(r.H - ref.H);
      row.dRe = std::abs(r.R_e - ref.R_e);
      row.dRp = std::abs(r.R_p - ref.R_p);
      row.dRe_star = std::abs(r.R_e_star - ref.R_e_star);
      row.dRp_star = std::abs(r.R_p_star - ref.R_p_star);
      row.dlogRe = std::abs(r.log_R_e - ref.log_R_e);
      row.dlogRp = std::abs(r.log_R_p - ref.log_R_p);
      row.dlogRe_star = std::abs(r.log_R_e_star - ref.log_R_e_star);
      row.dlogRp_star = std::abs(r.log_R_p_star - ref.log_R_p_star);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace seirs
