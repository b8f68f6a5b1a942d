// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "seirs/classify.hpp"
#include "support.hpp"

using namespace seirs;
using testing_support::mm_family;
using testing_support::periodic_family;

namespace {

struct Outcome_ {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome_()> body;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome_ g_anchor() {
  ThresholdConfig cfg;
  cfg.p = 0.49505;
  const double G = compute_report(periodic_family(6.2, 0.6), cfg).G;
  return {std::abs(G - 1.91089) <= 1e-3, fmt("G(0.49505) = %.6f, expected 1.91089 +/- 1e-3", G)};
}

Outcome_ rper_boundary() {
  double worst = 0.0;
  for (const double b : {0.0, 0.3, 0.6, 0.9}) {
    double lo = 1.0, hi = 12.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (periodic_Rper(periodic_family(mid, b), 1.0) < 1.0 ? lo : hi) = mid;
    }
    worst = std::max(worst, std::abs(0.5 * (lo + hi) - 6.06));
  }
  return {worst <= 1e-6, fmt("R^per = 1 at beta within %.2e of 6.06 for b in {0, 0.3, 0.6, 0.9}", worst)};
}

Outcome_ mm_anchors() {
  ThresholdConfig c1;
  c1.p = 0.3;
  ThresholdConfig c2;
  c2.p = 0.495;
  const double Rp = mm_bounds(mm_family(10.0, 0.3), 1.0).R_p_M;
  const double G1 = compute_report(mm_family(10.0, 0.3), c1).G;
  const double Re = mm_bounds(mm_family(5.0, 0.2), 1.0).R_e_M;
  const double G2 = compute_report(mm_family(5.0, 0.2), c2).G;
  const bool ok = std::abs(Rp - 1.650) <= 0.01 && std::abs(G1 + 0.413) <= 0.01 &&
                  std::abs(Re - 0.825) <= 0.01 && std::abs(G2 + 0.030) <= 0.005;
  return {ok, fmt("R_p^M(1) = %.4f, G(0.3) = %.4f, R_e^M(1) = %.4f, G(0.495) = %.4f", Rp, G1, Re, G2)};
}

struct TailStats {
  double min_I = 1e300, max_I = -1e300;
};

TailStats tail_of(const ModelSpec& m, const State& s0) {
  IntegrationOptions opt;
  opt.step = 1e-3;
  const auto traj = integrate(m, s0, 300.0, opt);
  TailStats out;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] < 270.0) continue;
    out.min_I = std::min(out.min_I, traj.states[i].I);
    out.max_I = std::max(out.max_I, traj.states[i].I);
  }
  return out;
}

Outcome_ simulation_confirmations() {
  using clock = std::chrono::steady_clock;
  const auto persist = mm_family(10.0, 0.3);
  const auto extinct = mm_family(5.0, 0.2);
  auto t0 = clock::now();
  const double tail_min = tail_of(persist, canonical_initial_state(persist)).min_I;
  const double s1 = std::chrono::duration<double>(clock::now() - t0).count();
  t0 = clock::now();
  const double tail_max = tail_of(extinct, canonical_initial_state(extinct)).max_I;
  const double s2 = std::chrono::duration<double>(clock::now() - t0).count();
  const bool ok = tail_min > 1e-4 && tail_max < 1e-6 && s1 < 60.0 && s2 < 60.0;
  return {ok, fmt("persistence tail min I = %.3e (%.1f s), extinction tail max I = %.3e (%.1f s)",
                  tail_min, s1, tail_max, s2)};
}

Outcome_ region_fidelity() {
  const FamilyTemplate base;
  const Axis b_axis{"b", linspace_step(0.0, 1.0, 0.0125)};
  const Axis beta_axis{"beta", linspace_step(0.0, 16.0, 0.25)};
  SweepOptions opt;
  const auto grid = sweep(base, b_axis, beta_axis, opt);

  // A cell may disagree with a boundary curve only if the curve passes
  // through the box of one cell (Δb = 0.05, Δβ = 0.25) around it.
  const auto near = [](double b, double beta, auto&& f) {
    double lo = 1e300, hi = -1e300;
    for (const double db : {-0.05, 0.05}) {
      for (const double dbeta : {-0.25, 0.25}) {
        const double v = f(std::max(b + db, 0.0), beta + dbeta);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    return lo <= 0.0 && hi >= 0.0;
  };
  const auto ext_curve = [](double b, double beta) { return beta * (1.0 + b) - 6.06; };
  const auto per_curve = [](double b, double beta) { return beta - 9.0 * b - 6.06; };

  std::size_t far = 0, ext_cells = 0, per_cells = 0;
  for (std::size_t i = 0; i < b_axis.values.size(); ++i) {
    for (std::size_t j = 0; j < beta_axis.values.size(); ++j) {
      const double b = b_axis.values[i], beta = beta_axis.values[j];
      const Outcome o = grid.at(i, j).outcome;
      ext_cells += o == Outcome::Extinction;
      per_cells += o == Outcome::Persistence;
      const bool ext_expected = ext_curve(b, beta) < 0.0;
      const bool per_expected = per_curve(b, beta) > 0.0;
      if ((o == Outcome::Extinction) != ext_expected && !near(b, beta, ext_curve)) ++far;
      if ((o == Outcome::Persistence) != per_expected && !near(b, beta, per_curve)) ++far;
    }
  }

  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> pick(0, grid.cells.size() - 1);
  SweepOptions general = opt;
  general.force_general_path = true;
  std::size_t disagreements = 0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t idx = pick(rng);
    FamilyTemplate f = base;
    f.b = b_axis.values[idx / beta_axis.values.size()];
    f.beta = beta_axis.values[idx % beta_axis.values.size()];
    disagreements += classify_cell(f, general).outcome != grid.cells[idx].outcome;
  }
  const bool ok = far == 0 && disagreements == 0 && ext_cells > 0 && per_cells > 0;
  return {ok, fmt("81x65 grid: %zu extinction, %zu persistence cells; %zu off-boundary mismatches; "
                  "general path disagrees on %zu/50 random cells",
                  ext_cells, per_cells, far, disagreements)};
}

Outcome_ counterexample() {
  const Verdict v = classify(periodic_family(6.2, 0.6));
  return {v.outcome == Outcome::Inconclusive,
          fmt("beta=6.2, b=0.6 classified %s", to_string(v.outcome))};
}

Outcome_ aux_start_independence() {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const ModelSpec m = testing_support::random_periodic_model(rng);
    ThresholdConfig cfg;
    cfg.p = 0.5;
    cfg.z0 = 1.0;
    const auto ref = compute_report(m, cfg);
    for (const double z0 : {0.1, 10.0}) {
      cfg.z0 = z0;
      const auto r = compute_report(m, cfg);
      const std::pair<double, double> pairs[] = {{r.R_e, ref.R_e},           {r.R_p, ref.R_p},
                                                 {r.R_e_star, ref.R_e_star}, {r.R_p_star, ref.R_p_star},
                                                 {r.G, ref.G},               {r.H, ref.H}};
      for (const auto& [a, b] : pairs) {
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
      }
    }
  }
  return {worst <= 1e-6, fmt("20 draws, z0 in {0.1, 1, 10}: worst difference %.2e (relative above 1)", worst)};
}

Outcome_ positivity_and_bound() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  double min_component = 1e300, worst_excess = -1e300;
  int runs = 0;
  for (int k = 0; k < 10; ++k) {
    const ModelSpec m = testing_support::random_periodic_model(rng);
    const double D = population_bound(m);
    for (int j = 0; j < 20; ++j) {
      const State s0{0.0, u(rng), u(rng), u(rng), u(rng)};
      IntegrationOptions opt;
      opt.step = 2e-3;
      opt.record_every = 5;
      Trajectory traj;
      try {
        traj = integrate(m, s0, 60.0, opt);
      } catch (const IntegrationError& e) {
        return {false, std::string("integration aborted: ") + e.what()};
      }
      ++runs;
      for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const State& s = traj.states[i];
        min_component = std::min({min_component, s.S, s.E, s.I, s.R});
        if (traj.times[i] >= 54.0) worst_excess = std::max(worst_excess, s.N() - D);
      }
    }
  }
  const bool ok = runs == 200 && min_component >= -1e-9 && worst_excess <= 1e-6;
  return {ok, fmt("%d runs: min component %.3e, max tail N - D = %.3e", runs, min_component, worst_excess)};
}

Outcome_ convergence_order() {
  const testing_support::LinearOracle o{1.5, 1.0, 0.3, 2.0, 0.5, State{0.0, 0.4, 0.3, 0.2, 0.1}};
  const auto error = [&](double h) {
    IntegrationOptions opt;
    opt.step = h;
    const auto traj = integrate(o.model(), o.s0, 5.0, opt);
    return testing_support::max_abs_error(traj.states.back(), o.at(5.0));
  };
  const double e1 = error(0.1), e2 = error(0.05), e3 = error(0.025);
  const double r1 = e1 / e2, r2 = e2 / e3;
  return {r1 >= 14.0 && r2 >= 14.0,
          fmt("errors %.3e, %.3e, %.3e; reduction factors %.2f, %.2f", e1, e2, e3, r1, r2)};
}

Outcome_ robustness() {
  Perturbation pert;
  pert.beta = TimeFunction::constant(1.0);
  pert.eta = TimeFunction::constant(1.0);
  ThresholdConfig cfg;
  cfg.p = 0.4;
  const double taus[] = {0.0, 0.2, 0.1, 0.05, 0.025};
  const auto res = robustness_scan(mm_family(10.0, 0.3), pert, taus, cfg);

  bool ok = res.rows.size() == 5 && res.rows[0].max_delta() == 0.0 && res.rows[0].dlogRe == 0.0 &&
            res.rows[0].dlogRp == 0.0 && res.rows[0].dlogRe_star == 0.0 && res.rows[0].dlogRp_star == 0.0;
  double prev = std::numeric_limits<double>::infinity();
  double worst_ratio = 0.0;
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    ok = ok && r.error.empty();
    for (const double d : {r.dlogRe, r.dlogRp, r.dlogRe_star, r.dlogRp_star}) {
      ok = ok && d <= r.theta;
      worst_ratio = std::max(worst_ratio, d / r.theta);
    }
    ok = ok && r.max_delta() <= prev;
    prev = r.max_delta();
  }
  return {ok, fmt("tau=0 deltas zero; max log-delta/Theta = %.3f; max-delta %.4f -> %.4f over tau 0.2 -> 0.025",
                  worst_ratio, res.rows[1].max_delta(), res.rows.back().max_delta())};
}

Outcome_ extinction_stability() {
  const auto m = mm_family(5.0, 0.2);
  IntegrationOptions opt;
  opt.step = 1e-3;
  const auto a = integrate(m, canonical_initial_state(m), 300.0, opt);
  const auto b = integrate(m, State{0.0, 0.2, 0.3, 0.3, 0.2}, 300.0, opt);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    if (a.times[i] < 270.0) continue;
    worst = std::max(worst, testing_support::max_abs_error(a.states[i], b.states[i]));
  }
  return {worst < 1e-4, fmt("sup state difference over [270, 300] = %.3e", worst)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "G-value anchor", 5.0, g_anchor},
      {2, "R^per boundary", 1.0, rper_boundary},
      {3, "Michaelis-Menten anchors", 10.0, mm_anchors},
      {4, "simulation confirmations", 120.0, simulation_confirmations},
      {5, "region fidelity", 600.0, region_fidelity},
      {6, "counterexample honesty", 60.0, counterexample},
      {7, "auxiliary start independence", 120.0, aux_start_independence},
      {8, "positivity and population bound", 300.0, positivity_and_bound},
      {9, "convergence order", 60.0, convergence_order},
      {10, "robustness", 120.0, robustness},
      {11, "extinction stability", 120.0, extinction_stability},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome_ r;
    try {
      r = c.body();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = r.pass && in_time;
    failures += !pass;
    std::printf("[%s] %2d %s: %s (%.2f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                r.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
