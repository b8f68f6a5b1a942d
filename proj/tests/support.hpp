#pragma once

#include <cmath>
#include <random>

#include "seirs/classify.hpp"
#include "seirs/dynamics.hpp"

namespace testing_support {

using seirs::ModelSpec;
using seirs::State;
using seirs::TimeFunction;

/// Closed-form solution of the model with β = 0 and constant coefficients:
/// E and I decay linearly, R is driven by I, and N relaxes to Λ/μ.
struct LinearOracle {
  double Lambda, mu, eta, eps, gam;
  State s0;

  State at(double t) const {
    const double a = mu + eps, c = mu + gam, d = mu + eta;
    const double E = s0.E * std::exp(-a * t);
    // I = I0 e^{-ct} + κ (e^{-at} − e^{-ct}),  κ = ε E0 / (c − a)
    const double kappa = eps * s0.E / (c - a);
    const double I = s0.I * std::exp(-c * t) + kappa * (std::exp(-a * t) - std::exp(-c * t));
    // R' = γ I − d R, each e^{-kt} term in I contributes γ·w·(e^{-kt} − e^{-dt})/(d − k).
    const auto drive = [&](double w, double k) {
      return gam * w * (std::exp(-k * t) - std::exp(-d * t)) / (d - k);
    };
    const double R = s0.R * std::exp(-d * t) + drive(s0.I - kappa, c) + drive(kappa, a);
    const double n_star = Lambda / mu;
    const double N = n_star + (s0.N() - n_star) * std::exp(-mu * t);
    return {t, N - E - I - R, E, I, R};
  }

  ModelSpec model() const {
    ModelSpec m;
    m.Lambda = TimeFunction::constant(Lambda, "Lambda");
    m.mu = TimeFunction::constant(mu, "mu");
    m.beta = TimeFunction::constant(0.0, "beta");
    m.eta = TimeFunction::constant(eta, "eta");
    m.epsilon = TimeFunction::constant(eps, "epsilon");
    m.gamma = TimeFunction::constant(gam, "gamma");
    return m;
  }
};

inline double max_abs_error(const State& a, const State& b) {
  return std::max({std::abs(a.S - b.S), std::abs(a.E - b.E), std::abs(a.I - b.I),
                   std::abs(a.R - b.R)});
}

/// Periodic model with random bases and amplitudes, mass action, Λ = μ·n*.
inline ModelSpec random_periodic_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-0.8, 0.8);
  std::uniform_real_distribution<double> mu(0.5, 3.0), nstar(0.5, 2.0), beta(0.5, 12.0),
      eps(0.2, 3.0), gam(0.01, 1.0), eta(0.0, 0.5);
  ModelSpec m;
  const double mu0 = mu(rng);
  m.mu = TimeFunction::periodic_cosine(mu0, 0.5 * amp(rng), 1.0, "mu");
  m.Lambda = TimeFunction::periodic_cosine(mu0 * nstar(rng), amp(rng), 1.0, "Lambda");
  m.beta = TimeFunction::periodic_cosine(beta(rng), amp(rng), 1.0, "beta");
  m.epsilon = TimeFunction::periodic_cosine(eps(rng), amp(rng), 1.0, "epsilon");
  m.gamma = TimeFunction::periodic_cosine(gam(rng), amp(rng), 1.0, "gamma");
  m.eta = TimeFunction::constant(eta(rng), "eta");
  return m;
}

/// Asymptotically periodic family with Λ = μ = 2, ε = 1, γ = 0.02, η = 0.1, mass action.
inline ModelSpec mm_family(double beta, double b) {
  seirs::FamilyTemplate f;
  f.beta = beta;
  f.b = b;
  f.beta_form = seirs::BetaForm::AsymptoticPeriodic;
  return f.instantiate();
}

/// Periodic family with the same constants.
inline ModelSpec periodic_family(double beta, double b) {
  seirs::FamilyTemplate f;
  f.beta = beta;
  f.b = b;
  return f.instantiate();
}

}  // namespace testing_support
