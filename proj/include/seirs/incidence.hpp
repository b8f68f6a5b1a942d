#pragma once

// Incidence functions φ(x, n, z) = φ(S, N, I) and numerical checks of the
// structural hypotheses the threshold theory relies on:
//
//   H1  n ↦ φ non-increasing; x ↦ φ(x,n,z) and x ↦ φ(x,x,z) non-decreasing; φ(0,n,z) = 0
//   H2  φ(x,n,z)/z converges as z → 0⁺, uniformly in (x,n)
//   H3  z ↦ φ(x,n,z)/z is continuous, bounded and non-increasing
//   H4  |φ(x₁,n,z) − φ(x₂,n,z)| ≤ K_θ |x₁ − x₂| z on Δ_{θ,K} (and on the diagonal)
//
// Δ_{θ,K} = {(x,n,z) : θ ≤ x ≤ n ≤ K, 0 ≤ z ≤ n ≤ K}.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "seirs/errors.hpp"

namespace seirs {

/// Contact-rate shapes C(n) for Michaelis–Menten incidence C(n)·x·z/n.
struct ContactRate {
  enum class Form { Identity, One, Saturating };
  Form form = Form::Identity;
  double b = 0.0;  // Saturating only: C(n) = n/(1 + b·n)

  static ContactRate identity() { return {Form::Identity, 0.0}; }
  static ContactRate one() { return {Form::One, 0.0}; }
  static ContactRate saturating(double b) {
    if (!(b > 0.0)) throw std::invalid_argument("saturating contact rate: b must be > 0");
    return {Form::Saturating, b};
  }

  double operator()(double n) const {
    switch (form) {
      case Form::Identity: return n;
      case Form::One: return 1.0;
      case Form::Saturating: return n / (1.0 + b * n);
    }
    return 0.0;
  }

  /// C(n)/n, with the n → 0 limit where it exists (0 for C ≡ 1, since x ≤ n forces x = 0).
  double over_n(double n) const {
    switch (form) {
      case Form::Identity: return 1.0;
      case Form::One: return n > 0.0 ? 1.0 / n : 0.0;
      case Form::Saturating: return 1.0 / (1.0 + b * n);
    }
    return 0.0;
  }
};

namespace incidence_kind {

struct MassAction {};                // x·z
struct Standard {};                  // x·z/n, 0 at n = 0
struct MichaelisMenten {             // C(n)·x·z/n
  ContactRate C;
};
struct Saturated {                   // x·z/(1 + b·n)
  double b = 1.0;
};
struct Custom {
  std::function<double(double, double, double)> phi;
  std::function<double(double, double)> zslope;  // optional analytic lim φ(x,n,δ)/δ
  std::function<double(double)> lipschitz;       // optional θ ↦ K_θ
  std::string label = "custom";
};

}  // namespace incidence_kind

class IncidenceFunction {
 public:
  using Kind = std::variant<incidence_kind::MassAction, incidence_kind::Standard,
                            incidence_kind::MichaelisMenten, incidence_kind::Saturated,
                            incidence_kind::Custom>;

  IncidenceFunction() = default;
  explicit IncidenceFunction(Kind kind, std::optional<double> domain_cap = std::nullopt)
      : kind_(std::move(kind)) {
    if (const auto* s = std::get_if<incidence_kind::Saturated>(&kind_); s && !(s->b > 0.0)) {
      throw std::invalid_argument("saturated incidence: b must be > 0");
    }
    if (const auto* c = std::get_if<incidence_kind::Custom>(&kind_); c && !c->phi) {
      throw std::invalid_argument("custom incidence: evaluator required");
    }
    if (domain_cap) set_cap(*domain_cap);
  }

  static IncidenceFunction mass_action() { return IncidenceFunction(incidence_kind::MassAction{}); }
  static IncidenceFunction standard() { return IncidenceFunction(incidence_kind::Standard{}); }
  static IncidenceFunction michaelis_menten(ContactRate C) {
    return IncidenceFunction(incidence_kind::MichaelisMenten{C});
  }
  static IncidenceFunction saturated(double b) {
    return IncidenceFunction(incidence_kind::Saturated{b});
  }
  static IncidenceFunction custom(incidence_kind::Custom c) { return IncidenceFunction(std::move(c)); }

  const Kind& kind() const noexcept { return kind_; }

  bool has_cap() const noexcept { return cap_.has_value(); }
  double cap() const {
    if (!cap_) throw DomainError("incidence: domain cap K not set");
    return *cap_;
  }
  IncidenceFunction with_cap(double K) const {
    IncidenceFunction copy = *this;
    copy.set_cap(K);
    return copy;
  }

  bool has_analytic_slope() const noexcept {
    if (const auto* c = std::get_if<incidence_kind::Custom>(&kind_)) return bool(c->zslope);
    return true;
  }

  std::string label() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, incidence_kind::MassAction>) return "mass_action";
          else if constexpr (std::is_same_v<T, incidence_kind::Standard>) return "standard";
          else if constexpr (std::is_same_v<T, incidence_kind::MichaelisMenten>) return "michaelis_menten";
          else if constexpr (std::is_same_v<T, incidence_kind::Saturated>) return "saturated";
          else return k.label;
        },
        kind_);
  }

  /// Unchecked evaluation; callers guarantee a meaningful argument.
  double operator()(double x, double n, double z) const {
    return std::visit([&](const auto& k) { return eval(k, x, n, z); }, kind_);
  }

  /// φ(x,n,z) with a Δ_{0,K} membership check.
  double phi(double x, double n, double z) const {
    check_domain(x, n, z);
    return (*this)(x, n, z);
  }

  /// lim_{δ→0⁺} φ(x,n,δ)/δ with the 0 ≤ x ≤ n ≤ K check.
  double zslope(double x, double n) const {
    check_domain(x, n, 0.0);
    return slope(x, n);
  }

  /// Unchecked slope: analytic when available, Richardson-extrapolated otherwise.
  double slope(double x, double n) const {
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, incidence_kind::MassAction>) {
            return x;
          } else if constexpr (std::is_same_v<T, incidence_kind::Standard>) {
            return n > 0.0 ? x / n : 0.0;
          } else if constexpr (std::is_same_v<T, incidence_kind::MichaelisMenten>) {
            return x > 0.0 ? x * k.C.over_n(n) : 0.0;
          } else if constexpr (std::is_same_v<T, incidence_kind::Saturated>) {
            return x / (1.0 + k.b * n);
          } else {
            return k.zslope ? k.zslope(x, n) : numeric_slope(x, n);
          }
        },
        kind_);
  }

  /// Richardson extrapolation of φ(x,n,δ)/δ over δ ∈ {1e-2, 1e-3, 1e-4}.
  /// Throws NonConvergence when the two extrapolants disagree by more than 1e-6 relative.
  double numeric_slope(double x, double n) const {
    constexpr std::array<double, 3> deltas{1e-2, 1e-3, 1e-4};
    std::array<double, 3> q{};
    for (std::size_t i = 0; i < deltas.size(); ++i) q[i] = (*this)(x, n, deltas[i]) / deltas[i];
    // Ratio 10 between successive δ: first-order error term cancels.
    const double coarse = (10.0 * q[1] - q[0]) / 9.0;
    const double fine = (10.0 * q[2] - q[1]) / 9.0;
    const double scale = std::max({std::abs(coarse), std::abs(fine), 1e-12});
    if (std::abs(coarse - fine) > 1e-6 * scale) {
      std::ostringstream msg;
      msg << "zslope did not converge at (x=" << x << ", n=" << n << "): " << coarse << " vs "
          << fine;
      throw NonConvergence(msg.str());
    }
    return fine;
  }

  /// User-declared Lipschitz constant K_θ, if any.
  std::optional<double> declared_lipschitz(double theta) const {
    if (const auto* c = std::get_if<incidence_kind::Custom>(&kind_); c && c->lipschitz) {
      return c->lipschitz(theta);
    }
    return std::nullopt;
  }

 private:
  void set_cap(double K) {
    if (!(K > 0.0) || !std::isfinite(K)) throw std::invalid_argument("domain cap K must be > 0");
    cap_ = K;
  }

  void check_domain(double x, double n, double z) const {
    const double K = cap();
    const double tol = 1e-12 * std::max(1.0, K);
    const bool ok = x >= -tol && x <= n + tol && n <= K + tol && z >= -tol && z <= n + tol;
    if (!ok) {
      std::ostringstream msg;
      msg << "incidence argument (x=" << x << ", n=" << n << ", z=" << z
          << ") outside Delta_{0,K} with K=" << K;
      throw DomainError(msg.str());
    }
  }

  static double eval(const incidence_kind::MassAction&, double x, double, double z) { return x * z; }
  static double eval(const incidence_kind::Standard&, double x, double n, double z) {
    return n > 0.0 ? x * z / n : 0.0;
  }
  static double eval(const incidence_kind::MichaelisMenten& k, double x, double n, double z) {
    return x > 0.0 ? k.C.over_n(n) * x * z : 0.0;
  }
  static double eval(const incidence_kind::Saturated& k, double x, double n, double z) {
    return x * z / (1.0 + k.b * n);
  }
  static double eval(const incidence_kind::Custom& k, double x, double n, double z) {
    return k.phi(x, n, z);
  }

  Kind kind_ = incidence_kind::MassAction{};
  std::optional<double> cap_;
};

/// Pass/fail of one hypothesis check together with its worst observed
/// violation (0 when nothing was violated).
struct CheckResult {
  bool pass = true;
  double worst = 0.0;
};

struct LipschitzEstimate {
  double theta = 0.0;
  double estimate = 0.0;  // max |Δφ| / (|Δx|·z) over sampled pairs
  bool pass = true;
};

struct HypothesisReport {
  CheckResult h1_monotone_n;
  CheckResult h1_monotone_x;  // both x ↦ φ(x,n,z) and x ↦ φ(x,x,z)
  CheckResult h1_vanishing;   // φ(0,n,z) = 0
  CheckResult h2_uniform_limit;
  CheckResult h3_ratio_nonincreasing;
  std::array<LipschitzEstimate, 2> h4_lipschitz{};
  double slope_bound = 0.0;  // estimated M
  int sample_count = 0;

  bool h4_pass() const { return h4_lipschitz[0].pass && h4_lipschitz[1].pass; }
  bool all_pass() const {
    return h1_monotone_n.pass && h1_monotone_x.pass && h1_vanishing.pass &&
           h2_uniform_limit.pass && h3_ratio_nonincreasing.pass && h4_pass();
  }
};

namespace detail {

/// Radical inverse in the given prime base (Halton sequence component).
inline double halton(std::uint64_t index, unsigned base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

inline void record(CheckResult& c, double violation, double tol) {
  if (violation > c.worst) c.worst = violation;
  if (violation > tol) c.pass = false;
}

}  // namespace detail

/// M = max over a (201 × 201) grid of Δ_{0,K} of the z-slope.
inline double slope_bound(const IncidenceFunction& f) {
  const double K = f.cap();
  constexpr int grid = 200;
  double M = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double n = K * i / grid;
    for (int j = 0; j <= grid; ++j) {
      const double x = n * j / grid;
      M = std::max(M, f.zslope(x, n));
    }
  }
  return M;
}

/// Samples `samples` quasi-random points of Δ_{0,K} and checks H1–H4.
/// Violations are recorded in the report; nothing is thrown for them.
inline HypothesisReport verify_hypotheses(const IncidenceFunction& f, int samples) {
  if (samples < 100) throw std::invalid_argument("verify_hypotheses: samples must be >= 100");
  const double K = f.cap();
  const double h = K / 1000.0;
  const auto tol = [](double a, double b) {
    return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  };

  HypothesisReport rep;
  rep.sample_count = samples;
  rep.slope_bound = slope_bound(f);

  constexpr std::array<double, 3> deltas{1e-2, 1e-3, 1e-4};
  std::array<double, 3> h2_dev{};

  for (int s = 1; s <= samples; ++s) {
    const double u1 = detail::halton(s, 2);
    const double u2 = detail::halton(s, 3);
    const double u3 = detail::halton(s, 5);
    const double n = K * u1;
    const double x = n * u2;
    const double z = n * u3;
    const double here = f(x, n, z);

    // H1
    if (n + h <= K) {
      const double right = f(x, n + h, z);
      detail::record(rep.h1_monotone_n, right - here, tol(right, here));
    }
    if (x + h <= n) {
      const double right = f(x + h, n, z);
      detail::record(rep.h1_monotone_x, here - right, tol(right, here));
    }
    if (z <= x && x + h <= K) {
      const double diag = f(x, x, z);
      const double right = f(x + h, x + h, z);
      detail::record(rep.h1_monotone_x, diag - right, tol(right, diag));
    }
    detail::record(rep.h1_vanishing, std::abs(f(0.0, n, z)), 0.0);

    // H2: distance of the difference quotient from its limit, per δ.
    const double limit = f.slope(x, n);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      h2_dev[i] = std::max(h2_dev[i], std::abs(f(x, n, deltas[i]) / deltas[i] - limit));
    }

    // H3: ratio non-increasing in z and dominated by its z → 0 limit.
    if (z > 0.0) {
      const double ratio = here / z;
      detail::record(rep.h3_ratio_nonincreasing, ratio - limit, tol(ratio, limit));
      if (z + h <= n) {
        const double next = f(x, n, z + h) / (z + h);
        detail::record(rep.h3_ratio_nonincreasing, next - ratio, tol(next, ratio));
      }
    }
  }

  // H2 passes when the deviation shrinks with δ and is small at the finest δ.
  rep.h2_uniform_limit.worst = h2_dev[2];
  rep.h2_uniform_limit.pass = h2_dev[2] <= h2_dev[0] + 1e-12 &&
                              h2_dev[2] <= 1e-3 * std::max(1.0, rep.slope_bound);

  // H4 on Δ_{θ,K} for θ ∈ {K/10, K/4}.
  const std::array<double, 2> thetas{K / 10.0, K / 4.0};
  for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
    const double theta = thetas[ti];
    auto& est = rep.h4_lipschitz[ti];
    est.theta = theta;
    for (int s = 1; s <= samples; ++s) {
      const double n = theta + (K - theta) * detail::halton(s, 2);
      const double x1 = theta + (n - theta) * detail::halton(s, 3);
      const double x2 = theta + (n - theta) * detail::halton(s, 5);
      const double z = n * detail::halton(s, 7);
      if (std::abs(x1 - x2) > 1e-9 && z > 1e-9) {
        const double q = std::abs(f(x1, n, z) - f(x2, n, z)) / (std::abs(x1 - x2) * z);
        est.estimate = std::max(est.estimate, q);
      }
      const double zd = std::min(x1, x2) * detail::halton(s, 11);
      if (std::abs(x1 - x2) > 1e-9 && zd > 1e-9) {
        const double q = std::abs(f(x1, x1, zd) - f(x2, x2, zd)) / (std::abs(x1 - x2) * zd);
        est.estimate = std::max(est.estimate, q);
      }
    }
    est.pass = std::isfinite(est.estimate);
    if (const auto declared = f.declared_lipschitz(theta)) {
      est.pass = est.pass && est.estimate <= *declared * (1.0 + 1e-6);
    }
  }
  return rep;
}

}  // namespace seirs
