#pragma once

// Time-dependent model coefficients and their asymptotic window statistics
//
//   h_ω^- = liminf (1/ω) ∫_t^{t+ω} h(s) ds,   h_ω^+ = limsup (...),   h_S = sup h.
//
// The liminf/limsup are approximated by min/max over a finite scan window
// placed after a burn-in period (see WindowPolicy).

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace seirs {

class TimeFunction;

namespace coeff {

struct Constant {
  double value = 0.0;
};

/// base·(1 + amp_frac·cos(2πt/period))
struct PeriodicCosine {
  double base = 0.0;
  double amp_frac = 0.0;
  double period = 1.0;
};

/// base·(1 + amp_frac·(1 + e^{-decay_rate·t})·cos(2πt/period))
struct AsymptoticPeriodic {
  double base = 0.0;
  double amp_frac = 0.0;
  double decay_rate = 1.0;
  double period = 1.0;
};

/// Piecewise-linear interpolation, held constant outside the sample range.
struct Tabulated {
  std::vector<std::pair<double, double>> samples;
};

/// Σ weight_i · f_i(t). Used for perturbed coefficients f + τ·g.
struct Combination {
  std::vector<std::pair<double, std::shared_ptr<const TimeFunction>>> terms;
};

}  // namespace coeff

class TimeFunction {
 public:
  using Kind = std::variant<coeff::Constant, coeff::PeriodicCosine, coeff::AsymptoticPeriodic,
                            coeff::Tabulated, coeff::Combination>;

  TimeFunction() = default;

  static TimeFunction constant(double value, std::string name = {}) {
    require_finite(value, "constant value");
    return TimeFunction(coeff::Constant{value}, std::move(name));
  }

  static TimeFunction periodic_cosine(double base, double amp_frac, double period,
                                      std::string name = {}) {
    require_finite(base, "base");
    require_finite(amp_frac, "amp_frac");
    if (!(period > 0.0) || !std::isfinite(period)) {
      throw std::invalid_argument("periodic_cosine: period must be > 0");
    }
    return TimeFunction(coeff::PeriodicCosine{base, amp_frac, period}, std::move(name));
  }

  static TimeFunction asymptotic_periodic(double base, double amp_frac, double decay_rate,
                                          double period, std::string name = {}) {
    require_finite(base, "base");
    require_finite(amp_frac, "amp_frac");
    if (!(decay_rate >= 0.0) || !std::isfinite(decay_rate)) {
      throw std::invalid_argument("asymptotic_periodic: decay_rate must be >= 0");
    }
    if (!(period > 0.0) || !std::isfinite(period)) {
      throw std::invalid_argument("asymptotic_periodic: period must be > 0");
    }
    return TimeFunction(coeff::AsymptoticPeriodic{base, amp_frac, decay_rate, period},
                        std::move(name));
  }

  static TimeFunction tabulated(std::vector<std::pair<double, double>> samples,
                                std::string name = {}) {
    if (samples.empty()) {
      throw std::invalid_argument("tabulated: at least one sample required");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      require_finite(samples[i].first, "sample time");
      require_finite(samples[i].second, "sample value");
      if (i > 0 && !(samples[i].first > samples[i - 1].first)) {
        throw std::invalid_argument("tabulated: sample times must be strictly increasing");
      }
    }
    return TimeFunction(coeff::Tabulated{std::move(samples)}, std::move(name));
  }

  /// Returns `*this + tau·shape`. With tau == 0 the original function is returned.
  TimeFunction plus(double tau, const TimeFunction& shape) const {
    if (tau == 0.0) return *this;
    coeff::Combination c;
    c.terms.emplace_back(1.0, std::make_shared<const TimeFunction>(*this));
    c.terms.emplace_back(tau, std::make_shared<const TimeFunction>(shape));
    return TimeFunction(std::move(c), name_);
  }

  double operator()(double t) const {
    return std::visit([t](const auto& k) { return eval_kind(k, t); }, kind_);
  }

  const Kind& kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  TimeFunction& rename(std::string name) {
    name_ = std::move(name);
    return *this;
  }

  bool is_constant() const noexcept {
    if (const auto* c = std::get_if<coeff::PeriodicCosine>(&kind_)) return c->amp_frac == 0.0;
    if (const auto* c = std::get_if<coeff::AsymptoticPeriodic>(&kind_)) return c->amp_frac == 0.0;
    if (const auto* c = std::get_if<coeff::Tabulated>(&kind_)) return c->samples.size() == 1;
    if (const auto* c = std::get_if<coeff::Combination>(&kind_)) {
      return std::all_of(c->terms.begin(), c->terms.end(),
                         [](const auto& term) { return term.second->is_constant(); });
    }
    return std::holds_alternative<coeff::Constant>(kind_);
  }

  /// Declared period for functions that are exactly periodic (not merely
  /// asymptotically). Constants have no declared period.
  std::optional<double> declared_period() const noexcept {
    if (const auto* c = std::get_if<coeff::PeriodicCosine>(&kind_)) {
      if (c->amp_frac == 0.0) return std::nullopt;
      return c->period;
    }
    if (const auto* c = std::get_if<coeff::Combination>(&kind_)) {
      std::optional<double> period;
      for (const auto& [w, f] : c->terms) {
        if (f->is_constant()) continue;
        const auto sub = f->declared_period();
        if (!sub || (period && *period != *sub)) return std::nullopt;
        period = sub;
      }
      return period;
    }
    return std::nullopt;
  }

 private:
  TimeFunction(Kind kind, std::string name) : kind_(std::move(kind)), name_(std::move(name)) {}

  static void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
  }

  static double eval_kind(const coeff::Constant& c, double) { return c.value; }

  static double eval_kind(const coeff::PeriodicCosine& c, double t) {
    return c.base * (1.0 + c.amp_frac * std::cos(2.0 * std::numbers::pi * t / c.period));
  }

  static double eval_kind(const coeff::AsymptoticPeriodic& c, double t) {
    return c.base * (1.0 + c.amp_frac * (1.0 + std::exp(-c.decay_rate * t)) *
                               std::cos(2.0 * std::numbers::pi * t / c.period));
  }

  static double eval_kind(const coeff::Tabulated& c, double t) {
    const auto& s = c.samples;
    if (t <= s.front().first) return s.front().second;
    if (t >= s.back().first) return s.back().second;
    const auto hi = std::upper_bound(s.begin(), s.end(), t,
                                     [](double v, const auto& sample) { return v < sample.first; });
    const auto lo = std::prev(hi);
    const double w = (t - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
  }

  static double eval_kind(const coeff::Combination& c, double t) {
    double sum = 0.0;
    for (const auto& [w, f] : c.terms) sum += w * (*f)(t);
    return sum;
  }

  Kind kind_ = coeff::Constant{0.0};
  std::string name_;
};

/// Finite-horizon surrogate for the asymptotic window statistics.
struct WindowPolicy {
  double burn_in = 100.0;
  std::optional<double> scan_length;  // default max(10·ω, 100)
  std::optional<double> step;         // default ω/100

  double scan_length_for(double omega) const {
    return scan_length.value_or(std::max(10.0 * omega, 100.0));
  }
  double step_for(double omega) const { return step.value_or(omega / 100.0); }
};

struct WindowStats {
  double omega = 1.0;
  double lower = 0.0;  // h_ω^-
  double upper = 0.0;  // h_ω^+
  double sup = 0.0;    // h_S over the scan grid
  double burn_in = 0.0;
  double scan_length = 0.0;
};

/// Panels used by window_average: the smallest even count that gives at
/// least 256 panels per unit time.
inline int simpson_panels(double length) {
  const int half = static_cast<int>(std::ceil(128.0 * length - 1e-9));
  return 2 * std::max(half, 1);
}

/// (1/ω) ∫_t^{t+ω} f(s) ds by composite Simpson (exact for constant and
/// tabulated coefficients).
inline double window_average(const TimeFunction& f, double t, double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("window_average: omega must be > 0");
  if (!(t >= 0.0)) throw std::invalid_argument("window_average: t must be >= 0");
  if (const auto* c = std::get_if<coeff::Constant>(&f.kind())) return c->value;
  if (std::holds_alternative<coeff::Tabulated>(f.kind())) {
    // Trapezoid between consecutive knots is exact for piecewise-linear data.
    const auto& samples = std::get<coeff::Tabulated>(f.kind()).samples;
    const double end = t + omega;
    double integral = 0.0;
    double a = t;
    for (const auto& [knot, value] : samples) {
      if (knot <= a) continue;
      const double b = std::min(knot, end);
      integral += 0.5 * (b - a) * (f(a) + f(b));
      a = b;
      if (a >= end) break;
    }
    if (a < end) integral += 0.5 * (end - a) * (f(a) + f(end));
    return integral / omega;
  }

  const int n = simpson_panels(omega);
  const double h = omega / n;
  double odd = 0.0;
  double even = 0.0;
  for (int i = 1; i < n; ++i) {
    const double v = f(t + i * h);
    (i % 2 ? odd : even) += v;
  }
  const double integral = h / 3.0 * (f(t) + 4.0 * odd + 2.0 * even + f(t + omega));
  return integral / omega;
}

inline WindowStats window_bounds(const TimeFunction& f, double omega, double burn_in,
                                 double scan_length, double step) {
  if (!(omega > 0.0)) throw std::invalid_argument("window_bounds: omega must be > 0");
  if (!(burn_in >= 0.0)) throw std::invalid_argument("window_bounds: burn_in must be >= 0");
  if (scan_length < omega) {
    throw std::invalid_argument("window_bounds: scan_length must be >= omega");
  }
  if (!(step > 0.0) || step > omega / 10.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("window_bounds: step must lie in (0, omega/10]");
  }

  WindowStats out;
  out.omega = omega;
  out.burn_in = burn_in;
  out.scan_length = scan_length;

  if (const auto* c = std::get_if<coeff::Constant>(&f.kind())) {
    out.lower = out.upper = out.sup = c->value;
    return out;
  }

  // Periodic functions have periodic window averages: one period suffices.
  double length = scan_length;
  if (const auto period = f.declared_period()) {
    length = *period;
    out.scan_length = length;
  }

  const auto count = static_cast<long>(std::floor(length / step + 1e-9)) + 1;
  out.lower = std::numeric_limits<double>::infinity();
  out.upper = -std::numeric_limits<double>::infinity();
  out.sup = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < count; ++i) {
    const double t = burn_in + static_cast<double>(i) * step;
    const double avg = window_average(f, t, omega);
    out.lower = std::min(out.lower, avg);
    out.upper = std::max(out.upper, avg);
    out.sup = std::max(out.sup, f(t));
  }
  return out;
}

inline WindowStats window_bounds(const TimeFunction& f, double omega,
                                 const WindowPolicy& policy = {}) {
  return window_bounds(f, omega, policy.burn_in, policy.scan_length_for(omega),
                       policy.step_for(omega));
}

}  // namespace seirs
