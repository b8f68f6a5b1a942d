#pragma once

// Experiment configuration (JSON), validation with section paths, and the
// orchestration behind the `seirs` command-line tool.
//
// Schema (unknown keys are errors at every level):
//
//   model.coefficients.<Lambda|mu|beta|eta|epsilon|gamma>
//       {"kind": "constant", "value": v}
//       {"kind": "periodic_cosine", "base": v, "amp_frac": b, "period": T}
//       {"kind": "asymptotic_periodic", "base": v, "amp_frac": b, "decay_rate": r, "period": T}
//       {"kind": "tabulated", "samples": [[t, v], ...]}
//   model.incidence    {"kind": "mass_action" | "standard"}
//                      {"kind": "saturated", "b": b}
//                      {"kind": "michaelis_menten", "contact": "identity" | "one" | "saturating", "b": b}
//   model.domain_cap   K (default 1.5·D)
//   model.omega        {"mu", "Lambda", "beta"} (default 1)
//   initial_state      {"S", "E", "I", "R"} (default canonical interior state)
//   numerics           {"step", "t_end", "burn_in", "scan_length", "scan_step", "z0"}
//   threshold          {"lambdas": [...], "p": p | null}
//   sweep              {"axis1": axis, "axis2": axis, "force_general_path": bool}
//                      axis = {"name": knob, "values": [...]} | {"name", "from", "to", "step"}
//   robustness         {"taus": [...], "shapes": {<coefficient>: time function}}
//   verify             {"samples": n}
//   output             {"dir": path, "thin": n}

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "seirs/classify.hpp"
#include "seirs/csv.hpp"
#include "seirs/dynamics.hpp"
#include "seirs/errors.hpp"
#include "seirs/incidence.hpp"
#include "seirs/thresholds.hpp"

namespace seirs::cli {

inline constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::ordered_json;

enum class Command { Simulate, Thresholds, Sweep, Robustness, Verify };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Thresholds: return "thresholds";
    case Command::Sweep: return "sweep";
    case Command::Robustness: return "robustness";
    case Command::Verify: return "verify-incidence";
  }
  return "simulate";
}

inline std::optional<Command> parse_command(std::string_view s) {
  if (s == "simulate") return Command::Simulate;
  if (s == "thresholds") return Command::Thresholds;
  if (s == "sweep") return Command::Sweep;
  if (s == "robustness") return Command::Robustness;
  if (s == "verify-incidence") return Command::Verify;
  return std::nullopt;
}

struct Numerics {
  double step = 1e-3;
  double t_end = 300.0;
  double burn_in = 100.0;
  double scan_length = 100.0;  // default max(100, 10·max λ)
  double scan_step = 0.01;     // default min λ / 100
  double z0 = 1.0;
};

struct SweepAxisSpec {
  std::string name;
  std::vector<double> values;
};

struct ExperimentConfig {
  Command command = Command::Simulate;
  json model;  // normalized model description (kept for echoing)
  ModelSpec spec;
  std::optional<State> initial_state;
  Numerics numerics;
  std::vector<double> lambdas{1.0};
  std::optional<double> p;
  std::optional<SweepAxisSpec> axis1, axis2;
  bool force_general_path = false;
  std::vector<double> taus{0.0, 0.025, 0.05, 0.1, 0.2};
  json shapes = json::object();  // normalized robustness shapes
  int verify_samples = 1000;
  std::string output_dir = "out";
  int thin = 100;

  ThresholdConfig threshold_config(double lambda) const {
    ThresholdConfig c;
    c.lambda = lambda;
    c.p = p.value_or(1.0);
    c.burn_in = numerics.burn_in;
    c.scan_length = numerics.scan_length;
    c.step = numerics.scan_step;
    c.z0 = numerics.z0;
    c.integration_step = numerics.step;
    return c;
  }
};

namespace detail {

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) throw ConfigError(child(k), "unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& at(const char* key) const {
    if (!has(key)) throw ConfigError(child(key), "required key missing");
    return j_.at(key);
  }

  double number(const char* key) const {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(child(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(child(key), "must be finite");
    return d;
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  double positive(const char* key, double fallback) const {
    const double d = number(key, fallback);
    if (!(d > 0.0)) throw ConfigError(child(key), "must be > 0");
    return d;
  }
  double nonnegative(const char* key, double fallback) const {
    const double d = number(key, fallback);
    if (!(d >= 0.0)) throw ConfigError(child(key), "must be >= 0");
    return d;
  }

  std::string string(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(child(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    const json& v = at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(child(key), "expected a non-empty array");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(child(key), "array entries must be numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  json j_;
  std::string path_;
};

inline void check_amp(const Section& s, double amp) {
  if (!(amp > -1.0 && amp < 1.0)) throw ConfigError(s.child("amp_frac"), "amp_frac out of range (-1,1)");
}

/// Parses a time function; returns the function and its normalized JSON.
inline std::pair<TimeFunction, json> parse_time_function(const json& j, const std::string& path,
                                                         const std::string& name,
                                                         bool restrict_amplitude = true) {
  Section s(j, path);
  const std::string kind = s.string("kind");
  json norm = json::object();
  norm["kind"] = kind;
  if (kind == "constant") {
    s.allow({"kind", "value"});
    const double v = s.number("value");
    norm["value"] = v;
    return {TimeFunction::constant(v, name), norm};
  }
  if (kind == "periodic_cosine") {
    s.allow({"kind", "base", "amp_frac", "period"});
    const double base = s.number("base");
    const double amp = s.number("amp_frac", 0.0);
    if (restrict_amplitude) check_amp(s, amp);
    const double period = s.positive("period", 1.0);
    norm["base"] = base;
    norm["amp_frac"] = amp;
    norm["period"] = period;
    return {TimeFunction::periodic_cosine(base, amp, period, name), norm};
  }
  if (kind == "asymptotic_periodic") {
    s.allow({"kind", "base", "amp_frac", "decay_rate", "period"});
    const double base = s.number("base");
    const double amp = s.number("amp_frac", 0.0);
    if (restrict_amplitude) check_amp(s, amp);
    const double rate = s.nonnegative("decay_rate", 1.0);
    const double period = s.positive("period", 1.0);
    norm["base"] = base;
    norm["amp_frac"] = amp;
    norm["decay_rate"] = rate;
    norm["period"] = period;
    return {TimeFunction::asymptotic_periodic(base, amp, rate, period, name), norm};
  }
  if (kind == "tabulated") {
    s.allow({"kind", "samples"});
    const json& arr = s.at("samples");
    if (!arr.is_array() || arr.empty()) throw ConfigError(s.child("samples"), "expected a non-empty array");
    std::vector<std::pair<double, double>> samples;
    for (const auto& e : arr) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ConfigError(s.child("samples"), "each sample must be [t, value]");
      }
      samples.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    try {
      auto f = TimeFunction::tabulated(samples, name);
      norm["samples"] = arr;
      return {std::move(f), norm};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(s.child("samples"), e.what());
    }
  }
  throw ConfigError(s.child("kind"), "unknown coefficient kind '" + kind + "'");
}

inline std::pair<IncidenceFunction, json> parse_incidence(const json& j, const std::string& path) {
  Section s(j, path);
  const std::string kind = s.string("kind");
  json norm = json::object();
  norm["kind"] = kind;
  if (kind == "mass_action" || kind == "standard") {
    s.allow({"kind"});
    return {kind == "mass_action" ? IncidenceFunction::mass_action() : IncidenceFunction::standard(), norm};
  }
  if (kind == "saturated") {
    s.allow({"kind", "b"});
    const double b = s.positive("b", 1.0);
    norm["b"] = b;
    return {IncidenceFunction::saturated(b), norm};
  }
  if (kind == "michaelis_menten") {
    s.allow({"kind", "contact", "b"});
    const std::string contact = s.has("contact") ? s.string("contact") : "identity";
    norm["contact"] = contact;
    if (contact == "identity") return {IncidenceFunction::michaelis_menten(ContactRate::identity()), norm};
    if (contact == "one") return {IncidenceFunction::michaelis_menten(ContactRate::one()), norm};
    if (contact == "saturating") {
      const double b = s.positive("b", 1.0);
      norm["b"] = b;
      return {IncidenceFunction::michaelis_menten(ContactRate::saturating(b)), norm};
    }
    throw ConfigError(s.child("contact"), "unknown contact rate '" + contact + "'");
  }
  throw ConfigError(s.child("kind"), "unknown incidence kind '" + kind + "'");
}

inline constexpr const char* kCoefficientNames[] = {"Lambda", "mu", "beta", "eta", "epsilon", "gamma"};

inline TimeFunction& coefficient(ModelSpec& m, std::string_view name) {
  if (name == "Lambda") return m.Lambda;
  if (name == "mu") return m.mu;
  if (name == "beta") return m.beta;
  if (name == "eta") return m.eta;
  if (name == "epsilon") return m.epsilon;
  return m.gamma;
}

inline SweepAxisSpec parse_axis(const json& j, const std::string& path) {
  Section s(j, path);
  s.allow({"name", "values", "from", "to", "step"});
  SweepAxisSpec axis;
  axis.name = s.string("name");
  if (!FamilyTemplate::is_knob(axis.name)) throw ConfigError(s.child("name"), "unknown template knob '" + axis.name + "'");
  if (s.has("values")) {
    if (s.has("from") || s.has("to") || s.has("step")) {
      throw ConfigError(path, "give either values or from/to/step, not both");
    }
    axis.values = s.numbers("values");
  } else {
    const double from = s.number("from"), to = s.number("to"), step = s.positive("step", 1.0);
    if (to < from) throw ConfigError(s.child("to"), "must be >= from");
    axis.values = linspace_step(from, to, step);
  }
  return axis;
}

}  // namespace detail

/// Parses and validates a configuration document, applying every default.
inline ExperimentConfig parse_document(const json& doc) {
  using detail::Section;
  ExperimentConfig cfg;
  Section root(doc, "");
  root.allow({"command", "model", "initial_state", "numerics", "threshold", "sweep", "robustness",
              "verify", "output"});

  if (root.has("command")) {
    const auto c = parse_command(root.string("command"));
    if (!c) throw ConfigError("command", "unknown command");
    cfg.command = *c;
  }

  // model
  Section model(root.at("model"), "model");
  model.allow({"coefficients", "incidence", "domain_cap", "omega"});
  Section coeffs(model.at("coefficients"), "model.coefficients");
  coeffs.allow({"Lambda", "mu", "beta", "eta", "epsilon", "gamma"});
  json norm_model = json::object();
  norm_model["coefficients"] = json::object();
  for (const char* name : detail::kCoefficientNames) {
    auto [f, norm] = detail::parse_time_function(coeffs.at(name), coeffs.child(name), name);
    detail::coefficient(cfg.spec, name) = std::move(f);
    norm_model["coefficients"][name] = std::move(norm);
  }
  {
    auto [inc, norm] = model.has("incidence")
                           ? detail::parse_incidence(model.at("incidence"), "model.incidence")
                           : std::pair{IncidenceFunction::mass_action(), json{{"kind", "mass_action"}}};
    cfg.spec.incidence = std::move(inc);
    norm_model["incidence"] = std::move(norm);
  }
  if (model.has("omega")) {
    Section om(model.at("omega"), "model.omega");
    om.allow({"mu", "Lambda", "beta"});
    cfg.spec.omega = {om.positive("mu", 1.0), om.positive("Lambda", 1.0), om.positive("beta", 1.0)};
  }
  norm_model["omega"] = {{"mu", cfg.spec.omega.mu},
                         {"Lambda", cfg.spec.omega.Lambda},
                         {"beta", cfg.spec.omega.beta}};

  // numerics and threshold (defaults that depend on λ come after both are read)
  Section thr(root.has("threshold") ? root.at("threshold") : json::object(), "threshold");
  thr.allow({"lambdas", "p"});
  if (thr.has("lambdas")) {
    cfg.lambdas = thr.numbers("lambdas");
    for (const double l : cfg.lambdas) {
      if (!(l > 0.0)) throw ConfigError("threshold.lambdas", "entries must be > 0");
    }
  }
  if (thr.has("p")) cfg.p = thr.positive("p", 1.0);
  const double lambda_max = *std::max_element(cfg.lambdas.begin(), cfg.lambdas.end());
  const double lambda_min = *std::min_element(cfg.lambdas.begin(), cfg.lambdas.end());

  Section num(root.has("numerics") ? root.at("numerics") : json::object(), "numerics");
  num.allow({"step", "t_end", "burn_in", "scan_length", "scan_step", "z0"});
  cfg.numerics.step = num.positive("step", 1e-3);
  cfg.numerics.t_end = num.positive("t_end", 300.0);
  cfg.numerics.burn_in = num.nonnegative("burn_in", 100.0);
  cfg.numerics.scan_length = num.positive("scan_length", std::max(100.0, 10.0 * lambda_max));
  cfg.numerics.scan_step = num.positive("scan_step", lambda_min / 100.0);
  cfg.numerics.z0 = num.positive("z0", 1.0);
  if (cfg.numerics.step > 0.1) throw ConfigError("numerics.step", "must be <= 0.1");
  if (cfg.numerics.scan_length < lambda_max) {
    throw ConfigError("numerics.scan_length", "must be >= every lambda");
  }
  if (cfg.numerics.scan_step > lambda_min / 10.0 * (1.0 + 1e-12)) {
    throw ConfigError("numerics.scan_step", "must be <= lambda/10");
  }

  // The domain cap depends on the validated model.
  const WindowPolicy policy{cfg.numerics.burn_in, std::nullopt, std::nullopt};
  {
    const auto diag = check_model(cfg.spec, policy);
    if (!diag.errors.empty()) throw ConfigError("model.coefficients", diag.errors.front());
  }
  if (model.has("domain_cap")) {
    cfg.spec.incidence = cfg.spec.incidence.with_cap(model.positive("domain_cap", 1.0));
  } else {
    cfg.spec = with_default_cap(cfg.spec, policy);
  }
  norm_model["domain_cap"] = cfg.spec.incidence.cap();
  cfg.model = std::move(norm_model);

  if (root.has("initial_state")) {
    Section is(root.at("initial_state"), "initial_state");
    is.allow({"S", "E", "I", "R"});
    cfg.initial_state = State{0.0, is.nonnegative("S", 0.0), is.nonnegative("E", 0.0),
                              is.nonnegative("I", 0.0), is.nonnegative("R", 0.0)};
  } else {
    cfg.initial_state = canonical_initial_state(cfg.spec);
  }

  if (root.has("sweep")) {
    Section sw(root.at("sweep"), "sweep");
    sw.allow({"axis1", "axis2", "force_general_path"});
    cfg.axis1 = detail::parse_axis(sw.at("axis1"), "sweep.axis1");
    cfg.axis2 = detail::parse_axis(sw.at("axis2"), "sweep.axis2");
    if (sw.has("force_general_path")) {
      if (!sw.at("force_general_path").is_boolean()) {
        throw ConfigError("sweep.force_general_path", "expected a boolean");
      }
      cfg.force_general_path = sw.at("force_general_path").get<bool>();
    }
  }

  if (root.has("robustness")) {
    Section rb(root.at("robustness"), "robustness");
    rb.allow({"taus", "shapes"});
    if (rb.has("taus")) cfg.taus = rb.numbers("taus");
    if (rb.has("shapes")) {
      Section sh(rb.at("shapes"), "robustness.shapes");
      sh.allow({"Lambda", "mu", "beta", "eta", "epsilon", "gamma"});
      for (const char* name : detail::kCoefficientNames) {
        if (!sh.has(name)) continue;
        auto [f, norm] = detail::parse_time_function(sh.at(name), sh.child(name), name, false);
        cfg.shapes[name] = std::move(norm);
      }
    }
  }
  if (std::find(cfg.taus.begin(), cfg.taus.end(), 0.0) == cfg.taus.end()) {
    throw ConfigError("robustness.taus", "must include 0");
  }

  if (root.has("verify")) {
    Section v(root.at("verify"), "verify");
    v.allow({"samples"});
    const double samples = v.number("samples", 1000.0);
    if (samples < 100.0 || samples != std::floor(samples)) {
      throw ConfigError("verify.samples", "must be an integer >= 100");
    }
    cfg.verify_samples = static_cast<int>(samples);
  }

  if (root.has("output")) {
    Section o(root.at("output"), "output");
    o.allow({"dir", "thin"});
    if (o.has("dir")) cfg.output_dir = o.string("dir");
    const double thin = o.number("thin", 100.0);
    if (thin < 1.0 || thin != std::floor(thin)) throw ConfigError("output.thin", "must be an integer >= 1");
    cfg.thin = static_cast<int>(thin);
  }
  return cfg;
}

inline ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  return parse_document(doc);
}

inline json axis_json(const SweepAxisSpec& a) {
  return {{"name", a.name}, {"values", a.values}};
}

/// Normalized form: every default in effect is spelled out. Parsing the
/// normalized form yields the same configuration.
inline json normalize(const ExperimentConfig& cfg) {
  json j = json::object();
  j["command"] = to_string(cfg.command);
  j["model"] = cfg.model;
  const State& s = *cfg.initial_state;
  j["initial_state"] = {{"S", s.S}, {"E", s.E}, {"I", s.I}, {"R", s.R}};
  j["numerics"] = {{"step", cfg.numerics.step},         {"t_end", cfg.numerics.t_end},
                   {"burn_in", cfg.numerics.burn_in},   {"scan_length", cfg.numerics.scan_length},
                   {"scan_step", cfg.numerics.scan_step}, {"z0", cfg.numerics.z0}};
  j["threshold"] = {{"lambdas", cfg.lambdas}, {"p", cfg.p ? json(*cfg.p) : json(nullptr)}};
  if (cfg.axis1 && cfg.axis2) {
    j["sweep"] = {{"axis1", axis_json(*cfg.axis1)},
                  {"axis2", axis_json(*cfg.axis2)},
                  {"force_general_path", cfg.force_general_path}};
  }
  j["robustness"] = {{"taus", cfg.taus}, {"shapes", cfg.shapes}};
  j["verify"] = {{"samples", cfg.verify_samples}};
  j["output"] = {{"dir", cfg.output_dir}, {"thin", cfg.thin}};
  return j;
}

/// Expresses the configured model as a sweep template (periodic or
/// asymptotically periodic family with constant Λ, μ, η).
inline FamilyTemplate family_from_model(const ExperimentConfig& cfg) {
  const json& c = cfg.model.at("coefficients");
  FamilyTemplate f;
  f.incidence = cfg.spec.incidence;
  std::optional<double> period;
  const auto constant = [&](const char* name) {
    const json& j = c.at(name);
    if (j.at("kind") != "constant") throw ConfigError(std::string("model.coefficients.") + name, "sweeps need a constant coefficient");
    return j.at("value").get<double>();
  };
  const auto shaped = [&](const char* name, bool allow_asymptotic) -> std::pair<double, double> {
    const json& j = c.at(name);
    const std::string kind = j.at("kind");
    if (kind == "constant") return {j.at("value").get<double>(), 0.0};
    const bool ok = kind == "periodic_cosine" || (allow_asymptotic && kind == "asymptotic_periodic");
    if (!ok) throw ConfigError(std::string("model.coefficients.") + name, "kind not supported by sweeps");
    const double per = j.at("period").get<double>();
    if (period && *period != per) throw ConfigError(std::string("model.coefficients.") + name, "sweeps need a common period");
    period = per;
    if (kind == "asymptotic_periodic") {
      if (j.at("decay_rate").get<double>() != 1.0) {
        throw ConfigError(std::string("model.coefficients.") + name, "sweeps need decay_rate 1");
      }
      f.beta_form = BetaForm::AsymptoticPeriodic;
    }
    return {j.at("base").get<double>(), j.at("amp_frac").get<double>()};
  };
  f.Lambda = constant("Lambda");
  f.mu = constant("mu");
  f.eta = constant("eta");
  std::tie(f.beta, f.b) = shaped("beta", true);
  std::tie(f.epsilon, f.d) = shaped("epsilon", false);
  std::tie(f.gamma, f.k) = shaped("gamma", false);
  f.period = period.value_or(1.0);
  return f;
}

struct RunOptions {
  std::optional<std::string> out_dir;  // overrides output.dir
  unsigned threads = 1;
  bool force_general_path = false;
};

struct RunResult {
  int exit_code = 0;
  std::string message;
  std::vector<std::string> files;
};

namespace detail {

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline const char* clause_or_none(const ThresholdReport& r) {
  Clause c = satisfied_clause(r, SearchMode::Extinction);
  if (c == Clause::None) c = satisfied_clause(r, SearchMode::Persistence);
  return seirs::to_string(c);
}

inline void write_trajectory(const std::string& path, const Trajectory& traj) {
  const bool with_w = traj.p_diag.has_value();
  csv::Writer w(path, with_w ? "t,S,E,I,R,N,W" : "t,S,E,I,R,N");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const State& s = traj.states[i];
    if (with_w) {
      w.row({traj.times[i], s.S, s.E, s.I, s.R, s.N(), traj.w_values[i]});
    } else {
      w.row({traj.times[i], s.S, s.E, s.I, s.R, s.N()});
    }
  }
  w.close();
}

inline std::vector<std::string> run_simulate(const ExperimentConfig& cfg, const std::string& dir) {
  IntegrationOptions opt;
  opt.step = cfg.numerics.step;
  opt.record_every = static_cast<std::size_t>(cfg.thin);
  opt.w_p = cfg.p;
  const Trajectory traj = integrate(cfg.spec, *cfg.initial_state, cfg.numerics.t_end, opt);
  const std::string path = dir + "/trajectory.csv";
  write_trajectory(path, traj);
  return {path};
}

inline std::vector<std::string> run_thresholds(const ExperimentConfig& cfg, const std::string& dir) {
  const std::string report_path = dir + "/report.csv";
  const std::string closed_path = dir + "/closed_forms.csv";
  csv::Writer rep(report_path, "lambda,p,logRe,logRp,logRe*,logRp*,G,H,verdict_clause");
  csv::Writer closed(closed_path, "quantity,lambda,value");

  const ModelSpec& m = cfg.spec;
  const bool const_lm = m.Lambda.is_constant() && m.mu.is_constant();
  for (const double lambda : cfg.lambdas) {
    const ThresholdConfig tc = cfg.threshold_config(lambda);
    const ThresholdProfile prof(m, tc);
    ThresholdReport r;
    if (cfg.p) {
      r = prof.report(*cfg.p);
    } else {
      std::optional<PSearchResult> hit = search_p(m, prof, SearchMode::Extinction);
      if (!hit) hit = search_p(m, prof, SearchMode::Persistence);
      r = hit ? hit->report : prof.report(p_bracket(m, prof).lower);
    }
    rep.row({lambda, r.config.p, r.log_R_e, r.log_R_p, r.log_R_e_star, r.log_R_p_star, r.G, r.H,
             clause_or_none(r)});

    if (const_lm && contact_rate_of(m.incidence)) {
      const auto mm = mm_bounds(m, lambda, tc.window_policy());
      closed.row({"R_e_M", lambda, mm.R_e_M});
      closed.row({"R_p_M", lambda, mm.R_p_M});
    }
  }
  bool all_const = true;
  for (const auto* f : {&m.Lambda, &m.mu, &m.beta, &m.eta, &m.epsilon, &m.gamma}) {
    all_const = all_const && f->is_constant();
  }
  if (all_const) {
    closed.row({"R_A", "", autonomous_RA(m)});
  } else if (const_lm) {
    std::optional<double> period;
    bool periodic = true;
    for (const auto* f : {&m.beta, &m.eta, &m.epsilon, &m.gamma}) {
      if (f->is_constant()) continue;
      const auto per = f->declared_period();
      if (!per || (period && *period != *per)) periodic = false;
      period = per;
    }
    if (periodic && period) closed.row({"R_per", "", periodic_Rper(m, *period, cfg.numerics.burn_in)});
  }
  rep.close();
  closed.close();
  return {report_path, closed_path};
}

inline std::vector<std::string> run_sweep(const ExperimentConfig& cfg, const std::string& dir,
                                          const RunOptions& ro) {
  if (!cfg.axis1 || !cfg.axis2) throw ConfigError("sweep", "section required for the sweep command");
  const FamilyTemplate base = family_from_model(cfg);
  SweepOptions opt;
  opt.lambdas = cfg.lambdas;
  opt.force_general_path = cfg.force_general_path || ro.force_general_path;
  opt.threads = ro.threads;
  opt.threshold = cfg.threshold_config(cfg.lambdas.front());
  const RegionGrid grid = sweep(base, {cfg.axis1->name, cfg.axis1->values},
                                {cfg.axis2->name, cfg.axis2->values}, opt);
  const std::string path = dir + "/region.csv";
  csv::Writer w(path, "axis1,axis2,outcome,clause,p,lambda");
  for (std::size_t i = 0; i < grid.axis1.values.size(); ++i) {
    for (std::size_t j = 0; j < grid.axis2.values.size(); ++j) {
      const RegionCell& c = grid.at(i, j);
      if (c.witness) {
        w.row({grid.axis1.values[i], grid.axis2.values[j], to_string(c.outcome), seirs::to_string(c.clause),
               c.witness->p, c.witness->lambda});
      } else {
        w.row({grid.axis1.values[i], grid.axis2.values[j], to_string(c.outcome), seirs::to_string(c.clause),
               "", ""});
      }
    }
  }
  w.close();
  return {path};
}

inline std::vector<std::string> run_robustness(const ExperimentConfig& cfg, const std::string& dir) {
  Perturbation pert;
  for (const auto& [name, shape] : cfg.shapes.items()) {
    auto f = parse_time_function(shape, "robustness.shapes." + name, name, false).first;
    if (name == "beta") pert.beta = f;
    else if (name == "eta") pert.eta = f;
    else if (name == "epsilon") pert.epsilon = f;
    else if (name == "gamma") pert.gamma = f;
    else if (name == "Lambda") pert.Lambda = f;
    else if (name == "mu") pert.mu = f;
  }
  ThresholdConfig tc = cfg.threshold_config(cfg.lambdas.front());
  if (!cfg.p) {
    const Verdict v = classify(cfg.spec, cfg.lambdas, tc);
    tc.p = v.witness ? v.witness->p : v.report.config.p;
    if (v.witness) tc.lambda = v.witness->lambda;
  }
  const RobustnessResult res = robustness_scan(cfg.spec, pert, cfg.taus, tc);
  const std::string path = dir + "/robustness.csv";
  csv::Writer w(path, "tau,dG,dH,dRe,dRp,dRe*,dRp*,theta");
  for (const auto& r : res.rows) {
    if (!r.error.empty()) throw NumericalError("robustness at tau=" + csv::format(r.tau) + ": " + r.error);
    w.row({r.tau, r.dG, r.dH, r.dRe, r.dRp, r.dRe_star, r.dRp_star, r.theta});
  }
  w.close();
  return {path};
}

inline std::vector<std::string> run_verify(const ExperimentConfig& cfg, const std::string& dir) {
  const HypothesisReport rep = verify_hypotheses(cfg.spec.incidence, cfg.verify_samples);
  const std::string path = dir + "/hypotheses.csv";
  csv::Writer w(path, "check,pass,value");
  w.row({"h1_monotone_n", rep.h1_monotone_n.pass, rep.h1_monotone_n.worst});
  w.row({"h1_monotone_x", rep.h1_monotone_x.pass, rep.h1_monotone_x.worst});
  w.row({"h1_vanishing", rep.h1_vanishing.pass, rep.h1_vanishing.worst});
  w.row({"h2_uniform_limit", rep.h2_uniform_limit.pass, rep.h2_uniform_limit.worst});
  w.row({"h3_ratio_nonincreasing", rep.h3_ratio_nonincreasing.pass, rep.h3_ratio_nonincreasing.worst});
  for (const auto& l : rep.h4_lipschitz) {
    w.row({"h4_lipschitz_theta=" + csv::format(l.theta), l.pass, l.estimate});
  }
  w.row({"slope_bound", true, rep.slope_bound});
  w.close();
  return {path};
}

}  // namespace detail

/// Runs one experiment. Exit codes: 0 success, 2 configuration error,
/// 3 numerical failure. On failure the files written so far are removed.
inline RunResult run(const ExperimentConfig& cfg, const RunOptions& ro = {}) {
  namespace fs = std::filesystem;
  RunResult result;
  const std::string dir = ro.out_dir.value_or(cfg.output_dir);
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = detail::utc_timestamp();
  try {
    fs::create_directories(dir);
    switch (cfg.command) {
      case Command::Simulate: result.files = detail::run_simulate(cfg, dir); break;
      case Command::Thresholds: result.files = detail::run_thresholds(cfg, dir); break;
      case Command::Sweep: result.files = detail::run_sweep(cfg, dir, ro); break;
      case Command::Robustness: result.files = detail::run_robustness(cfg, dir); break;
      case Command::Verify: result.files = detail::run_verify(cfg, dir); break;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json manifest = json::object();
    manifest["tool"] = "seirs";
    manifest["version"] = kToolVersion;
    manifest["command"] = to_string(cfg.command);
    manifest["started_utc"] = started_utc;
    manifest["wall_clock_seconds"] = elapsed;
    manifest["flags"] = {{"threads", ro.threads},
                         {"force_general_path", ro.force_general_path || cfg.force_general_path},
                         {"experimental", cfg.command == Command::Robustness &&
                                              (cfg.shapes.contains("Lambda") || cfg.shapes.contains("mu"))}};
    manifest["config"] = normalize(cfg);
    json outputs = json::array();
    for (const auto& f : result.files) outputs.push_back(fs::path(f).filename().string());
    manifest["outputs"] = outputs;
    const std::string mpath = dir + "/manifest.json";
    std::ofstream(mpath, std::ios::binary) << manifest.dump(2) << '\n';
    result.files.push_back(mpath);
  } catch (const ConfigError& e) {
    result.exit_code = 2;
    result.message = e.what();
  } catch (const std::exception& e) {
    result.exit_code = 3;
    result.message = e.what();
  }
  if (result.exit_code != 0) {
    for (const char* name : {"trajectory.csv", "report.csv", "closed_forms.csv", "region.csv",
                             "robustness.csv", "hypotheses.csv", "manifest.json"}) {
      std::error_code ec;
      fs::remove(fs::path(dir) / name, ec);
    }
    result.files.clear();
  }
  return result;
}

}  // namespace seirs::cli
