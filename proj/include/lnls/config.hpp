#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lnls/dynamics.hpp"
#include "lnls/error.hpp"
#include "lnls/estimates.hpp"
#include "lnls/harness.hpp"
#include "lnls/inequalities.hpp"
#include "lnls/io.hpp"
#include "lnls/reference.hpp"
#include "lnls/sampler.hpp"

// JSON run configurations. Every problem is reported as ConfigError naming the
// offending field (or line and column for syntax errors).
namespace lnls {

using nlohmann::json;

inline json parse_config_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what());
  }
}

inline json load_config_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// Typed access into a JSON object with the dotted path kept for diagnostics.
class Field {
 public:
  Field(const json& node, std::string path) : node_(&node), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *node_; }
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError("field '" + path_ + "': " + what); }

  bool has(const std::string& key) const { return node_->is_object() && node_->contains(key); }

  Field operator[](const std::string& key) const {
    if (!node_->is_object()) fail("expected an object");
    if (!node_->contains(key)) throw ConfigError("field '" + child(key) + "': required field missing");
    return {node_->at(key), child(key)};
  }
  Field operator[](std::size_t i) const {
    if (!node_->is_array() || i >= node_->size()) fail("index " + std::to_string(i) + " out of range");
    return {(*node_)[i], path_ + "[" + std::to_string(i) + "]"};
  }
  std::size_t size() const {
    if (!node_->is_array()) fail("expected an array");
    return node_->size();
  }

  /// A number; the strings "inf" and "pi/<n>" are also accepted.
  double number() const {
    if (node_->is_number()) return node_->get<double>();
    if (node_->is_string()) {
      const auto s = node_->get<std::string>();
      if (s == "inf" || s == "infinity") return kInfinity;
      if (s.rfind("pi/", 0) == 0) {
        try {
          return std::numbers::pi / std::stod(s.substr(3));
        } catch (const std::exception&) {
        }
      }
      if (s == "pi") return std::numbers::pi;
    }
    fail("expected a number, got " + node_->dump());
  }
  int integer() const {
    const double x = number();
    if (x != std::floor(x) || std::abs(x) > 1e9) fail("expected an integer, got " + node_->dump());
    return static_cast<int>(x);
  }
  bool boolean() const {
    if (!node_->is_boolean()) fail("expected true or false, got " + node_->dump());
    return node_->get<bool>();
  }
  std::string string() const {
    if (!node_->is_string()) fail("expected a string, got " + node_->dump());
    return node_->get<std::string>();
  }
  std::vector<double> numbers() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i].number());
    return out;
  }

  double number_or(const std::string& key, double fallback) const { return has(key) ? (*this)[key].number() : fallback; }
  int integer_or(const std::string& key, int fallback) const { return has(key) ? (*this)[key].integer() : fallback; }
  bool boolean_or(const std::string& key, bool fallback) const { return has(key) ? (*this)[key].boolean() : fallback; }
  std::string string_or(const std::string& key, std::string fallback) const {
    return has(key) ? (*this)[key].string() : std::move(fallback);
  }

 private:
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const json* node_;
  std::string path_;
};

/// Runs fn and rewraps library precondition failures as ConfigError for `field`.
template <class F>
auto checked(const Field& field, F&& fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    field.fail(e.what());
  }
}

struct RunSettings {
  std::string command;
  std::uint64_t seed = 1;
  int threads = 0;  ///< 0 means all cores
};

inline RunSettings read_settings(const json& doc) {
  const Field root(doc, "");
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  if (!root.has("schema_version")) throw ConfigError("field 'schema_version': required field missing");
  const int version = root["schema_version"].integer();
  if (version != kSchemaVersion)
    root["schema_version"].fail("unsupported version " + std::to_string(version) + " (expected " + std::to_string(kSchemaVersion) + ")");
  RunSettings s;
  s.command = root["command"].string();
  const double seed = root.number_or("seed", 1.0);
  if (seed < 0 || seed != std::floor(seed)) root["seed"].fail("expected a nonnegative integer");
  s.seed = static_cast<std::uint64_t>(seed);
  s.threads = root.integer_or("threads", 0);
  if (s.threads < 0) root["threads"].fail("expected >= 0");
  return s;
}

inline NlsParams read_params(const Field& f) {
  NlsParams p;
  p.p = f.number_or("p", 3.0);
  p.lambda = f.integer_or("lambda", 1);
  p.free = f.boolean_or("free", false);
  checked(f, [&] {
    p.validate();
    return 0;
  });
  return p;
}

inline MultiIndex read_index(const Field& f, int dim) {
  if (f.size() != static_cast<std::size_t>(dim)) f.fail("expected " + std::to_string(dim) + " integers");
  return {f[0].integer(), dim == 2 ? f[1].integer() : 0};
}

/// {"kind": "plane_wave" | "gaussian" | "random_modes", "dim": 1|2, ...}
inline Sampler read_profile(const Field& f, std::uint64_t seed) {
  const std::string kind = f["kind"].string();
  const int dim = f["dim"].integer();
  if (dim != 1 && dim != 2) f["dim"].fail("expected 1 or 2");
  return checked(f, [&]() -> Sampler {
    if (kind == "plane_wave") {
      const MultiIndex k = read_index(f["k"], dim);
      return plane_wave(dim, k, f.number_or("amplitude", 1.0));
    }
    if (kind == "gaussian") {
      Point center{0.0, 0.0};
      if (f.has("center")) {
        const auto c = f["center"].numbers();
        if (c.size() != static_cast<std::size_t>(dim)) f["center"].fail("expected " + std::to_string(dim) + " numbers");
        center = {c[0], dim == 2 ? c[1] : 0.0};
      }
      const MultiIndex carrier = f.has("carrier") ? read_index(f["carrier"], dim) : MultiIndex{0, 0};
      const double width = f["width"].number();
      if (!(width > 0.0)) f["width"].fail("expected > 0");
      return wrapped_gaussian(dim, center, width, f.number_or("amplitude", 1.0), carrier);
    }
    if (kind == "random_modes") {
      const int count = f.integer_or("count", 8);
      const int maxfreq = f.integer_or("max_frequency", 4);
      if (count < 1) f["count"].fail("expected >= 1");
      if (maxfreq < 1) f["max_frequency"].fail("expected >= 1");
      return random_modes(dim, count, maxfreq, seed, f.number_or("h1_norm", 1.0));
    }
    f["kind"].fail("unknown profile '" + kind + "' (expected plane_wave, gaussian or random_modes)");
  });
}

/// Spacings from "h_list" (numbers or "pi/<n>") or "h_levels": [first, last] meaning pi/2^k.
inline std::vector<double> read_h_list(const Field& f) {
  std::vector<double> h;
  if (f.has("h_list")) {
    h = f["h_list"].numbers();
  } else if (f.has("h_levels")) {
    const Field lv = f["h_levels"];
    if (lv.size() != 2) lv.fail("expected [first, last]");
    const int a = lv[0].integer(), b = lv[1].integer();
    if (a < 0 || b < a || b > 14) lv.fail("expected 0 <= first <= last <= 14");
    h = dyadic_spacings(a, b);
  } else {
    h = dyadic_spacings(3, 7);
  }
  const Field where = f.has("h_list") ? f["h_list"] : f;
  checked(where, [&] {
    validate_h_list(h);
    return 0;
  });
  return h;
}

// ---------------------------------------------------------------------------
// Per-command configurations

struct SimulateConfig {
  NlsParams params;
  Sampler u0;
  int half_size = 32;
  EvolutionConfig evolution;
};

inline SimulateConfig read_simulate(const json& doc, const RunSettings& s) {
  const Field root(doc, "");
  SimulateConfig c;
  c.params = read_params(root["params"]);
  c.u0 = read_profile(root["initial_data"], s.seed);
  const Field lat = root["lattice"];
  c.half_size = lat.has("h") ? checked(lat["h"], [&] { return half_size_for_spacing(lat["h"].number()); }) : lat["M"].integer();
  checked(lat, [&] { return Lattice(c.u0->dim(), c.half_size).size(); });
  const Field ev = root["evolution"];
  c.evolution.dt = ev["dt"].number();
  c.evolution.t_final = ev["t_final"].number();
  c.evolution.integrator = checked(ev, [&] { return integrator_from_string(ev.string_or("integrator", "strang")); });
  c.evolution.record_stride = ev.integer_or("record_stride", 1);
  checked(ev, [&] {
    c.evolution.validate();
    return 0;
  });
  return c;
}

struct ConvergeConfig {
  ConvergenceStudy study;
  bool decompose = false;
};

inline ConvergeConfig read_converge(const json& doc, const RunSettings& s) {
  const Field root(doc, "");
  ConvergeConfig c;
  c.study.params = read_params(root["params"]);
  c.study.u0 = read_profile(root["initial_data"], s.seed);
  const Field st = root["study"];
  c.study.h_list = read_h_list(st);
  if (st.has("times")) c.study.times = st["times"].numbers();
  c.study.dt = st.number_or("dt", c.study.dt);
  c.study.integrator = checked(st, [&] { return integrator_from_string(st.string_or("integrator", "strang")); });
  c.study.oversample = st.integer_or("oversample", c.study.oversample);
  if (st.has("reference")) {
    const Field ref = st["reference"];
    const int res = ref.integer_or("resolution", static_cast<int>(c.study.reference.resolution));
    if (res < 8) ref["resolution"].fail("expected a power of two >= 8");
    c.study.reference.resolution = static_cast<std::size_t>(res);
    c.study.reference.dt = ref.number_or("dt", c.study.reference.dt);
    c.study.reference.self_convergence_tol = ref.number_or("self_convergence_tol", c.study.reference.self_convergence_tol);
  }
  c.study.threads = s.threads > 0 ? s.threads : default_threads();
  c.decompose = st.boolean_or("decompose", false);
  checked(st, [&] {
    c.study.validate();
    return 0;
  });
  return c;
}

struct StrichartzConfig {
  std::vector<AdmissiblePair> pairs;
  double epsilon = 0.1;
  std::vector<double> h_list;
  int t_quadrature = 257;
  std::vector<Sampler> profiles;
};

inline StrichartzConfig read_strichartz(const json& doc, const RunSettings& s) {
  const Field root(doc, "");
  const Field st = root["strichartz"];
  StrichartzConfig c;
  const int dim = st.integer_or("d", 2);
  const Field pairs = st["pairs"];
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Field pr = pairs[i];
    if (pr.size() != 2) pr.fail("expected [q, r]");
    c.pairs.push_back(checked(pr, [&] { return AdmissiblePair(pr[0].number(), pr[1].number(), dim); }));
  }
  if (c.pairs.empty()) pairs.fail("at least one pair required");
  c.epsilon = st.number_or("epsilon", 0.1);
  if (!(c.epsilon > 0.0)) st["epsilon"].fail("expected > 0");
  c.h_list = read_h_list(st);
  c.t_quadrature = st.integer_or("t_quadrature", 257);
  if (c.t_quadrature < 3 || c.t_quadrature % 2 == 0) st["t_quadrature"].fail("expected an odd count >= 3");
  const Field profiles = st["profiles"];
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    auto p = read_profile(profiles[i], s.seed + i);
    if (p->dim() != dim) profiles[i]["dim"].fail("profile dimension differs from d");
    c.profiles.push_back(std::move(p));
  }
  return c;
}

struct DispersiveConfig {
  std::vector<int> dims = {1, 2};
  std::vector<double> h_list;
  double c = 0.1;
  int t_samples = 64;
};

inline DispersiveConfig read_dispersive(const json& doc) {
  const Field st = Field(doc, "")["dispersive"];
  DispersiveConfig c;
  if (st.has("d")) {
    c.dims.clear();
    const Field d = st["d"];
    for (std::size_t i = 0; i < d.size(); ++i) {
      const int v = d[i].integer();
      if (v != 1 && v != 2) d[i].fail("expected 1 or 2");
      c.dims.push_back(v);
    }
  }
  c.h_list = read_h_list(st);
  c.c = st.number_or("c", 0.1);
  if (!(c.c > 0.0 && c.c < 0.5)) st["c"].fail("expected 0 < c < 1/2 (phase-derivative window)");
  c.t_samples = st.integer_or("t_samples", 64);
  if (c.t_samples < 1) st["t_samples"].fail("expected >= 1");
  return c;
}

struct InequalitiesConfig {
  std::vector<InequalityKind> kinds = {InequalityKind::bernstein, InequalityKind::sobolev, InequalityKind::gagliardo_nirenberg};
  int dim = 2;
  std::vector<double> h_list;
  InequalityParams params;
};

inline InequalitiesConfig read_inequalities(const json& doc) {
  const Field st = Field(doc, "")["inequalities"];
  InequalitiesConfig c;
  if (st.has("kinds")) {
    c.kinds.clear();
    const Field k = st["kinds"];
    for (std::size_t i = 0; i < k.size(); ++i) c.kinds.push_back(checked(k[i], [&] { return inequality_from_string(k[i].string()); }));
  }
  c.dim = st.integer_or("d", 2);
  if (c.dim != 1 && c.dim != 2) st["d"].fail("expected 1 or 2");
  c.h_list = read_h_list(st);
  c.params.s = st.number_or("s", c.params.s);
  c.params.epsilon = st.number_or("epsilon", c.params.epsilon);
  c.params.theta = st.number_or("theta", c.params.theta);
  c.params.bernstein_s = st.number_or("bernstein_s", c.params.bernstein_s);
  // Check the hypotheses up front on a tiny lattice.
  for (auto kind : c.kinds)
    checked(st, [&] { return inequality_sweep(kind, {{"probe", GridFunction(Lattice(c.dim, 2))}}, c.params).size(); });
  return c;
}

struct ConserveConfig {
  NlsParams params;
  Sampler u0;
  int half_size = 16;
  double dt = 0.01;
  double t_final = 1.0;
  int steps_check = 10000;  ///< steps for the mass-drift measurement
  double mass_step = 1e-3;
};

inline ConserveConfig read_conserve(const json& doc, const RunSettings& s) {
  const Field root(doc, "");
  ConserveConfig c;
  c.params = read_params(root["params"]);
  c.u0 = read_profile(root["initial_data"], s.seed);
  const Field lat = root["lattice"];
  c.half_size = lat.has("h") ? checked(lat["h"], [&] { return half_size_for_spacing(lat["h"].number()); }) : lat["M"].integer();
  checked(lat, [&] { return Lattice(c.u0->dim(), c.half_size).size(); });
  const Field cf = root["conserve"];
  c.dt = cf.number_or("dt", c.dt);
  c.t_final = cf.number_or("t_final", c.t_final);
  c.steps_check = cf.integer_or("mass_steps", c.steps_check);
  c.mass_step = cf.number_or("mass_dt", c.mass_step);
  if (!(c.dt > 0.0) || !(c.t_final > 0.0) || !(c.mass_step > 0.0) || c.steps_check < 1)
    cf.fail("dt, t_final, mass_dt must be > 0 and mass_steps >= 1");
  return c;
}

}  // namespace lnls
