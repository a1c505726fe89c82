#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "ttl/controller.hpp"
#include "ttl/csv.hpp"
#include "ttl/errors.hpp"
#include "ttl/guidance.hpp"
#include "ttl/rnn_io.hpp"
#include "ttl/simulation.hpp"
#include "ttl/training.hpp"

namespace ttl {

/// Flat `key = value` text; `#` starts a comment, blank lines are ignored.
class Config {
 public:
  static Config parse(const std::string& text) {
    Config c;
    int line_no = 0;
    for (const auto& raw : csv::lines(text + "\n")) {
      ++line_no;
      std::string line = raw.substr(0, raw.find('#'));
      const auto eq = line.find('=');
      if (trim(line).empty()) continue;
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
      c.values_[key] = trim(line.substr(eq + 1));
    }
    return c;
  }

  static Config load(const std::string& path) {
    Config c = parse(csv::read_file(path));
    c.dir_ = std::filesystem::path(path).parent_path();
    return c;
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double number(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return csv::parse_double(it->second);
    } catch (const ConfigError&) {
      throw ConfigError("config: '" + key + "' is not a number");
    }
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  /// Seed from `seed`, overridden by the TTL_SEED environment variable.
  std::uint64_t seed(std::uint64_t fallback = 1) const {
    if (const char* env = std::getenv("TTL_SEED"); env && *env) {
      char* end = nullptr;
      const auto v = std::strtoull(env, &end, 10);
      if (*end != '\0') throw ConfigError("TTL_SEED is not an unsigned integer");
      return v;
    }
    return static_cast<std::uint64_t>(number("seed", static_cast<double>(fallback)));
  }

  /// Resolves a path relative to the config file's directory.
  std::string path(const std::string& p) const {
    const std::filesystem::path fp(p);
    return fp.is_absolute() || dir_.empty() ? p : (dir_ / fp).string();
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
  std::filesystem::path dir_;
};

inline VehicleParams vehicle_from(const Config& c) {
  VehicleParams vp;
  vp.mass = c.number("mass", vp.mass);
  vp.inertia = c.number("inertia", vp.inertia);
  vp.gravity = c.number("gravity", vp.gravity);
  vp.aero.k = c.number("k_aero", vp.aero.k);
  vp.aero.cd0 = c.number("cd0", vp.aero.cd0);
  vp.validate();
  return vp;
}

inline OuterGains outer_gains_from(const Config& c) {
  OuterGains g;
  g.k1 = c.number("k1", g.k1);
  g.k2 = c.number("k2", g.k2);
  g.validate();
  return g;
}

/// k3/k4 without validation, so non-Hurwitz gains can be inspected.
inline InnerGains inner_gains_from(const Config& c) {
  InnerGains g;
  g.k3 = c.number("k3", g.k3);
  g.k4 = c.number("k4", g.k4);
  return g;
}

inline ShapingConstants shaping_from(const Config& c) {
  ShapingConstants s;
  s.m_u = c.number("M_u", s.m_u);
  s.l_u = c.number("L_u", s.l_u);
  s.m_alpha = c.number("M_alpha", s.m_alpha);
  s.l_alpha = c.number("L_alpha", s.l_alpha);
  s.validate();
  return s;
}

/// Keys: seed, n_samples, dt, hold_min, hold_max and per-channel bounds
/// input_min_u / input_max_u / input_min_w / input_max_w.
inline ExcitationConfig excitation_from(const Config& c, Channel ch) {
  ExcitationConfig e = ExcitationConfig::for_channel(ch);
  e.seed = c.seed(e.seed);
  const double n = c.number("n_samples", static_cast<double>(e.n_samples));
  if (!(n >= 1.0)) throw ConfigError("config: n_samples must be >= 1");
  e.n_samples = static_cast<std::size_t>(n);
  e.dt = c.number("dt", e.dt);
  e.hold_min = c.number("hold_min", e.hold_min);
  e.hold_max = c.number("hold_max", e.hold_max);
  const std::string sfx = ch == Channel::U ? "_u" : "_w";
  e.input_min = c.number("input_min" + sfx, e.input_min);
  e.input_max = c.number("input_max" + sfx, e.input_max);
  e.validate();
  return e;
}

/// Keys: epochs, lr, clip, positivity_floor.
inline TrainOptions train_options_from(const Config& c) {
  TrainOptions o;
  const double epochs = c.number("epochs", static_cast<double>(o.epochs));
  if (!(epochs >= 0.0)) throw ConfigError("config: epochs must be >= 0");
  o.epochs = static_cast<std::size_t>(epochs);
  o.learning_rate = c.number("lr", o.learning_rate);
  o.clip = c.number("clip", o.clip);
  o.positivity_floor = c.number("positivity_floor", o.positivity_floor);
  if (!(o.learning_rate > 0.0) || !(o.clip > 0.0))
    throw ConfigError("config: lr and clip must be > 0");
  return o;
}

/// Scenario keys: mode (hc|ch), u0, w0, theta0, q0, t_end, sim_dt,
/// thrust_max, weights_u, weights_w ("oracle" or snapshot paths), plus the
/// vehicle, gain and shaping keys. Missing initial values default to the
/// mode's standard start.
inline ScenarioConfig scenario_from(const Config& c, bool force_oracle = false) {
  const TransitionMode mode = mode_from_string(c.text("mode", "hc"));
  ScenarioConfig s = mode == TransitionMode::HoverToCruise ? ScenarioConfig::hover_to_cruise()
                                                           : ScenarioConfig::cruise_to_hover();
  s.initial.u0 = c.number("u0", s.initial.u0);
  s.initial.w0 = c.number("w0", s.initial.w0);
  s.initial.theta0 = c.number("theta0", s.initial.theta0);
  s.initial.q0 = c.number("q0", s.initial.q0);
  s.t_end = c.number("t_end", s.t_end);
  s.dt = c.number("sim_dt", s.dt);
  s.vehicle = vehicle_from(c);
  s.outer = outer_gains_from(c);
  s.inner = inner_gains_from(c);
  s.thrust_limits.max = c.number("thrust_max", s.thrust_limits.max);
  s.shaping = shaping_from(c);
  s.seed = c.seed(s.seed);

  const std::string wu = c.text("weights_u", "oracle");
  const std::string ww = c.text("weights_w", "oracle");
  if (!force_oracle && (wu != "oracle" || ww != "oracle")) {
    if (wu == "oracle" || ww == "oracle")
      throw ConfigError("scenario: weights_u and weights_w must both be paths or both 'oracle'");
    s.estimators = EstimatorPair{load_weights(c.path(wu)), load_weights(c.path(ww))};
  }
  s.validate();
  return s;
}

}  // namespace ttl
